// Special functions and distribution CDFs backing the hypothesis tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "innonet/core.hpp"
#include "innonet/stats/quadrature.hpp"

namespace innonet::stats {

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

namespace detail {

// Modified Lentz evaluation of the incomplete-beta continued fraction.
inline double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw AnalysisError("incomplete beta continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double reg_incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0) || !std::isfinite(a) || !std::isfinite(b))
    throw AnalysisError("reg_incomplete_beta: a and b must be positive and finite");
  if (!(x >= 0.0 && x <= 1.0)) throw AnalysisError("reg_incomplete_beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::clamp(front * detail::beta_cf(a, b, x) / a, 0.0, 1.0);
  return std::clamp(1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b, 0.0, 1.0);
}

/// Regularized upper incomplete gamma Q(a, x).
inline double reg_upper_gamma(double a, double x) {
  if (!(a > 0) || !(x >= 0)) throw AnalysisError("reg_upper_gamma: domain error");
  if (x == 0.0) return 1.0;
  const double log_front = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 100000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return std::clamp(1.0 - sum * std::exp(log_front), 0.0, 1.0);
  }
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::clamp(std::exp(log_front) * h, 0.0, 1.0);
}

/// Two-sided p-value of Student's t with `df` degrees of freedom.
inline double t_two_sided_p(double t, double df) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  return reg_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

/// Student's t CDF.
inline double t_cdf(double t, double df) {
  const double tail = 0.5 * t_two_sided_p(t, df);
  return t >= 0 ? 1.0 - tail : tail;
}

/// Upper tail P(F > f) for the F(df1, df2) distribution.
inline double f_upper_p(double f, double df1, double df2) {
  if (std::isinf(f)) return 0.0;
  if (!(f > 0)) return 1.0;
  return reg_incomplete_beta(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * f));
}

inline double chi2_upper_p(double x, double df) { return x <= 0 ? 1.0 : reg_upper_gamma(0.5 * df, 0.5 * x); }

namespace detail {

/// P(range of k iid standard normals <= w).
inline double normal_range_cdf(double w, int k) {
  if (w <= 0) return 0.0;
  const auto integrand = [w, k](double z) {
    const double inner = std_normal_cdf(z) - std_normal_cdf(z - w);
    return inner <= 0 ? 0.0 : std_normal_pdf(z) * std::pow(inner, k - 1);
  };
  // The integrand is symmetric about w/2 and negligible beyond |z| > 8.5.
  const double lo = -8.5, hi = std::min(8.5, w + 8.5), mid = std::clamp(0.5 * w, lo, hi);
  const double v = k * (integrate(integrand, lo, mid, 1e-13) + integrate(integrand, mid, hi, 1e-13));
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace detail

/// CDF of the studentized range statistic for `k` groups and `df` error
/// degrees of freedom (`df` may be +infinity).
inline double studentized_range_cdf(double q, int k, double df) {
  if (k < 2) throw AnalysisError("studentized_range_cdf: k must be at least 2");
  if (!(df >= 1)) throw AnalysisError("studentized_range_cdf: df must be at least 1");
  if (!(q > 0)) return 0.0;
  if (std::isinf(q)) return 1.0;
  if (std::isinf(df) || df > 1e7) return detail::normal_range_cdf(q, k);

  // s = sqrt(chi2_df / df); log-density up to the normalizing constant below.
  const double log_norm = 0.5 * df * std::log(df) - std::lgamma(0.5 * df) - (0.5 * df - 1.0) * std::numbers::ln2;
  const auto log_density = [&](double s) { return log_norm + (df - 1.0) * std::log(s) - 0.5 * df * s * s; };
  const double mode = df > 1 ? std::sqrt((df - 1.0) / df) : 0.0;
  const double peak = df > 1 ? log_density(mode) : log_norm;
  constexpr double drop = 50.0;

  double lo = 0.0;
  if (mode > 0 && log_density(1e-300) < peak - drop) {
    double a = 1e-300, b = mode;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (a + b);
      (log_density(m) < peak - drop ? a : b) = m;
    }
    lo = a;
  }
  double hi = std::max(mode, 1.0);
  while (log_density(hi) > peak - drop) hi *= 1.5;

  const auto integrand = [&](double s) {
    if (s <= 0) return 0.0;
    return std::exp(log_density(s)) * detail::normal_range_cdf(q * s, k);
  };
  double v = 0.0;
  if (mode > lo) v += integrate(integrand, lo, mode, 1e-11);
  v += integrate(integrand, std::max(lo, mode), hi, 1e-11);
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace innonet::stats
