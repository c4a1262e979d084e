// Binary logistic regression by Newton-Raphson (IRLS) with fit diagnostics.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "innonet/core.hpp"
#include "innonet/stats/linalg.hpp"
#include "innonet/stats/special.hpp"

namespace innonet::stats {

/// Raised on complete or quasi-complete separation, where maximum-likelihood
/// estimates do not exist.
struct SeparationError : AnalysisError {
  explicit SeparationError(const std::string& what) : AnalysisError("separation: " + what) {}
};

struct LogitOptions {
  int max_iterations = 50;
  double score_tol = 1e-8;
  double rel_ll_tol = 1e-12;
  // A fitted weight p(1-p) below this marks an observation as numerically
  // perfectly predicted.
  double separation_weight = 1e-10;
};

struct LogitFit {
  std::vector<double> coefficients;  // intercept first when X carries one
  std::vector<double> std_errors;
  std::vector<double> wald_z;
  std::vector<double> p_values;
  double log_likelihood = 0;
  double null_log_likelihood = 0;
  double mcfadden_r2 = 0;
  double aic = 0;
  double bic = 0;
  double lr_statistic = 0;
  double lr_p_value = 1;
  std::size_t n = 0;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

inline double log1p_exp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct NewtonResult {
  std::vector<double> beta;
  Matrix info;
  double ll = 0;
  bool converged = false;
  int iterations = 0;
};

inline double log_likelihood(const Matrix& x, std::span<const double> y, const std::vector<double>& beta) {
  double ll = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double eta = 0;
    for (std::size_t j = 0; j < x.cols(); ++j) eta += x(i, j) * beta[j];
    ll += y[i] * eta - log1p_exp(eta);
  }
  return ll;
}

inline NewtonResult newton(const Matrix& x, std::span<const double> y, const LogitOptions& opt) {
  const std::size_t n = x.rows(), k = x.cols();
  NewtonResult r;
  r.beta.assign(k, 0.0);
  double ll = log_likelihood(x, y, r.beta);
  bool ll_settled = false;
  std::vector<double> score(k);
  for (int it = 0;; ++it) {
    // Score and observed information at the current estimate.
    std::fill(score.begin(), score.end(), 0.0);
    r.info = Matrix(k, k);
    std::size_t saturated = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = x.row(i);
      double eta = 0;
      for (std::size_t j = 0; j < k; ++j) eta += xi[j] * r.beta[j];
      const double p = sigmoid(eta);
      const double w = p * (1.0 - p);
      if (w < opt.separation_weight) ++saturated;
      const double resid = y[i] - p;
      for (std::size_t a = 0; a < k; ++a) {
        score[a] += xi[a] * resid;
        for (std::size_t b = 0; b <= a; ++b) r.info(a, b) += w * xi[a] * xi[b];
      }
    }
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < a; ++b) r.info(b, a) = r.info(a, b);
    r.iterations = it;
    r.ll = ll;
    if (saturated)
      throw SeparationError(std::to_string(saturated) + " observation(s) fitted with probability 0 or 1");
    double max_score = 0;
    for (const double s : score) max_score = std::max(max_score, std::abs(s));
    if (ll_settled || max_score < opt.score_tol) {
      r.converged = true;
      break;
    }
    if (it >= opt.max_iterations) break;
    const auto l = cholesky(r.info);
    if (!l) throw SeparationError("information matrix is singular or near-singular");
    const auto step = cholesky_solve(*l, score);
    // Step-halving keeps the likelihood non-decreasing.
    std::vector<double> trial(k);
    double t = 1.0, new_ll = ll;
    for (int h = 0; h < 40; ++h, t *= 0.5) {
      for (std::size_t j = 0; j < k; ++j) trial[j] = r.beta[j] + t * step[j];
      new_ll = log_likelihood(x, y, trial);
      if (new_ll >= ll - 1e-12 * std::abs(ll)) break;
    }
    ll_settled = std::abs(new_ll - ll) <= opt.rel_ll_tol * std::abs(ll);
    r.beta = trial;
    ll = new_ll;
  }
  return r;
}

}  // namespace detail

/// Fits P(y = 1) = logistic(X beta). `x` must include any intercept column.
inline LogitFit fit_logit(const Matrix& x, std::span<const double> y, const LogitOptions& opt = {}) {
  const std::size_t n = x.rows(), k = x.cols();
  if (n == 0) throw AnalysisError("fit_logit: no observations");
  if (k == 0) throw AnalysisError("fit_logit: no predictors");
  if (y.size() != n) throw AnalysisError("fit_logit: outcome length does not match design rows");
  if (n < k) throw AnalysisError("fit_logit: fewer observations than coefficients");
  std::size_t positives = 0;
  for (const double v : y) {
    if (v != 0.0 && v != 1.0) throw AnalysisError("fit_logit: outcome must be 0 or 1");
    positives += v == 1.0;
  }
  if (positives == 0 || positives == n) throw AnalysisError("fit_logit: outcome is constant");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (!std::isfinite(x(i, j))) throw AnalysisError("fit_logit: non-finite design value");

  const auto full = detail::newton(x, y, opt);
  const auto l = cholesky(full.info);
  if (!l) throw SeparationError("information matrix is singular or near-singular");
  const Matrix cov = cholesky_inverse(*l);

  LogitFit fit;
  fit.n = n;
  fit.coefficients = full.beta;
  fit.converged = full.converged;
  fit.iterations = full.iterations;
  fit.log_likelihood = full.ll;
  for (std::size_t j = 0; j < k; ++j) {
    const double se = std::sqrt(cov(j, j));
    fit.std_errors.push_back(se);
    fit.wald_z.push_back(full.beta[j] / se);
    fit.p_values.push_back(std::erfc(std::abs(full.beta[j] / se) / std::numbers::sqrt2));
  }

  Matrix ones(n, 1, 1.0);
  fit.null_log_likelihood = detail::newton(ones, y, opt).ll;
  fit.mcfadden_r2 = 1.0 - fit.log_likelihood / fit.null_log_likelihood;
  const double kk = static_cast<double>(k);
  fit.aic = 2.0 * kk - 2.0 * fit.log_likelihood;
  fit.bic = kk * std::log(static_cast<double>(n)) - 2.0 * fit.log_likelihood;
  fit.lr_statistic = std::max(0.0, 2.0 * (fit.log_likelihood - fit.null_log_likelihood));
  fit.lr_p_value = k > 1 ? chi2_upper_p(fit.lr_statistic, kk - 1.0) : 1.0;
  return fit;
}

}  // namespace innonet::stats
