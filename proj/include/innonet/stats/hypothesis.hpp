// Two-sample t-tests, one-way ANOVA and Tukey-Kramer post-hoc comparisons.
#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "innonet/core.hpp"
#include "innonet/stats/special.hpp"

namespace innonet::stats {

struct TTestResult {
  double t = 0;
  double df = 0;
  double p_two_sided = 1;
  double mean_a = 0;
  double mean_b = 0;
};

namespace detail {

inline double mean(std::span<const double> x) {
  double s = 0;
  for (const double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double sum_sq_dev(std::span<const double> x, double m) {
  double s = 0;
  for (const double v : x) s += (v - m) * (v - m);
  return s;
}

}  // namespace detail

/// Welch's unequal-variance t-test with Welch-Satterthwaite df.
inline TTestResult welch_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw AnalysisError("welch_ttest: each sample needs at least 2 values");
  TTestResult r;
  r.mean_a = detail::mean(a);
  r.mean_b = detail::mean(b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double va = detail::sum_sq_dev(a, r.mean_a) / (na - 1), vb = detail::sum_sq_dev(b, r.mean_b) / (nb - 1);
  if (va == 0 && vb == 0) throw AnalysisError("welch_ttest: both samples have zero variance");
  const double sa = va / na, sb = vb / nb;
  r.t = (r.mean_a - r.mean_b) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1) + sb * sb / (nb - 1));
  r.p_two_sided = t_two_sided_p(r.t, r.df);
  return r;
}

/// Student's pooled-variance t-test.
inline TTestResult pooled_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw AnalysisError("pooled_ttest: each sample needs at least 2 values");
  TTestResult r;
  r.mean_a = detail::mean(a);
  r.mean_b = detail::mean(b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double ss = detail::sum_sq_dev(a, r.mean_a) + detail::sum_sq_dev(b, r.mean_b);
  if (ss == 0) throw AnalysisError("pooled_ttest: both samples have zero variance");
  r.df = na + nb - 2;
  r.t = (r.mean_a - r.mean_b) / std::sqrt(ss / r.df * (1 / na + 1 / nb));
  r.p_two_sided = t_two_sided_p(r.t, r.df);
  return r;
}

struct Group {
  std::string name;
  std::vector<double> values;
};

struct AnovaTable {
  double ss_between = 0, ss_within = 0, ss_total = 0;
  int df_between = 0, df_within = 0;
  double ms_between = 0, ms_within = 0;
  double f = 0;
  double p = 1;
  std::vector<std::pair<std::string, double>> group_means;
  std::vector<std::size_t> group_sizes;
};

inline AnovaTable oneway_anova(std::span<const Group> groups) {
  if (groups.size() < 2) throw AnalysisError("oneway_anova: need at least 2 groups");
  std::size_t n = 0;
  double total = 0;
  for (const auto& g : groups) {
    if (g.values.empty()) throw AnalysisError("oneway_anova: group '" + g.name + "' is empty");
    n += g.values.size();
    for (const double v : g.values) total += v;
  }
  if (n <= groups.size()) throw AnalysisError("oneway_anova: need more observations than groups");
  const double grand = total / static_cast<double>(n);
  AnovaTable t;
  for (const auto& g : groups) {
    const double m = detail::mean(g.values);
    t.group_means.emplace_back(g.name, m);
    t.group_sizes.push_back(g.values.size());
    t.ss_between += static_cast<double>(g.values.size()) * (m - grand) * (m - grand);
    t.ss_within += detail::sum_sq_dev(g.values, m);
    t.ss_total += detail::sum_sq_dev(g.values, grand);
  }
  t.df_between = static_cast<int>(groups.size()) - 1;
  t.df_within = static_cast<int>(n - groups.size());
  t.ms_between = t.ss_between / t.df_between;
  t.ms_within = t.ss_within / t.df_within;
  if (t.ms_within > 0) {
    t.f = t.ms_between / t.ms_within;
    t.p = f_upper_p(t.f, t.df_between, t.df_within);
  } else if (t.ss_between > 0) {
    t.f = std::numeric_limits<double>::infinity();
    t.p = 0;
  } else {
    t.f = 0;
    t.p = 1;
  }
  return t;
}

struct TukeyPair {
  std::string group_a, group_b;
  double mean_diff = 0;  // mean_a - mean_b
  double q_stat = 0;
  double p_adjusted = 1;
};

/// All-pairs Tukey HSD with the Tukey-Kramer standard error for unequal sizes.
inline std::vector<TukeyPair> tukey_hsd(std::span<const Group> groups) {
  const auto table = oneway_anova(groups);
  const int k = static_cast<int>(groups.size());
  std::vector<TukeyPair> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      TukeyPair p;
      p.group_a = groups[i].name;
      p.group_b = groups[j].name;
      p.mean_diff = table.group_means[i].second - table.group_means[j].second;
      const double se = std::sqrt(table.ms_within / 2.0 *
                                  (1.0 / static_cast<double>(table.group_sizes[i]) +
                                   1.0 / static_cast<double>(table.group_sizes[j])));
      if (se > 0) p.q_stat = std::abs(p.mean_diff) / se;
      else p.q_stat = p.mean_diff == 0 ? 0.0 : std::numeric_limits<double>::infinity();
      p.p_adjusted = std::clamp(1.0 - studentized_range_cdf(p.q_stat, k, table.df_within), 0.0, 1.0);
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace innonet::stats
