// Per-actor metric vectors, cohort percentile ranks, and the fixed-coefficient
// administrator logit score.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "innonet/core.hpp"
#include "innonet/csv.hpp"
#include "innonet/directory.hpp"
#include "innonet/frames.hpp"
#include "innonet/graph.hpp"

namespace innonet {

enum class Metric : std::size_t {
  Degree,
  Betweenness,
  MessagesSent,
  MessagesReceived,
  ReceivedMinusSent,
  EgoArt,
  AlterArt,
  EgoNudges,
  AlterNudges,
};
inline constexpr std::size_t kMetricCount = 9;

inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {
    Metric::Degree,   Metric::Betweenness, Metric::MessagesSent, Metric::MessagesReceived, Metric::ReceivedMinusSent,
    Metric::EgoArt,   Metric::AlterArt,    Metric::EgoNudges,    Metric::AlterNudges};

inline constexpr std::string_view metric_name(Metric m) {
  constexpr std::array<std::string_view, kMetricCount> names = {
      "degree",         "betweenness",     "messages_sent", "messages_received", "received_minus_sent",
      "ego_art_hours",  "alter_art_hours", "ego_nudges",    "alter_nudges"};
  return names[static_cast<std::size_t>(m)];
}

/// Fixed-size bag of optional metric values, indexed by Metric.
struct MetricValues {
  std::array<std::optional<double>, kMetricCount> v{};
  std::optional<double>& operator[](Metric m) { return v[static_cast<std::size_t>(m)]; }
  const std::optional<double>& operator[](Metric m) const { return v[static_cast<std::size_t>(m)]; }
};

struct MetricRow {
  ActorId actor;
  std::optional<int> rank;
  Label label = Label::None;
  MetricValues raw;
  MetricValues percentile;
};

/// Midrank percentile: (midrank - 0.5) / N over the non-missing values.
inline std::vector<std::optional<double>> percentile_rank(std::span<const std::optional<double>> values) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i]) idx.push_back(i);
  if (idx.empty()) throw AnalysisError("percentile_rank: every value is missing");
  for (auto i : idx)
    if (std::isnan(*values[i])) throw AnalysisError("percentile_rank: NaN value");
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return *values[a] < *values[b]; });
  const double n = static_cast<double>(idx.size());
  std::vector<std::optional<double>> out(values.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && *values[idx[j]] == *values[idx[i]]) ++j;
    // ranks i+1 .. j share the average (i+1+j)/2
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) out[idx[k]] = (midrank - 0.5) / n;
    i = j;
  }
  return out;
}

enum class PercentileScope { Cohort, AllNodes };

/// One row per cohort member with raw values and percentiles. Percentiles
/// are ranked across the cohort (or every graph node with AllNodes).
inline std::vector<MetricRow> assemble(std::span<const ConnectivityVector> connectivity,
                                       std::span<const InteractivityVector> interactivity,
                                       const ActorDirectory& dir, std::span<const ActorId> cohort,
                                       PercentileScope scope = PercentileScope::Cohort) {
  if (cohort.empty()) throw AnalysisError("assemble: empty cohort");
  const auto raw_for = [&](std::uint32_t id) {
    MetricValues m;
    const auto& c = connectivity[id];
    m[Metric::Degree] = static_cast<double>(c.degree);
    m[Metric::Betweenness] = c.betweenness;
    m[Metric::MessagesSent] = static_cast<double>(c.sent);
    m[Metric::MessagesReceived] = static_cast<double>(c.received);
    m[Metric::ReceivedMinusSent] = static_cast<double>(c.received_minus_sent);
    if (id < interactivity.size()) {
      const auto& iv = interactivity[id];
      m[Metric::EgoArt] = iv.ego_art_hours;
      m[Metric::AlterArt] = iv.alter_art_hours;
      m[Metric::EgoNudges] = iv.ego_nudges;
      m[Metric::AlterNudges] = iv.alter_nudges;
    }
    return m;
  };
  for (const auto id : cohort)
    if (id.value >= connectivity.size())
      throw AnalysisError("assemble: cohort member " + dir[id].address + " is absent from the graph");

  std::vector<MetricRow> rows;
  rows.reserve(cohort.size());
  for (const auto id : cohort) rows.push_back({id, dir[id].rank, dir[id].label, raw_for(id.value), {}});

  std::vector<MetricValues> pool_raw;
  std::vector<std::size_t> row_pos;  // position of each cohort row inside the pool
  if (scope == PercentileScope::Cohort) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      pool_raw.push_back(rows[i].raw);
      row_pos.push_back(i);
    }
  } else {
    for (std::uint32_t v = 0; v < connectivity.size(); ++v) pool_raw.push_back(raw_for(v));
    for (const auto& r : rows) row_pos.push_back(r.actor.value);
  }
  std::vector<std::optional<double>> column(pool_raw.size());
  for (const auto m : kAllMetrics) {
    bool any = false;
    for (std::size_t i = 0; i < pool_raw.size(); ++i) {
      column[i] = pool_raw[i][m];
      any = any || column[i].has_value();
    }
    if (!any) continue;  // every value missing: the percentile stays missing
    const auto pct = percentile_rank(column);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].percentile[m] = pct[row_pos[i]];
  }
  return rows;
}

/// Administrator logit with fixed coefficients on percentile inputs; rank enters raw.
struct AdminModel {
  static constexpr double intercept = -8.817;
  static constexpr double rank = -0.729;
  static constexpr double ego_nudges = 3.745;
  static constexpr double received_minus_sent = 3.683;
  static constexpr double degree = 4.798;
};

inline double admin_linear_predictor(const MetricValues& pct, int rank) {
  if (rank < 1 || rank > 3) throw AnalysisError("score_admin: rank must be 1, 2 or 3");
  for (const auto m : {Metric::EgoNudges, Metric::ReceivedMinusSent, Metric::Degree})
    if (!pct[m]) throw AnalysisError("score_admin: missing percentile " + std::string(metric_name(m)));
  return AdminModel::intercept + AdminModel::rank * rank + AdminModel::ego_nudges * *pct[Metric::EgoNudges] +
         AdminModel::received_minus_sent * *pct[Metric::ReceivedMinusSent] + AdminModel::degree * *pct[Metric::Degree];
}

inline double score_admin(const MetricValues& pct, int rank) {
  const double eta = admin_linear_predictor(pct, rank);
  return eta >= 0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
}

inline std::optional<double> try_score_admin(const MetricRow& row) {
  if (!row.rank) return std::nullopt;
  for (const auto m : {Metric::EgoNudges, Metric::ReceivedMinusSent, Metric::Degree})
    if (!row.percentile[m]) return std::nullopt;
  return score_admin(row.percentile, *row.rank);
}

inline void write_metric_table(std::ostream& out, const std::vector<MetricRow>& rows, const ActorDirectory& dir) {
  out << "address,label,rank";
  for (const auto m : kAllMetrics) out << ',' << metric_name(m);
  for (const auto m : kAllMetrics) out << ",pct_" << metric_name(m);
  out << ",model7_score\n";
  for (const auto& r : rows) {
    out << csv::quote(dir[r.actor].address) << ',' << to_string(r.label) << ','
        << (r.rank ? std::to_string(*r.rank) : std::string{});
    for (const auto m : kAllMetrics) out << ',' << fmt6(r.raw[m]);
    for (const auto m : kAllMetrics) out << ',' << fmt6(r.percentile[m]);
    out << ',' << fmt6(try_score_admin(r)) << '\n';
  }
}

}  // namespace innonet
