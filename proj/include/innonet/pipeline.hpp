// End-to-end orchestration: normalized events -> frames -> graph -> metrics,
// plus the statistical reports built on the metric table.
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "innonet/core.hpp"
#include "innonet/directory.hpp"
#include "innonet/frames.hpp"
#include "innonet/graph.hpp"
#include "innonet/ingest.hpp"
#include "innonet/metrics.hpp"
#include "innonet/stats/hypothesis.hpp"
#include "innonet/stats/logit.hpp"

namespace innonet {

struct PipelineOptions {
  CohortPolicy policy;
  FrameOptions frames;
  BetweennessOptions betweenness;
  PercentileScope scope = PercentileScope::Cohort;
};

struct PipelineResult {
  std::vector<MessageEvent> events;  // normalized, cohort-filtered
  std::vector<ActorId> cohort;
  std::vector<Frame> frames;
  CommGraph graph;
  std::vector<ConnectivityVector> connectivity;
  std::vector<InteractivityVector> interactivity;
  std::vector<MetricRow> rows;
};

inline PipelineResult run_pipeline(std::vector<MessageEvent> events, const ActorDirectory& dir,
                                   const PipelineOptions& opt = {}, IngestDiagnostics* diag = nullptr) {
  PipelineResult r;
  auto cohort = apply_cohort(dedupe_and_normalize(std::move(events), diag), dir, opt.policy, diag);
  r.events = std::move(cohort.events);
  r.cohort = std::move(cohort.cohort);
  r.frames = build_frames(r.events, opt.frames);
  r.graph = build_graph(r.events, dir.size());
  r.connectivity = connectivity_all(r.graph, r.events, opt.betweenness);
  r.interactivity = interactivity_all(r.frames, dir.size());
  r.rows = assemble(r.connectivity, r.interactivity, dir, r.cohort, opt.scope);
  return r;
}

/// Predictor sets of the seven administrator logit models.
struct LogitModelSpec {
  std::string name;
  bool rank = false;
  std::vector<Metric> metrics;
};

inline std::vector<LogitModelSpec> admin_model_specs() {
  using M = Metric;
  return {
      {"Model 1", true, {}},
      {"Model 2", false, {M::EgoArt, M::AlterArt}},
      {"Model 3", false, {M::EgoNudges, M::AlterNudges}},
      {"Model 4", false, {M::ReceivedMinusSent}},
      {"Model 5", false, {M::Degree, M::Betweenness}},
      {"Model 6", true, {M::EgoNudges, M::AlterNudges, M::ReceivedMinusSent, M::Degree}},
      {"Model 7", true, {M::EgoNudges, M::ReceivedMinusSent, M::Degree}},
  };
}

/// Fits one model on rows with every predictor present (listwise deletion).
/// Outcome: label == ADMIN. Coefficients are ordered intercept, [rank], metrics.
inline stats::LogitFit fit_admin_model(const std::vector<MetricRow>& rows, const LogitModelSpec& spec) {
  std::vector<const MetricRow*> usable;
  for (const auto& r : rows) {
    if (spec.rank && !r.rank) continue;
    if (std::all_of(spec.metrics.begin(), spec.metrics.end(), [&](Metric m) { return r.percentile[m].has_value(); }))
      usable.push_back(&r);
  }
  const std::size_t k = 1 + (spec.rank ? 1 : 0) + spec.metrics.size();
  stats::Matrix x(usable.size(), k);
  std::vector<double> y(usable.size());
  for (std::size_t i = 0; i < usable.size(); ++i) {
    std::size_t c = 0;
    x(i, c++) = 1.0;
    if (spec.rank) x(i, c++) = *usable[i]->rank;
    for (const auto m : spec.metrics) x(i, c++) = *usable[i]->percentile[m];
    y[i] = usable[i]->label == Label::Admin ? 1.0 : 0.0;
  }
  return stats::fit_logit(x, y);
}

inline std::string metric_display_name(Metric m) {
  switch (m) {
    case Metric::Degree: return "Degree Centrality";
    case Metric::Betweenness: return "Betweenness Centrality";
    case Metric::MessagesSent: return "Messages Sent";
    case Metric::MessagesReceived: return "Messages Received";
    case Metric::ReceivedMinusSent: return "Messages Received-Sent";
    case Metric::EgoArt: return "Ego ART";
    case Metric::AlterArt: return "Alter ART";
    case Metric::EgoNudges: return "Ego Nudges";
    case Metric::AlterNudges: return "Alter Nudges";
  }
  return {};
}

inline nlohmann::ordered_json logit_report(const std::vector<MetricRow>& rows) {
  nlohmann::ordered_json out;
  out["outcome"] = "ADMIN";
  out["predictor_scale"] = "percentile rank (Rank raw)";
  out["models"] = nlohmann::ordered_json::array();
  for (const auto& spec : admin_model_specs()) {
    nlohmann::ordered_json m;
    m["name"] = spec.name;
    try {
      const auto fit = fit_admin_model(rows, spec);
      std::vector<std::string> names{"Constant"};
      if (spec.rank) names.push_back("Rank");
      for (const auto metric : spec.metrics) names.push_back(metric_display_name(metric));
      m["variables"] = nlohmann::ordered_json::array();
      for (std::size_t j = 0; j < names.size(); ++j) {
        nlohmann::ordered_json v;
        v["name"] = names[j];
        v["coefficient"] = round6(fit.coefficients[j]);
        v["std_error"] = round6(fit.std_errors[j]);
        v["z"] = round6(fit.wald_z[j]);
        v["p"] = round6(fit.p_values[j]);
        v["stars"] = stars(fit.p_values[j]);
        m["variables"].push_back(v);
      }
      m["log_likelihood"] = round6(fit.log_likelihood);
      m["null_log_likelihood"] = round6(fit.null_log_likelihood);
      m["mcfadden_r2"] = round6(fit.mcfadden_r2);
      m["aic"] = round6(fit.aic);
      m["bic"] = round6(fit.bic);
      m["n"] = fit.n;
      m["lr_statistic"] = round6(fit.lr_statistic);
      m["lr_p"] = round6(fit.lr_p_value);
      m["converged"] = fit.converged;
      m["iterations"] = fit.iterations;
    } catch (const Error& e) {
      m["error"] = e.what();
    }
    out["models"].push_back(m);
  }
  return out;
}

/// Groups used for the innovator comparison: PRODUCT, AWARD, and everyone
/// else in the cohort ("Others", administrators included).
inline std::vector<stats::Group> innovator_groups(const std::vector<MetricRow>& rows, Metric m) {
  std::vector<stats::Group> g{{"Others", {}}, {"ProductInn", {}}, {"AwardInn", {}}};
  for (const auto& r : rows) {
    if (!r.percentile[m]) continue;
    switch (r.label) {
      case Label::None:
      case Label::Admin: g[0].values.push_back(*r.percentile[m]); break;
      case Label::Product: g[1].values.push_back(*r.percentile[m]); break;
      case Label::Award: g[2].values.push_back(*r.percentile[m]); break;
    }
  }
  return g;
}

inline nlohmann::ordered_json anova_report(const std::vector<MetricRow>& rows) {
  nlohmann::ordered_json out;
  out["groups"] = {"Others", "ProductInn", "AwardInn"};
  out["star_note"] = "*p < .1; **p < .05; ***p < .01";
  out["metrics"] = nlohmann::ordered_json::array();
  for (const auto m : {Metric::MessagesReceived, Metric::MessagesSent, Metric::ReceivedMinusSent, Metric::AlterArt,
                       Metric::EgoArt, Metric::AlterNudges, Metric::EgoNudges, Metric::Degree, Metric::Betweenness}) {
    nlohmann::ordered_json j;
    j["metric"] = metric_display_name(m);
    try {
      const auto groups = innovator_groups(rows, m);
      const auto t = stats::oneway_anova(groups);
      j["between"] = {{"ss", round6(t.ss_between)}, {"df", t.df_between}, {"ms", round6(t.ms_between)}};
      j["within"] = {{"ss", round6(t.ss_within)}, {"df", t.df_within}, {"ms", round6(t.ms_within)}};
      j["total"] = {{"ss", round6(t.ss_total)}, {"df", t.df_between + t.df_within}};
      j["f"] = std::isinf(t.f) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(round6(t.f));
      j["p"] = round6(t.p);
      j["stars"] = stars(t.p);
      j["means"] = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < t.group_means.size(); ++i) {
        j["means"][t.group_means[i].first] = round6(t.group_means[i].second);
        j["sizes"][t.group_means[i].first] = t.group_sizes[i];
      }
      j["tukey"] = nlohmann::ordered_json::array();
      for (const auto& p : stats::tukey_hsd(groups)) {
        nlohmann::ordered_json pj;
        pj["a"] = p.group_a;
        pj["b"] = p.group_b;
        pj["mean_diff"] = round6(p.mean_diff);
        pj["q"] = std::isinf(p.q_stat) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(round6(p.q_stat));
        pj["p_adjusted"] = round6(p.p_adjusted);
        pj["stars"] = stars(p.p_adjusted);
        j["tukey"].push_back(pj);
      }
    } catch (const Error& e) {
      j["error"] = e.what();
    }
    out["metrics"].push_back(j);
  }
  return out;
}

/// ADMIN vs every other cohort member, per metric, on percentiles.
inline nlohmann::ordered_json ttest_report(const std::vector<MetricRow>& rows, bool pooled = false) {
  nlohmann::ordered_json out;
  out["comparison"] = "ADMIN vs others";
  out["variant"] = pooled ? "pooled" : "welch";
  out["metrics"] = nlohmann::ordered_json::array();
  for (const auto m : kAllMetrics) {
    std::vector<double> admin, others;
    for (const auto& r : rows) {
      if (!r.percentile[m]) continue;
      (r.label == Label::Admin ? admin : others).push_back(*r.percentile[m]);
    }
    nlohmann::ordered_json j;
    j["metric"] = metric_display_name(m);
    j["n_admin"] = admin.size();
    j["n_others"] = others.size();
    try {
      const auto t = pooled ? stats::pooled_ttest(admin, others) : stats::welch_ttest(admin, others);
      j["mean_admin"] = round6(t.mean_a);
      j["mean_others"] = round6(t.mean_b);
      j["t"] = round6(t.t);
      j["df"] = round6(t.df);
      j["p"] = round6(t.p_two_sided);
      j["stars"] = stars(t.p_two_sided);
    } catch (const Error& e) {
      j["error"] = e.what();
    }
    out["metrics"].push_back(j);
  }
  return out;
}

struct ScoredActor {
  ActorId actor;
  Label label;
  double score;
};

/// Cohort members with a computable score, highest first (ties by actor id).
inline std::vector<ScoredActor> rank_by_admin_score(const std::vector<MetricRow>& rows) {
  std::vector<ScoredActor> out;
  for (const auto& r : rows)
    if (const auto s = try_score_admin(r)) out.push_back({r.actor, r.label, *s});
  std::stable_sort(out.begin(), out.end(), [](const ScoredActor& a, const ScoredActor& b) {
    return a.score != b.score ? a.score > b.score : a.actor < b.actor;
  });
  return out;
}

inline void write_scores(std::ostream& out, const std::vector<ScoredActor>& scores, const ActorDirectory& dir) {
  out << "position,address,label,model7_score\n";
  for (std::size_t i = 0; i < scores.size(); ++i)
    out << i + 1 << ',' << csv::quote(dir[scores[i].actor].address) << ',' << to_string(scores[i].label) << ','
        << fmt6(scores[i].score) << '\n';
}

}  // namespace innonet
