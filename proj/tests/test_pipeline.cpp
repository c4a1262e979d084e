#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "innonet/pipeline.hpp"
#include "innonet/synth.hpp"
#include "oracles.hpp"

using namespace innonet;

namespace {

struct Toy {
  ActorDirectory dir;
  PipelineResult result;
};

Toy run_toy(const PipelineOptions& opt = {}) {
  Toy t;
  std::ifstream dir_file(std::string(INNONET_TEST_DATA) + "/toy/directory.csv");
  t.dir = read_directory(dir_file);
  IngestDiagnostics diag;
  auto parsed = parse_files({std::string(INNONET_TEST_DATA) + "/toy/events.csv"}, t.dir, diag);
  EXPECT_TRUE(parsed.unresolved.empty());
  t.result = run_pipeline(std::move(parsed.events), t.dir, opt);
  return t;
}

const MetricRow& row_of(const Toy& t, std::string_view address) {
  const auto id = t.dir.find(address).value();
  for (const auto& r : t.result.rows)
    if (r.actor == id) return r;
  throw std::runtime_error("no row");
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST(ToyCorpus, RawMetricsMatchTheHandWorkedTable) {
  const auto t = run_toy();
  ASSERT_EQ(t.result.rows.size(), 5u);
  ASSERT_EQ(t.result.events.size(), 9u);

  struct Want {
    const char* who;
    double degree, betweenness, sent, received, balance;
    std::optional<double> alter_art, ego_art, ego_nudges, alter_nudges;
  };
  const std::vector<Want> table{
      {"a@toy.example", 4, 7, 4, 3, -1, 15.0, std::nullopt, 0.5, std::nullopt},
      {"b@toy.example", 1, 0, 1, 2, 1, std::nullopt, 2.0, std::nullopt, 1.0},
      {"c@toy.example", 2, 2, 2, 2, 0, 3.0, 28.0, 0.0, 0.0},
      {"d@toy.example", 2, 0, 1, 2, 1, std::nullopt, 3.0, std::nullopt, 0.0},
      {"e@toy.example", 1, 0, 1, 0, -1, std::nullopt, std::nullopt, std::nullopt, std::nullopt},
  };
  for (const auto& w : table) {
    SCOPED_TRACE(w.who);
    const auto& r = row_of(t, w.who);
    EXPECT_EQ(r.raw[Metric::Degree], w.degree);
    EXPECT_EQ(r.raw[Metric::Betweenness], w.betweenness);
    EXPECT_EQ(r.raw[Metric::MessagesSent], w.sent);
    EXPECT_EQ(r.raw[Metric::MessagesReceived], w.received);
    EXPECT_EQ(r.raw[Metric::ReceivedMinusSent], w.balance);
    EXPECT_EQ(r.raw[Metric::AlterArt], w.alter_art);
    EXPECT_EQ(r.raw[Metric::EgoArt], w.ego_art);
    EXPECT_EQ(r.raw[Metric::EgoNudges], w.ego_nudges);
    EXPECT_EQ(r.raw[Metric::AlterNudges], w.alter_nudges);
  }
}

TEST(ToyCorpus, BetweennessAgreesWithPathEnumeration) {
  const auto t = run_toy();
  std::vector<std::pair<int, int>> arcs;
  for (const auto& a : t.result.graph.arcs()) arcs.emplace_back(a.from.value, a.to.value);
  const auto want = oracle::betweenness_by_paths(static_cast<int>(t.dir.size()), arcs);
  for (const auto& r : t.result.rows) EXPECT_NEAR(*r.raw[Metric::Betweenness], want[r.actor.value], 1e-12);
}

TEST(ToyCorpus, FramesAreTheExpectedEight) {
  const auto t = run_toy();
  ASSERT_EQ(t.result.frames.size(), 8u);
  std::size_t closed = 0, pings = 0;
  for (const auto& f : t.result.frames) {
    closed += f.closed();
    pings += f.ping_count;
  }
  EXPECT_EQ(closed, 3u);
  EXPECT_EQ(pings, 1u);
  EXPECT_EQ(pings + t.result.frames.size(), t.result.events.size());
}

TEST(ToyCorpus, PercentilesAndScores) {
  const auto t = run_toy();
  const auto pct = [&](const char* who, Metric m) { return row_of(t, who).percentile[m]; };
  EXPECT_EQ(pct("a@toy.example", Metric::Degree), 0.9);
  EXPECT_EQ(pct("c@toy.example", Metric::Degree), 0.6);
  EXPECT_EQ(pct("e@toy.example", Metric::Degree), 0.2);
  EXPECT_EQ(pct("a@toy.example", Metric::EgoNudges), 0.75);
  EXPECT_EQ(pct("c@toy.example", Metric::EgoNudges), 0.25);
  EXPECT_FALSE(pct("b@toy.example", Metric::EgoNudges));
  EXPECT_EQ(pct("a@toy.example", Metric::ReceivedMinusSent), 0.2);
  EXPECT_EQ(pct("c@toy.example", Metric::ReceivedMinusSent), 0.5);
  EXPECT_EQ(pct("d@toy.example", Metric::ReceivedMinusSent), 0.8);

  const auto ranked = rank_by_admin_score(t.result.rows);
  ASSERT_EQ(ranked.size(), 2u);
  EXPECT_EQ(t.dir[ranked[0].actor].address, "a@toy.example");
  EXPECT_NEAR(ranked[0].score, logistic(-8.817 - 0.729 * 1 + 3.745 * 0.75 + 3.683 * 0.2 + 4.798 * 0.9), 1e-12);
  EXPECT_NEAR(ranked[1].score, logistic(-8.817 - 0.729 * 2 + 3.745 * 0.25 + 3.683 * 0.5 + 4.798 * 0.6), 1e-12);
}

TEST(ToyCorpus, DroppingCarbonCopiesRemovesTheLongestFrame) {
  PipelineOptions opt;
  opt.policy.cc_counts_as_recipient = false;
  const auto t = run_toy(opt);
  EXPECT_EQ(t.result.events.size(), 8u);
  const auto& a = row_of(t, "a@toy.example");
  EXPECT_EQ(a.raw[Metric::AlterArt], 2.0);
  EXPECT_EQ(a.raw[Metric::Degree], 4.0);  // c still reaches a directly
}

TEST(ToyCorpus, WindowExcludesLaterDays) {
  PipelineOptions opt;
  opt.policy.end = make_timestamp(2016, 4, 2, 0, 0, 0).value();
  const auto t = run_toy(opt);
  EXPECT_EQ(t.result.events.size(), 6u);
  EXPECT_EQ(row_of(t, "e@toy.example").raw[Metric::Degree], 0.0);
}

TEST(Reports, LogitReportListsSevenModels) {
  auto out = generate([] {
    auto c = default_synth_config(21);
    c.days = 14;
    return c;
  }());
  const auto r = run_pipeline(std::move(out.events), out.directory);
  // Report values carry six significant digits, so identities hold to that precision.
  const auto report = logit_report(r.rows);
  ASSERT_EQ(report["models"].size(), 7u);
  for (const auto& m : report["models"]) {
    ASSERT_FALSE(m.contains("error")) << m.dump();
    EXPECT_TRUE(m["converged"].get<bool>());
    EXPECT_NEAR(m["bic"].get<double>() - m["aic"].get<double>(),
                m["variables"].size() * (std::log(m["n"].get<double>()) - 2),
                1e-5 * (m["bic"].get<double>() + std::fabs(m["aic"].get<double>())));
  }
  const auto& m7 = report["models"][6];
  EXPECT_EQ(m7["name"], "Model 7");
  ASSERT_EQ(m7["variables"].size(), 5u);
  EXPECT_EQ(m7["variables"][1]["name"], "Rank");
  EXPECT_EQ(m7["variables"][4]["name"], "Degree Centrality");

  const auto anova = anova_report(r.rows);
  ASSERT_EQ(anova["metrics"].size(), 9u);
  for (const auto& m : anova["metrics"]) {
    ASSERT_FALSE(m.contains("error")) << m.dump();
    EXPECT_EQ(m["tukey"].size(), 3u);
    EXPECT_NEAR(m["between"]["ss"].get<double>() + m["within"]["ss"].get<double>(), m["total"]["ss"].get<double>(),
                1e-5 * m["total"]["ss"].get<double>());
  }
  const auto tt = ttest_report(r.rows);
  ASSERT_EQ(tt["metrics"].size(), 9u);
  EXPECT_EQ(tt["metrics"][0]["n_admin"].get<std::size_t>() + tt["metrics"][0]["n_others"].get<std::size_t>(),
            1944u);
}

TEST(Reports, ErrorsAreRecordedPerModelOnTinyCohorts) {
  const auto t = run_toy();
  const auto report = logit_report(t.result.rows);
  ASSERT_EQ(report["models"].size(), 7u);
  for (const auto& m : report["models"]) EXPECT_TRUE(m.contains("error") || m.contains("variables"));
  const auto tt = ttest_report(t.result.rows);
  EXPECT_TRUE(tt["metrics"][0].contains("error"));  // a single administrator
}

TEST(Pipeline, DeterministicAcrossThreadCounts) {
  auto cfg = default_synth_config(3);
  cfg.days = 7;
  const auto out = generate(cfg);
  PipelineOptions one, many;
  one.frames.threads = one.betweenness.threads = 1;
  many.frames.threads = many.betweenness.threads = 4;
  const auto a = run_pipeline(out.events, out.directory, one);
  const auto b = run_pipeline(out.events, out.directory, many);
  std::ostringstream sa, sb;
  write_metric_table(sa, a.rows, out.directory);
  write_metric_table(sb, b.rows, out.directory);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.frames, b.frames);
}
