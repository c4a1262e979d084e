#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "innonet/pipeline.hpp"
#include "innonet/synth.hpp"

using namespace innonet;

namespace {

std::string event_log(const SynthOutput& out) {
  std::ostringstream s;
  write_event_log(s, out.events, out.directory);
  return s.str();
}

SynthConfig small_config(std::uint64_t seed, int days = 10) {
  auto c = default_synth_config(seed);
  c.days = days;
  return c;
}

}  // namespace

TEST(Synth, SameSeedGivesIdenticalLogs) {
  const auto a = generate(small_config(11, 5));
  const auto b = generate(small_config(11, 5));
  EXPECT_EQ(event_log(a), event_log(b));
  EXPECT_EQ(a.ground_truth.dump(), b.ground_truth.dump());
  EXPECT_NE(event_log(a), event_log(generate(small_config(12, 5))));
}

TEST(Synth, DirectoryMatchesConfiguredPopulations) {
  const auto out = generate(small_config(3, 2));
  std::map<Label, std::size_t> internal;
  std::size_t external = 0;
  for (std::uint32_t i = 0; i < out.directory.size(); ++i) {
    const auto& rec = out.directory[ActorId{i}];
    if (!rec.internal) {
      ++external;
      EXPECT_FALSE(rec.rank);
      continue;
    }
    ++internal[rec.label];
    ASSERT_TRUE(rec.rank);
    EXPECT_GE(*rec.rank, 1);
    EXPECT_LE(*rec.rank, 3);
  }
  EXPECT_EQ(internal[Label::None], 1733u);
  EXPECT_EQ(internal[Label::Admin], 26u);
  EXPECT_EQ(internal[Label::Product], 131u);
  EXPECT_EQ(internal[Label::Award], 54u);
  EXPECT_EQ(external, 400u);
}

TEST(Synth, EventsAreCanonicalAndWithinTheWindow) {
  auto cfg = small_config(5, 3);
  const auto out = generate(cfg);
  ASSERT_FALSE(out.events.empty());
  const auto end = cfg.start + std::chrono::days(cfg.days);
  for (std::size_t i = 0; i < out.events.size(); ++i) {
    const auto& e = out.events[i];
    EXPECT_NE(e.sender, e.recipient);
    EXPECT_GE(e.timestamp, cfg.start);
    EXPECT_LT(e.timestamp, end);
    if (i) EXPECT_FALSE(canonical_less(e, out.events[i - 1]));
  }
  EXPECT_EQ(dedupe_and_normalize(out.events).size(), out.events.size());
}

TEST(Synth, ZeroSendRatesProduceNoEvents) {
  auto cfg = small_config(1, 5);
  for (auto& p : cfg.profiles) p.send_rate_per_day = 0;
  cfg.external_send_rate = 0;
  EXPECT_TRUE(generate(cfg).events.empty());
}

TEST(Synth, InfeasibleConfigurationsAreRejected) {
  auto wide = small_config(1);
  wide.profiles[3].contact_breadth_mult = 1e6;
  EXPECT_THROW(generate(wide), ConfigError);
  auto empty = small_config(1);
  empty.profiles.clear();
  EXPECT_THROW(generate(empty), ConfigError);
  auto bad_prob = small_config(1);
  bad_prob.profiles[1].reply_prob = 1.5;
  EXPECT_THROW(generate(bad_prob), ConfigError);
  auto no_days = small_config(1);
  no_days.days = 0;
  EXPECT_THROW(generate(no_days), ConfigError);
}

TEST(Synth, GroundTruthRecordsEveryRole) {
  const auto out = generate(small_config(2, 1));
  ASSERT_TRUE(out.ground_truth.contains("roles"));
  EXPECT_EQ(out.ground_truth["roles"].size(), 4u);
  EXPECT_EQ(out.ground_truth["seed"], 2u);
  EXPECT_EQ(out.ground_truth["roles"][1]["role"], "ADMIN");
  EXPECT_DOUBLE_EQ(out.ground_truth["roles"][1]["ping_propensity"].get<double>(), 1.0);
}

// One full default corpus: volume and the direction of every planted effect.
TEST(Synth, DefaultCorpusCarriesThePlantedEffects) {
  const auto out = generate(default_synth_config(4));
  EXPECT_GT(out.events.size(), 1'800'000u);
  EXPECT_LT(out.events.size(), 2'200'000u);
  const auto r = run_pipeline(out.events, out.directory);
  ASSERT_EQ(r.cohort.size(), 1944u);

  const auto group_mean = [&](Metric m, Label l) {
    double s = 0;
    std::size_t n = 0;
    for (const auto& row : r.rows)
      if (row.label == l && row.percentile[m]) s += *row.percentile[m], ++n;
    return s / static_cast<double>(n);
  };
  for (const auto m : {Metric::Degree, Metric::EgoNudges, Metric::ReceivedMinusSent})
    EXPECT_GT(group_mean(m, Label::Admin), group_mean(m, Label::None)) << metric_name(m);
  for (const auto m : {Metric::Degree, Metric::Betweenness})
    for (const auto l : {Label::None, Label::Admin, Label::Product})
      EXPECT_GT(group_mean(m, Label::Award), group_mean(m, l)) << metric_name(m);

  const auto fit = fit_admin_model(r.rows, admin_model_specs()[6]);
  for (std::size_t j = 2; j < 5; ++j) {
    EXPECT_GT(fit.coefficients[j], 0.0);
    EXPECT_LT(fit.p_values[j], 0.05);
  }
  const auto tukey = stats::tukey_hsd(innovator_groups(r.rows, Metric::AlterArt));
  EXPECT_EQ(tukey[0].group_b, "ProductInn");
  EXPECT_GT(tukey[0].mean_diff, 0.0);
  EXPECT_LT(tukey[0].p_adjusted, 0.05);
}

// With every role behaving alike, group tests should reject at about their
// nominal rate. 40 two-week corpora give 360 ANOVAs and 120 Wald tests.
TEST(Synth, NullConfigurationKeepsFalsePositivesNearNominal) {
  int anova_rejections = 0, anova_tests = 0, wald_rejections = 0, wald_tests = 0;
  for (std::uint64_t seed = 1001; seed <= 1040; ++seed) {
    auto cfg = null_synth_config(seed);
    cfg.days = 14;
    auto out = generate(cfg);
    const auto r = run_pipeline(std::move(out.events), out.directory);
    for (const auto m : kAllMetrics) {
      anova_rejections += stats::oneway_anova(innovator_groups(r.rows, m)).p < 0.05;
      ++anova_tests;
    }
    const auto fit = fit_admin_model(r.rows, admin_model_specs()[6]);
    for (std::size_t j = 2; j < 5; ++j) {
      wald_rejections += fit.p_values[j] < 0.05;
      ++wald_tests;
    }
  }
  EXPECT_LE(anova_rejections, 0.09 * anova_tests);
  EXPECT_LE(wald_rejections, 0.09 * wald_tests);
}
