#include <map>
#include <random>

#include <gtest/gtest.h>

#include "innonet/frames.hpp"
#include "oracles.hpp"

using namespace innonet;
using std::chrono::hours;
using std::chrono::minutes;

namespace {

const Timestamp t0 = make_timestamp(2016, 4, 1, 0, 0, 0).value();

MessageEvent ev(int id, Timestamp t, std::uint32_t s, std::uint32_t r) {
  return {"<" + std::to_string(id) + ">", t, ActorId{s}, ActorId{r}, Channel::To};
}

/// Random events among `actors` actors, canonically ordered.
std::vector<MessageEvent> random_stream(std::mt19937_64& rng, int n, std::uint32_t actors, int max_gap_hours) {
  std::vector<MessageEvent> out;
  Timestamp t = t0;
  for (int i = 0; i < n; ++i) {
    t += minutes(rng() % (60 * max_gap_hours + 1));
    const auto s = static_cast<std::uint32_t>(rng() % actors);
    auto r = static_cast<std::uint32_t>(rng() % (actors - 1));
    if (r >= s) ++r;
    out.push_back(ev(i, t, s, r));
  }
  return dedupe_and_normalize(out);
}

}  // namespace

TEST(BuildFrames, PingThenReplyClosesAndOpensReverse) {
  const std::vector<MessageEvent> events{ev(1, t0, 0, 1), ev(2, t0 + hours(2), 0, 1), ev(3, t0 + hours(5), 1, 0)};
  const auto frames = build_frames(events);
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[0].opener, ActorId{0});
  EXPECT_EQ(frames[0].open_time, t0);
  EXPECT_EQ(frames[0].ping_count, 1u);
  EXPECT_DOUBLE_EQ(*frames[0].response_hours(), 5.0);
  EXPECT_EQ(frames[1].opener, ActorId{1});
  EXPECT_EQ(frames[1].open_time, t0 + hours(5));
  EXPECT_FALSE(frames[1].closed());
  EXPECT_FALSE(frames[1].response_hours());
}

TEST(BuildFrames, UnansweredMessageIsOneCensoredFrame) {
  const auto frames = build_frames({ev(1, t0, 0, 1)});
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_FALSE(frames[0].closed());
  EXPECT_EQ(frames[0].ping_count, 0u);
}

TEST(BuildFrames, OneReverseEventClosesAtMostOneFrame) {
  // 0->1, 1->0 (closes, opens 1->0), 0->1 (closes 1->0, opens 0->1)
  const auto frames = build_frames({ev(1, t0, 0, 1), ev(2, t0 + hours(1), 1, 0), ev(3, t0 + hours(3), 0, 1)});
  ASSERT_EQ(frames.size(), 3u);
  EXPECT_DOUBLE_EQ(*frames[0].response_hours(), 1.0);
  EXPECT_DOUBLE_EQ(*frames[1].response_hours(), 2.0);
  EXPECT_FALSE(frames[2].closed());
}

TEST(BuildFrames, ReplyAfterHorizonCensorsInsteadOfClosing) {
  const std::vector<MessageEvent> events{ev(1, t0, 0, 1), ev(2, t0 + hours(24 * 3), 1, 0)};
  FrameOptions opt;
  opt.horizon_days = 2;
  const auto frames = build_frames(events, opt);
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_FALSE(frames[0].closed());
  EXPECT_EQ(build_frames(events)[0].ping_count, 0u);
  EXPECT_TRUE(build_frames(events)[0].closed());
  opt.horizon_days = 0;
  EXPECT_THROW(build_frames(events, opt), ConfigError);
}

TEST(BuildFrames, LatePingStartsAFreshFrame) {
  FrameOptions opt;
  opt.horizon_days = 1;
  const auto frames = build_frames({ev(1, t0, 0, 1), ev(2, t0 + hours(30), 0, 1), ev(3, t0 + hours(31), 1, 0)}, opt);
  ASSERT_EQ(frames.size(), 3u);
  EXPECT_FALSE(frames[0].closed());
  EXPECT_EQ(frames[1].open_time, t0 + hours(30));
  EXPECT_DOUBLE_EQ(*frames[1].response_hours(), 1.0);
}

TEST(BuildFrames, MatchesReferenceInterpreterOnRandomDyads) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto events = random_stream(rng, 50, 2, trial % 2 ? 6 : 200);
    FrameOptions opt;
    opt.horizon_days = trial % 3 == 0 ? 14.0 : 1.5;
    ASSERT_EQ(build_frames(events, opt), oracle::reference_frames(events, opt.horizon_days)) << "trial " << trial;
  }
}

TEST(BuildFrames, MatchesReferenceAcrossManyDyadsAndThreadCounts) {
  std::mt19937_64 rng(7);
  const auto events = random_stream(rng, 5000, 12, 5);
  const auto expected = oracle::reference_frames(events, 14.0);
  for (unsigned threads : {1u, 2u, 5u}) {
    FrameOptions opt;
    opt.threads = threads;
    EXPECT_EQ(build_frames(events, opt), expected);
  }
}

TEST(FrameProperties, AuditIdentitiesHold) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto events = random_stream(rng, 300, 6, 12);
    const auto frames = build_frames(events);
    std::size_t pings = 0;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> closed, reverse_msgs;
    for (const auto& f : frames) {
      pings += f.ping_count;
      if (f.closed()) {
        ++closed[{f.opener.value, f.responder.value}];
        EXPECT_GE(*f.response_hours(), 0.0);
        EXPECT_DOUBLE_EQ(*f.response_hours(),
                         std::chrono::duration<double>(*f.close_time - f.open_time).count() / 3600.0);
      }
    }
    for (const auto& e : events) ++reverse_msgs[{e.recipient.value, e.sender.value}];
    EXPECT_EQ(pings + frames.size(), events.size());
    for (const auto& [dyad, n] : closed) EXPECT_LE(n, reverse_msgs[dyad]);

    // Frames of one ordered dyad never overlap.
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<const Frame*>> by_dyad;
    for (const auto& f : frames) by_dyad[{f.opener.value, f.responder.value}].push_back(&f);
    for (const auto& [dyad, fs] : by_dyad)
      for (std::size_t i = 1; i < fs.size(); ++i)
        if (fs[i - 1]->close_time) EXPECT_LE(*fs[i - 1]->close_time, fs[i]->open_time);
  }
}

TEST(FrameProperties, PingsLieStrictlyInsideTheFrame) {
  std::mt19937_64 rng(5);
  auto events = random_stream(rng, 400, 4, 8);
  for (std::size_t i = 0; i < events.size(); ++i) events[i].timestamp = t0 + minutes(7 * static_cast<int>(i));
  for (const auto& f : build_frames(events)) {
    if (!f.closed()) continue;
    std::uint32_t inside = 0;
    for (const auto& e : events)
      inside += e.sender == f.opener && e.recipient == f.responder && e.timestamp > f.open_time &&
                e.timestamp < *f.close_time;
    EXPECT_EQ(inside, f.ping_count);
  }
}

TEST(FrameProperties, TimeShiftInvariance) {
  std::mt19937_64 rng(3);
  const auto events = random_stream(rng, 500, 5, 10);
  auto shifted = events;
  for (auto& e : shifted) e.timestamp += hours(24 * 365 + 7);
  const auto a = build_frames(events), b = build_frames(shifted);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].ping_count, b[i].ping_count);
    EXPECT_EQ(a[i].response_hours(), b[i].response_hours());
  }
}

TEST(FrameProperties, LongerHorizonNeverClosesFewer) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const auto events = random_stream(rng, 400, 2 + trial % 5, 60);
    std::size_t prev = 0;
    for (double h : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 8.0, 14.0, 30.0, 365.0}) {
      FrameOptions opt;
      opt.horizon_days = h;
      std::size_t closed = 0;
      for (const auto& f : build_frames(events, opt)) closed += f.closed();
      EXPECT_GE(closed, prev) << "trial " << trial << " horizon " << h;
      prev = closed;
    }
  }
}

TEST(Interactivity, AveragesOverClosedFramesOpenedByTheActor) {
  const ActorId p{0};
  std::vector<Frame> frames{{p, ActorId{1}, t0, 0, t0 + hours(2)},
                            {p, ActorId{2}, t0, 2, t0 + hours(4)},
                            {p, ActorId{3}, t0, 5, std::nullopt}};
  const auto v = interactivity(frames, p);
  EXPECT_DOUBLE_EQ(*v.alter_art_hours, 3.0);
  EXPECT_DOUBLE_EQ(*v.ego_nudges, 1.0);
  EXPECT_EQ(v.open_frames_out, 1u);
  EXPECT_FALSE(v.ego_art_hours);
  EXPECT_FALSE(v.alter_nudges);
}

TEST(Interactivity, ActorWhoNeverRespondsHasNoEgoSide) {
  const ActorId p{4};
  std::vector<Frame> frames{{ActorId{1}, p, t0, 1, std::nullopt},
                            {ActorId{2}, p, t0, 0, std::nullopt},
                            {ActorId{1}, ActorId{2}, t0, 0, t0 + hours(1)}};
  const auto v = interactivity(frames, p);
  EXPECT_FALSE(v.ego_art_hours);
  EXPECT_FALSE(v.alter_nudges);
  EXPECT_EQ(v.open_frames_in, 2u);
  const auto all = interactivity_all(frames, 5);
  EXPECT_EQ(all[2].ego_art_hours, 1.0);
  EXPECT_EQ(all[1].alter_art_hours, 1.0);
}

TEST(Interactivity, SingleActorViewEqualsBulkComputation) {
  std::mt19937_64 rng(8);
  const auto frames = build_frames(random_stream(rng, 600, 7, 10));
  const auto all = interactivity_all(frames, 7);
  for (std::uint32_t a = 0; a < 7; ++a) {
    const auto one = interactivity(frames, ActorId{a});
    EXPECT_EQ(one.ego_art_hours.has_value(), all[a].ego_art_hours.has_value());
    if (one.ego_art_hours) EXPECT_NEAR(*one.ego_art_hours, *all[a].ego_art_hours, 1e-12);
    if (one.alter_art_hours) EXPECT_NEAR(*one.alter_art_hours, *all[a].alter_art_hours, 1e-12);
    EXPECT_EQ(one.open_frames_in, all[a].open_frames_in);
    EXPECT_EQ(one.open_frames_out, all[a].open_frames_out);
  }
}

TEST(FrameDump, CsvColumnsAndCensoredMarker) {
  ActorDirectory dir;
  dir.add("a@x", true, 1, Label::None);
  dir.add("b@x", true, 1, Label::None);
  std::ostringstream out;
  write_frames(out, build_frames({ev(1, t0, 0, 1), ev(2, t0 + minutes(90), 1, 0)}), dir);
  EXPECT_EQ(out.str(),
            "opener,responder,open_time,ping_count,close_time_or_CENSORED,response_hours\n"
            "a@x,b@x,2016-04-01T00:00:00Z,0,2016-04-01T01:30:00Z,1.5\n"
            "b@x,a@x,2016-04-01T01:30:00Z,0,CENSORED,\n");
}
