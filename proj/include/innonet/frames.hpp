// Dyadic conversation frames and the response-time / nudge metrics built on them.
//
// Rule, per ordered dyad (A,B), replayed in canonical event order:
//   * an A->B event with no live A->B frame opens one;
//   * an A->B event while an A->B frame is live is a ping on it;
//   * a B->A event closes the live A->B frame (at most one), and is itself
//     an opener or a ping for the B->A direction;
//   * a frame whose close would come more than `horizon` after its opening
//     is censored; frames still live at the end of the stream are censored.
#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <ostream>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "innonet/core.hpp"
#include "innonet/csv.hpp"
#include "innonet/directory.hpp"
#include "innonet/ingest.hpp"

namespace innonet {

struct Frame {
  ActorId opener;
  ActorId responder;
  Timestamp open_time;
  std::uint32_t ping_count = 0;
  std::optional<Timestamp> close_time;  // nullopt == censored

  bool closed() const { return close_time.has_value(); }
  std::optional<double> response_hours() const {
    if (!close_time) return std::nullopt;
    return std::chrono::duration<double, std::ratio<3600>>(*close_time - open_time).count();
  }
  friend bool operator==(const Frame&, const Frame&) = default;
};

inline bool frame_less(const Frame& a, const Frame& b) {
  return std::tie(a.open_time, a.opener, a.responder) < std::tie(b.open_time, b.opener, b.responder);
}

struct FrameOptions {
  double horizon_days = 14.0;
  unsigned threads = 0;  // 0 = hardware concurrency
};

namespace detail {

struct LiveFrame {
  Timestamp open_time;
  std::uint32_t pings = 0;
};

/// Replays the events of one unordered dyad {lo, hi}, already in canonical order.
inline void replay_dyad(const std::vector<MessageEvent>& events, const std::uint32_t* idx, std::size_t n,
                        std::chrono::seconds horizon, std::vector<Frame>& out) {
  // live[0]: lo->hi, live[1]: hi->lo
  std::optional<LiveFrame> live[2];
  ActorId ends[2];
  ends[0] = std::min(events[idx[0]].sender, events[idx[0]].recipient);
  ends[1] = std::max(events[idx[0]].sender, events[idx[0]].recipient);
  const auto flush = [&](int dir, std::optional<Timestamp> close) {
    out.push_back({ends[dir], ends[1 - dir], live[dir]->open_time, live[dir]->pings, close});
    live[dir].reset();
  };
  for (std::size_t k = 0; k < n; ++k) {
    const auto& e = events[idx[k]];
    const int dir = e.sender == ends[0] ? 0 : 1;
    for (int d : {0, 1})
      if (live[d] && e.timestamp - live[d]->open_time > horizon) flush(d, std::nullopt);
    if (live[1 - dir]) flush(1 - dir, e.timestamp);
    if (live[dir]) ++live[dir]->pings;
    else live[dir] = LiveFrame{e.timestamp, 0};
  }
  for (int d : {0, 1})
    if (live[d]) flush(d, std::nullopt);
}

}  // namespace detail

/// Reconstructs frames from canonically ordered events. Output is sorted by
/// (open_time, opener, responder).
inline std::vector<Frame> build_frames(const std::vector<MessageEvent>& events, const FrameOptions& opt = {}) {
  if (!(opt.horizon_days > 0)) throw ConfigError("frame horizon must be positive");
  const std::chrono::seconds horizon{static_cast<long long>(std::llround(opt.horizon_days * 86400.0))};

  // Group event indices by unordered dyad, preserving canonical order inside each group.
  std::vector<std::uint32_t> idx(events.size());
  for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const auto key = [&](std::uint32_t i) {
    const auto a = events[i].sender.value, b = events[i].recipient.value;
    return (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
  };
  std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) { return key(a) < key(b); });
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (i == 0 || key(idx[i]) != key(idx[i - 1])) starts.push_back(i);
  starts.push_back(idx.size());

  const std::size_t groups = starts.size() - 1;
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, groups / 1024)));
  std::vector<std::vector<Frame>> parts(threads);
  const auto work = [&](unsigned t) {
    for (std::size_t g = t; g < groups; g += threads)
      detail::replay_dyad(events, idx.data() + starts[g], starts[g + 1] - starts[g], horizon, parts[t]);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  std::vector<Frame> frames;
  for (auto& p : parts) frames.insert(frames.end(), p.begin(), p.end());
  std::sort(frames.begin(), frames.end(), frame_less);
  return frames;
}

struct InteractivityVector {
  std::optional<double> ego_art_hours;    // how fast the actor answers others
  std::optional<double> alter_art_hours;  // how fast others answer the actor
  std::optional<double> ego_nudges;       // pings the actor needs before an answer
  std::optional<double> alter_nudges;     // pings others need before the actor answers
  std::size_t open_frames_out = 0;        // censored frames opened by the actor
  std::size_t open_frames_in = 0;         // censored frames aimed at the actor
};

/// Interactivity for every actor id in [0, actor_count).
inline std::vector<InteractivityVector> interactivity_all(const std::vector<Frame>& frames, std::size_t actor_count) {
  struct Acc {
    double out_hours = 0, out_pings = 0, in_hours = 0, in_pings = 0;
    std::size_t out_n = 0, in_n = 0, cens_out = 0, cens_in = 0;
  };
  std::vector<Acc> acc(actor_count);
  for (const auto& f : frames) {
    if (f.opener.value >= actor_count || f.responder.value >= actor_count)
      throw AnalysisError("frame references an unknown actor");
    auto& o = acc[f.opener.value];
    auto& r = acc[f.responder.value];
    if (!f.closed()) {
      ++o.cens_out;
      ++r.cens_in;
      continue;
    }
    const double h = *f.response_hours();
    o.out_hours += h;
    o.out_pings += f.ping_count;
    ++o.out_n;
    r.in_hours += h;
    r.in_pings += f.ping_count;
    ++r.in_n;
  }
  std::vector<InteractivityVector> out(actor_count);
  for (std::size_t i = 0; i < actor_count; ++i) {
    const auto& a = acc[i];
    auto& v = out[i];
    if (a.out_n) {
      v.alter_art_hours = a.out_hours / static_cast<double>(a.out_n);
      v.ego_nudges = a.out_pings / static_cast<double>(a.out_n);
    }
    if (a.in_n) {
      v.ego_art_hours = a.in_hours / static_cast<double>(a.in_n);
      v.alter_nudges = a.in_pings / static_cast<double>(a.in_n);
    }
    v.open_frames_out = a.cens_out;
    v.open_frames_in = a.cens_in;
  }
  return out;
}

inline InteractivityVector interactivity(const std::vector<Frame>& frames, ActorId actor) {
  std::vector<Frame> mine;
  for (const auto& f : frames)
    if (f.opener == actor || f.responder == actor) mine.push_back(f);
  // Re-key to a two-slot universe: 0 = actor, 1 = everyone else.
  for (auto& f : mine) {
    f.opener = ActorId{f.opener == actor ? 0u : 1u};
    f.responder = ActorId{f.responder == actor ? 0u : 1u};
  }
  return interactivity_all(mine, 2)[0];
}

inline nlohmann::ordered_json frame_diagnostics(const std::vector<Frame>& frames, double horizon_days) {
  std::size_t closed = 0, pings = 0;
  for (const auto& f : frames) {
    closed += f.closed();
    pings += f.ping_count;
  }
  nlohmann::ordered_json j;
  j["horizon_days"] = horizon_days;
  j["frames"] = frames.size();
  j["closed"] = closed;
  j["censored"] = frames.size() - closed;
  j["pings"] = pings;
  return j;
}

inline void write_frames(std::ostream& out, const std::vector<Frame>& frames, const ActorDirectory& dir) {
  out << "opener,responder,open_time,ping_count,close_time_or_CENSORED,response_hours\n";
  for (const auto& f : frames) {
    out << csv::quote(dir[f.opener].address) << ',' << csv::quote(dir[f.responder].address) << ','
        << format_iso(f.open_time) << ',' << f.ping_count << ','
        << (f.close_time ? format_iso(*f.close_time) : std::string("CENSORED")) << ','
        << fmt6(f.response_hours()) << '\n';
  }
}

}  // namespace innonet
