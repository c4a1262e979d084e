// Seeded, role-parameterized generator of synthetic email corpora.
//
// Each internal actor belongs to a community block and carries individual
// multipliers around its role profile. Contacts are drawn preferentially by
// receive weight, mostly inside the actor's block. Every day each actor
// starts a Poisson number of threads; a recipient may reply after a
// log-normal delay, the conversation may continue for a few more turns, and
// the sender of each turn may ping while waiting for the next one.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "innonet/core.hpp"
#include "innonet/directory.hpp"
#include "innonet/ingest.hpp"

namespace innonet {

struct RoleProfile {
  Label role = Label::None;
  std::size_t population = 0;
  double contact_breadth_mult = 1.0;
  double send_rate_per_day = 3.0;      // new threads per actor-day
  double reply_mean_hours = 4.0;       // log-normal median of this actor's reply delay
  double reply_prob = 0.6;
  double ping_propensity = 0.3;        // expected pings per turn, sent while awaiting the next turn
  double receive_bias = 1.0;           // multiplier on being chosen as a recipient
  std::array<double, 3> rank_distribution = {0.05, 0.25, 0.70};
  double cross_block_share = 0.1;      // share of contacts drawn outside the home block
  double elicited_reply_speed = 1.0;   // multiplier on contacts' reply delay towards this role
};

struct SynthConfig {
  std::uint64_t seed = 1;
  int days = 91;
  Timestamp start = make_timestamp(2016, 4, 1, 0, 0, 0).value();
  std::vector<RoleProfile> profiles;
  std::size_t external_actor_count = 400;
  double external_send_rate = 0.8;
  double attachment_exponent = 2.5;    // Pareto shape of actor attractiveness; smaller = more skew
  std::size_t blocks = 20;
  double base_breadth = 24.0;          // mean contact-list size before role multipliers
  double individual_sigma = 0.45;      // log-normal spread of individual multipliers
  double external_contact_share = 0.05;
  double extra_recipient_prob = 0.35;  // geometric continuation for additional recipients
  double cc_share = 0.5;               // share of additional recipients placed on CC
  double cc_reply_factor = 0.3;
  double follow_up_prob = 0.4;        // chance the thread sender answers the first reply
  double follow_up_decay = 0.6;       // each further turn is this much less likely
  double reply_sigma = 1.0;            // log-normal sigma of reply delays
};

/// Frozen calibration: 1944 internal actors with 26/131/54 labeled, one quarter.
inline SynthConfig default_synth_config(std::uint64_t seed = 1) {
  SynthConfig c;
  c.seed = seed;
  RoleProfile none;
  none.role = Label::None;
  none.population = 1733;
  none.send_rate_per_day = 3.3;

  RoleProfile admin = none;
  admin.role = Label::Admin;
  admin.population = 26;
  admin.contact_breadth_mult = 1.4;
  admin.send_rate_per_day = 2.2;
  admin.reply_prob = 0.45;
  admin.ping_propensity = 1.0;
  admin.receive_bias = 2.5;
  admin.rank_distribution = {0.25, 0.45, 0.30};

  RoleProfile product = none;
  product.role = Label::Product;
  product.population = 131;
  product.contact_breadth_mult = 1.05;
  product.receive_bias = 1.8;
  product.elicited_reply_speed = 0.25;
  product.cross_block_share = 0.08;

  RoleProfile award = none;
  award.role = Label::Award;
  award.population = 54;
  award.contact_breadth_mult = 3.2;
  award.send_rate_per_day = 3.74;
  award.receive_bias = 1.4;
  award.cross_block_share = 0.5;
  award.rank_distribution = {0.08, 0.30, 0.62};

  c.profiles = {none, admin, product, award};
  return c;
}

/// Same populations, every role behaving like NONE.
inline SynthConfig null_synth_config(std::uint64_t seed = 1) {
  auto c = default_synth_config(seed);
  const RoleProfile base = c.profiles.front();
  for (auto& p : c.profiles) {
    const auto role = p.role;
    const auto pop = p.population;
    p = base;
    p.role = role;
    p.population = pop;
  }
  return c;
}

struct SynthOutput {
  std::vector<MessageEvent> events;
  ActorDirectory directory;
  nlohmann::ordered_json ground_truth;
};

namespace detail {

/// Weighted sampling over a fixed list via cumulative sums.
class WeightedPicker {
 public:
  WeightedPicker() = default;
  explicit WeightedPicker(const std::vector<double>& w) {
    cum_.reserve(w.size());
    double s = 0;
    for (const double x : w) cum_.push_back(s += x);
  }
  bool empty() const { return cum_.empty() || cum_.back() <= 0; }
  template <class Rng>
  std::size_t pick(Rng& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, cum_.back())(rng);
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()), cum_.size() - 1);
  }

 private:
  std::vector<double> cum_;
};

}  // namespace detail

inline SynthOutput generate(const SynthConfig& cfg) {
  if (cfg.days < 1) throw ConfigError("synth: days must be at least 1");
  if (cfg.profiles.empty()) throw ConfigError("synth: no role profiles");
  if (cfg.blocks < 1) throw ConfigError("synth: blocks must be at least 1");
  if (!(cfg.attachment_exponent > 0)) throw ConfigError("synth: attachment_exponent must be positive");
  std::size_t internal_n = 0;
  for (const auto& p : cfg.profiles) {
    internal_n += p.population;
    if (p.contact_breadth_mult < 0 || p.send_rate_per_day < 0 || !(p.reply_mean_hours > 0) || p.reply_prob < 0 ||
        p.reply_prob > 1 || p.ping_propensity < 0 || p.receive_bias < 0 || p.cross_block_share < 0 ||
        p.cross_block_share > 1 || !(p.elicited_reply_speed > 0))
      throw ConfigError("synth: role profile " + std::string(to_string(p.role)) + " out of range");
    const double rw = p.rank_distribution[0] + p.rank_distribution[1] + p.rank_distribution[2];
    if (!(rw > 0) || *std::min_element(p.rank_distribution.begin(), p.rank_distribution.end()) < 0)
      throw ConfigError("synth: rank weights must be non-negative with a positive sum");
  }
  if (internal_n < 2) throw ConfigError("synth: need at least 2 internal actors");
  for (const auto& p : cfg.profiles)
    if (p.population && cfg.base_breadth * p.contact_breadth_mult > static_cast<double>(internal_n - 1))
      throw ConfigError("synth: contact breadth exceeds the population for role " + std::string(to_string(p.role)));

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto indiv = [&] { return std::exp(cfg.individual_sigma * gauss(rng) - 0.5 * cfg.individual_sigma * cfg.individual_sigma); };

  // Roles in shuffled order so ids carry no role information.
  std::vector<std::size_t> role_of;
  for (std::size_t r = 0; r < cfg.profiles.size(); ++r)
    role_of.insert(role_of.end(), cfg.profiles[r].population, r);
  std::shuffle(role_of.begin(), role_of.end(), rng);

  struct Actor {
    std::size_t profile = 0;  // index into cfg.profiles; SIZE_MAX for externals
    std::size_t block = 0;
    double receive_weight = 1;
    double send_rate = 0;
    double reply_median = 4;
    double reply_prob = 0.5;
    double ping = 0;
    double elicited = 1;
    std::vector<std::uint32_t> contacts;
    detail::WeightedPicker picker;
  };
  const std::size_t total = internal_n + cfg.external_actor_count;
  std::vector<Actor> actors(total);

  SynthOutput out;
  char buf[64];
  for (std::size_t i = 0; i < internal_n; ++i) {
    const auto& p = cfg.profiles[role_of[i]];
    auto& a = actors[i];
    a.profile = role_of[i];
    a.block = i % cfg.blocks;
    const double attract = std::min(50.0, std::pow(1.0 - unif(rng), -1.0 / cfg.attachment_exponent));
    a.receive_weight = attract * p.receive_bias * indiv();
    a.send_rate = p.send_rate_per_day * indiv();
    a.reply_median = p.reply_mean_hours * indiv();
    a.reply_prob = std::clamp(p.reply_prob * indiv(), 0.0, 1.0);
    a.ping = p.ping_propensity * indiv();
    a.elicited = p.elicited_reply_speed;
    std::discrete_distribution<int> rank_dist(p.rank_distribution.begin(), p.rank_distribution.end());
    std::snprintf(buf, sizeof buf, "u%05zu@corp.example", i);
    out.directory.add(buf, true, rank_dist(rng) + 1, p.role);
  }
  for (std::size_t i = internal_n; i < total; ++i) {
    auto& a = actors[i];
    a.profile = SIZE_MAX;
    a.block = i % cfg.blocks;
    a.receive_weight = 0.5 * indiv();
    a.send_rate = cfg.external_send_rate * indiv();
    a.reply_median = 8.0 * indiv();
    a.reply_prob = 0.5;
    a.ping = 0.1;
    std::snprintf(buf, sizeof buf, "x%05zu@partner.example", i - internal_n);
    out.directory.add(buf, false, std::nullopt, Label::None);
  }

  // Per-block preferential pickers over internal actors, and one over externals.
  std::vector<std::vector<std::uint32_t>> block_members(cfg.blocks);
  for (std::uint32_t i = 0; i < internal_n; ++i) block_members[actors[i].block].push_back(i);
  std::vector<detail::WeightedPicker> block_pickers;
  for (const auto& members : block_members) {
    std::vector<double> w;
    for (const auto m : members) w.push_back(actors[m].receive_weight);
    block_pickers.emplace_back(w);
  }
  std::vector<double> all_w;
  for (std::uint32_t i = 0; i < internal_n; ++i) all_w.push_back(actors[i].receive_weight);
  const detail::WeightedPicker internal_picker(all_w);

  const auto draw_contacts = [&](std::uint32_t self, std::size_t want, double cross, double ext_share) {
    auto& a = actors[self];
    std::vector<char> taken(total, 0);
    taken[self] = 1;
    std::size_t attempts = 0;
    while (a.contacts.size() < want && attempts++ < want * 50) {
      std::uint32_t c;
      if (cfg.external_actor_count && unif(rng) < ext_share) {
        c = static_cast<std::uint32_t>(internal_n + std::uniform_int_distribution<std::size_t>(0, cfg.external_actor_count - 1)(rng));
      } else if (cfg.blocks > 1 && unif(rng) < cross) {
        c = static_cast<std::uint32_t>(internal_picker.pick(rng));
      } else {
        const auto& members = block_members[a.block < cfg.blocks && self < internal_n ? a.block : 0];
        const auto& picker = block_pickers[self < internal_n ? a.block : 0];
        if (picker.empty()) continue;
        c = members[picker.pick(rng)];
      }
      if (taken[c]) continue;
      taken[c] = 1;
      a.contacts.push_back(c);
    }
  };
  for (std::uint32_t i = 0; i < internal_n; ++i) {
    const auto& p = cfg.profiles[actors[i].profile];
    const double mean = cfg.base_breadth * p.contact_breadth_mult * indiv();
    const auto want = static_cast<std::size_t>(std::clamp(std::round(mean), 1.0, static_cast<double>(internal_n - 1)));
    draw_contacts(i, want, p.cross_block_share, cfg.external_contact_share);
  }
  for (auto i = static_cast<std::uint32_t>(internal_n); i < total; ++i) {
    const auto want = static_cast<std::size_t>(3 + std::uniform_int_distribution<int>(0, 5)(rng));
    draw_contacts(i, std::min(want, internal_n), 1.0, 0.0);
  }
  for (auto& a : actors) {
    std::vector<double> w;
    for (const auto c : a.contacts) w.push_back(actors[c].receive_weight);
    a.picker = detail::WeightedPicker(w);
  }

  // Message generation.
  const auto window_end = cfg.start + std::chrono::days{cfg.days};
  std::uint64_t next_uid = 0;
  const auto uid = [&] {
    std::snprintf(buf, sizeof buf, "<%llu@synth>", static_cast<unsigned long long>(next_uid++));
    return std::string(buf);
  };
  auto& events = out.events;
  const auto emit = [&](Timestamp t, std::uint32_t from, std::uint32_t to, Channel ch, const std::string& id) {
    events.push_back({id, t, ActorId{from}, ActorId{to}, ch});
  };
  const auto delay_seconds = [&](double median_hours) {
    const double h = median_hours * std::exp(cfg.reply_sigma * gauss(rng));
    return std::chrono::seconds{static_cast<long long>(std::llround(h * 3600.0)) + 1};
  };
  std::vector<std::uint32_t> recips;
  struct Turn {
    Timestamp time;
    std::uint32_t from, to;
  };
  std::vector<Turn> turns;
  for (int day = 0; day < cfg.days; ++day) {
    const auto day_start = cfg.start + std::chrono::days{day};
    for (std::uint32_t s = 0; s < total; ++s) {
      auto& a = actors[s];
      if (a.contacts.empty() || a.send_rate <= 0) continue;
      const int threads = std::poisson_distribution<int>(a.send_rate)(rng);
      for (int th = 0; th < threads; ++th) {
        const Timestamp t0 = day_start + std::chrono::seconds{8 * 3600 + static_cast<long long>(unif(rng) * 36000.0)};
        recips.clear();
        recips.push_back(a.contacts[a.picker.pick(rng)]);
        while (recips.size() < a.contacts.size() && unif(rng) < cfg.extra_recipient_prob) {
          const auto c = a.contacts[a.picker.pick(rng)];
          if (std::find(recips.begin(), recips.end(), c) == recips.end()) recips.push_back(c);
        }
        const std::string id = uid();
        for (std::size_t k = 0; k < recips.size(); ++k) {
          const auto r = recips[k];
          const Channel ch = k > 0 && unif(rng) < cfg.cc_share ? Channel::Cc : Channel::To;
          emit(t0, s, r, ch, id);
          // Turns of the conversation: the first reply, then decaying back-and-forth.
          turns.clear();
          turns.push_back({t0, s, r});
          const double p_reply = actors[r].reply_prob * (ch == Channel::Cc ? cfg.cc_reply_factor : 1.0);
          for (double p_next = p_reply; unif(rng) < p_next;
               p_next = (turns.size() == 1 ? cfg.follow_up_prob : p_next * cfg.follow_up_decay)) {
            const auto& last = turns.back();
            const Timestamp t = last.time + delay_seconds(actors[last.to].reply_median * actors[last.from].elicited);
            if (t >= window_end) break;
            turns.push_back({t, last.to, last.from});
          }
          for (std::size_t k2 = 0; k2 < turns.size(); ++k2) {
            const auto& turn = turns[k2];
            if (k2 > 0) emit(turn.time, turn.from, turn.to, Channel::To, uid());
            if (k2 == 0 && ch == Channel::Cc) continue;
            // Pings from the turn's sender while waiting for the next turn.
            const int pings = std::poisson_distribution<int>(actors[turn.from].ping)(rng);
            const double span = k2 + 1 < turns.size() ? static_cast<double>((turns[k2 + 1].time - turn.time).count())
                                                       : 48.0 * 3600.0;
            for (int pg = 0; pg < pings; ++pg) {
              const Timestamp tp = turn.time + std::chrono::seconds{1 + static_cast<long long>(unif(rng) * std::max(0.0, span - 2))};
              if (tp < window_end) emit(tp, turn.from, turn.to, Channel::To, uid());
            }
          }
        }
      }
    }
  }

  std::sort(events.begin(), events.end(), canonical_less);

  auto& gt = out.ground_truth;
  gt["seed"] = cfg.seed;
  gt["days"] = cfg.days;
  gt["start"] = format_iso(cfg.start);
  gt["internal_actors"] = internal_n;
  gt["external_actors"] = cfg.external_actor_count;
  gt["events"] = events.size();
  gt["roles"] = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < cfg.profiles.size(); ++r) {
    const auto& p = cfg.profiles[r];
    double contacts = 0, ping = 0, recv = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < internal_n; ++i) {
      if (actors[i].profile != r) continue;
      ++n;
      contacts += static_cast<double>(actors[i].contacts.size());
      ping += actors[i].ping;
      recv += actors[i].receive_weight;
    }
    nlohmann::ordered_json j;
    j["role"] = to_string(p.role);
    j["population"] = p.population;
    j["contact_breadth_mult"] = p.contact_breadth_mult;
    j["send_rate_per_day"] = p.send_rate_per_day;
    j["reply_mean_hours"] = p.reply_mean_hours;
    j["reply_prob"] = p.reply_prob;
    j["ping_propensity"] = p.ping_propensity;
    j["receive_bias"] = p.receive_bias;
    j["cross_block_share"] = p.cross_block_share;
    j["elicited_reply_speed"] = p.elicited_reply_speed;
    j["mean_contacts"] = n ? round6(contacts / static_cast<double>(n)) : 0.0;
    j["mean_ping_propensity"] = n ? round6(ping / static_cast<double>(n)) : 0.0;
    j["mean_receive_weight"] = n ? round6(recv / static_cast<double>(n)) : 0.0;
    gt["roles"].push_back(j);
  }
  return out;
}

}  // namespace innonet
