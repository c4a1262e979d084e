// Directed communication graph and its connectivity metrics.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <ostream>
#include <span>
#include <tuple>
#include <thread>
#include <vector>

#include "innonet/core.hpp"
#include "innonet/csv.hpp"
#include "innonet/directory.hpp"
#include "innonet/ingest.hpp"

namespace innonet {

struct Arc {
  ActorId from;
  ActorId to;
  std::uint64_t count = 0;
  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Nodes are the dense ids [0, node_count()). Arcs are unique per ordered
/// dyad, sorted by (from, to), and never self-arcs.
class CommGraph {
 public:
  CommGraph() = default;
  CommGraph(std::size_t node_count, std::vector<Arc> arcs) : n_(node_count), arcs_(std::move(arcs)) {
    std::sort(arcs_.begin(), arcs_.end(),
              [](const Arc& a, const Arc& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
    out_off_.assign(n_ + 1, 0);
    for (const auto& a : arcs_) {
      if (a.from.value >= n_ || a.to.value >= n_) throw AnalysisError("arc endpoint outside node set");
      if (a.from == a.to) throw AnalysisError("self-arc in communication graph");
      ++out_off_[a.from.value + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) out_off_[i + 1] += out_off_[i];
    out_adj_.resize(arcs_.size());
    for (std::size_t i = 0; i < arcs_.size(); ++i) out_adj_[i] = arcs_[i].to.value;

    // Direction-agnostic neighbor lists for degree.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> und;
    und.reserve(arcs_.size() * 2);
    for (const auto& a : arcs_) {
      und.emplace_back(a.from.value, a.to.value);
      und.emplace_back(a.to.value, a.from.value);
    }
    std::sort(und.begin(), und.end());
    und.erase(std::unique(und.begin(), und.end()), und.end());
    nb_off_.assign(n_ + 1, 0);
    for (const auto& [u, v] : und) ++nb_off_[u + 1];
    for (std::size_t i = 0; i < n_; ++i) nb_off_[i + 1] += nb_off_[i];
    nb_adj_.resize(und.size());
    for (std::size_t i = 0; i < und.size(); ++i) nb_adj_[i] = und[i].second;
  }

  std::size_t node_count() const { return n_; }
  bool has_node(ActorId id) const { return id.value < n_; }
  const std::vector<Arc>& arcs() const { return arcs_; }

  std::uint64_t total_count() const {
    std::uint64_t s = 0;
    for (const auto& a : arcs_) s += a.count;
    return s;
  }

  std::span<const std::uint32_t> out_neighbors(std::uint32_t v) const {
    return {out_adj_.data() + out_off_[v], out_adj_.data() + out_off_[v + 1]};
  }
  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {nb_adj_.data() + nb_off_[v], nb_adj_.data() + nb_off_[v + 1]};
  }

  /// Same nodes with every arc mirrored (counts summed per unordered pair).
  CommGraph symmetrized() const {
    std::vector<Arc> arcs;
    for (const auto& a : arcs_) {
      arcs.push_back(a);
      arcs.push_back({a.to, a.from, a.count});
    }
    std::sort(arcs.begin(), arcs.end(),
              [](const Arc& a, const Arc& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
    std::vector<Arc> merged;
    for (const auto& a : arcs) {
      if (!merged.empty() && merged.back().from == a.from && merged.back().to == a.to) merged.back().count += a.count;
      else merged.push_back(a);
    }
    return CommGraph(n_, std::move(merged));
  }

 private:
  std::size_t n_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> out_off_;
  std::vector<std::uint32_t> out_adj_;
  std::vector<std::size_t> nb_off_;
  std::vector<std::uint32_t> nb_adj_;
};

/// Aggregates events into one arc per ordered dyad. The node set is
/// [0, max(universe, largest id + 1)).
inline CommGraph build_graph(const std::vector<MessageEvent>& events, std::size_t universe = 0) {
  std::vector<std::uint64_t> keys;
  keys.reserve(events.size());
  std::size_t n = universe;
  for (const auto& e : events) {
    if (e.sender == e.recipient) throw AnalysisError("self-loop event reached graph construction");
    keys.push_back((static_cast<std::uint64_t>(e.sender.value) << 32) | e.recipient.value);
    n = std::max<std::size_t>(n, std::max(e.sender.value, e.recipient.value) + std::size_t{1});
  }
  std::sort(keys.begin(), keys.end());
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    arcs.push_back({ActorId{static_cast<std::uint32_t>(keys[i] >> 32)},
                    ActorId{static_cast<std::uint32_t>(keys[i] & 0xffffffffu)}, j - i});
    i = j;
  }
  return CommGraph(n, std::move(arcs));
}

/// Number of distinct actors the actor sent to or received from.
inline std::size_t degree(const CommGraph& g, ActorId actor) {
  if (!g.has_node(actor)) throw AnalysisError("degree: unknown actor " + std::to_string(actor.value));
  return g.neighbors(actor.value).size();
}

struct BetweennessOptions {
  bool symmetrize = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Unnormalized shortest-path betweenness on the unweighted directed graph,
/// accumulated from single-source BFS dependencies. Sources are reduced in
/// fixed-size blocks summed in block order, so the result does not depend on
/// the thread count.
inline std::vector<double> betweenness(const CommGraph& graph, const BetweennessOptions& opt = {}) {
  const CommGraph sym = opt.symmetrize ? graph.symmetrized() : CommGraph{};
  const CommGraph& g = opt.symmetrize ? sym : graph;
  const std::size_t n = g.node_count();
  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> partial(blocks);

  const auto run_block = [&](std::size_t b, std::vector<std::int64_t>& dist, std::vector<double>& sigma,
                             std::vector<double>& delta, std::vector<std::uint32_t>& order) {
    auto& acc = partial[b];
    acc.assign(n, 0.0);
    for (std::size_t s = b * kBlock; s < std::min(n, (b + 1) * kBlock); ++s) {
      if (g.out_neighbors(static_cast<std::uint32_t>(s)).empty()) continue;
      order.clear();
      dist[s] = 0;
      sigma[s] = 1.0;
      order.push_back(static_cast<std::uint32_t>(s));
      for (std::size_t head = 0; head < order.size(); ++head) {
        const auto v = order[head];
        for (const auto w : g.out_neighbors(v)) {
          if (dist[w] < 0) {
            dist[w] = dist[v] + 1;
            order.push_back(w);
          }
          if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
        }
      }
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto w = *it;
        for (const auto x : g.out_neighbors(w))
          if (dist[x] == dist[w] + 1) delta[w] += sigma[w] / sigma[x] * (1.0 + delta[x]);
        if (w != s) acc[w] += delta[w];
      }
      for (const auto v : order) {
        dist[v] = -1;
        sigma[v] = 0.0;
        delta[v] = 0.0;
      }
    }
  };

  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, blocks)));
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    std::vector<std::int64_t> dist(n, -1);
    std::vector<double> sigma(n, 0.0), delta(n, 0.0);
    std::vector<std::uint32_t> order;
    order.reserve(n);
    for (std::size_t b; (b = next.fetch_add(1)) < blocks;) run_block(b, dist, sigma, delta, order);
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  std::vector<double> bc(n, 0.0);
  for (const auto& p : partial)
    for (std::size_t v = 0; v < n; ++v) bc[v] += p[v];
  return bc;
}

struct MessageCounts {
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
  std::int64_t received_minus_sent() const {
    return static_cast<std::int64_t>(received) - static_cast<std::int64_t>(sent);
  }
  friend bool operator==(const MessageCounts&, const MessageCounts&) = default;
};

inline std::vector<MessageCounts> message_counts_all(const std::vector<MessageEvent>& events, std::size_t actor_count) {
  std::vector<MessageCounts> out(actor_count);
  for (const auto& e : events) {
    if (e.sender.value >= actor_count || e.recipient.value >= actor_count)
      throw AnalysisError("event references an unknown actor");
    ++out[e.sender.value].sent;
    ++out[e.recipient.value].received;
  }
  return out;
}

inline MessageCounts message_counts(const std::vector<MessageEvent>& events, ActorId actor) {
  MessageCounts c;
  for (const auto& e : events) {
    c.sent += e.sender == actor;
    c.received += e.recipient == actor;
  }
  return c;
}

struct ConnectivityVector {
  std::size_t degree = 0;
  double betweenness = 0.0;
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
  std::int64_t received_minus_sent = 0;
};

/// Connectivity for every graph node; events must be the ones the graph was built from.
inline std::vector<ConnectivityVector> connectivity_all(const CommGraph& g, const std::vector<MessageEvent>& events,
                                                        const BetweennessOptions& opt = {}) {
  const auto bc = betweenness(g, opt);
  const auto counts = message_counts_all(events, g.node_count());
  std::vector<ConnectivityVector> out(g.node_count());
  for (std::uint32_t v = 0; v < g.node_count(); ++v) {
    out[v].degree = g.neighbors(v).size();
    out[v].betweenness = bc[v];
    out[v].sent = counts[v].sent;
    out[v].received = counts[v].received;
    out[v].received_minus_sent = counts[v].received_minus_sent();
  }
  return out;
}

inline void write_graph(std::ostream& out, const CommGraph& g, const ActorDirectory& dir) {
  out << "sender,recipient,count\n";
  for (const auto& a : g.arcs())
    out << csv::quote(dir[a.from].address) << ',' << csv::quote(dir[a.to].address) << ',' << a.count << '\n';
}

}  // namespace innonet
