#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "innonet/core.hpp"
#include "innonet/csv.hpp"

namespace innonet {

struct ActorProfile {
  ActorId id;
  std::string address;  // canonical lowercase
  bool internal = false;
  std::optional<int> rank;  // 1 = highest, 3 = lowest
  Label label = Label::None;
};

/// Registry of actors keyed both by dense id and by canonical address.
class ActorDirectory {
 public:
  std::size_t size() const { return actors_.size(); }
  const ActorProfile& operator[](ActorId id) const { return actors_.at(id.value); }
  const std::vector<ActorProfile>& actors() const { return actors_; }

  std::optional<ActorId> find(std::string_view address) const {
    const auto it = by_address_.find(to_lower(trim(address)));
    if (it == by_address_.end()) return std::nullopt;
    return it->second;
  }

  /// Registers a new actor; throws InputError on a duplicate address.
  ActorId add(std::string_view address, bool internal, std::optional<int> rank, Label label) {
    std::string canon = to_lower(trim(address));
    if (canon.empty()) throw InputError("directory: empty address");
    if (by_address_.contains(canon)) throw InputError("directory: duplicate address " + canon);
    if (rank && (*rank < 1 || *rank > 3)) throw InputError("directory: rank out of {1,2,3} for " + canon);
    if (!internal && label != Label::None) throw InputError("directory: external actor carries a label: " + canon);
    const ActorId id{static_cast<std::uint32_t>(actors_.size())};
    by_address_.emplace(canon, id);
    actors_.push_back({id, std::move(canon), internal, rank, label});
    return id;
  }

  /// Returns the existing id or auto-registers an external actor.
  ActorId resolve(std::string_view address, bool* registered = nullptr) {
    if (auto id = find(address)) {
      if (registered) *registered = false;
      return *id;
    }
    if (registered) *registered = true;
    return add(address, false, std::nullopt, Label::None);
  }

 private:
  std::vector<ActorProfile> actors_;
  std::unordered_map<std::string, ActorId> by_address_;
};

inline std::optional<bool> parse_bool(std::string_view s) {
  const auto t = to_lower(trim(s));
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  return std::nullopt;
}

/// Reads `address,internal,rank,label` with a header row.
inline ActorDirectory read_directory(std::istream& in) {
  ActorDirectory dir;
  std::string line;
  std::vector<std::string> f;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!csv::split(line, f) || f.size() != 4)
      throw InputError("directory line " + std::to_string(lineno) + ": expected 4 fields");
    if (header) {
      header = false;
      if (trim(f[0]) == "address") continue;
    }
    const auto internal = parse_bool(f[1]);
    if (!internal) throw InputError("directory line " + std::to_string(lineno) + ": bad internal flag");
    std::optional<int> rank;
    if (const auto r = trim(f[2]); !r.empty()) {
      if (r != "1" && r != "2" && r != "3")
        throw InputError("directory line " + std::to_string(lineno) + ": rank must be 1, 2 or 3");
      rank = r[0] - '0';
    }
    const auto label = parse_label(trim(f[3]));
    if (!label) throw InputError("directory line " + std::to_string(lineno) + ": unknown label");
    dir.add(f[0], *internal, rank, *label);
  }
  return dir;
}

inline void write_directory(std::ostream& out, const ActorDirectory& dir) {
  out << "address,internal,rank,label\n";
  for (const auto& a : dir.actors()) {
    out << csv::quote(a.address) << ',' << (a.internal ? "true" : "false") << ','
        << (a.rank ? std::to_string(*a.rank) : std::string{}) << ',' << to_string(a.label) << '\n';
  }
}

}  // namespace innonet
