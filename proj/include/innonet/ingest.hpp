// Ingestion: mbox archives and normalized event logs into a canonical,
// deduplicated stream of dyadic message events.
#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <future>
#include <iostream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "innonet/core.hpp"
#include "innonet/csv.hpp"
#include "innonet/directory.hpp"

namespace innonet {

/// One delivered copy of a message (a message to k recipients is k events).
struct MessageEvent {
  std::string message_uid;
  Timestamp timestamp;
  ActorId sender;
  ActorId recipient;
  Channel channel = Channel::To;

  friend bool operator==(const MessageEvent&, const MessageEvent&) = default;
};

struct CohortPolicy {
  Timestamp start = Timestamp::min();
  Timestamp end = Timestamp::max();
  bool keep_cross_boundary_edges = true;
  bool cc_counts_as_recipient = true;
};

/// Counters accumulated over every parse and normalization step.
///
/// For each input, `records_parsed + records_skipped == records_encountered`
/// where a record is one mbox message or one event-log row.
struct IngestDiagnostics {
  std::size_t records_encountered = 0;
  std::size_t records_parsed = 0;
  std::size_t records_skipped = 0;
  std::size_t events_emitted = 0;
  std::size_t deduped = 0;
  std::size_t self_loops = 0;
  std::size_t missing_timezone = 0;
  std::size_t folding_recoveries = 0;
  std::size_t synthesized_message_ids = 0;
  std::size_t invalid_addresses = 0;
  std::size_t unresolved_addresses = 0;
  std::size_t outside_window = 0;
  std::size_t cc_dropped = 0;
  std::size_t cross_boundary_dropped = 0;
  std::map<std::string, std::size_t> skip_reasons;

  void skip(const std::string& reason) {
    ++records_skipped;
    ++skip_reasons[reason];
  }

  void merge(const IngestDiagnostics& o) {
    records_encountered += o.records_encountered;
    records_parsed += o.records_parsed;
    records_skipped += o.records_skipped;
    events_emitted += o.events_emitted;
    deduped += o.deduped;
    self_loops += o.self_loops;
    missing_timezone += o.missing_timezone;
    folding_recoveries += o.folding_recoveries;
    synthesized_message_ids += o.synthesized_message_ids;
    invalid_addresses += o.invalid_addresses;
    unresolved_addresses += o.unresolved_addresses;
    outside_window += o.outside_window;
    cc_dropped += o.cc_dropped;
    cross_boundary_dropped += o.cross_boundary_dropped;
    for (const auto& [k, v] : o.skip_reasons) skip_reasons[k] += v;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["records_encountered"] = records_encountered;
    j["parsed"] = records_parsed;
    j["skipped"] = records_skipped;
    j["events_emitted"] = events_emitted;
    j["deduped"] = deduped;
    j["self_loops"] = self_loops;
    j["missing_timezone"] = missing_timezone;
    j["folding_recoveries"] = folding_recoveries;
    j["synthesized_message_ids"] = synthesized_message_ids;
    j["invalid_addresses"] = invalid_addresses;
    j["unresolved_addresses"] = unresolved_addresses;
    j["outside_window"] = outside_window;
    j["cc_dropped"] = cc_dropped;
    j["cross_boundary_dropped"] = cross_boundary_dropped;
    j["skip_reasons"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : skip_reasons) j["skip_reasons"][k] = v;
    return j;
  }
};

struct ParseResult {
  std::vector<MessageEvent> events;
  std::vector<std::string> unresolved;  // addresses auto-registered as external
};

struct CohortResult {
  std::vector<MessageEvent> events;
  std::vector<ActorId> cohort;  // ascending
};

namespace detail {

struct RawEvent {
  std::string uid;
  Timestamp timestamp;
  std::string sender;
  std::string recipient;
  Channel channel;
};

inline bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

inline int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

inline std::string strip_comments(std::string_view s) {
  std::string out;
  int depth = 0;
  bool quoted = false;
  for (char c : s) {
    if (quoted) {
      out.push_back(c);
      if (c == '"') quoted = false;
    } else if (c == '"' && depth == 0) {
      quoted = true;
      out.push_back(c);
    } else if (c == '(') {
      ++depth;
    } else if (c == ')' && depth > 0) {
      --depth;
    } else if (depth == 0) {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

/// Parses an ISO-8601 instant (`2016-04-01T09:30:00Z`, `+02:00` offsets,
/// space separator, fractional seconds truncated). `had_zone` reports
/// whether an explicit zone was present; absent zones are read as UTC.
inline std::optional<Timestamp> parse_iso8601(std::string_view s, bool* had_zone = nullptr) {
  s = trim(s);
  if (s.size() < 19) return std::nullopt;
  const auto d = [&](std::size_t pos, std::size_t n) { return s.substr(pos, n); };
  if (!detail::all_digits(d(0, 4)) || s[4] != '-' || !detail::all_digits(d(5, 2)) || s[7] != '-' ||
      !detail::all_digits(d(8, 2)) || (s[10] != 'T' && s[10] != ' ' && s[10] != 't') ||
      !detail::all_digits(d(11, 2)) || s[13] != ':' || !detail::all_digits(d(14, 2)) || s[16] != ':' ||
      !detail::all_digits(d(17, 2)))
    return std::nullopt;
  auto t = make_timestamp(detail::to_int(d(0, 4)), detail::to_int(d(5, 2)), detail::to_int(d(8, 2)),
                          detail::to_int(d(11, 2)), detail::to_int(d(14, 2)), detail::to_int(d(17, 2)));
  if (!t) return std::nullopt;
  std::size_t pos = 19;
  if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
    ++pos;
    const auto start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) return std::nullopt;
  }
  const auto zone = s.substr(pos);
  if (zone.empty()) {
    if (had_zone) *had_zone = false;
    return t;
  }
  if (had_zone) *had_zone = true;
  if (zone == "Z" || zone == "z") return t;
  if ((zone[0] == '+' || zone[0] == '-') && zone.size() >= 3) {
    std::string digits;
    for (char c : zone.substr(1))
      if (c != ':') digits.push_back(c);
    if ((digits.size() != 2 && digits.size() != 4) || !detail::all_digits(digits)) return std::nullopt;
    const int hh = detail::to_int(std::string_view(digits).substr(0, 2));
    const int mm = digits.size() == 4 ? detail::to_int(std::string_view(digits).substr(2, 2)) : 0;
    if (hh > 23 || mm > 59) return std::nullopt;
    const std::chrono::seconds off{(hh * 60 + mm) * 60};
    return zone[0] == '+' ? *t - off : *t + off;
  }
  return std::nullopt;
}

/// Parses an RFC 2822 `Date:` value, e.g. `Fri, 1 Apr 2016 09:30:00 -0700 (PDT)`.
inline std::optional<Timestamp> parse_rfc2822_date(std::string_view raw, bool* had_zone = nullptr) {
  const std::string s = detail::strip_comments(raw);
  std::vector<std::string> tok;
  {
    std::string cur;
    for (char c : s) {
      if (c == ' ' || c == '\t' || c == ',' || c == '\r' || c == '\n') {
        if (!cur.empty()) tok.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) tok.push_back(std::move(cur));
  }
  if (tok.empty()) return std::nullopt;
  static constexpr std::string_view kDays[] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
  static constexpr std::string_view kMonths[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                                 "jul", "aug", "sep", "oct", "nov", "dec"};
  std::size_t i = 0;
  if (const auto first = to_lower(tok[0]);
      first.size() >= 3 && std::find(std::begin(kDays), std::end(kDays), first.substr(0, 3)) != std::end(kDays))
    ++i;
  if (tok.size() < i + 4) {
    // ISO-8601 in a Date header is tolerated.
    return parse_iso8601(s, had_zone);
  }
  if (!detail::all_digits(tok[i]) || tok[i].size() > 2) return parse_iso8601(s, had_zone);
  const int day = detail::to_int(tok[i]);
  const auto mon = to_lower(tok[i + 1]);
  const auto mit = std::find(std::begin(kMonths), std::end(kMonths), std::string_view(mon).substr(0, 3));
  if (mon.size() < 3 || mit == std::end(kMonths)) return std::nullopt;
  const int month = static_cast<int>(mit - std::begin(kMonths)) + 1;
  if (!detail::all_digits(tok[i + 2])) return std::nullopt;
  int year = detail::to_int(tok[i + 2]);
  if (tok[i + 2].size() == 2) year += year < 50 ? 2000 : 1900;
  else if (tok[i + 2].size() == 3) year += 1900;
  // hh:mm[:ss]
  const std::string_view clock = tok[i + 3];
  int hh = 0, mm = 0, ss = 0;
  {
    std::vector<std::string_view> parts;
    std::size_t b = 0;
    while (true) {
      const auto c = clock.find(':', b);
      parts.push_back(clock.substr(b, c == std::string_view::npos ? std::string_view::npos : c - b));
      if (c == std::string_view::npos) break;
      b = c + 1;
    }
    if (parts.size() < 2 || parts.size() > 3) return std::nullopt;
    for (auto p : parts)
      if (!detail::all_digits(p) || p.size() > 2) return std::nullopt;
    hh = detail::to_int(parts[0]);
    mm = detail::to_int(parts[1]);
    ss = parts.size() == 3 ? detail::to_int(parts[2]) : 0;
  }
  auto t = make_timestamp(year, month, day, hh, mm, std::min(ss, 59));
  if (!t) return std::nullopt;
  if (tok.size() <= i + 4) {
    if (had_zone) *had_zone = false;
    return t;
  }
  const std::string_view zone = tok[i + 4];
  if ((zone[0] == '+' || zone[0] == '-') && zone.size() == 5 && detail::all_digits(zone.substr(1))) {
    if (had_zone) *had_zone = true;
    const int off = (detail::to_int(zone.substr(1, 2)) * 60 + detail::to_int(zone.substr(3, 2))) * 60;
    return zone[0] == '+' ? *t - std::chrono::seconds{off} : *t + std::chrono::seconds{off};
  }
  static const std::map<std::string, int, std::less<>> kZones = {
      {"ut", 0},   {"utc", 0},  {"gmt", 0},  {"z", 0},    {"est", -5}, {"edt", -4},
      {"cst", -6}, {"cdt", -5}, {"mst", -7}, {"mdt", -6}, {"pst", -8}, {"pdt", -7}};
  if (const auto it = kZones.find(to_lower(zone)); it != kZones.end()) {
    if (had_zone) *had_zone = true;
    return *t - std::chrono::hours{it->second};
  }
  if (had_zone) *had_zone = false;
  return t;
}

/// Extracts canonical (lowercase, display-name-free) addresses from an
/// address-list header value. Tokens without `@` are dropped and counted.
inline std::vector<std::string> parse_address_list(std::string_view value, std::size_t* invalid = nullptr) {
  const std::string s = detail::strip_comments(value);
  std::vector<std::string> items;
  {
    std::string cur;
    bool quoted = false;
    bool angle = false;
    for (char c : s) {
      if (quoted) {
        cur.push_back(c);
        if (c == '"') quoted = false;
        continue;
      }
      if (c == '"') quoted = true;
      if (c == '<') angle = true;
      if (c == '>') angle = false;
      if (!angle && (c == ',' || c == ';')) {
        items.push_back(std::move(cur));
        cur.clear();
        continue;
      }
      // group syntax: "team: a@x, b@y;"
      if (!angle && c == ':') {
        cur.clear();
        continue;
      }
      cur.push_back(c);
    }
    items.push_back(std::move(cur));
  }
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::string_view v = trim(item);
    if (v.empty()) continue;
    std::string addr;
    if (const auto lt = v.rfind('<'); lt != std::string_view::npos) {
      const auto gt = v.find('>', lt);
      addr = std::string(trim(v.substr(lt + 1, gt == std::string_view::npos ? std::string_view::npos : gt - lt - 1)));
    } else {
      addr = std::string(v);
      if (addr.find(' ') != std::string::npos) addr = addr.substr(addr.rfind(' ') + 1);
    }
    if (addr.size() >= 2 && addr.front() == '"' && addr.back() == '"') addr = addr.substr(1, addr.size() - 2);
    const auto at = addr.find('@');
    if (at == std::string::npos || at == 0 || at + 1 == addr.size() || addr.find_first_of(" \"<>") != std::string::npos) {
      if (invalid) ++*invalid;
      continue;
    }
    out.push_back(to_lower(addr));
  }
  return out;
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct MboxMessage {
  std::vector<std::pair<std::string, std::string>> headers;  // lowercase name, value
  bool has_headers = false;
};

inline void emit_message(const MboxMessage& msg, std::vector<RawEvent>& out, IngestDiagnostics& diag) {
  ++diag.records_encountered;
  std::string from, to, cc, date, mid;
  for (const auto& [name, value] : msg.headers) {
    if (name == "from" && from.empty()) from = value;
    else if (name == "to") to += (to.empty() ? "" : ",") + value;
    else if (name == "cc") cc += (cc.empty() ? "" : ",") + value;
    else if (name == "date" && date.empty()) date = value;
    else if (name == "message-id" && mid.empty()) mid = std::string(trim(value));
  }
  bool had_zone = true;
  const auto ts = date.empty() ? std::nullopt : parse_rfc2822_date(date, &had_zone);
  if (!ts) {
    diag.skip(date.empty() ? "missing_date" : "unparseable_date");
    return;
  }
  const auto senders = parse_address_list(from, &diag.invalid_addresses);
  if (senders.empty()) {
    diag.skip(from.empty() ? "missing_from" : "unparseable_from");
    return;
  }
  const auto to_list = parse_address_list(to, &diag.invalid_addresses);
  const auto cc_list = parse_address_list(cc, &diag.invalid_addresses);
  if (to_list.empty() && cc_list.empty()) {
    diag.skip("no_recipients");
    return;
  }
  if (!had_zone) ++diag.missing_timezone;
  if (mid.empty()) {
    ++diag.synthesized_message_ids;
    char buf[64];
    std::snprintf(buf, sizeof buf, "<synth-%016llx@innonet>",
                  static_cast<unsigned long long>(fnv1a(to, fnv1a(cc, fnv1a(from, fnv1a(date))))));
    mid = buf;
  }
  ++diag.records_parsed;
  for (const auto& r : to_list) out.push_back({mid, *ts, senders.front(), r, Channel::To});
  for (const auto& r : cc_list) out.push_back({mid, *ts, senders.front(), r, Channel::Cc});
  diag.events_emitted += to_list.size() + cc_list.size();
}

inline std::vector<RawEvent> parse_mbox_raw(std::istream& in, IngestDiagnostics& diag) {
  std::vector<RawEvent> out;
  std::string line;
  MboxMessage msg;
  bool in_message = false;
  bool in_headers = false;
  bool prev_blank = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("From ", 0) == 0 && (prev_blank || !in_message)) {
      if (in_message) emit_message(msg, out, diag);
      msg = {};
      in_message = true;
      in_headers = true;
      prev_blank = false;
      continue;
    }
    prev_blank = line.empty();
    if (!in_message || !in_headers) continue;
    if (line.empty()) {
      in_headers = false;
      continue;
    }
    if (line[0] == ' ' || line[0] == '\t') {
      if (msg.headers.empty()) {
        ++diag.folding_recoveries;  // continuation with nothing to continue
        continue;
      }
      msg.headers.back().second += ' ';
      msg.headers.back().second += trim(line);
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos || colon == 0 || line.find(' ') < colon) {
      // folded line that lost its leading whitespace
      ++diag.folding_recoveries;
      if (!msg.headers.empty()) {
        msg.headers.back().second += ' ';
        msg.headers.back().second += trim(line);
      }
      continue;
    }
    msg.headers.emplace_back(to_lower(trim(std::string_view(line).substr(0, colon))),
                             std::string(trim(std::string_view(line).substr(colon + 1))));
  }
  if (in_message) emit_message(msg, out, diag);
  return out;
}

inline std::vector<RawEvent> parse_event_log_raw(std::istream& in, IngestDiagnostics& diag) {
  std::vector<RawEvent> out;
  std::string line;
  std::vector<std::string> f;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("message_uid,", 0) == 0) continue;
    }
    ++diag.records_encountered;
    if (!csv::split(line, f) || f.size() != 5) {
      diag.skip("bad_field_count");
      continue;
    }
    const std::string uid(trim(f[0]));
    if (uid.empty()) {
      diag.skip("missing_uid");
      continue;
    }
    bool had_zone = true;
    const auto ts = parse_iso8601(f[1], &had_zone);
    if (!ts) {
      diag.skip("bad_timestamp");
      continue;
    }
    const auto ch = parse_channel(trim(f[4]));
    if (!ch) {
      diag.skip("unknown_channel");
      continue;
    }
    std::size_t bad = 0;
    auto s = parse_address_list(f[2], &bad);
    auto r = parse_address_list(f[3], &bad);
    if (bad || s.size() != 1 || r.size() != 1) {
      diag.invalid_addresses += bad;
      diag.skip("bad_address");
      continue;
    }
    if (!had_zone) ++diag.missing_timezone;
    ++diag.records_parsed;
    ++diag.events_emitted;
    out.push_back({uid, *ts, std::move(s.front()), std::move(r.front()), *ch});
  }
  return out;
}

inline ParseResult resolve(std::vector<RawEvent>&& raw, ActorDirectory& dir, IngestDiagnostics& diag) {
  ParseResult res;
  res.events.reserve(raw.size());
  for (auto& e : raw) {
    bool reg = false;
    const ActorId s = dir.resolve(e.sender, &reg);
    if (reg) res.unresolved.push_back(e.sender);
    const ActorId r = dir.resolve(e.recipient, &reg);
    if (reg) res.unresolved.push_back(e.recipient);
    res.events.push_back({std::move(e.uid), e.timestamp, s, r, e.channel});
  }
  diag.unresolved_addresses += res.unresolved.size();
  return res;
}

}  // namespace detail

/// Parses an mbox stream. Addresses unknown to `dir` are registered as
/// external actors and reported in `unresolved`.
inline ParseResult parse_mbox(std::istream& in, ActorDirectory& dir, IngestDiagnostics& diag) {
  return detail::resolve(detail::parse_mbox_raw(in, diag), dir, diag);
}

/// Parses `message_uid,timestamp,sender,recipient,channel` rows.
inline ParseResult parse_event_log(std::istream& in, ActorDirectory& dir, IngestDiagnostics& diag) {
  return detail::resolve(detail::parse_event_log_raw(in, diag), dir, diag);
}

enum class InputFormat { Auto, Mbox, EventLog };

/// Parses several files concurrently, then resolves addresses in file order
/// so actor ids do not depend on scheduling.
inline ParseResult parse_files(const std::vector<std::string>& paths, ActorDirectory& dir, IngestDiagnostics& diag,
                               InputFormat format = InputFormat::Auto) {
  struct Part {
    std::vector<detail::RawEvent> raw;
    IngestDiagnostics diag;
  };
  if (std::count(paths.begin(), paths.end(), "-") > 1) throw ConfigError("standard input given more than once");
  std::vector<std::future<Part>> jobs;
  for (const auto& path : paths) {
    jobs.push_back(std::async(std::launch::async, [path, format] {
      Part p;
      std::ifstream file;
      if (path != "-") {
        file.open(path, std::ios::binary);
        if (!file) throw InputError("cannot open input " + path);
      }
      std::istream& in = path == "-" ? std::cin : file;
      auto fmt = format;
      if (fmt == InputFormat::Auto) {
        if (path == "-") {
          // Sniff: an event log starts with its header row.
          fmt = in.peek() == 'm' ? InputFormat::EventLog : InputFormat::Mbox;
        } else {
          const bool csv_ext = path.size() >= 4 && to_lower(path.substr(path.size() - 4)) == ".csv";
          fmt = csv_ext ? InputFormat::EventLog : InputFormat::Mbox;
        }
      }
      p.raw = fmt == InputFormat::EventLog ? detail::parse_event_log_raw(in, p.diag)
                                           : detail::parse_mbox_raw(in, p.diag);
      return p;
    }));
  }
  ParseResult all;
  for (auto& job : jobs) {
    auto part = job.get();
    diag.merge(part.diag);
    auto res = detail::resolve(std::move(part.raw), dir, diag);
    all.events.insert(all.events.end(), std::make_move_iterator(res.events.begin()),
                      std::make_move_iterator(res.events.end()));
    all.unresolved.insert(all.unresolved.end(), res.unresolved.begin(), res.unresolved.end());
  }
  return all;
}

/// Canonical event order: (timestamp, message_uid, recipient), then the
/// remaining fields so the order is total.
inline bool canonical_less(const MessageEvent& a, const MessageEvent& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  if (const int c = a.message_uid.compare(b.message_uid); c != 0) return c < 0;
  return std::tie(a.recipient, a.sender, a.channel) < std::tie(b.recipient, b.sender, b.channel);
}

/// Removes self-loops, keeps one event per (message_uid, recipient) and
/// sorts canonically. The surviving duplicate is the canonically smallest.
inline std::vector<MessageEvent> dedupe_and_normalize(std::vector<MessageEvent> events,
                                                      IngestDiagnostics* diag = nullptr) {
  const auto loops = std::erase_if(events, [](const MessageEvent& e) { return e.sender == e.recipient; });
  std::sort(events.begin(), events.end(), canonical_less);
  struct KeyHash {
    std::size_t operator()(const std::pair<std::string_view, ActorId>& k) const noexcept {
      return std::hash<std::string_view>{}(k.first) * 31u + k.second.value;
    }
  };
  std::unordered_set<std::pair<std::string_view, ActorId>, KeyHash> seen;
  seen.reserve(events.size());
  std::vector<bool> keep(events.size());
  std::size_t dups = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    keep[i] = seen.emplace(events[i].message_uid, events[i].recipient).second;
    dups += !keep[i];
  }
  std::vector<MessageEvent> out;
  out.reserve(events.size() - dups);
  for (std::size_t i = 0; i < events.size(); ++i)
    if (keep[i]) out.push_back(std::move(events[i]));
  if (diag) {
    diag->self_loops += loops;
    diag->deduped += dups;
  }
  return out;
}

/// Applies the observation window and channel/boundary policy. The analysis
/// cohort is every internal actor in the directory.
inline CohortResult apply_cohort(std::vector<MessageEvent> events, const ActorDirectory& dir,
                                 const CohortPolicy& policy, IngestDiagnostics* diag = nullptr) {
  if (!(policy.start < policy.end)) throw ConfigError("cohort window: start must precede end");
  CohortResult res;
  for (auto& e : events) {
    if (e.sender.value >= dir.size() || e.recipient.value >= dir.size())
      throw InputError("event references an actor missing from the directory");
    if (e.timestamp < policy.start || e.timestamp > policy.end) {
      if (diag) ++diag->outside_window;
      continue;
    }
    if (!policy.cc_counts_as_recipient && e.channel == Channel::Cc) {
      if (diag) ++diag->cc_dropped;
      continue;
    }
    if (!policy.keep_cross_boundary_edges && (!dir[e.sender].internal || !dir[e.recipient].internal)) {
      if (diag) ++diag->cross_boundary_dropped;
      continue;
    }
    res.events.push_back(std::move(e));
  }
  if (res.events.empty()) throw ConfigError("cohort window excludes every event");
  for (const auto& a : dir.actors())
    if (a.internal) res.cohort.push_back(a.id);
  if (res.cohort.empty()) throw ConfigError("analysis cohort is empty: no internal actors");
  return res;
}

inline void write_event_log(std::ostream& out, const std::vector<MessageEvent>& events, const ActorDirectory& dir) {
  out << "message_uid,timestamp,sender,recipient,channel\n";
  std::string line;
  for (const auto& e : events) {
    line.clear();
    line += csv::quote(e.message_uid);
    line += ',';
    line += format_iso(e.timestamp);
    line += ',';
    line += dir[e.sender].address;
    line += ',';
    line += dir[e.recipient].address;
    line += ',';
    line += to_string(e.channel);
    line += '\n';
    out << line;
  }
}

}  // namespace innonet
