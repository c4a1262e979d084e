// Core value types shared by every stage of the pipeline: actor ids,
// timestamps, channels, labels and the error hierarchy.
#pragma once

#include <chrono>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace innonet {

/// Dense actor identifier assigned by the ActorDirectory (0..N-1).
struct ActorId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(ActorId, ActorId) = default;
};

using Timestamp = std::chrono::sys_seconds;

enum class Channel : std::uint8_t { To, Cc };
enum class Label : std::uint8_t { None, Admin, Product, Award };

/// Base error; `kind()` is the machine-readable category used by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error("config_error", what) {}
};
struct InputError : Error {
  explicit InputError(const std::string& what) : Error("input_error", what) {}
};
struct AnalysisError : Error {
  explicit AnalysisError(const std::string& what) : Error("analysis_error", what) {}
};

inline std::string_view to_string(Channel c) { return c == Channel::To ? "TO" : "CC"; }

inline std::optional<Channel> parse_channel(std::string_view s) {
  if (s == "TO" || s == "to" || s == "To") return Channel::To;
  if (s == "CC" || s == "cc" || s == "Cc") return Channel::Cc;
  return std::nullopt;
}

inline std::string_view to_string(Label l) {
  switch (l) {
    case Label::Admin: return "ADMIN";
    case Label::Product: return "PRODUCT";
    case Label::Award: return "AWARD";
    case Label::None: break;
  }
  return "NONE";
}

inline std::optional<Label> parse_label(std::string_view s) {
  if (s.empty() || s == "NONE") return Label::None;
  if (s == "ADMIN") return Label::Admin;
  if (s == "PRODUCT") return Label::Product;
  if (s == "AWARD") return Label::Award;
  return std::nullopt;
}

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

/// Renders a timestamp as `YYYY-MM-DDTHH:MM:SSZ`.
inline std::string format_iso(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

inline std::optional<Timestamp> make_timestamp(int y, int mo, int d, int h, int mi, int s) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

/// Rounds to 6 significant digits; used for every reported number.
inline double round6(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return std::strtod(buf, nullptr);
}

inline std::string fmt6(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline std::string fmt6(const std::optional<double>& x) { return x ? fmt6(*x) : std::string{}; }

/// Significance stars: `***` p < .01, `**` p < .05, `*` p < .1.
inline std::string stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

}  // namespace innonet

template <>
struct std::hash<innonet::ActorId> {
  std::size_t operator()(innonet::ActorId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
