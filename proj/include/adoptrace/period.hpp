#pragma once

// Calendar keys: UTC timestamps, month buckets and the (month or day)
// periods used by aggregation and reporting.

#include <charconv>
#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace adoptrace {

namespace detail {

inline std::optional<int> parse_digits(std::string_view s, std::size_t pos, std::size_t n) {
  if (pos + n > s.size()) return std::nullopt;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

inline std::string pad(int v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace detail

// Seconds since the Unix epoch, UTC.
struct Timestamp {
  std::int64_t seconds = 0;

  auto operator<=>(const Timestamp&) const = default;

  std::chrono::year_month_day date() const {
    using namespace std::chrono;
    const auto days = floor<std::chrono::days>(sys_seconds{std::chrono::seconds{seconds}});
    return year_month_day{days};
  }

  // "YYYY-MM-DDTHH:MM:SSZ"
  std::string iso() const {
    using namespace std::chrono;
    const sys_seconds tp{std::chrono::seconds{seconds}};
    const auto days = floor<std::chrono::days>(tp);
    const year_month_day ymd{days};
    const hh_mm_ss hms{tp - days};
    return detail::pad(static_cast<int>(ymd.year()), 4) + "-" +
           detail::pad(static_cast<int>(static_cast<unsigned>(ymd.month())), 2) + "-" +
           detail::pad(static_cast<int>(static_cast<unsigned>(ymd.day())), 2) + "T" +
           detail::pad(static_cast<int>(hms.hours().count()), 2) + ":" +
           detail::pad(static_cast<int>(hms.minutes().count()), 2) + ":" +
           detail::pad(static_cast<int>(hms.seconds().count()), 2) + "Z";
  }

  // Accepts YYYY-MM-DD[(T| )HH:MM[:SS[.fff]]][Z|(+|-)HH[:]MM]. A missing
  // offset means UTC. Fractional seconds are truncated.
  static std::optional<Timestamp> parse(std::string_view s) {
    using namespace std::chrono;
    const auto y = detail::parse_digits(s, 0, 4);
    const auto mo = detail::parse_digits(s, 5, 2);
    const auto d = detail::parse_digits(s, 8, 2);
    if (!y || !mo || !d || s[4] != '-' || s[7] != '-') return std::nullopt;
    const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)},
                             day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    std::int64_t secs = 0;
    std::size_t pos = 10;
    if (pos < s.size() && (s[pos] == 'T' || s[pos] == 't' || s[pos] == ' ')) {
      const auto hh = detail::parse_digits(s, pos + 1, 2);
      const auto mm = detail::parse_digits(s, pos + 4, 2);
      if (!hh || !mm || s[pos + 3] != ':' || *hh > 23 || *mm > 59) return std::nullopt;
      secs = *hh * 3600 + *mm * 60;
      pos += 6;
      if (pos < s.size() && s[pos] == ':') {
        const auto ss = detail::parse_digits(s, pos + 1, 2);
        if (!ss || *ss > 60) return std::nullopt;
        secs += *ss;
        pos += 3;
        if (pos < s.size() && s[pos] == '.') {
          ++pos;
          const std::size_t start = pos;
          while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
          if (pos == start) return std::nullopt;
        }
      }
      if (pos < s.size()) {
        if (s[pos] == 'Z' || s[pos] == 'z') {
          ++pos;
        } else if (s[pos] == '+' || s[pos] == '-') {
          const int sign = s[pos] == '+' ? 1 : -1;
          const auto oh = detail::parse_digits(s, pos + 1, 2);
          std::size_t mpos = pos + 3;
          if (mpos < s.size() && s[mpos] == ':') ++mpos;
          const auto om = detail::parse_digits(s, mpos, 2);
          if (!oh || !om || *oh > 23 || *om > 59) return std::nullopt;
          secs -= sign * (*oh * 3600 + *om * 60);
          pos = mpos + 2;
        }
      }
    }
    if (pos != s.size()) return std::nullopt;
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return Timestamp{static_cast<std::int64_t>(days) * 86400 + secs};
  }
};

struct MonthKey {
  int year = 1970;
  int month = 1;

  auto operator<=>(const MonthKey&) const = default;

  static MonthKey of(Timestamp t) {
    const auto ymd = t.date();
    return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month()))};
  }

  MonthKey next() const { return month == 12 ? MonthKey{year + 1, 1} : MonthKey{year, month + 1}; }

  std::string str() const { return detail::pad(year, 4) + "-" + detail::pad(month, 2); }

  static std::optional<MonthKey> parse(std::string_view s) {
    if (s.size() != 7 || s[4] != '-') return std::nullopt;
    const auto y = detail::parse_digits(s, 0, 4);
    const auto m = detail::parse_digits(s, 5, 2);
    if (!y || !m || *m < 1 || *m > 12) return std::nullopt;
    return MonthKey{*y, *m};
  }
};

enum class Granularity { kMonth, kDay };

// An aggregation bucket: a calendar month, or a single day when `day` != 0.
struct Period {
  int year = 1970;
  int month = 1;
  int day = 0;

  auto operator<=>(const Period&) const = default;

  static Period of(Timestamp t, Granularity g) {
    const auto ymd = t.date();
    return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
            g == Granularity::kDay ? static_cast<int>(static_cast<unsigned>(ymd.day())) : 0};
  }

  static Period of(MonthKey m) { return {m.year, m.month, 0}; }

  bool is_day() const { return day != 0; }
  MonthKey month_key() const { return {year, month}; }

  Period next() const {
    if (!is_day()) {
      const auto m = month_key().next();
      return {m.year, m.month, 0};
    }
    using namespace std::chrono;
    const year_month_day ymd{sys_days{year_month_day{std::chrono::year{year},
                                                     std::chrono::month{static_cast<unsigned>(month)},
                                                     std::chrono::day{static_cast<unsigned>(day)}}} +
                             days{1}};
    return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
            static_cast<int>(static_cast<unsigned>(ymd.day()))};
  }

  std::string str() const {
    std::string s = month_key().str();
    if (is_day()) s += "-" + detail::pad(day, 2);
    return s;
  }

  // "YYYY-MM" or "YYYY-MM-DD".
  static std::optional<Period> parse(std::string_view s) {
    if (s.size() == 7) {
      const auto m = MonthKey::parse(s);
      if (!m) return std::nullopt;
      return Period::of(*m);
    }
    if (s.size() != 10 || s[7] != '-') return std::nullopt;
    const auto m = MonthKey::parse(s.substr(0, 7));
    const auto d = detail::parse_digits(s, 8, 2);
    if (!m || !d) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{m->year},
                                          std::chrono::month{static_cast<unsigned>(m->month)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok() || *d == 0) return std::nullopt;
    return Period{m->year, m->month, *d};
  }
};

}  // namespace adoptrace
