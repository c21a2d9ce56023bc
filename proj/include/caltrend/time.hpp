#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace caltrend {

// Proleptic Gregorian day arithmetic (days relative to 1970-01-01).
struct CivilDate {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  friend bool operator==(const CivilDate&, const CivilDate&) = default;
  friend auto operator<=>(const CivilDate&, const CivilDate&) = default;
};

constexpr std::int64_t days_from_civil(int y, int m, int d) noexcept {
  y -= m <= 2 ? 1 : 0;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr std::int64_t days_from_civil(const CivilDate& date) noexcept {
  return days_from_civil(date.year, date.month, date.day);
}

constexpr CivilDate civil_from_days(std::int64_t z) noexcept {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  const auto y = static_cast<int>(static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2 ? 1 : 0));
  return CivilDate{y, static_cast<int>(m), static_cast<int>(d)};
}

constexpr int days_in_month(int year, int month) noexcept {
  constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2) {
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return kDays[month - 1];
}

// 0 = Sunday ... 6 = Saturday.
constexpr int weekday_from_days(std::int64_t days) noexcept {
  const std::int64_t w = (days + 4) % 7;  // 1970-01-01 was a Thursday
  return static_cast<int>(w < 0 ? w + 7 : w);
}

inline constexpr std::int64_t kSecondsPerDay = 86400;

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// An instant in UTC together with the wall-clock offset it was recorded in.
struct Timestamp {
  std::int64_t utc_seconds = 0;
  std::int32_t offset_minutes = 0;

  std::int64_t local_seconds() const noexcept { return utc_seconds + std::int64_t{offset_minutes} * 60; }

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

// Wall-clock decomposition of a local-seconds value.
struct LocalTime {
  std::int64_t day_number = 0;  // days since 1970-01-01 (local)
  CivilDate date;
  int weekday = 4;
  int hour = 0;
  int minute = 0;
  int second = 0;
  int second_of_day = 0;
};

constexpr LocalTime decompose_local(std::int64_t local_seconds) noexcept {
  LocalTime t;
  t.day_number = floor_div(local_seconds, kSecondsPerDay);
  t.second_of_day = static_cast<int>(local_seconds - t.day_number * kSecondsPerDay);
  t.date = civil_from_days(t.day_number);
  t.weekday = weekday_from_days(t.day_number);
  t.hour = t.second_of_day / 3600;
  t.minute = (t.second_of_day / 60) % 60;
  t.second = t.second_of_day % 60;
  return t;
}

namespace detail {

inline bool parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return ec == std::errc{} && ptr == s.data() + pos + len;
}

inline void append_padded(std::string& out, int value, int width) {
  char buf[16];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  for (int i = static_cast<int>(ptr - buf); i < width; ++i) out.push_back('0');
  out.append(buf, ptr);
}

}  // namespace detail

// Accepts YYYY-MM-DDTHH:MM:SS[.fraction](Z|+HH:MM|-HH:MM|+HHMM|-HHMM).
// Fractional seconds are truncated.
inline std::optional<Timestamp> parse_iso8601(std::string_view s) {
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (s.size() < 20) return std::nullopt;
  if (!detail::parse_fixed_int(s, 0, 4, year) || s[4] != '-' || !detail::parse_fixed_int(s, 5, 2, month) ||
      s[7] != '-' || !detail::parse_fixed_int(s, 8, 2, day) || (s[10] != 'T' && s[10] != ' ') ||
      !detail::parse_fixed_int(s, 11, 2, hour) || s[13] != ':' || !detail::parse_fixed_int(s, 14, 2, minute) ||
      s[16] != ':' || !detail::parse_fixed_int(s, 17, 2, second)) {
    return std::nullopt;
  }
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) || hour > 23 || minute > 59 ||
      second > 59) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t digits_begin = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == digits_begin) return std::nullopt;
  }
  if (pos >= s.size()) return std::nullopt;
  int offset = 0;
  if (s[pos] == 'Z') {
    if (pos + 1 != s.size()) return std::nullopt;
  } else if (s[pos] == '+' || s[pos] == '-') {
    const int sign = s[pos] == '-' ? -1 : 1;
    int oh = 0, om = 0;
    if (!detail::parse_fixed_int(s, pos + 1, 2, oh)) return std::nullopt;
    std::size_t mpos = pos + 3;
    if (mpos < s.size() && s[mpos] == ':') ++mpos;
    if (!detail::parse_fixed_int(s, mpos, 2, om) || mpos + 2 != s.size()) return std::nullopt;
    if (oh > 18 || om > 59) return std::nullopt;
    offset = sign * (oh * 60 + om);
  } else {
    return std::nullopt;
  }
  const std::int64_t local =
      days_from_civil(year, month, day) * kSecondsPerDay + hour * 3600 + minute * 60 + second;
  return Timestamp{local - std::int64_t{offset} * 60, offset};
}

// Canonical rendering: offset 0 renders as 'Z', others as +HH:MM.
inline std::string format_iso8601(const Timestamp& ts) {
  const LocalTime t = decompose_local(ts.local_seconds());
  std::string out;
  out.reserve(25);
  detail::append_padded(out, t.date.year, 4);
  out.push_back('-');
  detail::append_padded(out, t.date.month, 2);
  out.push_back('-');
  detail::append_padded(out, t.date.day, 2);
  out.push_back('T');
  detail::append_padded(out, t.hour, 2);
  out.push_back(':');
  detail::append_padded(out, t.minute, 2);
  out.push_back(':');
  detail::append_padded(out, t.second, 2);
  if (ts.offset_minutes == 0) {
    out.push_back('Z');
  } else {
    const int off = ts.offset_minutes < 0 ? -ts.offset_minutes : ts.offset_minutes;
    out.push_back(ts.offset_minutes < 0 ? '-' : '+');
    detail::append_padded(out, off / 60, 2);
    out.push_back(':');
    detail::append_padded(out, off % 60, 2);
  }
  return out;
}

// YYYY-MM-DD
inline std::optional<CivilDate> parse_date(std::string_view s) {
  CivilDate d;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!detail::parse_fixed_int(s, 0, 4, d.year) || !detail::parse_fixed_int(s, 5, 2, d.month) ||
      !detail::parse_fixed_int(s, 8, 2, d.day)) {
    return std::nullopt;
  }
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) return std::nullopt;
  return d;
}

inline std::string format_date(const CivilDate& d) {
  std::string out;
  detail::append_padded(out, d.year, 4);
  out.push_back('-');
  detail::append_padded(out, d.month, 2);
  out.push_back('-');
  detail::append_padded(out, d.day, 2);
  return out;
}

// HH:MM:SS for a second-of-day in [0, 86400]; 86400 renders as 24:00:00.
inline std::string format_clock(int second_of_day) {
  std::string out;
  detail::append_padded(out, second_of_day / 3600, 2);
  out.push_back(':');
  detail::append_padded(out, (second_of_day / 60) % 60, 2);
  out.push_back(':');
  detail::append_padded(out, second_of_day % 60, 2);
  return out;
}

}  // namespace caltrend
