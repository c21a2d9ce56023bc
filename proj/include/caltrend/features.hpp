#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "caltrend/error.hpp"
#include "caltrend/model.hpp"

namespace caltrend {

inline constexpr std::size_t kFeatureCount = 11;

enum FeatureIndex : std::size_t {
  kModificationRate = 0,
  kMonthlyVolume,
  kWeekendRatio,
  kWeekdayRatio,
  kMorning,
  kLunch,
  kAfternoon,
  kEvening,
  kNight,
  kWorkRate,
  kHomeRate,
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "modification_rate", "monthly_volume", "weekend_ratio", "weekday_ratio", "morning", "lunch",
    "afternoon",         "evening",        "night",         "work_rate",     "home_rate"};

inline std::optional<std::size_t> feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (kFeatureNames[i] == name) return i;
  }
  return std::nullopt;
}

using FeatureVector = std::array<double, kFeatureCount>;

enum class HourBand : int { kMorning = 0, kLunch, kAfternoon, kEvening, kNight };

// morning [06,11), lunch [11,14), afternoon [14,18), evening [18,22),
// night [22,24) and [00,06).
constexpr HourBand hour_band(int hour) noexcept {
  if (hour >= 6 && hour < 11) return HourBand::kMorning;
  if (hour >= 11 && hour < 14) return HourBand::kLunch;
  if (hour >= 14 && hour < 18) return HourBand::kAfternoon;
  if (hour >= 18 && hour < 22) return HourBand::kEvening;
  return HourBand::kNight;
}

constexpr bool is_weekend(int weekday) noexcept { return weekday == 0 || weekday == 6; }

// Everything is evaluated on the event start in the user's local time.
inline FeatureVector extract_features(const UserRecord& record) {
  if (record.events.empty()) throw Error(ErrorCode::kEmptyUser, "user " + std::to_string(record.user_id));
  std::size_t modified = 0, weekend = 0, work = 0, home = 0;
  std::array<std::size_t, 5> bands{};
  for (const auto& e : record.events) {
    const LocalTime t = decompose_local(e.local_start());
    modified += e.modified();
    weekend += is_weekend(t.weekday);
    ++bands[static_cast<std::size_t>(hour_band(t.hour))];
    work += e.labels.contains(LifeMode::kWork);
    home += e.labels.contains(LifeMode::kHome);
  }
  const auto n = static_cast<double>(record.events.size());
  const int months = record.active_months > 0 ? record.active_months : count_active_months(record.events);
  FeatureVector f{};
  f[kModificationRate] = static_cast<double>(modified) / n;
  f[kMonthlyVolume] = n / static_cast<double>(months);
  f[kWeekendRatio] = static_cast<double>(weekend) / n;
  f[kWeekdayRatio] = static_cast<double>(record.events.size() - weekend) / n;
  for (std::size_t b = 0; b < 5; ++b) f[kMorning + b] = static_cast<double>(bands[b]) / n;
  f[kWorkRate] = static_cast<double>(work) / n;
  f[kHomeRate] = static_cast<double>(home) / n;
  return f;
}

struct FeatureMatrix {
  std::vector<UserId> user_ids;
  std::vector<FeatureVector> rows;
  // Filled by standardize(); zero/one for raw matrices.
  FeatureVector mean{};
  FeatureVector stddev = [] {
    FeatureVector v;
    v.fill(1.0);
    return v;
  }();

  std::size_t size() const { return rows.size(); }

  std::vector<double> column(std::size_t j) const {
    std::vector<double> c;
    c.reserve(rows.size());
    for (const auto& r : rows) c.push_back(r[j]);
    return c;
  }
};

inline FeatureMatrix build_feature_matrix(const EventStore& store) {
  FeatureMatrix m;
  m.user_ids.reserve(store.size());
  m.rows.reserve(store.size());
  for (const auto& [id, rec] : store) {
    if (rec.events.empty()) continue;
    m.user_ids.push_back(id);
    m.rows.push_back(extract_features(rec));
  }
  return m;
}

// Column-wise z-scores with population standard deviation. Columns whose
// standard deviation is below 1e-12 map to zeros.
inline FeatureMatrix standardize(const FeatureMatrix& raw) {
  const std::size_t n = raw.size();
  if (n < 2) throw Error(ErrorCode::kPopulationTooSmall, std::to_string(n) + " users");
  FeatureMatrix z = raw;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    double sum = 0.0;
    for (const auto& r : raw.rows) sum += r[j];
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& r : raw.rows) ss += (r[j] - mean) * (r[j] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    z.mean[j] = mean;
    z.stddev[j] = sd;
    for (auto& r : z.rows) r[j] = sd < 1e-12 ? 0.0 : (r[j] - mean) / sd;
  }
  return z;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Tab-separated: header "user_id" + the 11 canonical names, one row per user.
inline void write_feature_table(std::ostream& out, const FeatureMatrix& m) {
  out << "user_id";
  for (auto name : kFeatureNames) out << '\t' << name;
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << m.user_ids[i];
    for (double v : m.rows[i]) out << '\t' << format_double(v);
    out << '\n';
  }
}

inline FeatureMatrix read_feature_table(std::istream& in) {
  FeatureMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kValidation, "feature table: missing header");
  {
    std::istringstream hs(line);
    std::string col;
    std::getline(hs, col, '\t');
    if (col != "user_id") throw Error(ErrorCode::kValidation, "feature table: bad header");
    for (auto name : kFeatureNames) {
      if (!std::getline(hs, col, '\t') || col != name) throw Error(ErrorCode::kValidation, "feature table: bad header");
    }
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, '\t');
    m.user_ids.push_back(std::stoll(cell));
    FeatureVector row{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      if (!std::getline(ls, cell, '\t')) throw Error(ErrorCode::kValidation, "feature table: short row");
      row[j] = std::stod(cell);
    }
    m.rows.push_back(row);
  }
  return m;
}

}  // namespace caltrend
