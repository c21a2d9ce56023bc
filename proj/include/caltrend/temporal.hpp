#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "caltrend/error.hpp"
#include "caltrend/model.hpp"
#include "caltrend/text.hpp"

namespace caltrend {

inline constexpr int kDaysPerWeek = 7;
inline constexpr int kSegments = 12;  // segment s covers local hours [2s, 2s+2)

// --------------------------------------------------------------- day grid --

struct DayGridCell {
  CivilDate date;
  int start_second = 0;  // of day, local
  int end_second = 0;    // of day, local; 86400 = midnight at the end of the day
  std::string event_id;
  LabelSet labels;

  int duration() const { return end_second - start_second; }
  friend bool operator==(const DayGridCell&, const DayGridCell&) = default;
};

// One cell per event per local day it touches within [from, to] (inclusive),
// clipped at midnight. An event ending exactly at midnight does not touch the
// following day; a zero-length event yields one zero-length cell.
inline std::vector<DayGridCell> day_grid(const UserRecord& record, const CivilDate& from, const CivilDate& to) {
  if (to < from) throw Error(ErrorCode::kInvalidArgument, "inverted date range");
  const std::int64_t first = days_from_civil(from), last = days_from_civil(to);
  std::vector<DayGridCell> cells;
  for (const auto& e : record.events) {
    const std::int64_t s = e.local_start(), t = e.local_end();
    const std::int64_t d0 = floor_div(s, kSecondsPerDay);
    const std::int64_t d1 = t > s ? floor_div(t - 1, kSecondsPerDay) : d0;
    for (std::int64_t d = std::max(d0, first); d <= std::min(d1, last); ++d) {
      const std::int64_t base = d * kSecondsPerDay;
      DayGridCell c;
      c.date = civil_from_days(d);
      c.start_second = static_cast<int>(std::max(s, base) - base);
      c.end_second = static_cast<int>(std::min(t, base + kSecondsPerDay) - base);
      c.event_id = e.event_id;
      c.labels = e.labels;
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

// ----------------------------------------------------------- weekly grid --

enum class HeatmapMode { kAll, kWork, kHome };

constexpr std::string_view to_string(HeatmapMode m) {
  switch (m) {
    case HeatmapMode::kAll: return "all";
    case HeatmapMode::kWork: return "work";
    case HeatmapMode::kHome: return "home";
  }
  return "all";
}

inline std::optional<HeatmapMode> parse_heatmap_mode(std::string_view s) {
  if (s == "all") return HeatmapMode::kAll;
  if (s == "work") return HeatmapMode::kWork;
  if (s == "home") return HeatmapMode::kHome;
  return std::nullopt;
}

inline bool passes(const ScheduleEvent& e, HeatmapMode mode) {
  switch (mode) {
    case HeatmapMode::kAll: return true;
    case HeatmapMode::kWork: return e.labels.contains(LifeMode::kWork);
    case HeatmapMode::kHome: return e.labels.contains(LifeMode::kHome);
  }
  return false;
}

using WeekGrid = std::array<std::array<long long, kSegments>, kDaysPerWeek>;  // [weekday][segment]

struct WeeklyHeatmap {
  HeatmapMode mode = HeatmapMode::kAll;
  WeekGrid counts{};
  std::array<std::array<std::map<std::string, long long>, kSegments>, kDaysPerWeek> cell_keywords;
  std::array<long long, kSegments> row_marginals{};
  std::array<long long, kDaysPerWeek> col_marginals{};

  long long total() const {
    long long t = 0;
    for (long long c : col_marginals) t += c;
    return t;
  }
};

struct WeekSlot {
  int weekday = 0;
  int segment = 0;
};

inline WeekSlot week_slot(const ScheduleEvent& e) {
  const LocalTime t = decompose_local(e.local_start());
  return {t.weekday, t.hour / 2};
}

// Each passing event increments exactly one cell: (weekday of start,
// floor(start hour / 2)). Cell keywords are token occurrence counts.
inline WeeklyHeatmap weekly_heatmap(std::span<const UserRecord* const> records, HeatmapMode mode) {
  WeeklyHeatmap h;
  h.mode = mode;
  for (const UserRecord* rec : records) {
    for (const auto& e : rec->events) {
      if (!passes(e, mode)) continue;
      const WeekSlot slot = week_slot(e);
      ++h.counts[slot.weekday][slot.segment];
      ++h.row_marginals[slot.segment];
      ++h.col_marginals[slot.weekday];
      auto& kw = h.cell_keywords[slot.weekday][slot.segment];
      for (auto& tok : tokenize(e.summary)) ++kw[tok];
    }
  }
  return h;
}

inline WeeklyHeatmap weekly_heatmap(const UserRecord& record, HeatmapMode mode) {
  const UserRecord* one[] = {&record};
  return weekly_heatmap(one, mode);
}

using SignedGrid = WeekGrid;

inline SignedGrid heatmap_diff(const WeeklyHeatmap& a, const WeeklyHeatmap& b) {
  SignedGrid d{};
  for (int w = 0; w < kDaysPerWeek; ++w) {
    for (int s = 0; s < kSegments; ++s) d[w][s] = a.counts[w][s] - b.counts[w][s];
  }
  return d;
}

struct KeywordCount {
  std::string keyword;
  long long count = 0;

  friend bool operator==(const KeywordCount&, const KeywordCount&) = default;
};

inline constexpr std::size_t kTooltipKeywords = 10;

// Top n by count, ties lexicographic.
inline std::vector<KeywordCount> cell_keywords(const WeeklyHeatmap& h, int weekday, int segment,
                                               std::size_t n = kTooltipKeywords) {
  if (weekday < 0 || weekday >= kDaysPerWeek || segment < 0 || segment >= kSegments) {
    throw Error(ErrorCode::kInvalidArgument, "cell index out of range");
  }
  std::vector<KeywordCount> out;
  for (const auto& [k, c] : h.cell_keywords[weekday][segment]) out.push_back({k, c});
  std::sort(out.begin(), out.end(), [](const KeywordCount& a, const KeywordCount& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.keyword < b.keyword;
  });
  if (out.size() > n) out.resize(n);
  return out;
}

// Keywords surfaced inline in a cell: ceil(count / 2), capped at 10.
constexpr std::size_t inline_keyword_count(long long cell_count) {
  if (cell_count <= 0) return 0;
  const auto half = static_cast<std::size_t>((cell_count + 1) / 2);
  return half < kTooltipKeywords ? half : kTooltipKeywords;
}

// ------------------------------------------------- keyword distribution --

struct KeywordDistribution {
  std::string keyword;
  std::array<long long, kDaysPerWeek> weekday{};
  std::array<long long, kSegments> segment{};
  long long matched = 0;
};

inline KeywordDistribution keyword_distribution(std::span<const UserRecord* const> records, std::string_view keyword) {
  KeywordDistribution out;
  out.keyword = std::string(keyword);
  if (keyword.empty()) return out;
  for (const UserRecord* rec : records) {
    for (const auto& e : rec->events) {
      const auto toks = tokenize(e.summary);
      if (std::find(toks.begin(), toks.end(), keyword) == toks.end()) continue;
      const WeekSlot slot = week_slot(e);
      ++out.weekday[slot.weekday];
      ++out.segment[slot.segment];
      ++out.matched;
    }
  }
  return out;
}

// ----------------------------------------------------------------- glyphs --

struct GlyphSummary {
  long long total_events = 0;
  double work_fraction = 0.0;
  double home_fraction = 0.0;
  double multi_fraction = 0.0;
  double unlabeled_fraction = 0.0;
  std::array<long long, 24> hourly_counts{};
};

inline GlyphSummary glyph_summary(const UserRecord& record) {
  if (record.events.empty()) throw Error(ErrorCode::kEmptyUser, "user " + std::to_string(record.user_id));
  GlyphSummary g;
  long long work = 0, home = 0, multi = 0, unlabeled = 0;
  for (const auto& e : record.events) {
    ++g.total_events;
    ++g.hourly_counts[decompose_local(e.local_start()).hour];
    const bool w = e.labels.contains(LifeMode::kWork), h = e.labels.contains(LifeMode::kHome);
    work += w;
    home += h;
    multi += w && h;
    unlabeled += !w && !h;
  }
  const auto n = static_cast<double>(g.total_events);
  g.work_fraction = work / n;
  g.home_fraction = home / n;
  g.multi_fraction = multi / n;
  g.unlabeled_fraction = unlabeled / n;
  return g;
}

// ------------------------------------------------------------------- json --

inline nlohmann::json to_json(const DayGridCell& c, std::optional<LifeMode> highlight = std::nullopt) {
  nlohmann::json labels = nlohmann::json::array();
  for (LifeMode m : kLifeModes) {
    if (c.labels.contains(m)) labels.push_back(std::string(to_string(m)));
  }
  nlohmann::json j = {{"date", format_date(c.date)},
                      {"start", format_clock(c.start_second)},
                      {"end", format_clock(c.end_second)},
                      {"event_id", c.event_id},
                      {"labels", labels}};
  if (highlight) j["highlighted"] = c.labels.contains(*highlight);
  return j;
}

inline nlohmann::json to_json(const WeekGrid& g) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& day : g) rows.push_back(day);
  return rows;
}

inline nlohmann::json to_json(const WeeklyHeatmap& h) {
  nlohmann::json cells = nlohmann::json::array();
  for (int w = 0; w < kDaysPerWeek; ++w) {
    nlohmann::json day = nlohmann::json::array();
    for (int s = 0; s < kSegments; ++s) {
      nlohmann::json kws = nlohmann::json::array();
      for (const auto& kc : cell_keywords(h, w, s)) kws.push_back({{"keyword", kc.keyword}, {"count", kc.count}});
      day.push_back({{"count", h.counts[w][s]},
                     {"inline", inline_keyword_count(h.counts[w][s])},
                     {"keywords", kws}});
    }
    cells.push_back(day);
  }
  return {{"mode", std::string(to_string(h.mode))},
          {"diff", false},
          {"counts", to_json(h.counts)},
          {"row_marginals", h.row_marginals},
          {"col_marginals", h.col_marginals},
          {"cells", cells}};
}

inline nlohmann::json to_json(const KeywordDistribution& d) {
  return {{"keyword", d.keyword}, {"weekday", d.weekday}, {"segment", d.segment}, {"matched", d.matched}};
}

inline nlohmann::json to_json(const GlyphSummary& g) {
  return {{"total_events", g.total_events},
          {"mode_fractions",
           {{"work", g.work_fraction},
            {"home", g.home_fraction},
            {"multi", g.multi_fraction},
            {"unlabeled", g.unlabeled_fraction}}},
          {"hourly_counts", g.hourly_counts}};
}

}  // namespace caltrend
