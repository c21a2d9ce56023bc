#pragma once

// JSON response bodies for the HTTP API. Every function is a pure function of
// the dataset and its arguments.

#include <algorithm>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "caltrend/dataset.hpp"
#include "caltrend/projection.hpp"
#include "caltrend/temporal.hpp"
#include "caltrend/topics.hpp"

namespace caltrend::api {

using nlohmann::json;

inline UserId parse_user_id(std::string_view s) {
  if (s.empty() || s.size() > 18) throw Error(ErrorCode::kInvalidArgument, "bad user id '" + std::string(s) + "'");
  UserId v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw Error(ErrorCode::kInvalidArgument, "bad user id '" + std::string(s) + "'");
    v = v * 10 + (c - '0');
  }
  return v;
}

// "3,7,9" -> {3,7,9}; empty string -> {} (everyone).
inline std::set<UserId> parse_user_set(std::string_view s) {
  std::set<UserId> ids;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string_view::npos) comma = s.size();
    if (comma > pos) ids.insert(parse_user_id(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return ids;
}

inline std::size_t parse_feature_axis(std::string_view s) {
  if (auto idx = feature_index(s)) return *idx;
  if (!s.empty() && s.size() <= 2 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const auto v = static_cast<std::size_t>(std::stoul(std::string(s)));
    if (v < kFeatureCount) return v;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown feature '" + std::string(s) + "'");
}

inline json feature_object(const FeatureVector& f) {
  json j = json::object();
  for (std::size_t i = 0; i < kFeatureCount; ++i) j[std::string(kFeatureNames[i])] = f[i];
  return j;
}

inline json users(const Dataset& d) {
  json list = json::array();
  for (const auto& [id, rec] : d.store()) {
    list.push_back({{"user_id", id}, {"event_count", rec.events.size()}, {"glyph", to_json(d.glyph(id))}});
  }
  return {{"users", list}};
}

inline json user(const Dataset& d, UserId id) {
  const auto& rec = d.user(id);
  return {{"user_id", id},
          {"event_count", rec.events.size()},
          {"active_months", rec.active_months},
          {"features", feature_object(d.raw_features().rows[d.row(id)])},
          {"glyph", to_json(d.glyph(id))}};
}

inline json user_features(const Dataset& d, UserId id) {
  const std::size_t r = d.row(id);
  return {{"user_id", id},
          {"features", feature_object(d.raw_features().rows[r])},
          {"standardized", feature_object(d.standardized_features().rows[r])}};
}

inline json user_glyph(const Dataset& d, UserId id) {
  json j = to_json(d.glyph(id));
  j["user_id"] = id;
  return j;
}

// Without an explicit window the user's whole local-date span is used.
inline json user_daygrid(const Dataset& d, UserId id, std::optional<CivilDate> from, std::optional<CivilDate> to,
                         std::optional<LifeMode> highlight) {
  const auto& rec = d.user(id);
  if (!from || !to) {
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& e : rec.events) {
      lo = std::min(lo, floor_div(e.local_start(), kSecondsPerDay));
      hi = std::max(hi, floor_div(std::max(e.local_end() - 1, e.local_start()), kSecondsPerDay));
    }
    if (!from) from = civil_from_days(lo);
    if (!to) to = civil_from_days(hi);
  }
  json cells = json::array();
  for (const auto& c : day_grid(rec, *from, *to)) cells.push_back(to_json(c, highlight));
  return {{"user_id", id},
          {"from", format_date(*from)},
          {"to", format_date(*to)},
          {"highlight", highlight ? json(std::string(to_string(*highlight))) : json(nullptr)},
          {"cells", cells}};
}

inline json weekly_heatmap(const Dataset& d, const std::set<UserId>& ids, HeatmapMode mode,
                           std::optional<HeatmapMode> diff_against) {
  const auto records = d.select(ids);
  const auto h = caltrend::weekly_heatmap(records, mode);
  json j = to_json(h);
  if (diff_against) {
    const auto other = caltrend::weekly_heatmap(records, *diff_against);
    j["diff"] = true;
    j["subtrahend"] = std::string(to_string(*diff_against));
    j["diff_counts"] = to_json(heatmap_diff(h, other));
  }
  return j;
}

inline json topics(const Dataset& d, const std::set<UserId>& ids, bool diff) {
  const auto p = selection_topics(d, ids, diff);
  return {{"work", to_json(p.work)}, {"home", to_json(p.home)}};
}

// Keyword is normalized with the summary tokenizer before matching.
inline std::string normalize_keyword(std::string_view keyword) {
  auto toks = tokenize(keyword);
  return toks.size() == 1 ? toks.front() : ascii_lower(keyword);
}

inline json keyword_distribution(const Dataset& d, const std::set<UserId>& ids, std::string_view keyword) {
  const auto records = d.select(ids);
  return to_json(caltrend::keyword_distribution(records, normalize_keyword(keyword)));
}

inline json scatter(const Dataset& d, std::size_t x, std::size_t y) {
  const auto pts = feature_scatter(d.raw_features(), x, y);
  json list = json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    list.push_back({{"user_id", d.user_ids()[i]}, {"x", pts[i][0]}, {"y", pts[i][1]}});
  }
  return {{"x", std::string(kFeatureNames[x])}, {"y", std::string(kFeatureNames[y])}, {"points", list}};
}

inline json projection(const Dataset& d, const ProjectionResult& r) { return to_json(r, d.user_ids()); }

// Direct engine run equivalent to what a projection job computes.
inline ProjectionResult run_projection(const Dataset& d, const WeightVector& w, const TsneParams& params,
                                       const TsneObserver& observer = {}) {
  return project(d.standardized_features(), w, params, observer);
}

}  // namespace caltrend::api
