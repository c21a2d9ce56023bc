#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "caltrend/error.hpp"
#include "caltrend/time.hpp"

namespace caltrend {

using UserId = std::int64_t;

enum class LifeMode : std::uint8_t { kWork = 0, kHome = 1 };

inline constexpr std::array<LifeMode, 2> kLifeModes = {LifeMode::kWork, LifeMode::kHome};

constexpr std::string_view to_string(LifeMode mode) { return mode == LifeMode::kWork ? "work" : "home"; }

// Subset of {Work, Home}; empty means unlabeled.
class LabelSet {
 public:
  constexpr LabelSet() = default;
  constexpr LabelSet(std::initializer_list<LifeMode> modes) {
    for (LifeMode m : modes) insert(m);
  }

  constexpr void insert(LifeMode m) noexcept { bits_ |= bit(m); }
  constexpr void erase(LifeMode m) noexcept { bits_ &= static_cast<std::uint8_t>(~bit(m)); }
  constexpr bool contains(LifeMode m) const noexcept { return (bits_ & bit(m)) != 0; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr int size() const noexcept { return (bits_ & 1) + ((bits_ >> 1) & 1); }
  constexpr std::uint8_t bits() const noexcept { return bits_; }

  friend constexpr bool operator==(LabelSet, LabelSet) = default;

 private:
  static constexpr std::uint8_t bit(LifeMode m) noexcept { return static_cast<std::uint8_t>(1u << static_cast<int>(m)); }
  std::uint8_t bits_ = 0;
};

struct ScheduleEvent {
  std::string event_id;
  UserId user_id = 0;
  std::string summary;
  Timestamp start;
  Timestamp end;
  Timestamp created;
  Timestamp updated;
  std::string timezone;
  int attendee_count = 0;
  bool is_creator = false;
  LabelSet labels;

  // Local wall-clock seconds of the start, in the zone the start was recorded in.
  std::int64_t local_start() const noexcept { return start.local_seconds(); }
  // The end is viewed in the start's offset so an event keeps its duration.
  std::int64_t local_end() const noexcept { return end.utc_seconds + std::int64_t{start.offset_minutes} * 60; }
  bool modified() const noexcept { return updated.utc_seconds != created.utc_seconds; }

  friend bool operator==(const ScheduleEvent&, const ScheduleEvent&) = default;
};

// Returns an empty string when the event satisfies its invariants, otherwise
// a short description of the first violation.
inline std::string check_invariants(const ScheduleEvent& e) {
  if (e.user_id < 0) return "user_id must be >= 0";
  if (e.end.utc_seconds < e.start.utc_seconds) return "end before start";
  if (e.updated.utc_seconds < e.created.utc_seconds) return "updated before created";
  if (e.attendee_count < 0) return "attendee_count must be >= 0";
  return {};
}

struct UserRecord {
  UserId user_id = 0;
  std::vector<ScheduleEvent> events;  // sorted by start
  int active_months = 0;
};

// Distinct (year, month) pairs, in local time, that contain an event start.
inline int count_active_months(const std::vector<ScheduleEvent>& events) {
  std::set<std::pair<int, int>> months;
  for (const auto& e : events) {
    const CivilDate d = decompose_local(e.local_start()).date;
    months.emplace(d.year, d.month);
  }
  return static_cast<int>(months.size());
}

// Immutable after construction. Users are kept in ascending id order.
using EventStore = std::map<UserId, UserRecord>;

inline EventStore build_store(std::vector<ScheduleEvent> events) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(events.size());
  for (const auto& e : events) {
    if (!seen.insert(e.event_id).second) {
      throw Error(ErrorCode::kDuplicateEvent, e.event_id);
    }
  }
  seen.clear();

  EventStore store;
  for (auto& e : events) {
    auto& rec = store[e.user_id];
    rec.user_id = e.user_id;
    rec.events.push_back(std::move(e));
  }
  for (auto& [id, rec] : store) {
    std::sort(rec.events.begin(), rec.events.end(), [](const ScheduleEvent& a, const ScheduleEvent& b) {
      if (a.start.utc_seconds != b.start.utc_seconds) return a.start.utc_seconds < b.start.utc_seconds;
      return a.event_id < b.event_id;
    });
    rec.active_months = count_active_months(rec.events);
  }
  return store;
}

inline std::size_t total_events(const EventStore& store) {
  std::size_t n = 0;
  for (const auto& [id, rec] : store) n += rec.events.size();
  return n;
}

inline std::vector<UserId> user_ids(const EventStore& store) {
  std::vector<UserId> ids;
  ids.reserve(store.size());
  for (const auto& [id, rec] : store) ids.push_back(id);
  return ids;
}

}  // namespace caltrend
