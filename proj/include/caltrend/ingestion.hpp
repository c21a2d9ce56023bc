#pragma once

// Canonical line-record format. One JSON object per line, UTF-8, keys in this
// exact order when written:
//
//   {"event_id":"u3-e17","user_id":3,"summary":"budget review",
//    "start":"2024-03-05T09:00:00+09:00","end":"2024-03-05T10:00:00+09:00",
//    "created":"2024-03-01T12:00:00Z","updated":"2024-03-01T12:00:00Z",
//    "timezone":"Asia/Seoul","attendees":2,"is_creator":true,"labels":["work"]}
//
// Timestamps are rendered by format_iso8601 (offset 0 as 'Z'). "labels" is
// optional on input (absent = unlabeled) and always written. Key order on
// input is free; unknown keys are ignored. Blank lines are skipped and not
// counted.

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "caltrend/error.hpp"
#include "caltrend/model.hpp"

namespace caltrend {

namespace reason {
inline constexpr const char* kInvalidJson = "invalid-json";
inline constexpr const char* kMissingField = "missing-field";
inline constexpr const char* kBadType = "bad-type";
inline constexpr const char* kBadTimestamp = "bad-timestamp";
inline constexpr const char* kBadLabel = "bad-label";
inline constexpr const char* kInvariant = "invariant-violation";
}  // namespace reason

struct ParseReport {
  std::size_t total_lines = 0;
  std::size_t parsed = 0;
  std::size_t rejected = 0;
  std::map<std::string, std::size_t> rejection_reasons;

  void reject(const std::string& why) {
    ++rejected;
    ++rejection_reasons[why];
  }
};

struct ParsedLog {
  std::vector<ScheduleEvent> events;
  ParseReport report;
};

namespace detail {

// Returns nullptr on success, otherwise a reason code.
inline const char* decode_event(const nlohmann::json& j, ScheduleEvent& e) {
  if (!j.is_object()) return reason::kInvalidJson;
  static constexpr const char* kRequired[] = {"event_id", "user_id", "summary",  "start",     "end",
                                              "created",  "updated", "timezone", "attendees", "is_creator"};
  for (const char* key : kRequired) {
    if (!j.contains(key)) return reason::kMissingField;
  }
  const auto& id = j["event_id"];
  const auto& user = j["user_id"];
  const auto& summary = j["summary"];
  const auto& tz = j["timezone"];
  const auto& attendees = j["attendees"];
  const auto& creator = j["is_creator"];
  if (!id.is_string() || !user.is_number_integer() || !summary.is_string() || !tz.is_string() ||
      !attendees.is_number_integer() || !creator.is_boolean()) {
    return reason::kBadType;
  }
  e.event_id = id.get<std::string>();
  if (e.event_id.empty()) return reason::kBadType;
  e.user_id = user.get<std::int64_t>();
  e.summary = summary.get<std::string>();
  e.timezone = tz.get<std::string>();
  e.attendee_count = attendees.get<int>();
  e.is_creator = creator.get<bool>();

  Timestamp* slots[] = {&e.start, &e.end, &e.created, &e.updated};
  static constexpr const char* kTimeKeys[] = {"start", "end", "created", "updated"};
  for (int i = 0; i < 4; ++i) {
    const auto& v = j[kTimeKeys[i]];
    if (!v.is_string()) return reason::kBadType;
    auto ts = parse_iso8601(v.get_ref<const std::string&>());
    if (!ts) return reason::kBadTimestamp;
    *slots[i] = *ts;
  }

  e.labels = LabelSet{};
  if (auto it = j.find("labels"); it != j.end()) {
    if (!it->is_array()) return reason::kBadLabel;
    for (const auto& l : *it) {
      if (!l.is_string()) return reason::kBadLabel;
      const auto& s = l.get_ref<const std::string&>();
      if (s == "work") {
        e.labels.insert(LifeMode::kWork);
      } else if (s == "home") {
        e.labels.insert(LifeMode::kHome);
      } else {
        return reason::kBadLabel;
      }
    }
  }
  if (!check_invariants(e).empty()) return reason::kInvariant;
  return nullptr;
}

}  // namespace detail

// Parses one record. On failure returns false and sets `why` to a reason code.
inline bool parse_line(std::string_view line, ScheduleEvent& out, std::string& why) {
  auto j = nlohmann::json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    why = reason::kInvalidJson;
    return false;
  }
  if (const char* r = detail::decode_event(j, out)) {
    why = r;
    return false;
  }
  return true;
}

inline ParsedLog parse_log(std::istream& in) {
  if (!in) throw Error(ErrorCode::kIo, "unreadable stream");
  ParsedLog out;
  std::string line;
  std::string why;
  ScheduleEvent event;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++out.report.total_lines;
    if (parse_line(line, event, why)) {
      out.events.push_back(std::move(event));
      event = ScheduleEvent{};
      ++out.report.parsed;
    } else {
      out.report.reject(why);
    }
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure");
  if (out.report.parsed == 0) throw Error(ErrorCode::kEmptyCorpus, "no parsable lines");
  return out;
}

inline ParsedLog parse_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return parse_log(in);
}

inline void append_json_string(std::string& out, const std::string& s) {
  out += nlohmann::json(s).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline std::string serialize_event(const ScheduleEvent& e) {
  std::string out;
  out.reserve(256);
  out += "{\"event_id\":";
  append_json_string(out, e.event_id);
  out += ",\"user_id\":";
  out += std::to_string(e.user_id);
  out += ",\"summary\":";
  append_json_string(out, e.summary);
  out += ",\"start\":\"" + format_iso8601(e.start);
  out += "\",\"end\":\"" + format_iso8601(e.end);
  out += "\",\"created\":\"" + format_iso8601(e.created);
  out += "\",\"updated\":\"" + format_iso8601(e.updated);
  out += "\",\"timezone\":";
  append_json_string(out, e.timezone);
  out += ",\"attendees\":";
  out += std::to_string(e.attendee_count);
  out += ",\"is_creator\":";
  out += e.is_creator ? "true" : "false";
  out += ",\"labels\":[";
  bool first = true;
  for (LifeMode m : kLifeModes) {
    if (!e.labels.contains(m)) continue;
    if (!first) out += ',';
    out += '"';
    out += to_string(m);
    out += '"';
    first = false;
  }
  out += "]}";
  return out;
}

inline void write_log(std::ostream& out, const std::vector<ScheduleEvent>& events) {
  for (const auto& e : events) out << serialize_event(e) << '\n';
}

inline void write_log(std::ostream& out, const EventStore& store) {
  for (const auto& [id, rec] : store) {
    for (const auto& e : rec.events) out << serialize_event(e) << '\n';
  }
}

inline nlohmann::json to_json(const ParseReport& r) {
  nlohmann::json j;
  j["total_lines"] = r.total_lines;
  j["parsed"] = r.parsed;
  j["rejected"] = r.rejected;
  j["rejection_reasons"] = r.rejection_reasons;
  return j;
}

}  // namespace caltrend
