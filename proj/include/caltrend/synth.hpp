#pragma once

#include <array>
#include <cmath>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "caltrend/error.hpp"
#include "caltrend/ingestion.hpp"
#include "caltrend/model.hpp"
#include "caltrend/random.hpp"

namespace caltrend {

struct PersonaSpec {
  std::string name;
  double events_per_month_mean = 30.0;
  double events_per_month_spread = 5.0;
  double weekend_event_probability = 0.1;
  std::array<double, 5> band_weights = {0.2, 0.2, 0.2, 0.2, 0.2};  // morning, lunch, afternoon, evening, night
  // Summary mixture; the remainder is neutral (unlabeled) text.
  double work_summary_probability = 0.5;
  double home_summary_probability = 0.2;
  double mixed_summary_probability = 0.05;
  // Templates use {w} / {h} slots filled from the keyword pools below.
  std::vector<std::string> work_templates;
  std::vector<std::string> home_templates;
  std::vector<std::string> neutral_templates;
  std::vector<std::string> work_keywords;
  std::vector<std::string> home_keywords;
  double modification_probability = 0.2;
  int months_active = 12;
  std::string timezone = "UTC";
  int offset_minutes = 0;

  // Throws kValidation naming the first offending field.
  void validate() const {
    auto fail = [&](const std::string& field) {
      throw Error(ErrorCode::kValidation, "persona '" + name + "': invalid " + field);
    };
    auto prob = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
    if (name.empty()) fail("name");
    if (!(events_per_month_mean >= 0.0) || !std::isfinite(events_per_month_mean)) fail("events_per_month_mean");
    if (!(events_per_month_spread >= 0.0) || !std::isfinite(events_per_month_spread)) fail("events_per_month_spread");
    if (!prob(weekend_event_probability)) fail("weekend_event_probability");
    double sum = 0.0;
    for (double w : band_weights) {
      if (!prob(w)) fail("band_weights");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail("band_weights");
    if (!prob(work_summary_probability)) fail("work_summary_probability");
    if (!prob(home_summary_probability)) fail("home_summary_probability");
    if (!prob(mixed_summary_probability)) fail("mixed_summary_probability");
    if (work_summary_probability + home_summary_probability + mixed_summary_probability > 1.0 + 1e-9) {
      fail("summary mixture");
    }
    if (!prob(modification_probability)) fail("modification_probability");
    if (months_active < 1) fail("months_active");
    if (work_templates.empty() || work_keywords.empty()) fail("work_templates");
    if (home_templates.empty() || home_keywords.empty()) fail("home_templates");
    if (neutral_templates.empty()) fail("neutral_templates");
    if (offset_minutes < -18 * 60 || offset_minutes > 18 * 60) fail("offset_minutes");
  }
};

struct PersonaGroup {
  PersonaSpec persona;
  int user_count = 1;
};

struct SynthOptions {
  std::uint64_t seed = 7;
  int start_year = 2023;
  int start_month = 1;
  // Summaries that get one planted PII fragment (phone, email, address or a
  // lexicon name, in rotation).
  int pii_plants = 0;
};

struct SynthCorpus {
  std::vector<ScheduleEvent> events;
  std::vector<std::pair<UserId, std::string>> truth;  // user -> persona name
  std::vector<std::string> names;                     // name lexicon covering planted names
  int planted = 0;
};

inline const std::vector<std::string>& synth_first_names() {
  static const std::vector<std::string> names = {
      "alice", "bob",   "carol", "dave",  "erin",   "frank",  "heidi", "ivan",   "judy",    "mallory",
      "oscar", "peggy", "rupert", "sybil", "trent", "victor", "wendy", "yusuf", "zara",    "minji",
      "jisoo", "hyun",  "sanjay", "priya", "lucas", "sofia",  "mateo", "chloe", "ethan",   "olivia",
      "liam",  "noah",  "emma",  "ava",   "aiden",  "harper", "evelyn", "soyeon", "dongmin", "haruto"};
  return names;
}

namespace detail {

constexpr bool is_weekend_weekday(int weekday) { return weekday == 0 || weekday == 6; }

inline const std::string& pick(Rng& rng, const std::vector<std::string>& pool) {
  return pool[rng.below(pool.size())];
}

inline std::string fill_template(Rng& rng, const std::string& tmpl, const PersonaSpec& p) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl.compare(i, 3, "{w}") == 0) {
      out += pick(rng, p.work_keywords);
      i += 2;
    } else if (tmpl.compare(i, 3, "{h}") == 0) {
      out += pick(rng, p.home_keywords);
      i += 2;
    } else {
      out.push_back(tmpl[i]);
    }
  }
  return out;
}

inline int band_hour(Rng& rng, int band) {
  static constexpr std::array<std::array<int, 2>, 4> kRanges = {{{6, 11}, {11, 14}, {14, 18}, {18, 22}}};
  if (band < 4) {
    const auto [lo, hi] = kRanges[static_cast<std::size_t>(band)];
    return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo)));
  }
  static constexpr std::array<int, 8> kNight = {22, 23, 0, 1, 2, 3, 4, 5};
  return kNight[rng.below(kNight.size())];
}

inline std::string plant_fragment(Rng& rng, int kind, const std::vector<std::string>& names) {
  static const std::vector<std::string> kStreets = {"Oak", "Maple", "Cedar", "Pine", "Elm", "Sunset", "Lake", "Hill"};
  static const std::vector<std::string> kSuffix = {"Street", "St", "Avenue", "Ave", "Road", "Rd", "Blvd", "Lane"};
  static const std::vector<std::string> kDomains = {"example.com", "acme.io", "mail.test.org", "corp.co"};
  auto digits = [&](int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + rng.below(10)));
    return s;
  };
  switch (kind % 4) {
    case 0: {
      const int shape = static_cast<int>(rng.below(3));
      if (shape == 0) return "call " + digits(3) + "-" + digits(3) + "-" + digits(4);
      if (shape == 1) return "call (" + digits(3) + ") " + digits(3) + "-" + digits(4);
      return "call +82-10-" + digits(4) + "-" + digits(4);
    }
    case 1: {
      std::string local = pick(rng, names) + "." + digits(2);
      return "email " + local + "@" + pick(rng, kDomains);
    }
    case 2: {
      std::string street = pick(rng, kStreets);
      return "at " + std::to_string(1 + rng.below(9999)) + " " + street + " " + pick(rng, kSuffix);
    }
    default: {
      std::string n = pick(rng, names);
      n[0] = static_cast<char>(n[0] - 'a' + 'A');
      return "with " + n;
    }
  }
}

}  // namespace detail

// Deterministic for a given seed: users are numbered from 0 in persona order.
inline SynthCorpus generate(const std::vector<PersonaGroup>& groups, const SynthOptions& opts) {
  if (groups.empty()) throw Error(ErrorCode::kValidation, "at least one persona required");
  for (const auto& g : groups) {
    g.persona.validate();
    if (g.user_count < 1) throw Error(ErrorCode::kValidation, "persona '" + g.persona.name + "': invalid user_count");
  }
  if (opts.start_month < 1 || opts.start_month > 12) throw Error(ErrorCode::kValidation, "invalid start_month");
  if (opts.pii_plants < 0) throw Error(ErrorCode::kValidation, "invalid pii_plants");

  Rng rng(opts.seed);
  SynthCorpus corpus;
  corpus.names = synth_first_names();
  UserId next_user = 0;
  for (const auto& g : groups) {
    const PersonaSpec& p = g.persona;
    for (int u = 0; u < g.user_count; ++u) {
      const UserId uid = next_user++;
      corpus.truth.emplace_back(uid, p.name);
      const int month_shift = static_cast<int>(rng.below(6));
      std::size_t user_events = 0;
      for (int m = 0; m < p.months_active; ++m) {
        const int idx = opts.start_month - 1 + month_shift + m;
        const int year = opts.start_year + idx / 12, month = idx % 12 + 1;
        const std::int64_t first_day = days_from_civil(year, month, 1);
        std::vector<std::int64_t> weekend_days, week_days;
        for (int d = 0; d < days_in_month(year, month); ++d) {
          (detail::is_weekend_weekday(weekday_from_days(first_day + d)) ? weekend_days : week_days).push_back(first_day + d);
        }
        auto count = static_cast<long long>(std::llround(rng.normal(p.events_per_month_mean, p.events_per_month_spread)));
        if (m == p.months_active - 1 && user_events == 0 && count < 1) count = 1;
        for (long long k = 0; k < count; ++k) {
          ScheduleEvent e;
          e.event_id = "u" + std::to_string(uid) + "-e" + std::to_string(user_events++);
          e.user_id = uid;
          const bool weekend = rng.bernoulli(p.weekend_event_probability);
          const auto& days = weekend ? weekend_days : week_days;
          const std::int64_t day = days[rng.below(days.size())];
          const int band = static_cast<int>(rng.categorical(p.band_weights));
          const int hour = detail::band_hour(rng, band);
          const int minute = static_cast<int>(rng.below(4)) * 15;
          static constexpr std::array<int, 5> kDurations = {15, 30, 60, 90, 120};
          const int duration = kDurations[rng.below(kDurations.size())];
          const std::int64_t local = day * kSecondsPerDay + hour * 3600 + minute * 60;
          const std::int64_t utc = local - std::int64_t{p.offset_minutes} * 60;
          e.start = {utc, p.offset_minutes};
          e.end = {utc + duration * 60, p.offset_minutes};
          const std::int64_t created = utc - static_cast<std::int64_t>(3600 + rng.below(30 * 86400));
          e.created = {created, 0};
          e.updated = rng.bernoulli(p.modification_probability)
                          ? Timestamp{created + static_cast<std::int64_t>(60 + rng.below(5 * 86400)), 0}
                          : Timestamp{created, 0};
          e.timezone = p.timezone;
          e.attendee_count = static_cast<int>(rng.below(9));
          e.is_creator = rng.bernoulli(0.6);
          const double r = rng.uniform();
          if (r < p.work_summary_probability) {
            e.summary = detail::fill_template(rng, detail::pick(rng, p.work_templates), p);
          } else if (r < p.work_summary_probability + p.home_summary_probability) {
            e.summary = detail::fill_template(rng, detail::pick(rng, p.home_templates), p);
          } else if (r < p.work_summary_probability + p.home_summary_probability + p.mixed_summary_probability) {
            e.summary = detail::fill_template(rng, "{w} {h}", p);
          } else {
            e.summary = detail::fill_template(rng, detail::pick(rng, p.neutral_templates), p);
          }
          corpus.events.push_back(std::move(e));
        }
      }
    }
  }

  if (opts.pii_plants > 0 && !corpus.events.empty()) {
    const auto n = corpus.events.size();
    const auto plants = std::min<std::size_t>(static_cast<std::size_t>(opts.pii_plants), n);
    // Partial Fisher-Yates for distinct targets.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i < plants; ++i) {
      std::swap(order[i], order[i + rng.below(n - i)]);
      auto& e = corpus.events[order[i]];
      e.summary += " " + detail::plant_fragment(rng, static_cast<int>(i), corpus.names);
    }
    corpus.planted = static_cast<int>(plants);
  }
  return corpus;
}

// Shipped personas. Keyword pools come from the default lexicons; neutral
// templates avoid lexicon words so labeling rates follow the mixture.
inline PersonaSpec office_persona() {
  PersonaSpec p;
  p.name = "office";
  p.events_per_month_mean = 60;
  p.events_per_month_spread = 10;
  p.weekend_event_probability = 0.05;
  p.band_weights = {0.45, 0.15, 0.35, 0.04, 0.01};
  p.work_summary_probability = 0.75;
  p.home_summary_probability = 0.08;
  p.mixed_summary_probability = 0.05;
  p.work_templates = {"{w} meeting", "weekly {w}", "{w} with team", "{w} review", "prep {w}", "{w} {w}",
                      "quarterly {w}", "{w} sync"};
  p.home_templates = {"{h}", "{h} break", "quick {h}"};
  p.neutral_templates = {"focus block", "hold", "reminder", "errands", "block"};
  p.work_keywords = {"standup", "budget", "roadmap", "client", "deadline", "planning", "1:1", "invoice",
                     "report", "forecast", "sprint", "hiring", "strategy", "proposal"};
  p.home_keywords = {"lunch", "coffee", "gym", "dinner"};
  p.modification_probability = 0.3;
  p.months_active = 12;
  p.timezone = "Asia/Seoul";
  p.offset_minutes = 9 * 60;
  return p;
}

inline PersonaSpec night_owl_persona() {
  PersonaSpec p;
  p.name = "night_owl";
  p.events_per_month_mean = 40;
  p.events_per_month_spread = 10;
  p.weekend_event_probability = 0.35;
  p.band_weights = {0.05, 0.05, 0.15, 0.35, 0.40};
  p.work_summary_probability = 0.45;
  p.home_summary_probability = 0.25;
  p.mixed_summary_probability = 0.05;
  p.work_templates = {"{w}", "late {w}", "{w} {w}", "{w} session", "fix {w}"};
  p.home_templates = {"{h}", "{h} night", "{h} with friends", "{h} marathon"};
  p.neutral_templates = {"reminder", "hold", "misc", "todo"};
  p.work_keywords = {"deploy", "code", "debug", "release", "incident", "oncall", "server", "bug", "backlog",
                     "hackathon"};
  p.home_keywords = {"movie", "gaming", "concert", "drinks", "party", "netflix", "friends"};
  p.modification_probability = 0.6;
  p.months_active = 12;
  p.timezone = "America/Phoenix";
  p.offset_minutes = -7 * 60;
  return p;
}

inline PersonaSpec family_persona() {
  PersonaSpec p;
  p.name = "family";
  p.events_per_month_mean = 25;
  p.events_per_month_spread = 6;
  p.weekend_event_probability = 0.45;
  p.band_weights = {0.20, 0.25, 0.15, 0.35, 0.05};
  p.work_summary_probability = 0.15;
  p.home_summary_probability = 0.65;
  p.mixed_summary_probability = 0.08;
  p.work_templates = {"{w}", "{w} call", "send {w}"};
  p.home_templates = {"{h}", "{h} with kids", "{h} appointment", "family {h}", "{h} and {h}"};
  p.neutral_templates = {"errands", "reminder", "hold"};
  p.work_keywords = {"email", "call", "report", "payroll", "invoice"};
  p.home_keywords = {"school-pickup", "dentist", "groceries", "birthday", "dinner", "soccer-practice", "daycare",
                     "playdate", "piano", "church"};
  p.modification_probability = 0.15;
  p.months_active = 12;
  p.timezone = "Asia/Kolkata";
  p.offset_minutes = 5 * 60 + 30;
  return p;
}

inline std::vector<PersonaGroup> default_personas(int users_per_persona = 100) {
  return {{office_persona(), users_per_persona},
          {night_owl_persona(), users_per_persona},
          {family_persona(), users_per_persona}};
}

// 1,025 users over 24 months at ~67 events per month (~1.65M events).
inline std::vector<PersonaGroup> full_scale_personas() {
  auto groups = default_personas();
  const int counts[] = {342, 342, 341};
  for (std::size_t i = 0; i < groups.size(); ++i) {
    groups[i].user_count = counts[i];
    groups[i].persona.events_per_month_mean = 67;
    groups[i].persona.events_per_month_spread = 12;
    groups[i].persona.months_active = 24;
  }
  return groups;
}

inline void write_truth(std::ostream& out, const SynthCorpus& corpus) {
  for (const auto& [uid, persona] : corpus.truth) out << uid << '\t' << persona << '\n';
}

inline void write_names(std::ostream& out, const SynthCorpus& corpus) {
  out << "# synthetic name lexicon\n";
  for (const auto& n : corpus.names) out << n << '\n';
}

}  // namespace caltrend
