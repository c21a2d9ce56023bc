#pragma once

#include <string>
#include <vector>

#include "caltrend/caltrend.hpp"

namespace testing_support {

using namespace caltrend;

inline Timestamp ts(const std::string& iso) {
  auto t = parse_iso8601(iso);
  if (!t) throw std::runtime_error("bad test timestamp " + iso);
  return *t;
}

// Event starting at `start` (ISO-8601 with offset) lasting `minutes`.
inline ScheduleEvent make_event(const std::string& id, UserId user, const std::string& start, int minutes = 60,
                                const std::string& summary = "event") {
  ScheduleEvent e;
  e.event_id = id;
  e.user_id = user;
  e.summary = summary;
  e.start = ts(start);
  e.end = e.start;
  e.end.utc_seconds += minutes * 60;
  e.created = e.start;
  e.created.utc_seconds -= 86400;
  e.created.offset_minutes = 0;
  e.updated = e.created;
  e.timezone = "UTC";
  e.attendee_count = 1;
  e.is_creator = true;
  return e;
}

inline UserRecord make_record(UserId user, std::vector<ScheduleEvent> events) {
  for (auto& e : events) e.user_id = user;
  auto store = build_store(std::move(events));
  return store.at(user);
}

inline SynthCorpus small_corpus(int users_per_persona = 10, std::uint64_t seed = 7, int plants = 0) {
  SynthOptions opts;
  opts.seed = seed;
  opts.pii_plants = plants;
  return generate(default_personas(users_per_persona), opts);
}

// Deidentify with the corpus's name lexicon, then label: what ingest + label do.
inline EventStore pipeline_store(const SynthCorpus& corpus) {
  Deidentifier run(NameLexicon(corpus.names.begin(), corpus.names.end()));
  std::vector<ScheduleEvent> clean;
  clean.reserve(corpus.events.size());
  for (const auto& e : corpus.events) clean.push_back(run.deidentify(e).first);
  return label_store(build_store(std::move(clean)), ConceptLexicon::defaults());
}

// Tokens of `text` that are lexicon names, possessive 's stripped.
inline std::vector<std::string> name_tokens(const std::string& text, const NameLexicon& names) {
  std::vector<std::string> hits;
  for (auto tok : tokenize(text)) {
    if (tok.size() > 2 && tok.compare(tok.size() - 2, 2, "'s") == 0) tok.resize(tok.size() - 2);
    if (names.count(tok)) hits.push_back(tok);
  }
  return hits;
}

}  // namespace testing_support

#define EXPECT_CALTREND_ERROR(stmt, expected_code)                              \
  do {                                                                          \
    try {                                                                       \
      stmt;                                                                     \
      ADD_FAILURE() << "expected " << caltrend::to_string(expected_code);       \
    } catch (const caltrend::Error& err_) {                                     \
      EXPECT_EQ(err_.code(), expected_code) << err_.what();                     \
    }                                                                           \
  } while (0)
