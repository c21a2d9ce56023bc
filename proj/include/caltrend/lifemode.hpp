#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "caltrend/default_lexicons.hpp"
#include "caltrend/deidentify.hpp"
#include "caltrend/error.hpp"
#include "caltrend/model.hpp"
#include "caltrend/text.hpp"

namespace caltrend {

struct ConceptLexicon {
  std::unordered_set<std::string> work;
  std::unordered_set<std::string> home;

  const std::unordered_set<std::string>& keywords(LifeMode m) const { return m == LifeMode::kWork ? work : home; }

  static ConceptLexicon defaults() {
    ConceptLexicon lex;
    for (auto k : kDefaultWorkKeywords) lex.work.emplace(k);
    for (auto k : kDefaultHomeKeywords) lex.home.emplace(k);
    return lex;
  }

  static ConceptLexicon from_files(const std::string& work_path, const std::string& home_path) {
    ConceptLexicon lex{read_word_list_file(work_path), read_word_list_file(home_path)};
    lex.validate();
    return lex;
  }

  void validate() const {
    if (work.empty() || home.empty()) throw Error(ErrorCode::kValidation, "lexicon sets must be non-empty");
    for (const auto* set : {&work, &home}) {
      for (const auto& k : *set) {
        if (k.empty() || k.find_first_of(" \t\r\n") != std::string::npos) {
          throw Error(ErrorCode::kValidation, "lexicon keyword contains whitespace: '" + k + "'");
        }
      }
    }
  }
};

inline LabelSet label_tokens(const std::vector<std::string>& tokens, const ConceptLexicon& lexicon) {
  LabelSet labels;
  for (const auto& t : tokens) {
    if (!labels.contains(LifeMode::kWork) && lexicon.work.count(t)) labels.insert(LifeMode::kWork);
    if (!labels.contains(LifeMode::kHome) && lexicon.home.count(t)) labels.insert(LifeMode::kHome);
  }
  return labels;
}

// Exact token membership; "art" does not match "party".
inline LabelSet label_event(const ScheduleEvent& event, const ConceptLexicon& lexicon) {
  return label_tokens(tokenize(event.summary), lexicon);
}

inline EventStore label_store(EventStore store, const ConceptLexicon& lexicon) {
  lexicon.validate();
  for (auto& [id, rec] : store) {
    for (auto& e : rec.events) e.labels = label_event(e, lexicon);
  }
  return store;
}

struct LabelStats {
  std::size_t total = 0;
  std::size_t labeled = 0;
  std::size_t work_labeled = 0;
  std::size_t home_labeled = 0;
  std::size_t multi_labeled = 0;

  double fraction(std::size_t count) const { return total == 0 ? 0.0 : static_cast<double>(count) / total; }
  double labeled_fraction() const { return fraction(labeled); }
  double work_fraction() const { return fraction(work_labeled); }
  double home_fraction() const { return fraction(home_labeled); }
  double multi_fraction() const { return fraction(multi_labeled); }

  friend bool operator==(const LabelStats&, const LabelStats&) = default;
};

template <typename EventRange>
LabelStats count_labels(const EventRange& events) {
  LabelStats s;
  for (const ScheduleEvent& e : events) {
    ++s.total;
    const bool w = e.labels.contains(LifeMode::kWork);
    const bool h = e.labels.contains(LifeMode::kHome);
    s.work_labeled += w;
    s.home_labeled += h;
    s.multi_labeled += (w && h);
    s.labeled += (w || h);
  }
  return s;
}

// All fractions are over total events.
inline LabelStats corpus_stats(const EventStore& store) {
  LabelStats s;
  for (const auto& [id, rec] : store) {
    const LabelStats u = count_labels(rec.events);
    s.total += u.total;
    s.labeled += u.labeled;
    s.work_labeled += u.work_labeled;
    s.home_labeled += u.home_labeled;
    s.multi_labeled += u.multi_labeled;
  }
  if (s.total == 0) throw Error(ErrorCode::kEmptyCorpus, "no events to count");
  return s;
}

inline nlohmann::json to_json(const LabelStats& s) {
  return {{"total", s.total},
          {"labeled", s.labeled},
          {"work_labeled", s.work_labeled},
          {"home_labeled", s.home_labeled},
          {"multi_labeled", s.multi_labeled},
          {"labeled_fraction", s.labeled_fraction()},
          {"work_fraction", s.work_fraction()},
          {"home_fraction", s.home_fraction()},
          {"multi_fraction", s.multi_fraction()}};
}

}  // namespace caltrend
