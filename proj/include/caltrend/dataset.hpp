#pragma once

#include <array>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "caltrend/error.hpp"
#include "caltrend/features.hpp"
#include "caltrend/ingestion.hpp"
#include "caltrend/model.hpp"
#include "caltrend/temporal.hpp"
#include "caltrend/text.hpp"
#include "caltrend/topics.hpp"

namespace caltrend {

// Tokenized summaries of the events carrying `mode`; events whose summaries
// tokenize to nothing are skipped.
template <typename EventRange>
std::vector<Document> mode_documents(const EventRange& events, LifeMode mode) {
  std::vector<Document> docs;
  for (const ScheduleEvent& e : events) {
    if (!e.labels.contains(mode)) continue;
    auto toks = tokenize(e.summary);
    if (!toks.empty()) docs.push_back(std::move(toks));
  }
  return docs;
}

// Word-cloud payload for one user and mode; empty when the user has no
// labeled text for the mode.
inline WordcloudPayload user_topic_payload(const UserRecord& record, LifeMode mode, const TopicFitOptions& opts) {
  WordcloudPayload p{mode, {}, false};
  auto docs = mode_documents(record.events, mode);
  if (docs.empty()) return p;
  p.entries = top_keywords(fit(docs, opts));
  return p;
}

struct DatasetOptions {
  TopicFitOptions topics;
  std::string dataset_id = "default";
  bool fit_topics = true;  // per-user word clouds; off leaves them empty
};

// Preprocessed, immutable view served to analysts: the labeled store plus
// everything derived from it that does not depend on request parameters.
class Dataset {
 public:
  static std::shared_ptr<const Dataset> build(EventStore store, DatasetOptions opts = {}) {
    auto d = std::shared_ptr<Dataset>(new Dataset());
    d->opts_ = std::move(opts);
    d->store_ = std::move(store);
    d->raw_ = build_feature_matrix(d->store_);
    d->standardized_ = standardize(d->raw_);
    for (std::size_t i = 0; i < d->raw_.user_ids.size(); ++i) d->row_of_[d->raw_.user_ids[i]] = i;
    for (const auto& [id, rec] : d->store_) {
      d->glyphs_.emplace(id, glyph_summary(rec));
      if (d->opts_.fit_topics) {
        d->topics_.emplace(id, std::array<WordcloudPayload, 2>{user_topic_payload(rec, LifeMode::kWork, d->opts_.topics),
                                                               user_topic_payload(rec, LifeMode::kHome, d->opts_.topics)});
      } else {
        d->topics_.emplace(id, std::array<WordcloudPayload, 2>{WordcloudPayload{LifeMode::kWork, {}, false},
                                                               WordcloudPayload{LifeMode::kHome, {}, false}});
      }
    }
    return d;
  }

  static std::shared_ptr<const Dataset> load(const std::string& events_path, DatasetOptions opts = {}) {
    auto parsed = parse_log_file(events_path);
    return build(build_store(std::move(parsed.events)), std::move(opts));
  }

  const EventStore& store() const { return store_; }
  const FeatureMatrix& raw_features() const { return raw_; }
  const FeatureMatrix& standardized_features() const { return standardized_; }
  const DatasetOptions& options() const { return opts_; }
  const std::string& id() const { return opts_.dataset_id; }
  const std::vector<UserId>& user_ids() const { return raw_.user_ids; }

  const UserRecord& user(UserId id) const {
    auto it = store_.find(id);
    if (it == store_.end()) throw Error(ErrorCode::kNotFound, "user " + std::to_string(id));
    return it->second;
  }
  bool has_user(UserId id) const { return store_.count(id) > 0; }
  std::size_t row(UserId id) const {
    auto it = row_of_.find(id);
    if (it == row_of_.end()) throw Error(ErrorCode::kNotFound, "user " + std::to_string(id));
    return it->second;
  }
  const GlyphSummary& glyph(UserId id) const {
    auto it = glyphs_.find(id);
    if (it == glyphs_.end()) throw Error(ErrorCode::kNotFound, "user " + std::to_string(id));
    return it->second;
  }
  const WordcloudPayload& topic_payload(UserId id, LifeMode mode) const {
    auto it = topics_.find(id);
    if (it == topics_.end()) throw Error(ErrorCode::kNotFound, "user " + std::to_string(id));
    return it->second[static_cast<std::size_t>(mode)];
  }

  // Selection as a set; an empty set selects everyone.
  std::vector<const UserRecord*> select(const std::set<UserId>& ids) const {
    std::vector<const UserRecord*> out;
    if (ids.empty()) {
      for (const auto& [id, rec] : store_) out.push_back(&rec);
      return out;
    }
    for (UserId id : ids) out.push_back(&user(id));
    return out;
  }

 private:
  Dataset() = default;

  DatasetOptions opts_;
  EventStore store_;
  FeatureMatrix raw_;
  FeatureMatrix standardized_;
  std::map<UserId, std::size_t> row_of_;
  std::map<UserId, GlyphSummary> glyphs_;
  std::map<UserId, std::array<WordcloudPayload, 2>> topics_;
};

// Per-mode word clouds for a selection: merged per-user topic payloads, or
// distinctive log-odds keywords when `diff` is set.
inline DiffPayloads selection_topics(const Dataset& d, const std::set<UserId>& ids, bool diff) {
  const auto records = d.select(ids);
  if (diff) {
    std::vector<Document> work, home;
    for (const UserRecord* r : records) {
      auto w = mode_documents(r->events, LifeMode::kWork);
      auto h = mode_documents(r->events, LifeMode::kHome);
      work.insert(work.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
      home.insert(home.end(), std::make_move_iterator(h.begin()), std::make_move_iterator(h.end()));
    }
    return diff_keywords(count_keywords(work), count_keywords(home));
  }
  DiffPayloads out;
  for (LifeMode mode : kLifeModes) {
    std::vector<const WordcloudPayload*> parts;
    for (const UserRecord* r : records) parts.push_back(&d.topic_payload(r->user_id, mode));
    (mode == LifeMode::kWork ? out.work : out.home) = aggregate_selection(parts, mode);
  }
  return out;
}

}  // namespace caltrend
