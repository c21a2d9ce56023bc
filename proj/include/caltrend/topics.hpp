#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "caltrend/error.hpp"
#include "caltrend/model.hpp"
#include "caltrend/random.hpp"

namespace caltrend {

using Document = std::vector<std::string>;

struct TopicFitOptions {
  std::size_t topics = 5;
  int iterations = 200;
  double alpha = 0.1;
  double beta = 0.01;
  std::uint64_t seed = 0;
};

// LDA state after collapsed Gibbs sampling. Counts are row-major:
// topic_word[k * V + v], doc_topic[d * K + k].
struct TopicModel {
  std::vector<std::string> vocabulary;  // sorted
  std::size_t topics = 0;
  double alpha = 0.1;
  double beta = 0.01;
  std::uint64_t seed = 0;
  std::vector<int> topic_word;
  std::vector<int> doc_topic;
  std::vector<int> topic_totals;
  std::vector<std::string> warnings;

  std::size_t vocab_size() const { return vocabulary.size(); }
  std::size_t documents() const { return topics == 0 ? 0 : doc_topic.size() / topics; }
  int count(std::size_t k, std::size_t v) const { return topic_word[k * vocab_size() + v]; }
  long long total_tokens() const {
    long long t = 0;
    for (int c : topic_totals) t += c;
    return t;
  }

  // Smoothed phi_kv = (n_kv + beta) / (n_k + V beta).
  double phi(std::size_t k, std::size_t v) const {
    return (count(k, v) + beta) / (topic_totals[k] + static_cast<double>(vocab_size()) * beta);
  }
};

struct KeywordWeight {
  std::string keyword;
  double weight = 0.0;

  friend bool operator==(const KeywordWeight&, const KeywordWeight&) = default;
};

struct WordcloudPayload {
  LifeMode mode = LifeMode::kWork;
  std::vector<KeywordWeight> entries;
  bool diff = false;

  friend bool operator==(const WordcloudPayload&, const WordcloudPayload&) = default;
};

inline constexpr std::size_t kWordcloudSize = 10;

// Collapsed Gibbs sampling. `on_sweep` (optional) sees the model after every
// sweep.
inline TopicModel fit(const std::vector<Document>& docs, TopicFitOptions opts,
                      const std::function<void(const TopicModel&)>& on_sweep = {}) {
  if (opts.topics < 1) throw Error(ErrorCode::kInvalidParams, "K must be >= 1");
  if (opts.iterations < 0) throw Error(ErrorCode::kInvalidParams, "iterations must be >= 0");
  std::set<std::string> vocab_set;
  for (const auto& d : docs) vocab_set.insert(d.begin(), d.end());
  if (vocab_set.empty()) throw Error(ErrorCode::kEmptyCorpus, "no tokens to model");

  TopicModel m;
  m.vocabulary.assign(vocab_set.begin(), vocab_set.end());
  m.alpha = opts.alpha;
  m.beta = opts.beta;
  m.seed = opts.seed;
  m.topics = opts.topics;
  if (m.vocabulary.size() < m.topics) {
    m.warnings.push_back("vocabulary smaller than K; K reduced to " + std::to_string(m.vocabulary.size()));
    m.topics = m.vocabulary.size();
  }
  const std::size_t K = m.topics, V = m.vocabulary.size(), D = docs.size();
  std::unordered_map<std::string, int> index;
  for (std::size_t v = 0; v < V; ++v) index.emplace(m.vocabulary[v], static_cast<int>(v));

  std::vector<std::vector<int>> words(D), assign(D);
  m.topic_word.assign(K * V, 0);
  m.doc_topic.assign(D * K, 0);
  m.topic_totals.assign(K, 0);
  Rng rng(opts.seed);
  for (std::size_t d = 0; d < D; ++d) {
    for (const auto& tok : docs[d]) {
      const int v = index.at(tok);
      const int k = static_cast<int>(rng.below(K));
      words[d].push_back(v);
      assign[d].push_back(k);
      ++m.topic_word[k * V + v];
      ++m.doc_topic[d * K + k];
      ++m.topic_totals[k];
    }
  }

  const double vbeta = static_cast<double>(V) * m.beta;
  std::vector<double> prob(K);
  for (int it = 0; it < opts.iterations; ++it) {
    for (std::size_t d = 0; d < D; ++d) {
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const int v = words[d][i];
        int k = assign[d][i];
        --m.topic_word[k * V + v];
        --m.doc_topic[d * K + k];
        --m.topic_totals[k];
        for (std::size_t t = 0; t < K; ++t) {
          prob[t] = (m.doc_topic[d * K + t] + m.alpha) * (m.topic_word[t * V + v] + m.beta) /
                    (m.topic_totals[t] + vbeta);
        }
        k = static_cast<int>(rng.categorical(prob));
        assign[d][i] = k;
        ++m.topic_word[k * V + v];
        ++m.doc_topic[d * K + k];
        ++m.topic_totals[k];
      }
    }
    if (on_sweep) on_sweep(m);
  }
  return m;
}

namespace detail {

// Sort by weight descending, keyword ascending; keep n; scale so max = 1.
inline std::vector<KeywordWeight> rank_and_normalize(std::vector<KeywordWeight> all, std::size_t n) {
  std::sort(all.begin(), all.end(), [](const KeywordWeight& a, const KeywordWeight& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.keyword < b.keyword;
  });
  all.erase(std::remove_if(all.begin(), all.end(), [](const KeywordWeight& kw) { return !(kw.weight > 0.0); }),
            all.end());
  if (all.size() > n) all.resize(n);
  if (!all.empty()) {
    const double top = all.front().weight;
    for (auto& kw : all) kw.weight /= top;
  }
  return all;
}

}  // namespace detail

// Keywords ranked by sum_k (n_k / N) phi_kv, ties lexicographic.
inline std::vector<KeywordWeight> top_keywords(const TopicModel& m, std::size_t n = kWordcloudSize) {
  const double total = static_cast<double>(m.total_tokens());
  std::vector<KeywordWeight> all;
  all.reserve(m.vocab_size());
  for (std::size_t v = 0; v < m.vocab_size(); ++v) {
    double s = 0.0;
    for (std::size_t k = 0; k < m.topics; ++k) s += (m.topic_totals[k] / total) * m.phi(k, v);
    all.push_back({m.vocabulary[v], s});
  }
  return detail::rank_and_normalize(std::move(all), n);
}

// Top-n words of one topic by phi, ties lexicographic.
inline std::vector<KeywordWeight> topic_top_words(const TopicModel& m, std::size_t k, std::size_t n = kWordcloudSize) {
  if (k >= m.topics) throw Error(ErrorCode::kInvalidArgument, "topic index out of range");
  std::vector<KeywordWeight> all;
  for (std::size_t v = 0; v < m.vocab_size(); ++v) all.push_back({m.vocabulary[v], m.phi(k, v)});
  return detail::rank_and_normalize(std::move(all), n);
}

using KeywordCounts = std::map<std::string, long long>;

inline KeywordCounts count_keywords(const std::vector<Document>& docs) {
  KeywordCounts c;
  for (const auto& d : docs) {
    for (const auto& t : d) ++c[t];
  }
  return c;
}

inline constexpr double kLogOddsSmoothing = 0.5;

// delta_w = log((cA + e) / (NA - cA + e)) - log((cB + e) / (NB - cB + e)).
inline double log_odds_score(long long ca, long long na, long long cb, long long nb) {
  const double e = kLogOddsSmoothing;
  return std::log((ca + e) / (na - ca + e)) - std::log((cb + e) / (nb - cb + e));
}

struct DiffPayloads {
  WordcloudPayload work;
  WordcloudPayload home;
};

// Distinctive keywords per side by smoothed log-odds. A side with no tokens
// gets an empty payload and the other side ranks by its own smoothed odds.
inline DiffPayloads diff_keywords(const KeywordCounts& work_counts, const KeywordCounts& home_counts,
                                  std::size_t n = kWordcloudSize) {
  DiffPayloads out;
  out.work = {LifeMode::kWork, {}, true};
  out.home = {LifeMode::kHome, {}, true};
  long long nw = 0, nh = 0;
  for (const auto& [k, c] : work_counts) nw += c;
  for (const auto& [k, c] : home_counts) nh += c;
  const double e = kLogOddsSmoothing;
  if (nw == 0 || nh == 0) {
    const KeywordCounts& side = nw == 0 ? home_counts : work_counts;
    const long long total = nw == 0 ? nh : nw;
    std::vector<KeywordWeight> all;
    for (const auto& [k, c] : side) {
      if (c > 0) all.push_back({k, (c + e) / (total - c + e)});
    }
    (nw == 0 ? out.home : out.work).entries = detail::rank_and_normalize(std::move(all), n);
    return out;
  }
  std::set<std::string> keys;
  for (const auto& [k, c] : work_counts) keys.insert(k);
  for (const auto& [k, c] : home_counts) keys.insert(k);
  std::vector<KeywordWeight> pos, neg;
  for (const auto& k : keys) {
    const auto wi = work_counts.find(k);
    const auto hi = home_counts.find(k);
    const long long cw = wi == work_counts.end() ? 0 : wi->second;
    const long long ch = hi == home_counts.end() ? 0 : hi->second;
    const double delta = log_odds_score(cw, nw, ch, nh);
    if (delta > 0.0) pos.push_back({k, delta});
    if (delta < 0.0) neg.push_back({k, -delta});
  }
  out.work.entries = detail::rank_and_normalize(std::move(pos), n);
  out.home.entries = detail::rank_and_normalize(std::move(neg), n);
  return out;
}

// Merge per-user payloads by summed weight, renormalize, keep 10.
inline WordcloudPayload aggregate_selection(const std::vector<const WordcloudPayload*>& payloads, LifeMode mode) {
  std::map<std::string, double> summed;
  for (const auto* p : payloads) {
    for (const auto& kw : p->entries) summed[kw.keyword] += kw.weight;
  }
  std::vector<KeywordWeight> all;
  for (auto& [k, w] : summed) all.push_back({k, w});
  return {mode, detail::rank_and_normalize(std::move(all), kWordcloudSize), false};
}

inline nlohmann::json to_json(const WordcloudPayload& p) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& kw : p.entries) entries.push_back({{"keyword", kw.keyword}, {"weight", kw.weight}});
  return {{"mode", std::string(to_string(p.mode))}, {"diff", p.diff}, {"entries", entries}};
}

}  // namespace caltrend
