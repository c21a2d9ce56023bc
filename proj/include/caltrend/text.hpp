#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "caltrend/deidentify.hpp"

namespace caltrend {

// Standard English stop-word list (the common NLTK list).
inline constexpr std::array<std::string_view, 179> kStopWords = {
    "i",        "me",       "my",         "myself",  "we",      "our",     "ours",    "ourselves", "you",
    "you're",   "you've",   "you'll",     "you'd",   "your",    "yours",   "yourself", "yourselves", "he",
    "him",      "his",      "himself",    "she",     "she's",   "her",     "hers",    "herself",   "it",
    "it's",     "its",      "itself",     "they",    "them",    "their",   "theirs",  "themselves", "what",
    "which",    "who",      "whom",       "this",    "that",    "that'll", "these",   "those",     "am",
    "is",       "are",      "was",        "were",    "be",      "been",    "being",   "have",      "has",
    "had",      "having",   "do",         "does",    "did",     "doing",   "a",       "an",        "the",
    "and",      "but",      "if",         "or",      "because", "as",      "until",   "while",     "of",
    "at",       "by",       "for",        "with",    "about",   "against", "between", "into",      "through",
    "during",   "before",   "after",      "above",   "below",   "to",      "from",    "up",        "down",
    "in",       "out",      "on",         "off",     "over",    "under",   "again",   "further",   "then",
    "once",     "here",     "there",      "when",    "where",   "why",     "how",     "all",       "any",
    "both",     "each",     "few",        "more",    "most",    "other",   "some",    "such",      "no",
    "nor",      "not",      "only",       "own",     "same",    "so",      "than",    "too",       "very",
    "s",        "t",        "can",        "will",    "just",    "don",     "don't",   "should",    "should've",
    "now",      "d",        "ll",         "m",       "o",       "re",      "ve",      "y",         "ain",
    "aren",     "aren't",   "couldn",     "couldn't", "didn",   "didn't",  "doesn",   "doesn't",   "hadn",
    "hadn't",   "hasn",     "hasn't",     "haven",   "haven't", "isn",     "isn't",   "ma",        "mightn",
    "mightn't", "mustn",    "mustn't",    "needn",   "needn't", "shan",    "shan't",  "shouldn",   "shouldn't",
    "wasn",     "wasn't",   "weren",      "weren't", "won",     "won't",   "wouldn",  "wouldn't",
};

inline bool is_stop_word(std::string_view token) {
  static const std::vector<std::string_view> sorted = [] {
    std::vector<std::string_view> v(kStopWords.begin(), kStopWords.end());
    std::sort(v.begin(), v.end());
    return v;
  }();
  return std::binary_search(sorted.begin(), sorted.end(), token);
}

namespace detail {

inline bool is_token_core_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u >= 0x80;
}

}  // namespace detail

// Lowercased, edge-punctuation-stripped, stop-word-filtered tokens in original
// order. Placeholders such as [PHONE-1] are dropped. Internal punctuation is
// kept, so "1:1" and "q3-planning" are single tokens.
inline std::vector<std::string> tokenize(std::string_view summary) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = summary.size();
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < n) {
    if (is_space(summary[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::string raw;
    while (j < n && !is_space(summary[j])) {
      if (std::size_t ph = placeholder_length(summary, j)) {
        j += ph;
        raw.push_back(' ');
        continue;
      }
      raw.push_back(summary[j++]);
    }
    i = j;
    // A placeholder glued to text splits the raw token.
    std::size_t a = 0;
    while (a < raw.size()) {
      std::size_t b = raw.find(' ', a);
      if (b == std::string::npos) b = raw.size();
      std::size_t lo = a, hi = b;
      while (lo < hi && !detail::is_token_core_char(raw[lo])) ++lo;
      while (hi > lo && !detail::is_token_core_char(raw[hi - 1])) --hi;
      if (hi > lo) {
        std::string tok = ascii_lower(std::string_view(raw).substr(lo, hi - lo));
        if (!is_stop_word(tok)) tokens.push_back(std::move(tok));
      }
      a = b + 1;
    }
  }
  return tokens;
}

}  // namespace caltrend
