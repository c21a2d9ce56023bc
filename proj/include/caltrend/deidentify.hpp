#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <openssl/evp.h>

#include "caltrend/error.hpp"
#include "caltrend/model.hpp"

namespace caltrend {

enum class PiiClass : std::uint8_t { kPhone = 0, kEmail = 1, kAddress = 2 };

inline constexpr std::array<PiiClass, 3> kPiiClasses = {PiiClass::kPhone, PiiClass::kEmail, PiiClass::kAddress};

constexpr std::string_view placeholder_tag(PiiClass c) {
  switch (c) {
    case PiiClass::kPhone: return "PHONE";
    case PiiClass::kEmail: return "EMAIL";
    case PiiClass::kAddress: return "ADDR";
  }
  return "PII";
}

struct PiiMatch {
  std::size_t begin = 0;
  std::size_t end = 0;
  PiiClass cls = PiiClass::kPhone;
};

// Fixed-pattern PII detectors. Patterns are tuned for precision:
//   phone   - North-American 3-3-4 with optional country code and (area) form,
//             or '+'-prefixed international numbers with at least 3 digit groups
//   email   - local@domain.tld
//   address - house number, 1-3 words, then a street-type word (St, Ave, ...)
// Matches are non-overlapping; on overlap the earlier start wins, then the
// longer span.
class PiiDetector {
 public:
  PiiDetector()
      : email_(R"([A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(?:\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,})"),
        phone_(R"((?:\+\d{1,3}[ .\-]?)?(?:\(\d{3}\)|\d{3})[ .\-]?\d{3}[ .\-]?\d{4}|\+\d{1,3}(?:[ .\-]?\d{2,4}){3,5})"),
        address_(
            R"(\b\d{1,6}(?!\s+(?:am|pm|hours?|hrs?|mins?|minutes?|people|ppl|days?|weeks?)\b)(?:\s+[A-Za-z][A-Za-z'\-]*){1,3}?\s+(?:street|st|avenue|ave|road|rd|boulevard|blvd|lane|ln|drive|dr|court|ct|way|place|pl|terrace|parkway|pkwy|highway|hwy|square|sq)\b\.?)",
            std::regex::ECMAScript | std::regex::icase) {}

  std::vector<PiiMatch> find_all(std::string_view text) const {
    std::vector<PiiMatch> found;
    int digits = 0;
    bool at = false;
    for (char c : text) {
      if (c >= '0' && c <= '9') ++digits;
      if (c == '@') at = true;
    }
    if (at) scan(text, email_, PiiClass::kEmail, found);
    if (digits >= 7) scan(text, phone_, PiiClass::kPhone, found);
    if (digits >= 1) scan(text, address_, PiiClass::kAddress, found);
    std::sort(found.begin(), found.end(), [](const PiiMatch& a, const PiiMatch& b) {
      if (a.begin != b.begin) return a.begin < b.begin;
      return a.end > b.end;
    });
    std::vector<PiiMatch> kept;
    for (const auto& m : found) {
      if (!kept.empty() && m.begin < kept.back().end) continue;
      kept.push_back(m);
    }
    return kept;
  }

  bool any(std::string_view text) const { return !find_all(text).empty(); }

 private:
  static bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

  static void scan(std::string_view text, const std::regex& re, PiiClass cls, std::vector<PiiMatch>& out) {
    auto begin = text.begin();
    std::match_results<std::string_view::const_iterator> m;
    auto flags = std::regex_constants::match_default;
    while (begin != text.end() && std::regex_search(begin, text.end(), m, re, flags)) {
      const auto b = static_cast<std::size_t>(m[0].first - text.begin());
      const auto e = static_cast<std::size_t>(m[0].second - text.begin());
      const bool left_ok = b == 0 || !is_alnum(text[b - 1]) || cls == PiiClass::kEmail;
      const bool right_ok = e == text.size() || !std::isdigit(static_cast<unsigned char>(text[e]));
      if (e > b && left_ok && right_ok) {
        out.push_back({b, e, cls});
        begin = m[0].second;
      } else {
        begin = m[0].first + 1;
      }
      flags = std::regex_constants::match_prev_avail;
    }
  }

  std::regex email_;
  std::regex phone_;
  std::regex address_;
};

inline const PiiDetector& default_detector() {
  static const PiiDetector detector;
  return detector;
}

// Lowercase tokens, one per line; '#' starts a comment.
using NameLexicon = std::unordered_set<std::string>;

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::unordered_set<std::string> read_word_list(std::istream& in) {
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    words.insert(ascii_lower(std::string_view(line).substr(b, e - b + 1)));
  }
  return words;
}

inline std::unordered_set<std::string> read_word_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return read_word_list(in);
}

// Hex SHA-256 of salt || value.
inline std::string salted_hash(std::string_view salt, std::string_view value) {
  std::string buf;
  buf.reserve(salt.size() + value.size());
  buf.append(salt).append(value);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(buf.data(), buf.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

// Maps salted hashes of PII spans to class-scoped placeholders. Raw PII is
// never stored.
struct RedactionMap {
  std::vector<std::pair<std::string, std::string>> entries;  // (hash, placeholder), in assignment order
  std::array<int, 3> counters{};

  int count(PiiClass c) const { return counters[static_cast<std::size_t>(c)]; }
};

// Collapses whitespace runs to one space and trims.
inline std::string normalize_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

// Length of a placeholder such as "[PHONE-12]" starting at pos, or 0.
inline std::size_t placeholder_length(std::string_view s, std::size_t pos) {
  if (pos >= s.size() || s[pos] != '[') return 0;
  std::size_t i = pos + 1;
  const std::size_t tag_begin = i;
  while (i < s.size() && s[i] >= 'A' && s[i] <= 'Z') ++i;
  if (i == tag_begin || i >= s.size() || s[i] != '-') return 0;
  ++i;
  const std::size_t num_begin = i;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  if (i == num_begin || i >= s.size() || s[i] != ']') return 0;
  return i + 1 - pos;
}

inline bool is_placeholder(std::string_view s) { return !s.empty() && placeholder_length(s, 0) == s.size(); }

namespace detail {

inline bool is_name_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalpha(u) || c == '\'' || c == '-' || u >= 0x80;
}

inline std::string_view trim_name_edges(std::string_view w) {
  while (!w.empty() && (w.front() == '\'' || w.front() == '-')) w.remove_prefix(1);
  while (!w.empty() && (w.back() == '\'' || w.back() == '-')) w.remove_suffix(1);
  return w;
}

inline bool is_lexicon_name(std::string_view word, const NameLexicon& names) {
  std::string lower = ascii_lower(trim_name_edges(word));
  if (lower.empty()) return false;
  if (names.count(lower)) return true;
  if (lower.size() > 2 && lower.compare(lower.size() - 2, 2, "'s") == 0) {
    return names.count(lower.substr(0, lower.size() - 2)) > 0;
  }
  return false;
}

}  // namespace detail

// Deletes lexicon names. Returns true when anything was removed; whitespace is
// normalized only in that case.
inline bool remove_names(std::string& text, const NameLexicon& names) {
  if (names.empty()) return false;
  std::string out;
  out.reserve(text.size());
  bool removed = false;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::size_t ph = placeholder_length(text, i)) {
      out.append(text, i, ph);
      i += ph;
      continue;
    }
    if (detail::is_name_char(text[i])) {
      std::size_t j = i;
      while (j < text.size() && detail::is_name_char(text[j])) ++j;
      std::string_view word(text.data() + i, j - i);
      if (detail::is_lexicon_name(word, names)) {
        removed = true;
      } else {
        out.append(word);
      }
      i = j;
      continue;
    }
    out.push_back(text[i++]);
  }
  if (removed) text = normalize_whitespace(out);
  return removed;
}

struct RedactionDelta {
  std::vector<std::pair<std::string, std::string>> new_entries;
  std::array<int, 3> replaced{};  // spans replaced in this event, by class
  int names_removed = 0;
};

namespace detail {

inline std::string pii_key(PiiClass cls, std::string_view span) {
  std::string key(placeholder_tag(cls));
  key.push_back(':');
  if (cls == PiiClass::kPhone) {
    for (char c : span) {
      if (c >= '0' && c <= '9') key.push_back(c);
    }
  } else {
    key += ascii_lower(span);
  }
  return key;
}

}  // namespace detail

// Stateful deidentifier for one run: the same PII value always receives the
// same placeholder.
class Deidentifier {
 public:
  explicit Deidentifier(NameLexicon names = {}, std::string salt = "caltrend",
                        const PiiDetector& detector = default_detector())
      : names_(std::move(names)), salt_(std::move(salt)), detector_(&detector) {}

  std::pair<ScheduleEvent, RedactionDelta> deidentify(const ScheduleEvent& event) {
    ScheduleEvent out = event;
    RedactionDelta delta;
    // Replacement and deletion can expose new matches (e.g. a name between
    // digit groups), so iterate to a fixed point.
    for (int round = 0; round < 8; ++round) {
      const bool replaced = replace_pii(out.summary, delta);
      const bool removed = remove_names_counted(out.summary, delta);
      if (!replaced && !removed) break;
    }
    return {std::move(out), std::move(delta)};
  }

  std::string deidentify_text(std::string_view text) {
    ScheduleEvent e;
    e.summary = std::string(text);
    return deidentify(e).first.summary;
  }

  const RedactionMap& map() const { return map_; }
  const NameLexicon& names() const { return names_; }

 private:
  bool replace_pii(std::string& text, RedactionDelta& delta) {
    const auto matches = detector_->find_all(text);
    if (matches.empty()) return false;
    std::string out;
    out.reserve(text.size());
    std::size_t cursor = 0;
    for (const auto& m : matches) {
      out.append(text, cursor, m.begin - cursor);
      out += placeholder_for(m.cls, std::string_view(text).substr(m.begin, m.end - m.begin), delta);
      ++delta.replaced[static_cast<std::size_t>(m.cls)];
      cursor = m.end;
    }
    out.append(text, cursor);
    text = std::move(out);
    return true;
  }

  bool remove_names_counted(std::string& text, RedactionDelta& delta) {
    if (!remove_names(text, names_)) return false;
    ++delta.names_removed;
    return true;
  }

  const std::string& placeholder_for(PiiClass cls, std::string_view span, RedactionDelta& delta) {
    std::string hash = salted_hash(salt_, detail::pii_key(cls, span));
    auto it = by_hash_.find(hash);
    if (it != by_hash_.end()) return it->second;
    const int n = ++map_.counters[static_cast<std::size_t>(cls)];
    std::string ph = "[" + std::string(placeholder_tag(cls)) + "-" + std::to_string(n) + "]";
    map_.entries.emplace_back(hash, ph);
    delta.new_entries.emplace_back(hash, ph);
    return by_hash_.emplace(std::move(hash), std::move(ph)).first->second;
  }

  NameLexicon names_;
  std::string salt_;
  const PiiDetector* detector_;
  RedactionMap map_;
  std::unordered_map<std::string, std::string> by_hash_;
};

// Free-function form over an explicit run state.
inline std::pair<ScheduleEvent, RedactionDelta> deidentify(const ScheduleEvent& event, Deidentifier& run) {
  return run.deidentify(event);
}

}  // namespace caltrend
