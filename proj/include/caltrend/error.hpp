#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace caltrend {

enum class ErrorCode {
  kDuplicateEvent,
  kEmptyCorpus,
  kEmptyUser,
  kPopulationTooSmall,
  kDegenerateWeights,
  kInvalidArgument,
  kInvalidParams,
  kNumericalOverflow,
  kIo,
  kValidation,
  kCancelled,
  kNotFound,
  kMissingArtifact,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateEvent: return "duplicate event";
    case ErrorCode::kEmptyCorpus: return "empty corpus";
    case ErrorCode::kEmptyUser: return "empty user";
    case ErrorCode::kPopulationTooSmall: return "population too small";
    case ErrorCode::kDegenerateWeights: return "degenerate weights";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kInvalidParams: return "invalid params";
    case ErrorCode::kNumericalOverflow: return "numerical overflow";
    case ErrorCode::kIo: return "io error";
    case ErrorCode::kValidation: return "validation error";
    case ErrorCode::kCancelled: return "cancelled";
    case ErrorCode::kNotFound: return "not found";
    case ErrorCode::kMissingArtifact: return "missing artifact";
  }
  return "unknown";
}

// Every failure raised by the library carries a code so callers (CLI, HTTP
// layer) can map it without parsing messages. what() is "<code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(compose(code, detail)), code_(code), detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string compose(ErrorCode code, const std::string& detail) {
    std::string out(to_string(code));
    if (!detail.empty()) {
      out += ": ";
      out += detail;
    }
    return out;
  }

  ErrorCode code_;
  std::string detail_;
};

}  // namespace caltrend
