#pragma once

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace earmark {

enum class ErrorCode {
  kBadRequest,
  kUnauthenticated,
  kBadCredentials,
  kBadApiKey,
  kForbidden,
  kNotFound,
  kConflict,
  kInUse,
  kLastAdmin,
  kWeakPassword,
  kInvalidEncoding,
  kBounds,
  kEmptyInterval,
  kLabelScope,
  kCardinality,
  kBadFormat,
  kCorrupt,
  kTooLarge,
  kUnknownAssignee,
  kNotMember,
  kBadPreannotation,
  kBadPage,
  kRange,
  kBadFraction,
  kEmptyReference,
  kInternal,
};

/// Wire identifier, e.g. "ERR_FORBIDDEN".
std::string_view to_string(ErrorCode code) noexcept;

/// HTTP status the REST layer answers with for this code.
int http_status(ErrorCode code) noexcept;

/// Every service reports failure by throwing this. `detail` is merged into
/// the JSON error body (e.g. the offending pre-annotation index).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        nlohmann::json detail = nullptr)
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  nlohmann::json detail_;
};

/// Canonical error body. Authentication failures always carry a fixed message
/// so that bodies are byte-identical across causes.
nlohmann::json error_body(const Error& e);

}  // namespace earmark
