#include "earmark/error.hpp"

namespace earmark {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kBadRequest: return "ERR_BAD_REQUEST";
    case ErrorCode::kUnauthenticated: return "ERR_UNAUTHENTICATED";
    case ErrorCode::kBadCredentials: return "ERR_BAD_CREDENTIALS";
    case ErrorCode::kBadApiKey: return "ERR_BAD_API_KEY";
    case ErrorCode::kForbidden: return "ERR_FORBIDDEN";
    case ErrorCode::kNotFound: return "ERR_NOT_FOUND";
    case ErrorCode::kConflict: return "ERR_CONFLICT";
    case ErrorCode::kInUse: return "ERR_IN_USE";
    case ErrorCode::kLastAdmin: return "ERR_LAST_ADMIN";
    case ErrorCode::kWeakPassword: return "ERR_WEAK_PASSWORD";
    case ErrorCode::kInvalidEncoding: return "ERR_INVALID_ENCODING";
    case ErrorCode::kBounds: return "ERR_BOUNDS";
    case ErrorCode::kEmptyInterval: return "ERR_EMPTY_INTERVAL";
    case ErrorCode::kLabelScope: return "ERR_LABEL_SCOPE";
    case ErrorCode::kCardinality: return "ERR_CARDINALITY";
    case ErrorCode::kBadFormat: return "ERR_BAD_FORMAT";
    case ErrorCode::kCorrupt: return "ERR_CORRUPT";
    case ErrorCode::kTooLarge: return "ERR_TOO_LARGE";
    case ErrorCode::kUnknownAssignee: return "ERR_UNKNOWN_ASSIGNEE";
    case ErrorCode::kNotMember: return "ERR_NOT_MEMBER";
    case ErrorCode::kBadPreannotation: return "ERR_BAD_PREANNOTATION";
    case ErrorCode::kBadPage: return "ERR_BAD_PAGE";
    case ErrorCode::kRange: return "ERR_RANGE";
    case ErrorCode::kBadFraction: return "ERR_BAD_FRACTION";
    case ErrorCode::kEmptyReference: return "ERR_EMPTY_REFERENCE";
    case ErrorCode::kInternal: return "ERR_INTERNAL";
  }
  return "ERR_INTERNAL";
}

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kBadRequest:
    case ErrorCode::kWeakPassword:
    case ErrorCode::kInvalidEncoding:
    case ErrorCode::kBadPage:
    case ErrorCode::kBadFraction:
    case ErrorCode::kEmptyReference:
      return 400;
    case ErrorCode::kUnauthenticated:
    case ErrorCode::kBadCredentials:
    case ErrorCode::kBadApiKey:
      return 401;
    case ErrorCode::kForbidden: return 403;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict:
    case ErrorCode::kInUse:
    case ErrorCode::kLastAdmin:
      return 409;
    case ErrorCode::kTooLarge: return 413;
    case ErrorCode::kBadFormat: return 415;
    case ErrorCode::kRange: return 416;
    case ErrorCode::kBounds:
    case ErrorCode::kEmptyInterval:
    case ErrorCode::kLabelScope:
    case ErrorCode::kCardinality:
    case ErrorCode::kCorrupt:
    case ErrorCode::kUnknownAssignee:
    case ErrorCode::kNotMember:
    case ErrorCode::kBadPreannotation:
      return 422;
    case ErrorCode::kInternal: return 500;
  }
  return 500;
}

namespace {

// Codes whose body must not vary with the underlying cause.
std::string_view fixed_message(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnauthenticated: return "authentication required";
    case ErrorCode::kBadCredentials: return "invalid username or password";
    case ErrorCode::kBadApiKey: return "invalid api key";
    case ErrorCode::kNotFound: return "not found";
    case ErrorCode::kForbidden: return "forbidden";
    default: return {};
  }
}

}  // namespace

nlohmann::json error_body(const Error& e) {
  nlohmann::json err = {{"code", to_string(e.code())}};
  auto fixed = fixed_message(e.code());
  err["message"] = fixed.empty() ? std::string(e.what()) : std::string(fixed);
  if (e.detail().is_object()) {
    for (const auto& [k, v] : e.detail().items()) err[k] = v;
  }
  return {{"error", err}};
}

}  // namespace earmark
