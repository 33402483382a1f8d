#pragma once

#include "earmark/auth.hpp"
#include "earmark/store.hpp"

#include <json.hpp>

#include <string>

namespace earmark {

inline constexpr const char* kExportVersion = "1";

/// Builds the versioned project export. Key order is fixed and every list is
/// sorted, so unchanged data always renders to the same bytes:
///   data by (created_at, id); assignments by username; segments by
///   (start_ms, end_ms, id); labels and their values by byte order.
/// Internal ids other than the project id, credential digests and api keys
/// never appear. Audio bytes are not included.
class ExportService {
 public:
  ExportService(Store& store, AuthService& auth) : store_(store), auth_(auth) {}

  nlohmann::ordered_json export_project(const Principal& caller, ProjectId project);

  /// Two-space indented UTF-8 with a trailing newline.
  static std::string render(const nlohmann::ordered_json& document);

 private:
  Store& store_;
  AuthService& auth_;
};

}  // namespace earmark
