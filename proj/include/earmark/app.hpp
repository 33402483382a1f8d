#pragma once

#include "earmark/admin.hpp"
#include "earmark/annotation.hpp"
#include "earmark/auth.hpp"
#include "earmark/blob_store.hpp"
#include "earmark/clock.hpp"
#include "earmark/export.hpp"
#include "earmark/ingest.hpp"
#include "earmark/media.hpp"
#include "earmark/qa.hpp"
#include "earmark/store.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace earmark {

struct Config {
  std::string db_path = "earmark.db";  // ":memory:" for a throwaway store
  std::filesystem::path blob_dir = "blobs";
  AuthConfig auth;
  std::uint64_t max_upload_bytes = kDefaultMaxUploadBytes;
  // Created on start when both are set and the user does not exist yet.
  std::optional<std::string> admin_username;
  std::optional<std::string> admin_password;
};

/// Wires the store, blob directory and every service together.
class App {
 public:
  explicit App(Config config,
               std::unique_ptr<Clock> clock = std::make_unique<SystemClock>());

  const Config& config() const { return config_; }
  const Clock& clock() const { return *clock_; }

 private:
  Config config_;
  std::unique_ptr<Clock> clock_;

 public:
  Store store;
  FileBlobStore blobs;
  AuthService auth;
  AdminService admin;
  IngestionService ingestion;
  AnnotationService annotation;
  MediaService media;
  ExportService exporter;
  QaService qa;
};

}  // namespace earmark
