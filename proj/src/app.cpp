#include "earmark/app.hpp"

namespace earmark {

App::App(Config config, std::unique_ptr<Clock> clock)
    : config_(std::move(config)),
      clock_(std::move(clock)),
      store(config_.db_path),
      blobs(config_.blob_dir),
      auth(store, *clock_, config_.auth),
      admin(store, auth, blobs),
      ingestion(store, blobs, *clock_, config_.max_upload_bytes),
      annotation(store, auth, *clock_),
      media(store, blobs),
      exporter(store, auth),
      qa(store, auth, *clock_) {
  if (config_.admin_username && config_.admin_password) {
    auth.bootstrap_admin(*config_.admin_username, *config_.admin_password);
  }
}

}  // namespace earmark
