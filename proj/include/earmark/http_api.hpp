#pragma once

#include "earmark/app.hpp"

#include <filesystem>
#include <optional>

namespace httplib {
class Server;
}

namespace earmark {

struct HttpOptions {
  // Serves a built front end from this directory under "/".
  std::optional<std::filesystem::path> static_dir;
};

/// Registers every REST route of `app` on `server`. The app must outlive the
/// server.
void mount_routes(httplib::Server& server, App& app, const HttpOptions& options = {});

}  // namespace earmark
