// earmarkd: the annotation server plus a few offline helpers.

#include "earmark/app.hpp"
#include "earmark/audio_probe.hpp"
#include "earmark/error.hpp"
#include "earmark/http_api.hpp"
#include "earmark/qa.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numeric>

namespace {

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void print_ids(const char* name, const std::vector<std::int64_t>& ids) {
  std::cout << name << " (" << ids.size() << "):";
  for (auto id : ids) std::cout << ' ' << id;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"earmark audio annotation server"};
  cli.require_subcommand(1);

  // serve
  auto* serve = cli.add_subcommand("serve", "Run the REST server");
  earmark::Config config;
  std::string host = "127.0.0.1";
  int port = 8080;
  double ttl_hours = 24;
  std::uint64_t max_upload_mib = earmark::kDefaultMaxUploadBytes >> 20;
  std::string admin_user, admin_password, static_dir;
  std::string blob_dir = "blobs";
  serve->add_option("--db", config.db_path, "SQLite database file")->capture_default_str();
  serve->add_option("--blobs", blob_dir, "Directory for audio files")->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--token-ttl-hours", ttl_hours, "Session lifetime")->capture_default_str();
  serve->add_option("--jwt-secret", config.auth.signing_secret,
                    "Token signing secret (random per start when unset)")
      ->envname("EARMARK_JWT_SECRET");
  serve->add_option("--max-upload-mib", max_upload_mib)->capture_default_str();
  serve->add_option("--admin-user", admin_user, "Create this admin on first start")
      ->envname("EARMARK_ADMIN_USER");
  serve->add_option("--admin-password", admin_password)->envname("EARMARK_ADMIN_PASSWORD");
  serve->add_option("--static-dir", static_dir, "Serve a built front end from here");

  // probe
  auto* probe = cli.add_subcommand("probe", "Print format and duration of audio files");
  std::vector<std::string> probe_files;
  probe->add_option("files", probe_files)->required()->check(CLI::ExistingFile);

  // wer
  auto* wer = cli.add_subcommand("wer", "Word error rate between two transcripts");
  std::string ref_text, hyp_text;
  bool keep_case = false;
  wer->add_option("--ref", ref_text, "Reference transcript")->required();
  wer->add_option("--hyp", hyp_text, "Hypothesis transcript")->required();
  wer->add_flag("--keep-case", keep_case, "Compare without case folding");

  // plan
  auto* plan = cli.add_subcommand("plan", "Split datapoints between two annotators");
  std::int64_t plan_n = 10;
  double plan_p = 0.2;
  std::uint64_t plan_seed = 0;
  plan->add_option("-n,--count", plan_n, "Datapoints, numbered 1..n")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  plan->add_option("-p,--overlap", plan_p, "Shared fraction")->capture_default_str();
  plan->add_option("--seed", plan_seed)->capture_default_str();

  CLI11_PARSE(cli, argc, argv);

  try {
    if (*serve) {
      config.blob_dir = blob_dir;
      config.auth.token_ttl = std::chrono::milliseconds(
          static_cast<std::int64_t>(ttl_hours * 3600 * 1000));
      config.max_upload_bytes = max_upload_mib << 20;
      if (!admin_user.empty()) {
        config.admin_username = admin_user;
        config.admin_password = admin_password;
      }
      earmark::App app(config);
      httplib::Server server;
      earmark::HttpOptions options;
      if (!static_dir.empty()) options.static_dir = static_dir;
      earmark::mount_routes(server, app, options);

      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << host << ':' << port << '\n';
      if (!server.listen(host, port)) {
        std::cerr << "cannot listen on " << host << ':' << port << '\n';
        return 1;
      }
      return 0;
    }

    if (*probe) {
      int status = 0;
      for (const auto& path : probe_files) {
        try {
          auto info = earmark::probe_audio(read_file(path));
          std::cout << path << '\t' << earmark::to_string(info.format) << '\t'
                    << info.duration_ms << " ms\t" << info.sample_rate << " Hz\n";
        } catch (const earmark::Error& e) {
          std::cout << path << '\t' << earmark::to_string(e.code()) << '\t' << e.what() << '\n';
          status = 1;
        }
      }
      return status;
    }

    if (*wer) {
      auto ref = earmark::tokenize(ref_text, !keep_case);
      auto hyp = earmark::tokenize(hyp_text, !keep_case);
      auto r = earmark::word_error_rate(ref, hyp);
      std::cout << "wer " << r.value() << " (" << r.errors() << '/' << r.reference_length
                << ")  S=" << r.substitutions << " D=" << r.deletions
                << " I=" << r.insertions << '\n';
      return 0;
    }

    if (*plan) {
      std::vector<std::int64_t> ids(static_cast<std::size_t>(plan_n));
      std::iota(ids.begin(), ids.end(), std::int64_t{1});
      auto result = earmark::plan_overlap(ids, plan_p, plan_seed);
      print_ids("shared", result.shared);
      print_ids("a_only", result.a_only);
      print_ids("b_only", result.b_only);
      return 0;
    }
  } catch (const earmark::Error& e) {
    std::cerr << earmark::to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
