#pragma once

#include "earmark/app.hpp"
#include "earmark/error.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace earmark::testing {

// ---- audio ---------------------------------------------------------------

/// 16-bit PCM with a canonical 44-byte header. Sample bytes are a fixed
/// pseudo-random sequence so that byte-level round trips are meaningful.
std::string make_wav(std::uint32_t sample_rate, std::uint16_t channels,
                     std::uint32_t frames, std::uint32_t seed = 1);

/// A WAV whose total size is exactly `total_bytes` (8 kHz, mono, 16-bit).
std::string make_wav_of_size(std::size_t total_bytes);

/// `ms` of 8 kHz mono audio.
std::string make_wav_ms(std::int64_t ms);

struct Mp3Options {
  std::size_t frames = 10;
  std::optional<std::uint32_t> xing_frames;  // writes an Info header
  std::size_t id3_payload = 0;               // 0 means no ID3v2 tag
  bool padding_between = false;              // junk bytes after the tag
};

/// MPEG-1 Layer III, 128 kbit/s, 44.1 kHz, stereo; 417-byte frames.
std::string make_mp3(const Mp3Options& options);

/// Straightforward bit-at-a-time Ogg CRC (poly 0x04C11DB7, no reflection).
std::uint32_t bitwise_ogg_crc(std::string_view page);

/// One Ogg page holding `packet`; the checksum is filled in.
std::string ogg_page(std::uint8_t header_type, std::uint64_t granule,
                     std::uint32_t serial, std::uint32_t sequence,
                     std::string_view packet);

std::string make_ogg_opus(std::uint16_t pre_skip, std::uint64_t final_granule);
std::string make_ogg_vorbis(std::uint32_t rate, std::uint64_t final_granule);

// ---- environment ---------------------------------------------------------

struct TempDir {
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path path;
};

inline constexpr const char* kAdminName = "admin";
inline constexpr const char* kAdminPassword = "admin-password";

/// An App over an in-memory store, a private blob directory and a manual
/// clock. The bootstrap admin exists.
class TestEnv {
 public:
  explicit TestEnv(std::chrono::milliseconds token_ttl = std::chrono::hours(24));

  App& app() { return *app_; }
  ManualClock& clock() { return *clock_; }
  const std::filesystem::path& blob_dir() const { return blob_dir_; }

  Principal admin();
  static std::string password_for(const std::string& username) {
    return "pw-" + username + "-secret";
  }
  Principal add_user(const std::string& username, Role role = Role::kAnnotator);
  Project add_project(const std::string& name);
  void join(const Principal& user, const Project& project);

  IngestResult ingest(const Project& project, std::vector<std::string> assignees,
                      std::vector<PreAnnotation> pre = {},
                      std::string audio = make_wav_ms(60000),
                      std::string filename = "clip.wav");

 private:
  TempDir dir_;
  std::filesystem::path blob_dir_;
  ManualClock* clock_ = nullptr;
  std::unique_ptr<App> app_;
};

/// The export fixture: one project with two labels, one datapoint with a
/// fixed stored name, and one segment from each of two annotators. Returns
/// the project.
Project build_export_fixture(TestEnv& env);

/// Contents of a file under tests/golden.
std::string read_golden(const std::string& name);

/// Runs `fn` and returns the ErrorCode it throws; fails the check if it
/// returns normally.
template <class F>
std::optional<ErrorCode> error_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace earmark::testing
