#pragma once

#include "earmark/auth.hpp"
#include "earmark/blob_store.hpp"
#include "earmark/store.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace earmark {

/// One "bytes=" range as written by the client. `first` empty means a
/// suffix range ("bytes=-N", with N in `last`).
struct RangeSpec {
  std::optional<std::uint64_t> first;
  std::optional<std::uint64_t> last;
};

/// Inclusive byte interval within a resource.
struct ByteRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;
  std::uint64_t length() const { return last - first + 1; }
};

/// nullopt when the header should be ignored: absent, malformed, a unit other
/// than bytes, or several ranges (the full body is served instead).
std::optional<RangeSpec> parse_range_header(std::string_view header);

/// nullopt when the range cannot be satisfied for a resource of `size` bytes.
std::optional<ByteRange> resolve_range(const RangeSpec& spec, std::uint64_t size);

std::string_view content_type_for(AudioFormat format);

struct MediaResponse {
  int status = 200;  // 200 or 206
  std::string content_type;
  std::string body;
  std::uint64_t total_size = 0;
  std::optional<ByteRange> range;

  /// "bytes first-last/total", only meaningful for 206.
  std::string content_range() const;
};

class MediaService {
 public:
  MediaService(Store& store, BlobStore& blobs) : store_(store), blobs_(blobs) {}

  /// Missing and unauthorized stored names both raise the same kNotFound so
  /// a prober cannot tell them apart. Unsatisfiable ranges raise kRange with
  /// the total size in the error detail.
  MediaResponse serve_audio(const Principal& caller, const std::string& stored_name,
                            std::optional<std::string_view> range_header);

 private:
  Store& store_;
  BlobStore& blobs_;
};

}  // namespace earmark
