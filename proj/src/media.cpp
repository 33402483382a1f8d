#include "earmark/media.hpp"

#include "earmark/error.hpp"

#include <charconv>

namespace earmark {

namespace {

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void not_found() { throw Error(ErrorCode::kNotFound, "not found"); }

}  // namespace

std::optional<RangeSpec> parse_range_header(std::string_view header) {
  header = trim(header);
  constexpr std::string_view kUnit = "bytes=";
  if (header.substr(0, kUnit.size()) != kUnit) return std::nullopt;
  std::string_view spec = trim(header.substr(kUnit.size()));
  if (spec.find(',') != std::string_view::npos) return std::nullopt;
  const auto dash = spec.find('-');
  if (dash == std::string_view::npos) return std::nullopt;
  const std::string_view lhs = trim(spec.substr(0, dash));
  const std::string_view rhs = trim(spec.substr(dash + 1));

  RangeSpec out;
  if (lhs.empty()) {
    out.last = parse_u64(rhs);
    if (!out.last) return std::nullopt;
    return out;
  }
  out.first = parse_u64(lhs);
  if (!out.first) return std::nullopt;
  if (!rhs.empty()) {
    out.last = parse_u64(rhs);
    if (!out.last || *out.last < *out.first) return std::nullopt;
  }
  return out;
}

std::optional<ByteRange> resolve_range(const RangeSpec& spec, std::uint64_t size) {
  if (size == 0) return std::nullopt;
  if (!spec.first) {
    const std::uint64_t suffix = *spec.last;
    if (suffix == 0) return std::nullopt;
    const std::uint64_t n = std::min(suffix, size);
    return ByteRange{size - n, size - 1};
  }
  if (*spec.first >= size) return std::nullopt;
  const std::uint64_t last = spec.last ? std::min(*spec.last, size - 1) : size - 1;
  return ByteRange{*spec.first, last};
}

std::string_view content_type_for(AudioFormat format) {
  switch (format) {
    case AudioFormat::kWav: return "audio/wav";
    case AudioFormat::kMp3: return "audio/mpeg";
    case AudioFormat::kOgg: return "audio/ogg";
  }
  return "application/octet-stream";
}

std::string MediaResponse::content_range() const {
  if (!range) return {};
  return "bytes " + std::to_string(range->first) + "-" +
         std::to_string(range->last) + "/" + std::to_string(total_size);
}

MediaResponse MediaService::serve_audio(
    const Principal& caller, const std::string& stored_name,
    std::optional<std::string_view> range_header) {
  auto dp = store_.transact([&](Tx& tx) -> std::optional<DataPoint> {
    auto found = tx.find_datapoint_by_stored_name(stored_name);
    if (!found) return std::nullopt;
    if (!caller.is_admin() && !tx.find_assignment(found->id, caller.user_id)) {
      return std::nullopt;
    }
    return found;
  });
  if (!dp) not_found();

  auto size = blobs_.size(dp->stored_name);
  if (!size) not_found();

  MediaResponse res;
  res.content_type = std::string(content_type_for(dp->format));
  res.total_size = *size;

  std::optional<RangeSpec> spec;
  if (range_header) spec = parse_range_header(*range_header);
  if (!spec) {
    res.status = 200;
    res.body = blobs_.read(dp->stored_name, 0, *size);
    return res;
  }
  auto range = resolve_range(*spec, *size);
  if (!range) {
    throw Error(ErrorCode::kRange, "range not satisfiable", {{"total", *size}});
  }
  res.status = 206;
  res.range = range;
  res.body = blobs_.read(dp->stored_name, range->first, range->length());
  return res;
}

}  // namespace earmark
