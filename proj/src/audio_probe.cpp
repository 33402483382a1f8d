#include "earmark/audio_probe.hpp"

#include "earmark/error.hpp"

#include <array>
#include <map>
#include <optional>

namespace earmark {

namespace {

[[noreturn]] void corrupt(const std::string& why) {
  throw Error(ErrorCode::kCorrupt, "corrupt audio: " + why);
}

std::uint8_t u8(std::string_view b, std::size_t at) {
  return static_cast<std::uint8_t>(b[at]);
}
std::uint16_t le16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(u8(b, at) | (u8(b, at + 1) << 8));
}
std::uint32_t le32(std::string_view b, std::size_t at) {
  return static_cast<std::uint32_t>(u8(b, at)) |
         (static_cast<std::uint32_t>(u8(b, at + 1)) << 8) |
         (static_cast<std::uint32_t>(u8(b, at + 2)) << 16) |
         (static_cast<std::uint32_t>(u8(b, at + 3)) << 24);
}
std::uint64_t le64(std::string_view b, std::size_t at) {
  return static_cast<std::uint64_t>(le32(b, at)) |
         (static_cast<std::uint64_t>(le32(b, at + 4)) << 32);
}
std::uint32_t be32(std::string_view b, std::size_t at) {
  return (static_cast<std::uint32_t>(u8(b, at)) << 24) |
         (static_cast<std::uint32_t>(u8(b, at + 1)) << 16) |
         (static_cast<std::uint32_t>(u8(b, at + 2)) << 8) |
         static_cast<std::uint32_t>(u8(b, at + 3));
}

bool has(std::string_view b, std::size_t at, std::string_view magic) {
  return b.size() >= at + magic.size() && b.substr(at, magic.size()) == magic;
}

std::int64_t checked_ms(std::uint64_t units, std::uint64_t units_per_second) {
  if (units_per_second == 0) corrupt("zero rate");
  // units * 1000 fits comfortably for any realistic sample count.
  const auto ms = static_cast<std::int64_t>(units * 1000 / units_per_second);
  if (ms <= 0) corrupt("duration under 1 ms");
  return ms;
}

// ---- WAV -----------------------------------------------------------------

AudioInfo probe_wav(std::string_view b) {
  std::optional<std::uint32_t> byte_rate;
  std::uint32_t sample_rate = 0;
  std::optional<std::uint64_t> data_bytes;

  std::size_t at = 12;
  while (at + 8 <= b.size()) {
    const std::string_view id = b.substr(at, 4);
    const std::uint32_t declared = le32(b, at + 4);
    const std::size_t payload = at + 8;
    const std::size_t available = b.size() - payload;
    if (id == "fmt ") {
      if (declared < 16 || available < 16) corrupt("short fmt chunk");
      const std::uint16_t channels = le16(b, payload + 2);
      sample_rate = le32(b, payload + 4);
      byte_rate = le32(b, payload + 8);
      if (channels == 0 || sample_rate == 0 || *byte_rate == 0) {
        corrupt("fmt chunk has zero channels or rate");
      }
    } else if (id == "data") {
      // Streaming writers leave the size unset; trust the bytes present.
      data_bytes = std::min<std::uint64_t>(declared, available);
      if (byte_rate) break;
    }
    at = payload + declared + (declared & 1u);
  }
  if (!byte_rate) corrupt("missing fmt chunk");
  if (!data_bytes) corrupt("missing data chunk");
  if (*data_bytes == 0) corrupt("empty data chunk");
  return AudioInfo{AudioFormat::kWav, checked_ms(*data_bytes, *byte_rate),
                   sample_rate};
}

// ---- MP3 -----------------------------------------------------------------

struct MpegFrame {
  std::uint32_t sample_rate = 0;
  std::uint32_t samples = 0;
  std::size_t length = 0;
  int version = 0;  // 3 = MPEG-1, 2 = MPEG-2, 0 = MPEG-2.5
  bool mono = false;
};

constexpr std::array<std::array<std::uint16_t, 16>, 5> kBitrates = {{
    {0, 32, 64, 96, 128, 160, 192, 224, 256, 288, 320, 352, 384, 416, 448, 0},
    {0, 32, 48, 56, 64, 80, 96, 112, 128, 160, 192, 224, 256, 320, 384, 0},
    {0, 32, 40, 48, 56, 64, 80, 96, 112, 128, 160, 192, 224, 256, 320, 0},
    {0, 32, 48, 56, 64, 80, 96, 112, 128, 144, 160, 176, 192, 224, 256, 0},
    {0, 8, 16, 24, 32, 40, 48, 56, 64, 80, 96, 112, 128, 144, 160, 0},
}};

std::optional<MpegFrame> parse_mpeg_header(std::string_view b, std::size_t at) {
  if (at + 4 > b.size()) return std::nullopt;
  const std::uint8_t b0 = u8(b, at), b1 = u8(b, at + 1), b2 = u8(b, at + 2),
                     b3 = u8(b, at + 3);
  if (b0 != 0xFF || (b1 & 0xE0) != 0xE0) return std::nullopt;
  const int version = (b1 >> 3) & 3;
  const int layer = (b1 >> 1) & 3;  // 3 = I, 2 = II, 1 = III
  const int bitrate_index = b2 >> 4;
  const int rate_index = (b2 >> 2) & 3;
  if (version == 1 || layer == 0 || bitrate_index == 0 || bitrate_index == 15 ||
      rate_index == 3) {
    return std::nullopt;
  }
  static constexpr std::array<std::uint32_t, 3> kRates = {44100, 48000, 32000};
  MpegFrame f;
  f.version = version;
  f.sample_rate = kRates[rate_index] >> (version == 3 ? 0 : version == 2 ? 1 : 2);
  f.mono = (b3 >> 6) == 3;

  const bool v1 = version == 3;
  std::size_t table = 0;
  if (v1) {
    table = layer == 3 ? 0 : layer == 2 ? 1 : 2;
  } else {
    table = layer == 3 ? 3 : 4;
  }
  const std::uint32_t bitrate = kBitrates[table][bitrate_index] * 1000u;
  const std::uint32_t padding = (b2 >> 1) & 1;
  if (layer == 3) {
    f.samples = 384;
    f.length = (12 * bitrate / f.sample_rate + padding) * 4;
  } else if (layer == 2 || v1) {
    f.samples = 1152;
    f.length = 144 * bitrate / f.sample_rate + padding;
  } else {
    f.samples = 576;
    f.length = 72 * bitrate / f.sample_rate + padding;
  }
  if (f.length < 4) return std::nullopt;
  return f;
}

bool is_trailing_tag(std::string_view b, std::size_t at) {
  return has(b, at, "TAG") || has(b, at, "APETAGEX") || has(b, at, "LYRICS") ||
         has(b, at, "ID3");
}

// A sync word is only trusted when the next frame (or a tag, or EOF) follows.
bool confirmed_frame(std::string_view b, std::size_t at, const MpegFrame& f) {
  const std::size_t next = at + f.length;
  if (next > b.size()) return false;
  if (next == b.size() || is_trailing_tag(b, next)) return true;
  return parse_mpeg_header(b, next).has_value();
}

// Frame count from a Xing/Info or VBRI header inside the first frame.
std::optional<std::uint32_t> vbr_frame_count(std::string_view b, std::size_t at,
                                             const MpegFrame& f) {
  const std::size_t side_info =
      f.version == 3 ? (f.mono ? 17 : 32) : (f.mono ? 9 : 17);
  const std::size_t xing = at + 4 + side_info;
  if ((has(b, xing, "Xing") || has(b, xing, "Info")) && xing + 12 <= b.size()) {
    const std::uint32_t flags = be32(b, xing + 4);
    if (flags & 1u) return be32(b, xing + 8);
    return std::nullopt;
  }
  const std::size_t vbri = at + 4 + 32;
  if (has(b, vbri, "VBRI") && vbri + 18 <= b.size()) return be32(b, vbri + 14);
  return std::nullopt;
}

AudioInfo probe_mp3(std::string_view b) {
  std::size_t at = 0;
  while (has(b, at, "ID3")) {
    if (at + 10 > b.size()) corrupt("truncated ID3 header");
    std::uint32_t size = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint8_t byte = u8(b, at + 6 + i);
      if (byte & 0x80) corrupt("bad ID3 size");
      size = (size << 7) | byte;
    }
    const bool footer = (u8(b, at + 5) & 0x10) != 0;
    at += 10 + size + (footer ? 10 : 0);
  }

  // Tolerate padding between the tag and the first frame.
  constexpr std::size_t kMaxSyncSearch = 64 * 1024;
  std::optional<MpegFrame> first;
  const std::size_t search_end = std::min(b.size(), at + kMaxSyncSearch);
  for (; at < search_end; ++at) {
    auto f = parse_mpeg_header(b, at);
    if (f && confirmed_frame(b, at, *f)) {
      first = f;
      break;
    }
  }
  if (!first) corrupt("no MPEG audio frame found");

  if (auto frames = vbr_frame_count(b, at, *first)) {
    return AudioInfo{AudioFormat::kMp3,
                     checked_ms(std::uint64_t{*frames} * first->samples,
                                first->sample_rate),
                     first->sample_rate};
  }

  std::map<std::uint32_t, std::uint64_t> samples_by_rate;
  while (at < b.size()) {
    auto f = parse_mpeg_header(b, at);
    if (!f || at + f->length > b.size()) break;
    samples_by_rate[f->sample_rate] += f->samples;
    at += f->length;
  }
  std::int64_t ms = 0;
  for (const auto& [rate, samples] : samples_by_rate) {
    ms += static_cast<std::int64_t>(samples * 1000 / rate);
  }
  if (ms <= 0) corrupt("duration under 1 ms");
  return AudioInfo{AudioFormat::kMp3, ms, first->sample_rate};
}

// ---- Ogg -----------------------------------------------------------------

std::uint32_t ogg_crc(std::string_view page) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t r = i << 24;
      for (int k = 0; k < 8; ++k) {
        r = (r & 0x80000000u) ? (r << 1) ^ 0x04C11DB7u : (r << 1);
      }
      t[i] = r;
    }
    return t;
  }();
  std::uint32_t crc = 0;
  for (std::size_t i = 0; i < page.size(); ++i) {
    // The checksum field itself (bytes 22..25) counts as zero.
    const std::uint8_t byte = (i >= 22 && i < 26) ? 0 : static_cast<std::uint8_t>(page[i]);
    crc = (crc << 8) ^ table[((crc >> 24) ^ byte) & 0xFF];
  }
  return crc;
}

struct OggCodec {
  std::uint32_t rate = 0;
  std::uint64_t pre_skip = 0;
};

OggCodec identify_ogg_codec(std::string_view packet) {
  if (has(packet, 0, "\x01vorbis") && packet.size() >= 16) {
    return {le32(packet, 12), 0};
  }
  if (has(packet, 0, "OpusHead") && packet.size() >= 19) {
    // Opus granule positions always count 48 kHz samples.
    return {48000, le16(packet, 10)};
  }
  if (has(packet, 0, "\x7F" "FLAC") && packet.size() >= 30 &&
      has(packet, 9, "fLaC")) {
    const std::uint32_t rate = (static_cast<std::uint32_t>(u8(packet, 27)) << 12) |
                               (static_cast<std::uint32_t>(u8(packet, 28)) << 4) |
                               (u8(packet, 29) >> 4);
    return {rate, 0};
  }
  if (has(packet, 0, "Speex   ") && packet.size() >= 40) {
    return {le32(packet, 36), 0};
  }
  corrupt("unknown Ogg codec");
}

AudioInfo probe_ogg(std::string_view b) {
  std::size_t at = 0;
  std::optional<std::uint32_t> serial;
  OggCodec codec;
  std::optional<std::uint64_t> last_granule;

  while (at + 27 <= b.size()) {
    if (!has(b, at, "OggS")) {
      if (!serial) corrupt("missing first page");
      break;
    }
    if (u8(b, at + 4) != 0) corrupt("unsupported Ogg version");
    const std::uint8_t header_type = u8(b, at + 5);
    const std::uint64_t granule = le64(b, at + 6);
    const std::uint32_t page_serial = le32(b, at + 14);
    const std::uint8_t segments = u8(b, at + 26);
    if (at + 27 + segments > b.size()) break;
    std::size_t body = 0;
    for (std::size_t i = 0; i < segments; ++i) body += u8(b, at + 27 + i);
    const std::size_t page_len = 27 + segments + body;
    if (at + page_len > b.size()) break;  // truncated tail page
    const std::string_view page = b.substr(at, page_len);
    if (ogg_crc(page) != le32(b, at + 22)) corrupt("Ogg page checksum mismatch");

    if (!serial) {
      if ((header_type & 0x02) == 0) corrupt("first page lacks BOS flag");
      serial = page_serial;
      codec = identify_ogg_codec(page.substr(27 + segments));
    }
    if (page_serial == *serial && granule != ~std::uint64_t{0}) {
      last_granule = granule;
    }
    at += page_len;
  }
  if (!serial) corrupt("no complete Ogg page");
  if (!last_granule || *last_granule <= codec.pre_skip) {
    corrupt("no granule position");
  }
  return AudioInfo{AudioFormat::kOgg,
                   checked_ms(*last_granule - codec.pre_skip, codec.rate),
                   codec.rate};
}

}  // namespace

AudioInfo probe_audio(std::string_view bytes, std::uint64_t max_bytes) {
  if (bytes.size() > max_bytes) {
    throw Error(ErrorCode::kTooLarge, "upload exceeds " +
                                          std::to_string(max_bytes) + " bytes");
  }
  if (has(bytes, 0, "RIFF") && has(bytes, 8, "WAVE")) return probe_wav(bytes);
  if (has(bytes, 0, "OggS")) return probe_ogg(bytes);
  if (has(bytes, 0, "ID3") ||
      (bytes.size() >= 2 && u8(bytes, 0) == 0xFF && (u8(bytes, 1) & 0xE0) == 0xE0)) {
    return probe_mp3(bytes);
  }
  throw Error(ErrorCode::kBadFormat, "unsupported audio format (wav, mp3, ogg)");
}

}  // namespace earmark
