#pragma once

#include "earmark/domain.hpp"

#include <cstdint>
#include <string_view>

namespace earmark {

struct AudioInfo {
  AudioFormat format = AudioFormat::kWav;
  std::int64_t duration_ms = 0;
  std::uint32_t sample_rate = 0;
};

inline constexpr std::uint64_t kDefaultMaxUploadBytes = 200ull * 1024 * 1024;

/// Identifies the container by its magic bytes and reads the duration from
/// container or frame headers only; audio payload is never decoded.
///
///  - WAV: RIFF/WAVE, duration = data-chunk bytes / byte rate.
///  - MP3: optional ID3v2 tags, then MPEG audio frames. A Xing/Info or VBRI
///    header supplies the frame count when present; otherwise frames are
///    walked and their samples summed.
///  - Ogg: pages are walked with CRC verification; the last granule position
///    of the first logical stream gives the sample count (Vorbis, Opus, FLAC
///    and Speex identification headers are understood).
///
/// Durations are floored to whole milliseconds. Throws Error with kTooLarge,
/// kBadFormat (no known magic) or kCorrupt (headers unreadable, or a duration
/// under 1 ms).
AudioInfo probe_audio(std::string_view bytes,
                      std::uint64_t max_bytes = kDefaultMaxUploadBytes);

}  // namespace earmark
