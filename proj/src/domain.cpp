#include "earmark/domain.hpp"

#include "earmark/error.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>

namespace earmark {

std::string to_iso8601(Timestamp t) {
  const std::int64_t ms = to_epoch_ms(t);
  std::int64_t secs = ms / 1000;
  std::int64_t frac = ms % 1000;
  if (frac < 0) frac += 1000, secs -= 1;
  const std::time_t tt = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, static_cast<int>(frac));
  return buf;
}

std::string_view to_string(Role r) {
  return r == Role::kAdmin ? "admin" : "annotator";
}
std::string_view to_string(SelectionType t) {
  return t == SelectionType::kSingle ? "single" : "multi";
}
std::string_view to_string(AudioFormat f) {
  switch (f) {
    case AudioFormat::kWav: return "wav";
    case AudioFormat::kMp3: return "mp3";
    case AudioFormat::kOgg: return "ogg";
  }
  return "wav";
}
std::string_view to_string(Status s) {
  return s == Status::kPending ? "pending" : "completed";
}

Role parse_role(std::string_view s) {
  if (s == "admin") return Role::kAdmin;
  if (s == "annotator") return Role::kAnnotator;
  throw Error(ErrorCode::kBadRequest, "role must be admin or annotator");
}

SelectionType parse_selection_type(std::string_view s) {
  if (s == "single") return SelectionType::kSingle;
  if (s == "multi") return SelectionType::kMulti;
  throw Error(ErrorCode::kBadRequest, "selection type must be single or multi");
}

AudioFormat parse_audio_format(std::string_view s) {
  if (s == "wav") return AudioFormat::kWav;
  if (s == "mp3") return AudioFormat::kMp3;
  if (s == "ogg") return AudioFormat::kOgg;
  throw Error(ErrorCode::kBadFormat, "format must be wav, mp3 or ogg");
}

Status parse_status(std::string_view s) {
  if (s == "pending") return Status::kPending;
  if (s == "completed") return Status::kCompleted;
  throw Error(ErrorCode::kBadRequest, "status must be pending or completed");
}

const Label* LabelSchema::find(LabelId id) const {
  auto it = std::find_if(labels.begin(), labels.end(),
                         [&](const Label& l) { return l.id == id; });
  return it == labels.end() ? nullptr : &*it;
}

const Label* LabelSchema::find_by_name(std::string_view name) const {
  auto it = std::find_if(labels.begin(), labels.end(),
                         [&](const Label& l) { return l.name == name; });
  return it == labels.end() ? nullptr : &*it;
}

}  // namespace earmark
