#pragma once

#include "earmark/clock.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace earmark {

/// Row identifier tagged by entity so ids of different tables do not mix.
template <class Tag>
struct Id {
  std::int64_t value = 0;
  auto operator<=>(const Id&) const = default;
};

using UserId = Id<struct UserTag>;
using ProjectId = Id<struct ProjectTag>;
using LabelId = Id<struct LabelTag>;
using LabelValueId = Id<struct LabelValueTag>;
using DataPointId = Id<struct DataPointTag>;
using AssignmentId = Id<struct AssignmentTag>;
using SegmentId = Id<struct SegmentTag>;

enum class Role { kAdmin, kAnnotator };
enum class SelectionType { kSingle, kMulti };
enum class AudioFormat { kWav, kMp3, kOgg };
enum class Status { kPending, kCompleted };

std::string_view to_string(Role r);
std::string_view to_string(SelectionType t);
std::string_view to_string(AudioFormat f);
std::string_view to_string(Status s);

// Parsers throw Error(kBadRequest) on unknown names.
Role parse_role(std::string_view s);
SelectionType parse_selection_type(std::string_view s);
AudioFormat parse_audio_format(std::string_view s);
Status parse_status(std::string_view s);

struct User {
  UserId id;
  std::string username;
  std::string credential_digest;
  Role role = Role::kAnnotator;
  Timestamp created_at;
};

struct Project {
  ProjectId id;
  std::string name;
  std::string api_key;
  Timestamp created_at;
};

struct Membership {
  UserId user_id;
  ProjectId project_id;
};

struct LabelValue {
  LabelValueId id;
  LabelId label_id;
  std::string value;
};

struct Label {
  LabelId id;
  ProjectId project_id;
  std::string name;
  SelectionType selection_type = SelectionType::kSingle;
  std::vector<LabelValue> values;  // ordered by id
};

/// A project's full label set, as shown to annotators.
struct LabelSchema {
  std::vector<Label> labels;  // ordered by id

  const Label* find(LabelId id) const;
  const Label* find_by_name(std::string_view name) const;
};

struct DataPoint {
  DataPointId id;
  ProjectId project_id;
  std::string original_filename;
  std::string stored_name;
  AudioFormat format = AudioFormat::kWav;
  std::int64_t duration_ms = 0;
  std::optional<std::string> reference_transcription;
  Timestamp created_at;
};

struct Assignment {
  AssignmentId id;
  DataPointId datapoint_id;
  UserId user_id;
  Status status = Status::kPending;
  bool marked_for_review = false;
  Timestamp updated_at;
};

using Selections = std::map<LabelId, std::set<LabelValueId>>;

struct SegmentDraft {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::string transcription;
  Selections selections;
};

struct Segment {
  SegmentId id;
  AssignmentId assignment_id;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::string transcription;
  Selections selections;
  Timestamp created_at;
  Timestamp updated_at;
};

}  // namespace earmark
