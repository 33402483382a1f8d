#pragma once

#include "earmark/auth.hpp"
#include "earmark/clock.hpp"
#include "earmark/domain.hpp"
#include "earmark/store.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace earmark {

inline constexpr std::int64_t kDefaultPageSize = 10;
inline constexpr std::int64_t kMaxPageSize = 100;

struct DataPointPage {
  std::vector<AssignmentRow> rows;
  std::int64_t total = 0;
  std::int64_t page = 1;
  std::int64_t page_size = kDefaultPageSize;
};

struct DataPointDetail {
  DataPoint datapoint;
  LabelSchema schema;
  std::optional<Assignment> assignment;  // the caller's, if any
  std::vector<Segment> segments;         // the caller's only
};

struct SegmentPatch {
  std::optional<std::int64_t> start_ms;
  std::optional<std::int64_t> end_ms;
  std::optional<std::string> transcription;
  std::optional<Selections> selections;
};

/// Annotator-facing operations. Segments belong to one assignment and only
/// its owner may write them; admins are no exception.
class AnnotationService {
 public:
  AnnotationService(Store& store, AuthService& auth, const Clock& clock)
      : store_(store), auth_(auth), clock_(clock) {}

  /// Member projects; every project for admins.
  std::vector<Project> list_projects(const Principal& caller);
  LabelSchema label_schema(const Principal& caller, ProjectId project);

  /// The caller's own assignments in `project`, filtered by category and
  /// ordered by datapoint (created_at, id). `page` is 1-based.
  DataPointPage list_datapoints(const Principal& caller, ProjectId project,
                                Category category, std::int64_t page,
                                std::int64_t page_size = kDefaultPageSize);

  DataPointDetail get_datapoint(const Principal& caller, DataPointId datapoint);

  Segment create_segment(const Principal& caller, DataPointId datapoint,
                         const SegmentDraft& draft);
  /// Last write wins.
  Segment update_segment(const Principal& caller, SegmentId segment,
                         const SegmentPatch& patch);
  void delete_segment(const Principal& caller, SegmentId segment);

  Assignment set_review_flag(const Principal& caller, DataPointId datapoint,
                             bool flag);
  Assignment set_completion(const Principal& caller, DataPointId datapoint,
                            Status status);

 private:
  Assignment own_assignment(Tx& tx, const Principal& caller, DataPointId dp);
  std::pair<Segment, DataPoint> own_segment(Tx& tx, const Principal& caller,
                                            SegmentId id);
  Timestamp advance(Timestamp previous) const;

  Store& store_;
  AuthService& auth_;
  const Clock& clock_;
};

}  // namespace earmark
