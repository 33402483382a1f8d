#include "earmark/annotation.hpp"

#include "earmark/error.hpp"
#include "earmark/segment_rules.hpp"

#include <algorithm>

namespace earmark {

Timestamp AnnotationService::advance(Timestamp previous) const {
  return std::max(clock_.now(), previous + std::chrono::milliseconds(1));
}

Assignment AnnotationService::own_assignment(Tx& tx, const Principal& caller,
                                             DataPointId dp) {
  if (!tx.find_datapoint(dp)) throw Error(ErrorCode::kNotFound, "datapoint not found");
  auto assignment = tx.find_assignment(dp, caller.user_id);
  if (!assignment) {
    throw Error(ErrorCode::kForbidden, "datapoint not assigned to caller");
  }
  return *assignment;
}

std::pair<Segment, DataPoint> AnnotationService::own_segment(
    Tx& tx, const Principal& caller, SegmentId id) {
  auto segment = tx.find_segment(id);
  if (!segment) throw Error(ErrorCode::kNotFound, "segment not found");
  auto assignment = tx.find_assignment(segment->assignment_id);
  if (!assignment || assignment->user_id != caller.user_id) {
    throw Error(ErrorCode::kForbidden, "segment belongs to another annotator");
  }
  return {*segment, *tx.find_datapoint(assignment->datapoint_id)};
}

std::vector<Project> AnnotationService::list_projects(const Principal& caller) {
  return store_.transact([&](Tx& tx) {
    return caller.is_admin() ? tx.list_projects()
                             : tx.list_projects_for(caller.user_id);
  });
}

LabelSchema AnnotationService::label_schema(const Principal& caller,
                                            ProjectId project) {
  auth_.authorize(caller, RequireMember{project});
  return store_.transact([&](Tx& tx) {
    if (!tx.find_project(project)) throw Error(ErrorCode::kNotFound, "project not found");
    return tx.load_schema(project);
  });
}

DataPointPage AnnotationService::list_datapoints(const Principal& caller,
                                                 ProjectId project,
                                                 Category category,
                                                 std::int64_t page,
                                                 std::int64_t page_size) {
  auth_.authorize(caller, RequireMember{project});
  if (page < 1) throw Error(ErrorCode::kBadPage, "page must be >= 1");
  if (page_size < 1 || page_size > kMaxPageSize) {
    throw Error(ErrorCode::kBadPage, "page_size must be in [1, 100]");
  }
  return store_.transact([&](Tx& tx) {
    if (!tx.find_project(project)) throw Error(ErrorCode::kNotFound, "project not found");
    auto result = tx.list_user_assignments(project, caller.user_id, category,
                                           (page - 1) * page_size, page_size);
    return DataPointPage{std::move(result.rows), result.total, page, page_size};
  });
}

DataPointDetail AnnotationService::get_datapoint(const Principal& caller,
                                                 DataPointId datapoint) {
  auth_.authorize(caller, RequireAssignee{datapoint});
  return store_.transact([&](Tx& tx) {
    auto dp = tx.find_datapoint(datapoint);
    if (!dp) throw Error(ErrorCode::kNotFound, "datapoint not found");
    DataPointDetail detail{*dp, tx.load_schema(dp->project_id), std::nullopt, {}};
    detail.assignment = tx.find_assignment(datapoint, caller.user_id);
    if (detail.assignment) detail.segments = tx.list_segments(detail.assignment->id);
    return detail;
  });
}

Segment AnnotationService::create_segment(const Principal& caller,
                                          DataPointId datapoint,
                                          const SegmentDraft& draft) {
  return store_.transact([&](Tx& tx) {
    const Assignment assignment = own_assignment(tx, caller, datapoint);
    const DataPoint dp = *tx.find_datapoint(datapoint);
    const SegmentDraft canonical =
        canonical_segment(draft, dp.duration_ms, tx.load_schema(dp.project_id));
    SegmentId id = tx.insert_segment(assignment.id, canonical, clock_.now());
    return *tx.find_segment(id);
  });
}

Segment AnnotationService::update_segment(const Principal& caller,
                                          SegmentId segment,
                                          const SegmentPatch& patch) {
  return store_.transact([&](Tx& tx) {
    auto [current, dp] = own_segment(tx, caller, segment);
    SegmentDraft draft{patch.start_ms.value_or(current.start_ms),
                       patch.end_ms.value_or(current.end_ms),
                       patch.transcription.value_or(current.transcription),
                       patch.selections.value_or(current.selections)};
    const SegmentDraft canonical =
        canonical_segment(std::move(draft), dp.duration_ms,
                          tx.load_schema(dp.project_id));
    tx.update_segment(segment, canonical, advance(current.updated_at));
    return *tx.find_segment(segment);
  });
}

void AnnotationService::delete_segment(const Principal& caller,
                                       SegmentId segment) {
  store_.transact([&](Tx& tx) {
    own_segment(tx, caller, segment);
    tx.delete_segment(segment);
  });
}

Assignment AnnotationService::set_review_flag(const Principal& caller,
                                              DataPointId datapoint, bool flag) {
  return store_.transact([&](Tx& tx) {
    Assignment a = own_assignment(tx, caller, datapoint);
    a.marked_for_review = flag;
    a.updated_at = advance(a.updated_at);
    tx.update_assignment(a);
    return a;
  });
}

Assignment AnnotationService::set_completion(const Principal& caller,
                                             DataPointId datapoint,
                                             Status status) {
  return store_.transact([&](Tx& tx) {
    Assignment a = own_assignment(tx, caller, datapoint);
    a.status = status;
    a.updated_at = advance(a.updated_at);
    tx.update_assignment(a);
    return a;
  });
}

}  // namespace earmark
