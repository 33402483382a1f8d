#include "earmark/segment_rules.hpp"

#include "earmark/text.hpp"

#include <algorithm>
#include <stdexcept>

namespace earmark {

ValidationResult validate_label_selection(const Selections& selections,
                                          const LabelSchema& schema) {
  for (const auto& [label_id, value_ids] : selections) {
    const Label* label = schema.find(label_id);
    if (label == nullptr) {
      return ValidationResult::reject(
          ErrorCode::kLabelScope,
          "label " + std::to_string(label_id.value) + " is not in this project");
    }
    for (LabelValueId v : value_ids) {
      bool owned = std::any_of(label->values.begin(), label->values.end(),
                               [&](const LabelValue& lv) { return lv.id == v; });
      if (!owned) {
        return ValidationResult::reject(
            ErrorCode::kLabelScope, "value " + std::to_string(v.value) +
                                        " does not belong to label '" +
                                        label->name + "'");
      }
    }
  }
  for (const auto& [label_id, value_ids] : selections) {
    const Label* label = schema.find(label_id);
    if (label->selection_type == SelectionType::kSingle &&
        value_ids.size() != 1) {
      return ValidationResult::reject(
          ErrorCode::kCardinality,
          "single-choice label '" + label->name + "' needs exactly one value");
    }
  }
  return ValidationResult::accept();
}

ValidationResult validate_segment(const SegmentDraft& candidate,
                                  std::int64_t duration_ms,
                                  const LabelSchema& schema) {
  if (duration_ms <= 0) {
    throw std::invalid_argument("validate_segment: duration_ms must be > 0");
  }
  if (candidate.start_ms < 0 || candidate.end_ms < 0 ||
      candidate.start_ms > duration_ms || candidate.end_ms > duration_ms) {
    return ValidationResult::reject(
        ErrorCode::kBounds, "segment must lie within [0, " +
                                std::to_string(duration_ms) + "] ms");
  }
  if (candidate.start_ms >= candidate.end_ms) {
    return ValidationResult::reject(ErrorCode::kEmptyInterval,
                                    "start_ms must be less than end_ms");
  }
  return validate_label_selection(candidate.selections, schema);
}

SegmentDraft canonical_segment(SegmentDraft draft, std::int64_t duration_ms,
                               const LabelSchema& schema) {
  auto verdict = validate_segment(draft, duration_ms, schema);
  if (!verdict.ok()) throw Error(*verdict.error, verdict.message);
  draft.transcription = text::normalize(draft.transcription);
  std::erase_if(draft.selections,
                [](const auto& entry) { return entry.second.empty(); });
  return draft;
}

}  // namespace earmark
