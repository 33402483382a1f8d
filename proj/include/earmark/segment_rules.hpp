#pragma once

#include "earmark/domain.hpp"
#include "earmark/error.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace earmark {

struct ValidationResult {
  std::optional<ErrorCode> error;  // first violated rule
  std::string message;

  bool ok() const { return !error.has_value(); }
  static ValidationResult accept() { return {}; }
  static ValidationResult reject(ErrorCode code, std::string msg) {
    return {code, std::move(msg)};
  }
};

/// Scope: every label is in the schema and every value belongs to its label.
/// Cardinality: single-choice labels carry exactly one value.
ValidationResult validate_label_selection(const Selections& selections,
                                          const LabelSchema& schema);

/// Checks, in order: bounds (0 <= start, end <= duration), non-empty interval,
/// then label selection rules. Requires duration_ms > 0.
ValidationResult validate_segment(const SegmentDraft& candidate,
                                  std::int64_t duration_ms,
                                  const LabelSchema& schema);

/// Validates and returns the canonical draft that gets persisted: NFC
/// transcription and no empty multi-choice entries. Throws Error.
SegmentDraft canonical_segment(SegmentDraft draft, std::int64_t duration_ms,
                               const LabelSchema& schema);

}  // namespace earmark
