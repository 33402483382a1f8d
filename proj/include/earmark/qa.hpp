#pragma once

#include "earmark/auth.hpp"
#include "earmark/clock.hpp"
#include "earmark/domain.hpp"
#include "earmark/store.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace earmark {

// ---- overlap planning ----------------------------------------------------

struct OverlapPlan {
  std::vector<std::int64_t> a_only;
  std::vector<std::int64_t> b_only;
  std::vector<std::int64_t> shared;
};

/// ceil(p * n), robust to binary representation error in p (0.3 * 10 is 3).
std::size_t shared_count(std::size_t n, double overlap_fraction);

/// Splits `items` into a shared set of shared_count(n, p) items drawn by a
/// seeded shuffle, with the remainder divided between the two annotators so
/// that their sizes differ by at most one (a receives the extra item). Each
/// output list keeps input order. Throws kBadFraction unless 0 <= p <= 1 and
/// kBadRequest for duplicated ids. No items give an empty plan.
OverlapPlan plan_overlap(std::span<const std::int64_t> items,
                         double overlap_fraction, std::uint64_t seed);

// ---- transcripts and WER -------------------------------------------------

/// Transcriptions ordered by (start_ms, end_ms, id), empty ones skipped,
/// joined by single spaces.
std::string assemble_transcript(std::vector<Segment> segments);

/// NFC, optional case folding, then split on Unicode white space.
/// Punctuation is kept.
std::vector<std::string> tokenize(std::string_view s, bool casefold = true);

/// Minimum edit alignment counts; the rate is errors() / reference_length.
struct WordErrorRate {
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::int64_t reference_length = 0;

  std::int64_t errors() const { return substitutions + deletions + insertions; }
  double value() const {
    return static_cast<double>(errors()) / static_cast<double>(reference_length);
  }
};

/// Unit-cost Levenshtein over tokens. Throws kEmptyReference for an empty
/// reference.
WordErrorRate word_error_rate(std::span<const std::string> reference,
                              std::span<const std::string> hypothesis);

// ---- report --------------------------------------------------------------

inline constexpr double kDefaultWerThreshold = 0.5;

struct QaRow {
  DataPointId datapoint_id;
  std::string original_filename;
  std::optional<WordErrorRate> wer;  // empty when a's transcript has no words
  bool flagged = false;
};

struct QaReport {
  ProjectId project_id;
  std::string username_a;
  std::string username_b;
  std::vector<QaRow> rows;
  double threshold = kDefaultWerThreshold;
  Timestamp generated_at;
};

class QaService {
 public:
  QaService(Store& store, AuthService& auth, const Clock& clock)
      : store_(store), auth_(auth), clock_(clock) {}

  /// Pairwise WER over every datapoint of `project` assigned to both users,
  /// with user a's transcript as the reference. Rows with an empty reference
  /// carry no rate and are flagged.
  QaReport report(const Principal& caller, ProjectId project,
                  const std::string& username_a, const std::string& username_b,
                  double threshold = kDefaultWerThreshold);

  /// plan_overlap over the given ids, or over the project's datapoints when
  /// `items` is empty.
  OverlapPlan plan(const Principal& caller, ProjectId project,
                   std::vector<std::int64_t> items, double overlap_fraction,
                   std::uint64_t seed);

 private:
  Store& store_;
  AuthService& auth_;
  const Clock& clock_;
};

}  // namespace earmark
