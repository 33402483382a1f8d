#include "earmark/qa.hpp"

#include "earmark/error.hpp"
#include "earmark/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

namespace earmark {

namespace {

// Uniform draw in [0, bound) by rejection; std::uniform_int_distribution is
// implementation-defined and would make plans differ between toolchains.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

std::size_t shared_count(std::size_t n, double overlap_fraction) {
  const long double exact = static_cast<long double>(overlap_fraction) * n;
  const auto k = static_cast<std::size_t>(std::ceil(exact - 1e-9L));
  return std::min(k, n);
}

OverlapPlan plan_overlap(std::span<const std::int64_t> items,
                         double overlap_fraction, std::uint64_t seed) {
  if (!(overlap_fraction >= 0.0 && overlap_fraction <= 1.0)) {
    throw Error(ErrorCode::kBadFraction, "overlap fraction must be in [0, 1]");
  }
  if (std::unordered_set<std::int64_t>(items.begin(), items.end()).size() !=
      items.size()) {
    throw Error(ErrorCode::kBadRequest, "datapoint ids must be distinct");
  }

  const std::size_t n = items.size();
  if (n == 0) return {};
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[bounded(rng, i + 1)]);
  }

  const std::size_t k = shared_count(n, overlap_fraction);
  const std::size_t a_count = (n - k + 1) / 2;
  std::vector<int> bucket(n);  // 0 shared, 1 a, 2 b
  for (std::size_t i = 0; i < n; ++i) {
    bucket[order[i]] = i < k ? 0 : i < k + a_count ? 1 : 2;
  }

  OverlapPlan plan;
  for (std::size_t i = 0; i < n; ++i) {
    (bucket[i] == 0 ? plan.shared : bucket[i] == 1 ? plan.a_only : plan.b_only)
        .push_back(items[i]);
  }
  return plan;
}

std::string assemble_transcript(std::vector<Segment> segments) {
  std::sort(segments.begin(), segments.end(), [](const Segment& x, const Segment& y) {
    return std::tie(x.start_ms, x.end_ms, x.id) < std::tie(y.start_ms, y.end_ms, y.id);
  });
  std::string out;
  for (const auto& s : segments) {
    if (s.transcription.empty()) continue;
    if (!out.empty()) out += ' ';
    out += s.transcription;
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view s, bool casefold) {
  const std::string prepared = casefold ? text::casefold(s) : text::normalize(s);
  return text::split_whitespace(prepared);
}

WordErrorRate word_error_rate(std::span<const std::string> reference,
                              std::span<const std::string> hypothesis) {
  if (reference.empty()) {
    throw Error(ErrorCode::kEmptyReference, "reference transcript has no words");
  }
  const std::size_t n = reference.size();
  const std::size_t m = hypothesis.size();
  // cost[i][j]: edits turning reference[0..i) into hypothesis[0..j).
  std::vector<std::vector<std::int64_t>> cost(n + 1, std::vector<std::int64_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) cost[i][0] = static_cast<std::int64_t>(i);
  for (std::size_t j = 0; j <= m; ++j) cost[0][j] = static_cast<std::int64_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::int64_t sub =
          cost[i - 1][j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      cost[i][j] = std::min({sub, cost[i - 1][j] + 1, cost[i][j - 1] + 1});
    }
  }

  // Walk one optimal path back to split the total into S, D and I.
  WordErrorRate wer;
  wer.reference_length = static_cast<std::int64_t>(n);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = reference[i - 1] == hypothesis[j - 1];
      if (cost[i][j] == cost[i - 1][j - 1] + (same ? 0 : 1)) {
        if (!same) ++wer.substitutions;
        --i, --j;
        continue;
      }
    }
    if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
      ++wer.deletions;
      --i;
    } else {
      ++wer.insertions;
      --j;
    }
  }
  return wer;
}

QaReport QaService::report(const Principal& caller, ProjectId project,
                           const std::string& username_a,
                           const std::string& username_b, double threshold) {
  auth_.authorize(caller, RequireAdmin{});
  if (!std::isfinite(threshold) || threshold < 0) {
    throw Error(ErrorCode::kBadRequest, "threshold must be a non-negative number");
  }
  return store_.transact([&](Tx& tx) {
    if (!tx.find_project(project)) throw Error(ErrorCode::kNotFound, "project not found");
    auto a = tx.find_user_by_name(text::normalize(username_a));
    auto b = tx.find_user_by_name(text::normalize(username_b));
    if (!a || !b) throw Error(ErrorCode::kNotFound, "user not found");

    QaReport report{project, a->username, b->username, {}, threshold, clock_.now()};
    for (const auto& dp : tx.list_datapoints(project)) {
      auto assignment_a = tx.find_assignment(dp.id, a->id);
      auto assignment_b = tx.find_assignment(dp.id, b->id);
      if (!assignment_a || !assignment_b) continue;

      QaRow row{dp.id, dp.original_filename, std::nullopt, true};
      const auto ref = tokenize(assemble_transcript(tx.list_segments(assignment_a->id)));
      const auto hyp = tokenize(assemble_transcript(tx.list_segments(assignment_b->id)));
      if (!ref.empty()) {
        row.wer = word_error_rate(ref, hyp);
        row.flagged = row.wer->value() > threshold;
      }
      report.rows.push_back(std::move(row));
    }
    return report;
  });
}

OverlapPlan QaService::plan(const Principal& caller, ProjectId project,
                            std::vector<std::int64_t> items,
                            double overlap_fraction, std::uint64_t seed) {
  auth_.authorize(caller, RequireAdmin{});
  store_.transact([&](Tx& tx) {
    if (!tx.find_project(project)) throw Error(ErrorCode::kNotFound, "project not found");
    if (!items.empty()) {
      for (std::int64_t id : items) {
        auto dp = tx.find_datapoint(DataPointId{id});
        if (!dp || dp->project_id != project) {
          throw Error(ErrorCode::kNotFound, "datapoint not found", {{"datapoint_id", id}});
        }
      }
      return;
    }
    for (const auto& dp : tx.list_datapoints(project)) items.push_back(dp.id.value);
  });
  return plan_overlap(items, overlap_fraction, seed);
}

}  // namespace earmark
