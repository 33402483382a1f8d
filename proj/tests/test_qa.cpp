#include "earmark/error.hpp"
#include "earmark/qa.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace earmark;
using namespace earmark::testing;

namespace {

using Words = std::vector<std::string>;

// Exhaustive alignment: try every edit at every position, no memoisation.
std::int64_t brute_force_edits(const Words& r, std::size_t i, const Words& h, std::size_t j) {
  if (i == r.size()) return static_cast<std::int64_t>(h.size() - j);
  if (j == h.size()) return static_cast<std::int64_t>(r.size() - i);
  const std::int64_t match = brute_force_edits(r, i + 1, h, j + 1) + (r[i] == h[j] ? 0 : 1);
  const std::int64_t del = brute_force_edits(r, i + 1, h, j) + 1;
  const std::int64_t ins = brute_force_edits(r, i, h, j + 1) + 1;
  return std::min({match, del, ins});
}

std::vector<std::int64_t> ids(std::size_t n) {
  std::vector<std::int64_t> v(n);
  std::iota(v.begin(), v.end(), 101);
  return v;
}

}  // namespace

TEST_SUITE("qa") {
  TEST_CASE("overlap examples") {
    auto plan = plan_overlap(ids(10), 0.2, 1);
    CHECK(plan.shared.size() == 2);
    CHECK(plan.a_only.size() == 4);
    CHECK(plan.b_only.size() == 4);
    CHECK(plan_overlap(ids(10), 0.0, 1).shared.empty());
    plan = plan_overlap(ids(7), 0.2, 1);
    CHECK(plan.shared.size() == 2);
    CHECK(plan.a_only.size() == 3);
    CHECK(plan.b_only.size() == 2);
    CHECK(plan_overlap(ids(10), 1.0, 1).shared.size() == 10);
  }

  TEST_CASE("shared count is robust to float representation") {
    CHECK(shared_count(10, 0.3) == 3);
    CHECK(shared_count(10, 0.7) == 7);
    CHECK(shared_count(100, 0.29) == 29);
    CHECK(shared_count(3, 0.5) == 2);
    CHECK(shared_count(1, 0.01) == 1);
  }

  TEST_CASE("every plan is a valid partition") {
    for (std::size_t n = 0; n <= 50; ++n) {
      for (int tenth = 0; tenth <= 10; ++tenth) {
        const double p = tenth / 10.0;
        const auto input = ids(n);
        auto plan = plan_overlap(input, p, n * 31 + tenth);
        const std::size_t k = (static_cast<std::size_t>(tenth) * n + 9) / 10;  // integer ceil
        REQUIRE(plan.shared.size() == k);
        const auto rest = n - k;
        CHECK(plan.a_only.size() == (rest + 1) / 2);
        CHECK(plan.b_only.size() == rest / 2);
        std::vector<std::int64_t> all;
        for (const auto* part : {&plan.shared, &plan.a_only, &plan.b_only}) {
          CHECK(std::is_sorted(part->begin(), part->end()));
          all.insert(all.end(), part->begin(), part->end());
        }
        std::sort(all.begin(), all.end());
        CHECK(all == input);
      }
    }
  }

  TEST_CASE("plans are deterministic per seed and vary across seeds") {
    auto a = plan_overlap(ids(30), 0.2, 7);
    auto b = plan_overlap(ids(30), 0.2, 7);
    CHECK(a.shared == b.shared);
    CHECK(a.a_only == b.a_only);
    bool differs = false;
    for (std::uint64_t seed = 8; seed < 20 && !differs; ++seed) {
      differs = plan_overlap(ids(30), 0.2, seed).shared != a.shared;
    }
    CHECK(differs);
  }

  TEST_CASE("every item has a fair chance of being shared") {
    std::vector<int> hits(10, 0);
    for (std::uint64_t seed = 0; seed < 5000; ++seed) {
      for (auto id : plan_overlap(ids(10), 0.2, seed).shared) ++hits[id - 101];
    }
    for (int h : hits) CHECK((h > 800 && h < 1200));  // expectation 1000
  }

  TEST_CASE("overlap errors") {
    CHECK(error_of([] { plan_overlap(ids(5), -0.1, 0); }) == ErrorCode::kBadFraction);
    CHECK(error_of([] { plan_overlap(ids(5), 1.5, 0); }) == ErrorCode::kBadFraction);
    CHECK(error_of([] { plan_overlap(ids(5), std::nan(""), 0); }) == ErrorCode::kBadFraction);
    auto none = plan_overlap({}, 0.2, 0);
    CHECK((none.shared.empty() && none.a_only.empty() && none.b_only.empty()));
    std::vector<std::int64_t> dup = {1, 2, 2};
    CHECK(error_of([&] { plan_overlap(dup, 0.2, 0); }) == ErrorCode::kBadRequest);
  }

  TEST_CASE("transcripts are assembled in time order") {
    auto seg = [](std::int64_t id, std::int64_t s, std::int64_t e, std::string t) {
      Segment x;
      x.id = SegmentId{id};
      x.start_ms = s;
      x.end_ms = e;
      x.transcription = std::move(t);
      return x;
    };
    CHECK(assemble_transcript({seg(1, 0, 1000, "hello"), seg(2, 1000, 2000, "world")}) == "hello world");
    CHECK(assemble_transcript({seg(2, 1000, 2000, "world"), seg(1, 0, 1000, "hello")}) == "hello world");
    CHECK(assemble_transcript({seg(1, 0, 1000, ""), seg(2, 1000, 2000, "ok")}) == "ok");
    CHECK(assemble_transcript({}) == "");
    // ties on start fall back to end, then id
    CHECK(assemble_transcript({seg(3, 0, 900, "c"), seg(2, 0, 500, "b"), seg(1, 0, 900, "a")}) == "b a c");

    std::vector<Segment> segs;
    for (int i = 0; i < 6; ++i) segs.push_back(seg(i + 1, i * 10, i * 10 + 5, "w" + std::to_string(i)));
    const std::string expected = assemble_transcript(segs);
    std::mt19937 rng(3);
    for (int k = 0; k < 50; ++k) {
      std::shuffle(segs.begin(), segs.end(), rng);
      CHECK(assemble_transcript(segs) == expected);
    }
  }

  TEST_CASE("tokenize") {
    CHECK(tokenize("The  cat") == Words{"the", "cat"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("नमस्ते 😀") == Words{"नमस्ते", "😀"});
    CHECK(tokenize("Hello, world!") == Words{"hello,", "world!"});
    CHECK(tokenize("The Cat", false) == Words{"The", "Cat"});
    CHECK(tokenize("cafe\xCC\x81") == Words{"caf\xC3\xA9"});
  }

  TEST_CASE("wer examples") {
    auto w = word_error_rate(Words{"the", "cat", "sat", "on", "the", "mat"},
                             Words{"the", "cat", "sat", "mat"});
    CHECK(w.errors() == 2);
    CHECK(w.reference_length == 6);
    CHECK(w.deletions == 2);
    CHECK(w.value() == doctest::Approx(2.0 / 6).epsilon(1e-12));

    CHECK(word_error_rate(Words{"a", "b"}, Words{"a", "b"}).value() == 0.0);
    w = word_error_rate(Words{"a", "b", "c"}, Words{"x", "y", "z"});
    CHECK(w.substitutions == 3);
    CHECK(w.value() == 1.0);
    w = word_error_rate(Words{"a"}, Words{"a", "b", "c"});
    CHECK(w.insertions == 2);
    CHECK(w.value() == 2.0);
    CHECK(word_error_rate(Words{"a", "b"}, Words{}).deletions == 2);
    CHECK(error_of([] { word_error_rate(Words{}, Words{"a"}); }) == ErrorCode::kEmptyReference);
  }

  TEST_CASE("wer agrees with exhaustive alignment") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> len(0, 8), sym(0, 2);
    const Words alphabet = {"a", "b", "c"};
    for (int trial = 0; trial < 300; ++trial) {
      Words r(static_cast<std::size_t>(len(rng)) + 0), h(static_cast<std::size_t>(len(rng)));
      if (r.empty()) r.resize(1);
      for (auto& t : r) t = alphabet[sym(rng)];
      for (auto& t : h) t = alphabet[sym(rng)];
      auto w = word_error_rate(r, h);
      const auto oracle = brute_force_edits(r, 0, h, 0);
      REQUIRE(w.errors() == oracle);
      // counts must describe a real alignment
      CHECK(static_cast<std::int64_t>(r.size()) - w.deletions + w.insertions ==
            static_cast<std::int64_t>(h.size()));
      CHECK(w.value() <= static_cast<double>(r.size() + h.size()) / r.size());
      if (r.size() == h.size()) CHECK(word_error_rate(h.empty() ? r : h, r).errors() == w.errors());
    }
  }

  TEST_CASE("report over a project") {
    TestEnv env;
    auto p = env.add_project("P");
    auto a = env.add_user("ann");
    auto b = env.add_user("ben");
    env.join(a, p);
    env.join(b, p);
    auto& ann = env.app().annotation;

    auto d1 = env.ingest(p, {"ann", "ben"}, {}, make_wav_ms(5000), "one.wav").datapoint;
    env.clock().advance(std::chrono::seconds(1));
    auto d2 = env.ingest(p, {"ann", "ben"}, {}, make_wav_ms(5000), "two.wav").datapoint;
    env.clock().advance(std::chrono::seconds(1));
    auto d3 = env.ingest(p, {"ann", "ben"}, {}, make_wav_ms(5000), "three.wav").datapoint;
    env.ingest(p, {"ann"}, {}, make_wav_ms(5000), "solo.wav");

    ann.create_segment(a, d1.id, SegmentDraft{0, 1000, "the cat sat", {}});
    ann.create_segment(a, d1.id, SegmentDraft{1000, 2000, "on the mat", {}});
    ann.create_segment(b, d1.id, SegmentDraft{0, 2000, "The cat sat mat", {}});
    ann.create_segment(a, d2.id, SegmentDraft{0, 1000, "a b c", {}});
    ann.create_segment(b, d2.id, SegmentDraft{0, 1000, "x y z", {}});
    ann.create_segment(b, d3.id, SegmentDraft{0, 1000, "only ben", {}});

    auto report = env.app().qa.report(env.admin(), p.id, "ann", "ben");
    CHECK(report.threshold == 0.5);
    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].datapoint_id == d1.id);
    CHECK(report.rows[0].wer->errors() == 2);
    CHECK_FALSE(report.rows[0].flagged);
    CHECK(report.rows[1].wer->value() == 1.0);
    CHECK(report.rows[1].flagged);
    CHECK_FALSE(report.rows[2].wer);
    CHECK(report.rows[2].flagged);

    auto strict = env.app().qa.report(env.admin(), p.id, "ann", "ben", 0.2);
    CHECK(strict.rows[0].flagged);
    for (const auto& row : strict.rows) {
      if (row.wer) CHECK(row.flagged == (row.wer->value() > 0.2));
    }

    CHECK(error_of([&] { env.app().qa.report(a, p.id, "ann", "ben"); }) == ErrorCode::kForbidden);
    CHECK(error_of([&] { env.app().qa.report(env.admin(), p.id, "ann", "nobody"); }) ==
          ErrorCode::kNotFound);
    CHECK(error_of([&] { env.app().qa.report(env.admin(), ProjectId{77}, "ann", "ben"); }) ==
          ErrorCode::kNotFound);
  }

  TEST_CASE("service plan uses the project's datapoints") {
    TestEnv env;
    auto p = env.add_project("P");
    for (int i = 0; i < 10; ++i) env.ingest(p, {});
    auto plan = env.app().qa.plan(env.admin(), p.id, {}, 0.2, 5);
    CHECK(plan.shared.size() == 2);
    CHECK(plan.a_only.size() + plan.b_only.size() == 8);
    CHECK(error_of([&] { env.app().qa.plan(env.admin(), p.id, {12345}, 0.2, 5); }) ==
          ErrorCode::kNotFound);
  }
}
