#include "earmark/error.hpp"
#include "earmark/ingest.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

#include <regex>

using namespace earmark;
using namespace earmark::testing;
using json = nlohmann::json;

namespace {

struct IngestFixture {
  TestEnv env;
  Project project = env.add_project("P");
  Principal alice = env.add_user("alice");
  Principal bob = env.add_user("bob");
  Label speaker;
  LabelValue female, male;

  IngestFixture() {
    env.join(alice, project);
    env.join(bob, project);
    auto& admin = env.app().admin;
    speaker = admin.create_label(env.admin(), project.id, "speaker", SelectionType::kSingle);
    female = admin.create_label_value(env.admin(), speaker.id, "female");
    male = admin.create_label_value(env.admin(), speaker.id, "male");
  }

  std::size_t row_count() {
    return env.app().store.transact([&](Tx& tx) { return tx.list_stored_names().size(); });
  }
};

PreAnnotation pre(std::int64_t s, std::int64_t e, std::string text,
                  std::map<std::string, std::vector<std::string>> labels = {}) {
  return PreAnnotation{s, e, std::move(text), std::move(labels)};
}

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("stored names are random hex with the format extension") {
    const std::regex shape("^[0-9a-f]{32}\\.(wav|mp3|ogg)$");
    std::set<std::string> seen;
    for (int i = 0; i < 200; ++i) {
      auto name = generate_stored_name(AudioFormat::kMp3, "Interview.MP3");
      CHECK(std::regex_match(name, shape));
      CHECK(name.size() == 36);
      seen.insert(name);
    }
    CHECK(seen.size() == 200);
    CHECK(error_of([] { generate_stored_name("exe"); }) == ErrorCode::kBadFormat);
  }

  TEST_CASE("stored names never contain the original stem") {
    // A one-character hex stem is common in random hex; the generator must
    // redraw until it is absent.
    for (int i = 0; i < 200; ++i) {
      auto name = generate_stored_name(AudioFormat::kWav, "A.wav");
      CHECK(name.substr(0, 32).find('a') == std::string::npos);
    }
    // Extension-like stems are fine since only the hex part is checked.
    CHECK_NOTHROW(generate_stored_name(AudioFormat::kWav, "wav.wav"));
  }

  TEST_CASE("pre-annotation parsing") {
    auto parsed = parse_pre_annotations(json::parse(R"([
      {"start_ms": 0, "end_ms": 10, "transcription": "hi", "labels": {"speaker": "male"}},
      {"start_ms": 5, "end_ms": 7, "labels": {"noise": ["a", "b"]}}
    ])"));
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].labels.at("speaker") == std::vector<std::string>{"male"});
    CHECK(parsed[1].transcription.empty());
    CHECK(parsed[1].labels.at("noise").size() == 2);

    auto index_of = [](const char* text) -> json {
      try {
        parse_pre_annotations(json::parse(text));
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kBadPreannotation);
        return e.detail().is_object() ? e.detail().value("index", json()) : json();
      }
      return "no error";
    };
    CHECK(index_of(R"([{"start_ms": 0, "end_ms": 1}, {"start_ms": "0", "end_ms": 1}])") == 1);
    CHECK(index_of(R"([{"start_ms": 0}])") == 0);
    CHECK(index_of(R"([{"start_ms": 0, "end_ms": 1, "labels": {"x": 3}}])") == 0);
    CHECK(index_of(R"([7])") == 0);
    CHECK(index_of(R"({"start_ms": 0})").is_null());
  }

  TEST_CASE("successful ingest writes rows, blob and one assignment per user") {
    IngestFixture f;
    const std::string audio = make_wav_ms(60000);
    IngestRequest req;
    req.api_key = f.project.api_key;
    req.original_filename = "call.wav";
    req.audio = audio;
    req.reference_transcription = "hello";
    req.assignees = {"alice", "bob", "alice"};
    req.marked_for_review = true;
    req.pre_annotations = {pre(100, 900, "hello", {{"speaker", {"male"}}})};
    auto result = f.env.app().ingestion.ingest(req);

    CHECK(result.datapoint.duration_ms == 60000);
    CHECK(result.datapoint.format == AudioFormat::kWav);
    CHECK(result.datapoint.reference_transcription == "hello");
    REQUIRE(result.assignments.size() == 2);
    for (const auto& a : result.assignments) {
      CHECK(a.status == Status::kPending);
      CHECK(a.marked_for_review);
      auto segs = f.env.app().store.transact([&](Tx& tx) { return tx.list_segments(a.id); });
      REQUIRE(segs.size() == 1);
      CHECK(segs[0].start_ms == 100);
      CHECK(segs[0].selections.at(f.speaker.id) == std::set<LabelValueId>{f.male.id});
    }
    auto size = f.env.app().blobs.size(result.datapoint.stored_name);
    REQUIRE(size);
    CHECK(f.env.app().blobs.read(result.datapoint.stored_name, 0, *size) == audio);
  }

  TEST_CASE("rejections leave nothing behind") {
    IngestFixture f;
    auto outsider = f.env.add_user("outsider");
    (void)outsider;
    const std::string before = f.env.app().store.digest();
    auto attempt = [&](IngestRequest req) {
      if (req.api_key.empty()) req.api_key = f.project.api_key;
      if (req.audio.empty()) req.audio = make_wav_ms(1000);
      if (req.original_filename.empty()) req.original_filename = "x.wav";
      return error_of([&] { f.env.app().ingestion.ingest(req); });
    };

    CHECK(attempt({.api_key = "wrong"}) == ErrorCode::kBadApiKey);
    CHECK(attempt({.audio = "not audio at all"}) == ErrorCode::kBadFormat);
    CHECK(attempt({.assignees = {"nobody"}}) == ErrorCode::kUnknownAssignee);
    CHECK(attempt({.assignees = {"alice", "outsider"}}) == ErrorCode::kNotMember);
    CHECK(attempt({.pre_annotations = {pre(0, 5000, "")}}) == ErrorCode::kBadPreannotation);
    CHECK(attempt({.pre_annotations = {pre(0, 10, "", {{"mood", {"happy"}}})}}) ==
          ErrorCode::kBadPreannotation);
    CHECK(attempt({.pre_annotations = {pre(0, 10, "", {{"speaker", {"male", "female"}}})}}) ==
          ErrorCode::kBadPreannotation);
    CHECK(error_of([&] {
            f.env.app().ingestion.ingest(
                IngestRequest{f.project.api_key, "", make_wav_ms(10), std::nullopt, {}, {}, false});
          }) == ErrorCode::kBadRequest);

    CHECK(f.env.app().store.digest() == before);
    CHECK(f.env.app().blobs.list().empty());
  }

  TEST_CASE("pre-annotation errors name the index and the cause") {
    IngestFixture f;
    IngestRequest req{f.project.api_key, "x.wav", make_wav_ms(1000), std::nullopt,
                      {pre(0, 10, ""), pre(20, 10, "")}, {"alice"}, false};
    try {
      f.env.app().ingestion.ingest(req);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kBadPreannotation);
      CHECK(e.detail()["index"] == 1);
      CHECK(e.detail()["cause"] == "ERR_EMPTY_INTERVAL");
    }
  }

  TEST_CASE("a fault at any stage rolls back rows and the blob") {
    for (auto stage : {IngestStage::kDataPointInsert, IngestStage::kBlobWrite,
                       IngestStage::kAssignmentInsert, IngestStage::kSegmentInsert,
                       IngestStage::kCommit}) {
      CAPTURE(static_cast<int>(stage));
      IngestFixture f;
      const std::string before = f.env.app().store.digest();
      f.env.app().ingestion.set_fault_hook([stage](IngestStage s) {
        if (s == stage) throw std::runtime_error("injected");
      });
      IngestRequest req{f.project.api_key, "x.wav", make_wav_ms(1000), std::nullopt,
                        {pre(0, 10, "a")}, {"alice", "bob"}, false};
      CHECK_THROWS_AS(f.env.app().ingestion.ingest(req), std::runtime_error);
      CHECK(f.env.app().store.digest() == before);
      CHECK(f.env.app().blobs.list().empty());
      CHECK(f.row_count() == 0);
    }
  }

  TEST_CASE("text is stored in NFC") {
    IngestFixture f;
    IngestRequest req{f.project.api_key, "cafe\xCC\x81.wav", make_wav_ms(1000),
                      std::string("cafe\xCC\x81"), {}, {}, false};
    auto dp = f.env.app().ingestion.ingest(req).datapoint;
    CHECK(dp.original_filename == "caf\xC3\xA9.wav");
    CHECK(dp.reference_transcription == "caf\xC3\xA9");
  }
}
