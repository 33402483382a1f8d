#include "earmark/ingest.hpp"

#include "earmark/crypto.hpp"
#include "earmark/error.hpp"
#include "earmark/segment_rules.hpp"
#include "earmark/text.hpp"

#include <algorithm>
#include <cctype>

namespace earmark {

namespace {

[[noreturn]] void bad_preannotation(std::size_t index, const std::string& why,
                                    std::optional<ErrorCode> cause = std::nullopt) {
  nlohmann::json detail = {{"index", index}};
  if (cause) detail["cause"] = to_string(*cause);
  throw Error(ErrorCode::kBadPreannotation,
              "pre-annotation " + std::to_string(index) + ": " + why, detail);
}

std::string lower_stem(std::string_view filename) {
  auto slash = filename.find_last_of("/\\");
  if (slash != std::string_view::npos) filename.remove_prefix(slash + 1);
  auto dot = filename.rfind('.');
  if (dot != std::string_view::npos && dot > 0) filename = filename.substr(0, dot);
  std::string out(filename);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string generate_stored_name(std::string_view extension) {
  if (extension != "wav" && extension != "mp3" && extension != "ogg") {
    throw Error(ErrorCode::kBadFormat, "unsupported extension");
  }
  return crypto::random_hex(16) + "." + std::string(extension);
}

std::string generate_stored_name(AudioFormat format,
                                 std::string_view original_filename) {
  const std::string stem = lower_stem(original_filename);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::string name = generate_stored_name(to_string(format));
    if (stem.empty() || name.substr(0, 32).find(stem) == std::string::npos) return name;
  }
  throw Error(ErrorCode::kInternal, "could not draw a stored name");
}

std::vector<PreAnnotation> parse_pre_annotations(const nlohmann::json& array) {
  if (!array.is_array()) {
    throw Error(ErrorCode::kBadPreannotation, "segmentations must be a JSON array");
  }
  std::vector<PreAnnotation> out;
  for (std::size_t i = 0; i < array.size(); ++i) {
    const auto& item = array[i];
    if (!item.is_object()) bad_preannotation(i, "not an object");
    PreAnnotation pre;
    const auto start = item.find("start_ms");
    const auto end = item.find("end_ms");
    if (start == item.end() || !start->is_number_integer() || end == item.end() ||
        !end->is_number_integer()) {
      bad_preannotation(i, "start_ms and end_ms must be integers");
    }
    pre.start_ms = start->get<std::int64_t>();
    pre.end_ms = end->get<std::int64_t>();
    if (auto t = item.find("transcription"); t != item.end() && !t->is_null()) {
      if (!t->is_string()) bad_preannotation(i, "transcription must be a string");
      pre.transcription = t->get<std::string>();
    }
    if (auto labels = item.find("labels"); labels != item.end() && !labels->is_null()) {
      if (!labels->is_object()) bad_preannotation(i, "labels must be an object");
      for (const auto& [name, values] : labels->items()) {
        auto& slot = pre.labels[name];
        if (values.is_string()) {
          slot.push_back(values.get<std::string>());
        } else if (values.is_array()) {
          for (const auto& v : values) {
            if (!v.is_string()) bad_preannotation(i, "label values must be strings");
            slot.push_back(v.get<std::string>());
          }
        } else {
          bad_preannotation(i, "label values must be strings");
        }
      }
    }
    out.push_back(std::move(pre));
  }
  return out;
}

SegmentDraft resolve_pre_annotation(const PreAnnotation& pre,
                                    const LabelSchema& schema) {
  SegmentDraft draft;
  draft.start_ms = pre.start_ms;
  draft.end_ms = pre.end_ms;
  draft.transcription = pre.transcription;
  for (const auto& [raw_name, raw_values] : pre.labels) {
    const std::string name = text::normalize(raw_name);
    const Label* label = schema.find_by_name(name);
    if (label == nullptr) {
      throw Error(ErrorCode::kLabelScope, "unknown label '" + name + "'");
    }
    auto& chosen = draft.selections[label->id];
    for (const auto& raw_value : raw_values) {
      const std::string value = text::normalize(raw_value);
      auto it = std::find_if(label->values.begin(), label->values.end(),
                             [&](const LabelValue& lv) { return lv.value == value; });
      if (it == label->values.end()) {
        throw Error(ErrorCode::kLabelScope,
                    "unknown value '" + value + "' for label '" + name + "'");
      }
      chosen.insert(it->id);
    }
  }
  return draft;
}

IngestResult IngestionService::ingest(const IngestRequest& request) {
  std::string stored_name;
  bool blob_written = false;
  try {
    return store_.transact([&](Tx& tx) {
      auto project = request.api_key.empty()
                         ? std::nullopt
                         : tx.find_project_by_api_key(request.api_key);
      if (!project) throw Error(ErrorCode::kBadApiKey, "invalid api key");

      const AudioInfo info = probe_audio(request.audio, max_bytes_);

      DataPoint dp;
      dp.project_id = project->id;
      dp.original_filename = text::normalize(request.original_filename);
      if (dp.original_filename.empty()) {
        throw Error(ErrorCode::kBadRequest, "original_filename is empty");
      }
      dp.format = info.format;
      dp.duration_ms = info.duration_ms;
      if (request.reference_transcription) {
        dp.reference_transcription = text::normalize(*request.reference_transcription);
      }
      dp.created_at = clock_.now();

      std::vector<UserId> assignees;
      for (const auto& raw : request.assignees) {
        const std::string username = text::normalize(raw);
        auto user = tx.find_user_by_name(username);
        if (!user) {
          throw Error(ErrorCode::kUnknownAssignee, "unknown user '" + username + "'");
        }
        if (!tx.is_member(user->id, project->id)) {
          throw Error(ErrorCode::kNotMember,
                      "user '" + username + "' is not a member of the project");
        }
        if (std::find(assignees.begin(), assignees.end(), user->id) == assignees.end()) {
          assignees.push_back(user->id);
        }
      }

      const LabelSchema schema = tx.load_schema(project->id);
      std::vector<SegmentDraft> drafts;
      for (std::size_t i = 0; i < request.pre_annotations.size(); ++i) {
        try {
          drafts.push_back(canonical_segment(
              resolve_pre_annotation(request.pre_annotations[i], schema),
              dp.duration_ms, schema));
        } catch (const Error& e) {
          bad_preannotation(i, e.what(), e.code());
        }
      }

      do {
        dp.stored_name = generate_stored_name(dp.format, dp.original_filename);
      } while (tx.stored_name_exists(dp.stored_name));

      checkpoint(IngestStage::kDataPointInsert);
      dp.id = tx.insert_datapoint(dp);

      checkpoint(IngestStage::kBlobWrite);
      stored_name = dp.stored_name;
      blobs_.put(stored_name, request.audio);
      blob_written = true;

      IngestResult result{dp, {}};
      for (UserId user : assignees) {
        checkpoint(IngestStage::kAssignmentInsert);
        AssignmentId aid = tx.insert_assignment(dp.id, user, Status::kPending,
                                                request.marked_for_review, dp.created_at);
        for (const auto& draft : drafts) {
          checkpoint(IngestStage::kSegmentInsert);
          tx.insert_segment(aid, draft, dp.created_at);
        }
        result.assignments.push_back(*tx.find_assignment(aid));
      }
      checkpoint(IngestStage::kCommit);
      return result;
    });
  } catch (...) {
    if (blob_written) blobs_.remove(stored_name);
    throw;
  }
}

}  // namespace earmark
