#pragma once

#include "earmark/audio_probe.hpp"
#include "earmark/blob_store.hpp"
#include "earmark/clock.hpp"
#include "earmark/domain.hpp"
#include "earmark/store.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace earmark {

/// "<32 lowercase hex>.<ext>" from 128 random bits. ext must be wav, mp3 or
/// ogg (kBadFormat otherwise).
std::string generate_stored_name(std::string_view extension);

/// Same, redrawn until the hex part does not contain the original file's
/// stem.
std::string generate_stored_name(AudioFormat format,
                                 std::string_view original_filename);

/// A segment supplied by an uploading pipeline. Labels are referenced by name
/// because the uploader cannot know internal ids.
struct PreAnnotation {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::string transcription;
  std::map<std::string, std::vector<std::string>> labels;
};

/// Parses the "segmentations" JSON array. A label's values may be an array of
/// strings or a single string. Throws kBadPreannotation citing the index.
std::vector<PreAnnotation> parse_pre_annotations(const nlohmann::json& array);

/// Maps names to ids within `schema`; kBadPreannotation on unknown names.
SegmentDraft resolve_pre_annotation(const PreAnnotation& pre,
                                    const LabelSchema& schema);

struct IngestRequest {
  std::string api_key;
  std::string original_filename;
  std::string audio;
  std::optional<std::string> reference_transcription;
  std::vector<PreAnnotation> pre_annotations;
  std::vector<std::string> assignees;
  bool marked_for_review = false;
};

struct IngestResult {
  DataPoint datapoint;
  std::vector<Assignment> assignments;
};

/// Points at which tests may inject a failure.
enum class IngestStage {
  kDataPointInsert,
  kBlobWrite,
  kAssignmentInsert,
  kSegmentInsert,
  kCommit,
};

class IngestionService {
 public:
  using FaultHook = std::function<void(IngestStage)>;

  IngestionService(Store& store, BlobStore& blobs, const Clock& clock,
                   std::uint64_t max_upload_bytes = kDefaultMaxUploadBytes)
      : store_(store), blobs_(blobs), clock_(clock), max_bytes_(max_upload_bytes) {}

  /// All-or-nothing: on any failure neither rows nor the audio blob remain.
  IngestResult ingest(const IngestRequest& request);

  void set_fault_hook(FaultHook hook) { fault_hook_ = std::move(hook); }
  std::uint64_t max_upload_bytes() const { return max_bytes_; }

 private:
  void checkpoint(IngestStage stage) {
    if (fault_hook_) fault_hook_(stage);
  }

  Store& store_;
  BlobStore& blobs_;
  const Clock& clock_;
  std::uint64_t max_bytes_;
  FaultHook fault_hook_;
};

}  // namespace earmark
