#include "earmark/export.hpp"

#include "earmark/error.hpp"

#include <algorithm>
#include <map>

namespace earmark {

using ojson = nlohmann::ordered_json;

nlohmann::ordered_json ExportService::export_project(const Principal& caller,
                                                     ProjectId project_id) {
  auth_.authorize(caller, RequireAdmin{});
  return store_.transact([&](Tx& tx) {
    auto project = tx.find_project(project_id);
    if (!project) throw Error(ErrorCode::kNotFound, "project not found");

    const LabelSchema schema = tx.load_schema(project_id);
    std::map<LabelValueId, std::string> value_text;

    std::vector<const Label*> labels;
    for (const auto& label : schema.labels) {
      labels.push_back(&label);
      for (const auto& v : label.values) value_text[v.id] = v.value;
    }
    std::sort(labels.begin(), labels.end(),
              [](const Label* a, const Label* b) { return a->name < b->name; });

    ojson doc = ojson::object();
    doc["version"] = kExportVersion;
    doc["project"] = {{"id", project->id.value}, {"name", project->name}};

    ojson label_array = ojson::array();
    for (const Label* label : labels) {
      std::vector<std::string> values;
      for (const auto& v : label->values) values.push_back(v.value);
      std::sort(values.begin(), values.end());
      label_array.push_back({{"name", label->name},
                             {"type", to_string(label->selection_type)},
                             {"values", values}});
    }
    doc["labels"] = std::move(label_array);

    ojson data = ojson::array();
    for (const auto& dp : tx.list_datapoints(project_id)) {
      struct Row {
        std::string username;
        Assignment assignment;
      };
      std::vector<Row> rows;
      for (const auto& a : tx.list_assignments(dp.id)) {
        rows.push_back({tx.find_user(a.user_id)->username, a});
      }
      std::sort(rows.begin(), rows.end(),
                [](const Row& x, const Row& y) { return x.username < y.username; });

      ojson assignments = ojson::array();
      for (const auto& row : rows) {
        ojson segments = ojson::array();
        for (const auto& seg : tx.list_segments(row.assignment.id)) {
          std::map<std::string, std::vector<std::string>> by_label;
          for (const auto& [label_id, value_ids] : seg.selections) {
            auto& out = by_label[schema.find(label_id)->name];
            for (LabelValueId v : value_ids) out.push_back(value_text.at(v));
            std::sort(out.begin(), out.end());
          }
          ojson seg_labels = ojson::object();
          for (auto& [name, values] : by_label) seg_labels[name] = values;
          segments.push_back({{"start_ms", seg.start_ms},
                              {"end_ms", seg.end_ms},
                              {"transcription", seg.transcription},
                              {"labels", std::move(seg_labels)}});
        }
        assignments.push_back(
            {{"username", row.username},
             {"status", to_string(row.assignment.status)},
             {"marked_for_review", row.assignment.marked_for_review},
             {"segments", std::move(segments)}});
      }

      ojson item = ojson::object();
      item["original_filename"] = dp.original_filename;
      item["stored_name"] = dp.stored_name;
      item["format"] = to_string(dp.format);
      item["duration_ms"] = dp.duration_ms;
      item["reference_transcription"] =
          dp.reference_transcription ? ojson(*dp.reference_transcription) : ojson(nullptr);
      item["assignments"] = std::move(assignments);
      data.push_back(std::move(item));
    }
    doc["data"] = std::move(data);
    return doc;
  });
}

std::string ExportService::render(const nlohmann::ordered_json& document) {
  return document.dump(2) + "\n";
}

}  // namespace earmark
