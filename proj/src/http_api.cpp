#include "earmark/http_api.hpp"

#include "earmark/error.hpp"

#include <httplib.h>

#include <charconv>
#include <cstdlib>
#include <functional>

namespace earmark {

namespace {

using json = nlohmann::json;
using httplib::Request;
using httplib::Response;

// ---- views ----------------------------------------------------------------

json user_json(const User& u) {
  return {{"id", u.id.value},
          {"username", u.username},
          {"role", to_string(u.role)},
          {"created_at", to_iso8601(u.created_at)}};
}

json project_json(const Project& p, bool with_key) {
  json j = {{"id", p.id.value}, {"name", p.name}, {"created_at", to_iso8601(p.created_at)}};
  if (with_key) j["api_key"] = p.api_key;
  return j;
}

json value_json(const LabelValue& v) {
  return {{"id", v.id.value}, {"label_id", v.label_id.value}, {"value", v.value}};
}

json label_json(const Label& l) {
  json values = json::array();
  for (const auto& v : l.values) values.push_back(value_json(v));
  return {{"id", l.id.value},
          {"project_id", l.project_id.value},
          {"name", l.name},
          {"type", to_string(l.selection_type)},
          {"values", values}};
}

json schema_json(const LabelSchema& schema) {
  json out = json::array();
  for (const auto& l : schema.labels) out.push_back(label_json(l));
  return out;
}

json datapoint_json(const DataPoint& dp) {
  return {{"id", dp.id.value},
          {"project_id", dp.project_id.value},
          {"original_filename", dp.original_filename},
          {"stored_name", dp.stored_name},
          {"audio_url", "/audio/" + dp.stored_name},
          {"format", to_string(dp.format)},
          {"duration_ms", dp.duration_ms},
          {"reference_transcription", dp.reference_transcription
                                          ? json(*dp.reference_transcription)
                                          : json(nullptr)},
          {"created_at", to_iso8601(dp.created_at)}};
}

json assignment_json(const Assignment& a) {
  return {{"id", a.id.value},
          {"datapoint_id", a.datapoint_id.value},
          {"user_id", a.user_id.value},
          {"status", to_string(a.status)},
          {"marked_for_review", a.marked_for_review},
          {"updated_at", to_iso8601(a.updated_at)}};
}

json selections_json(const Selections& selections) {
  json out = json::object();
  for (const auto& [label, values] : selections) {
    json ids = json::array();
    for (LabelValueId v : values) ids.push_back(v.value);
    out[std::to_string(label.value)] = ids;
  }
  return out;
}

json segment_json(const Segment& s) {
  return {{"id", s.id.value},
          {"assignment_id", s.assignment_id.value},
          {"start_ms", s.start_ms},
          {"end_ms", s.end_ms},
          {"transcription", s.transcription},
          {"selections", selections_json(s.selections)},
          {"created_at", to_iso8601(s.created_at)},
          {"updated_at", to_iso8601(s.updated_at)}};
}

json report_json(const QaReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j = {{"datapoint_id", row.datapoint_id.value},
              {"original_filename", row.original_filename},
              {"wer", nullptr},
              {"flagged", row.flagged}};
    if (row.wer) {
      j["wer"] = row.wer->value();
      j["errors"] = row.wer->errors();
      j["substitutions"] = row.wer->substitutions;
      j["deletions"] = row.wer->deletions;
      j["insertions"] = row.wer->insertions;
      j["reference_words"] = row.wer->reference_length;
    }
    rows.push_back(std::move(j));
  }
  return {{"project_id", r.project_id.value},
          {"username_a", r.username_a},
          {"username_b", r.username_b},
          {"threshold", r.threshold},
          {"generated_at", to_iso8601(r.generated_at)},
          {"rows", rows}};
}

// ---- request parsing ------------------------------------------------------

[[noreturn]] void bad_field(const char* key, const char* expected) {
  throw Error(ErrorCode::kBadRequest, std::string(key) + " must be " + expected,
              {{"field", key}});
}

json body_object(const Request& req) {
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kBadRequest, "request body must be a JSON object");
  }
  return j;
}

const json* field(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  const json* v = field(j, key);
  if (!v) return std::nullopt;
  if (!v->is_string()) bad_field(key, "a string");
  return v->get<std::string>();
}

std::string req_string(const json& j, const char* key) {
  auto v = opt_string(j, key);
  if (!v) bad_field(key, "a string");
  return *v;
}

std::optional<std::int64_t> opt_int(const json& j, const char* key) {
  const json* v = field(j, key);
  if (!v) return std::nullopt;
  if (!v->is_number_integer()) bad_field(key, "an integer");
  return v->get<std::int64_t>();
}

std::int64_t req_int(const json& j, const char* key) {
  auto v = opt_int(j, key);
  if (!v) bad_field(key, "an integer");
  return *v;
}

std::optional<bool> opt_bool(const json& j, const char* key) {
  const json* v = field(j, key);
  if (!v) return std::nullopt;
  if (!v->is_boolean()) bad_field(key, "a boolean");
  return v->get<bool>();
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

template <class IdT>
IdT path_id(const Request& req) {
  auto v = parse_int(req.path_params.at("id"));
  if (!v || *v <= 0) throw Error(ErrorCode::kNotFound, "not found");
  return IdT{*v};
}

// {"<label id>": [value ids]}; a bare id stands for a one-element list.
Selections parse_selections(const json& j) {
  if (!j.is_object()) bad_field("selections", "an object keyed by label id");
  Selections out;
  for (const auto& [key, values] : j.items()) {
    auto label = parse_int(key);
    if (!label) bad_field("selections", "an object keyed by label id");
    auto& set = out[LabelId{*label}];
    if (values.is_number_integer()) {
      set.insert(LabelValueId{values.get<std::int64_t>()});
      continue;
    }
    if (!values.is_array()) bad_field("selections", "lists of value ids");
    for (const auto& v : values) {
      if (!v.is_number_integer()) bad_field("selections", "lists of value ids");
      set.insert(LabelValueId{v.get<std::int64_t>()});
    }
  }
  return out;
}

bool parse_form_bool(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0" || s.empty()) return false;
  bad_field("is_marked_for_review", "true or false");
}

// ---- responses -----------------------------------------------------------

void send_json(Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(Response& res, const Error& e) {
  send_json(res, http_status(e.code()), error_body(e));
  if (e.code() == ErrorCode::kRange && e.detail().contains("total")) {
    res.set_header("Content-Range",
                   "bytes */" + std::to_string(e.detail()["total"].get<std::uint64_t>()));
  }
}

using Handler = std::function<void(const Request&, Response&)>;

httplib::Server::Handler wrap(Handler handler) {
  return [handler = std::move(handler)](const Request& req, Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const json::exception&) {
      send_error(res, Error(ErrorCode::kBadRequest, "malformed request"));
    } catch (const std::exception&) {
      send_error(res, Error(ErrorCode::kInternal, "internal error"));
    }
  };
}

}  // namespace

void mount_routes(httplib::Server& server, App& app, const HttpOptions& options) {
  auto who = [&app](const Request& req) {
    return app.auth.verify_header(req.get_header_value("Authorization"));
  };
  auto admin = [&app, who](const Request& req) {
    Principal p = who(req);
    app.auth.authorize(p, RequireAdmin{});
    return p;
  };

  server.set_payload_max_length(app.ingestion.max_upload_bytes() + (1u << 20));
  // small JSON replies otherwise sit behind delayed ACKs on kept-alive sockets
  server.set_tcp_nodelay(true);

  // Range handling belongs to the audio route; keep the library from
  // re-slicing any response on its own.
  server.set_pre_routing_handler([](const Request& req, Response&) {
    const_cast<Request&>(req).ranges.clear();
    return httplib::Server::HandlerResponse::Unhandled;
  });

  server.set_error_handler([](const Request&, Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    ErrorCode code = ErrorCode::kBadRequest;
    if (res.status == 404) code = ErrorCode::kNotFound;
    if (res.status == 413) code = ErrorCode::kTooLarge;
    if (res.status == 416) code = ErrorCode::kRange;
    if (res.status >= 500) code = ErrorCode::kInternal;
    const int status = res.status;
    send_json(res, status, error_body(Error(code, "request rejected")));
    return httplib::Server::HandlerResponse::Handled;
  });

  // ---- auth ----

  server.Post("/auth/login", wrap([&app](const Request& req, Response& res) {
    const json body = body_object(req);
    auto result = app.auth.login(req_string(body, "username"), req_string(body, "password"));
    send_json(res, 200,
              {{"token", result.token},
               {"expires_at", to_iso8601(result.expires_at)},
               {"user", {{"id", result.principal.user_id.value},
                         {"username", result.principal.username},
                         {"role", to_string(result.principal.role)}}}});
  }));

  server.Delete("/auth/logout", wrap([&app](const Request& req, Response& res) {
    app.auth.logout(bearer_token(req.get_header_value("Authorization")));
    res.status = 204;
  }));

  // ---- users ----

  server.Get("/users", wrap([&app, who](const Request& req, Response& res) {
    json out = json::array();
    for (const auto& u : app.admin.list_users(who(req))) out.push_back(user_json(u));
    send_json(res, 200, out);
  }));

  server.Post("/users", wrap([&app, admin](const Request& req, Response& res) {
    Principal p = admin(req);
    const json body = body_object(req);
    const Role role = parse_role(opt_string(body, "role").value_or("annotator"));
    User u = app.admin.create_user(p, req_string(body, "username"),
                                   req_string(body, "password"), role);
    send_json(res, 201, user_json(u));
  }));

  server.Patch("/users/:id", wrap([&app, admin](const Request& req, Response& res) {
    Principal p = admin(req);
    const json body = body_object(req);
    User u = app.admin.update_user_role(p, path_id<UserId>(req),
                                        parse_role(req_string(body, "role")));
    send_json(res, 200, user_json(u));
  }));

  server.Delete("/users/:id", wrap([&app, admin](const Request& req, Response& res) {
    Principal p = admin(req);
    app.admin.delete_user(p, path_id<UserId>(req));
    res.status = 204;
  }));

  // ---- projects ----

  server.Get("/projects", wrap([&app, who](const Request& req, Response& res) {
    Principal p = who(req);
    json out = json::array();
    for (const auto& pr : app.annotation.list_projects(p)) {
      out.push_back(project_json(pr, p.is_admin()));
    }
    send_json(res, 200, out);
  }));

  server.Post("/projects", wrap([&app, admin](const Request& req, Response& res) {
    Principal p = admin(req);
    const json body = body_object(req);
    send_json(res, 201, project_json(app.admin.create_project(p, req_string(body, "name")), true));
  }));

  server.Patch("/projects/:id", wrap([&app, admin](const Request& req, Response& res) {
    Principal p = admin(req);
    const json body = body_object(req);
    Project pr = app.admin.rename_project(p, path_id<ProjectId>(req), req_string(body, "name"));
    send_json(res, 200, project_json(pr, true));
  }));

  server.Delete("/projects/:id", wrap([&app, admin](const Request& req, Response& res) {
    Principal p = admin(req);
    app.admin.delete_project(p, path_id<ProjectId>(req));
    res.status = 204;
  }));

  server.Post("/projects/:id/api_key", wrap([&app, admin](const Request& req, Response& res) {
    Principal p = admin(req);
    send_json(res, 200, project_json(app.admin.regenerate_api_key(p, path_id<ProjectId>(req)), true));
  }));

  server.Get("/projects/:id/users", wrap([&app, admin](const Request& req, Response& res) {
    Principal p = admin(req);
    json out = json::array();
    for (const auto& u : app.admin.list_members(p, path_id<ProjectId>(req))) {
      out.push_back(user_json(u));
    }
    send_json(res, 200, out);
  }));

  server.Post("/projects/:id/users", wrap([&app, admin](const Request& req, Response& res) {
    Principal p = admin(req);
    const ProjectId project = path_id<ProjectId>(req);
    const json body = body_object(req);
    UserId user;
    if (auto id = opt_int(body, "user_id")) {
      user = UserId{*id};
    } else {
      const std::string name = req_string(body, "username");
      auto found = app.store.transact([&](Tx& tx) { return tx.find_user_by_name(name); });
      if (!found) throw Error(ErrorCode::kNotFound, "user not found");
      user = found->id;
    }
    Membership m = app.admin.assign_user_to_project(p, user, project);
    send_json(res, 200, {{"user_id", m.user_id.value}, {"project_id", m.project_id.value}});
  }));

  // ---- labels ----

  server.Get("/projects/:id/labels", wrap([&app, who](const Request& req, Response& res) {
    send_json(res, 200, schema_json(app.annotation.label_schema(who(req), path_id<ProjectId>(req))));
  }));

  server.Post("/projects/:id/labels", wrap([&app, admin](const Request& req, Response& res) {
    Principal p = admin(req);
    const json body = body_object(req);
    auto type = opt_string(body, "type");
    if (!type) type = opt_string(body, "selection_type");
    if (!type) bad_field("type", "single or multi");
    Label l = app.admin.create_label(p, path_id<ProjectId>(req), req_string(body, "name"),
                                     parse_selection_type(*type));
    send_json(res, 201, label_json(l));
  }));

  server.Delete("/labels/:id", wrap([&app, admin](const Request& req, Response& res) {
    Principal p = admin(req);
    app.admin.delete_label(p, path_id<LabelId>(req));
    res.status = 204;
  }));

  server.Post("/labels/:id/values", wrap([&app, admin](const Request& req, Response& res) {
    Principal p = admin(req);
    const json body = body_object(req);
    LabelValue v = app.admin.create_label_value(p, path_id<LabelId>(req), req_string(body, "value"));
    send_json(res, 201, value_json(v));
  }));

  // ---- machine ingestion ----

  server.Post("/api/data", wrap([&app](const Request& req, Response& res) {
    IngestRequest in;
    in.api_key = req.get_header_value("Authorization");
    const bool known = !in.api_key.empty() && app.store.transact([&](Tx& tx) {
      return tx.find_project_by_api_key(in.api_key).has_value();
    });
    if (!known) throw Error(ErrorCode::kBadApiKey, "invalid api key");
    if (!req.is_multipart_form_data()) {
      throw Error(ErrorCode::kBadRequest, "multipart/form-data body required");
    }
    auto part = [&req](const char* name) -> const httplib::MultipartFormData* {
      auto it = req.files.find(name);
      return it == req.files.end() ? nullptr : &it->second;
    };

    const auto* audio = part("audio_file");
    if (!audio) throw Error(ErrorCode::kBadRequest, "audio_file part is required");
    in.audio = audio->content;
    const auto* filename = part("original_filename");
    in.original_filename = filename ? filename->content : audio->filename;
    if (const auto* ref = part("reference_transcription"); ref && !ref->content.empty()) {
      in.reference_transcription = ref->content;
    }
    if (const auto* seg = part("segmentations"); seg && !seg->content.empty()) {
      json j = json::parse(seg->content, nullptr, false);
      if (j.is_discarded()) {
        throw Error(ErrorCode::kBadPreannotation, "segmentations is not valid JSON");
      }
      in.pre_annotations = parse_pre_annotations(j);
    }
    const auto* users = part("assigned_users");
    if (!users) bad_field("assigned_users", "a JSON array of usernames");
    json list = json::parse(users->content, nullptr, false);
    if (!list.is_array()) bad_field("assigned_users", "a JSON array of usernames");
    for (const auto& u : list) {
      if (!u.is_string()) bad_field("assigned_users", "a JSON array of usernames");
      in.assignees.push_back(u.get<std::string>());
    }
    if (const auto* flag = part("is_marked_for_review")) {
      in.marked_for_review = parse_form_bool(flag->content);
    }

    IngestResult result = app.ingestion.ingest(in);
    json assignments = json::array();
    for (const auto& a : result.assignments) assignments.push_back(assignment_json(a));
    send_json(res, 201,
              {{"id", result.datapoint.id.value},
               {"stored_name", result.datapoint.stored_name},
               {"duration_ms", result.datapoint.duration_ms},
               {"format", to_string(result.datapoint.format)},
               {"assignments", assignments}});
  }));

  // ---- annotation ----

  server.Get("/projects/:id/data", wrap([&app, who](const Request& req, Response& res) {
    Principal p = who(req);
    const Category category = parse_category(req.get_param_value("category"));
    auto page_param = [&req](const char* name, std::int64_t fallback) {
      if (!req.has_param(name)) return fallback;
      auto v = parse_int(req.get_param_value(name));
      if (!v) throw Error(ErrorCode::kBadPage, std::string(name) + " must be an integer");
      return *v;
    };
    DataPointPage page =
        app.annotation.list_datapoints(p, path_id<ProjectId>(req), category,
                                       page_param("page", 1),
                                       page_param("page_size", kDefaultPageSize));
    json items = json::array();
    for (const auto& row : page.rows) {
      items.push_back({{"datapoint", datapoint_json(row.datapoint)},
                       {"assignment", assignment_json(row.assignment)}});
    }
    send_json(res, 200,
              {{"items", items},
               {"total", page.total},
               {"page", page.page},
               {"page_size", page.page_size},
               {"category", to_string(category)}});
  }));

  server.Get("/data/:id", wrap([&app, who](const Request& req, Response& res) {
    DataPointDetail d = app.annotation.get_datapoint(who(req), path_id<DataPointId>(req));
    json segments = json::array();
    for (const auto& s : d.segments) segments.push_back(segment_json(s));
    send_json(res, 200,
              {{"datapoint", datapoint_json(d.datapoint)},
               {"labels", schema_json(d.schema)},
               {"assignment", d.assignment ? assignment_json(*d.assignment) : json(nullptr)},
               {"segments", segments}});
  }));

  server.Patch("/data/:id", wrap([&app, who](const Request& req, Response& res) {
    Principal p = who(req);
    const DataPointId dp = path_id<DataPointId>(req);
    const json body = body_object(req);
    const auto flag = opt_bool(body, "marked_for_review");
    const auto status_text = opt_string(body, "status");
    if (!flag && !status_text) {
      throw Error(ErrorCode::kBadRequest, "marked_for_review or status is required");
    }
    std::optional<Status> status;
    if (status_text) status = parse_status(*status_text);
    std::optional<Assignment> a;
    if (flag) a = app.annotation.set_review_flag(p, dp, *flag);
    if (status) a = app.annotation.set_completion(p, dp, *status);
    send_json(res, 200, assignment_json(*a));
  }));

  server.Post("/data/:id/segments", wrap([&app, who](const Request& req, Response& res) {
    Principal p = who(req);
    const DataPointId dp = path_id<DataPointId>(req);
    const json body = body_object(req);
    SegmentDraft draft;
    draft.start_ms = req_int(body, "start_ms");
    draft.end_ms = req_int(body, "end_ms");
    draft.transcription = opt_string(body, "transcription").value_or("");
    if (const json* s = field(body, "selections")) draft.selections = parse_selections(*s);
    send_json(res, 201, segment_json(app.annotation.create_segment(p, dp, draft)));
  }));

  server.Patch("/segments/:id", wrap([&app, who](const Request& req, Response& res) {
    Principal p = who(req);
    const SegmentId id = path_id<SegmentId>(req);
    const json body = body_object(req);
    SegmentPatch patch;
    patch.start_ms = opt_int(body, "start_ms");
    patch.end_ms = opt_int(body, "end_ms");
    patch.transcription = opt_string(body, "transcription");
    if (const json* s = field(body, "selections")) patch.selections = parse_selections(*s);
    send_json(res, 200, segment_json(app.annotation.update_segment(p, id, patch)));
  }));

  server.Delete("/segments/:id", wrap([&app, who](const Request& req, Response& res) {
    Principal p = who(req);
    app.annotation.delete_segment(p, path_id<SegmentId>(req));
    res.status = 204;
  }));

  // ---- media ----

  server.Get("/audio/:name", wrap([&app, who](const Request& req, Response& res) {
    Principal p = who(req);
    std::optional<std::string> range;
    if (req.has_header("Range")) range = req.get_header_value("Range");
    MediaResponse m = app.media.serve_audio(
        p, req.path_params.at("name"),
        range ? std::optional<std::string_view>(*range) : std::nullopt);
    res.status = m.status;
    res.set_header("Accept-Ranges", "bytes");
    if (m.range) res.set_header("Content-Range", m.content_range());
    res.set_content(std::move(m.body), m.content_type);
  }));

  // ---- export ----

  server.Get("/projects/:id/export", wrap([&app, who](const Request& req, Response& res) {
    const ProjectId project = path_id<ProjectId>(req);
    auto doc = app.exporter.export_project(who(req), project);
    res.status = 200;
    res.set_header("Content-Disposition", "attachment; filename=\"project-" +
                                              std::to_string(project.value) + ".json\"");
    res.set_content(ExportService::render(doc), "application/json");
  }));

  // ---- qa ----

  server.Get("/projects/:id/qa/wer", wrap([&app, admin](const Request& req, Response& res) {
    Principal p = admin(req);
    const ProjectId project = path_id<ProjectId>(req);
    if (!req.has_param("user_a") || !req.has_param("user_b")) {
      throw Error(ErrorCode::kBadRequest, "user_a and user_b are required");
    }
    double threshold = kDefaultWerThreshold;
    if (req.has_param("threshold")) {
      const std::string t = req.get_param_value("threshold");
      char* end = nullptr;
      threshold = std::strtod(t.c_str(), &end);
      if (t.empty() || end != t.c_str() + t.size()) bad_field("threshold", "a number");
    }
    QaReport r = app.qa.report(p, project, req.get_param_value("user_a"),
                               req.get_param_value("user_b"), threshold);
    send_json(res, 200, report_json(r));
  }));

  server.Post("/projects/:id/qa/plan", wrap([&app, admin](const Request& req, Response& res) {
    Principal p = admin(req);
    const ProjectId project = path_id<ProjectId>(req);
    const json body = body_object(req);
    const json* annotators = field(body, "annotators");
    if (!annotators || !annotators->is_array() || annotators->size() != 2 ||
        !(*annotators)[0].is_string() || !(*annotators)[1].is_string() ||
        (*annotators)[0] == (*annotators)[1]) {
      bad_field("annotators", "two distinct usernames");
    }
    const json* fraction = field(body, "overlap_fraction");
    if (!fraction || !fraction->is_number()) bad_field("overlap_fraction", "a number");
    const json* seed = field(body, "seed");
    if (seed && !seed->is_number_unsigned()) bad_field("seed", "a non-negative integer");
    std::vector<std::int64_t> items;
    if (const json* ids = field(body, "datapoint_ids")) {
      if (!ids->is_array()) bad_field("datapoint_ids", "an array of ids");
      for (const auto& id : *ids) {
        if (!id.is_number_integer()) bad_field("datapoint_ids", "an array of ids");
        items.push_back(id.get<std::int64_t>());
      }
      if (items.empty()) throw Error(ErrorCode::kBadRequest, "datapoint_ids is empty");
    }
    OverlapPlan plan = app.qa.plan(p, project, std::move(items), fraction->get<double>(),
                                   seed ? seed->get<std::uint64_t>() : 0);
    send_json(res, 200,
              {{"annotators", *annotators},
               {"shared", plan.shared},
               {"a_only", plan.a_only},
               {"b_only", plan.b_only}});
  }));

  if (options.static_dir) server.set_mount_point("/", options.static_dir->string());
}

}  // namespace earmark
