#include "earmark/store.hpp"

#include "earmark/error.hpp"

#include <sodium.h>

#include <array>

namespace earmark {

namespace {

constexpr std::string_view kSchema = R"sql(
CREATE TABLE IF NOT EXISTS users (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  username TEXT NOT NULL UNIQUE,
  credential_digest TEXT NOT NULL,
  role TEXT NOT NULL CHECK (role IN ('admin', 'annotator')),
  created_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS projects (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  name TEXT NOT NULL UNIQUE,
  api_key TEXT NOT NULL UNIQUE,
  created_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS memberships (
  user_id INTEGER NOT NULL REFERENCES users(id) ON DELETE CASCADE,
  project_id INTEGER NOT NULL REFERENCES projects(id) ON DELETE CASCADE,
  PRIMARY KEY (user_id, project_id)
);
CREATE TABLE IF NOT EXISTS labels (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  project_id INTEGER NOT NULL REFERENCES projects(id) ON DELETE CASCADE,
  name TEXT NOT NULL,
  selection_type TEXT NOT NULL CHECK (selection_type IN ('single', 'multi')),
  UNIQUE (project_id, name)
);
CREATE TABLE IF NOT EXISTS label_values (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  label_id INTEGER NOT NULL REFERENCES labels(id) ON DELETE CASCADE,
  value TEXT NOT NULL,
  UNIQUE (label_id, value)
);
CREATE TABLE IF NOT EXISTS datapoints (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  project_id INTEGER NOT NULL REFERENCES projects(id) ON DELETE CASCADE,
  original_filename TEXT NOT NULL,
  stored_name TEXT NOT NULL UNIQUE,
  format TEXT NOT NULL CHECK (format IN ('wav', 'mp3', 'ogg')),
  duration_ms INTEGER NOT NULL CHECK (duration_ms > 0),
  reference_transcription TEXT,
  created_at INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS datapoints_by_project ON datapoints(project_id, created_at, id);
CREATE TABLE IF NOT EXISTS assignments (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  datapoint_id INTEGER NOT NULL REFERENCES datapoints(id) ON DELETE CASCADE,
  user_id INTEGER NOT NULL REFERENCES users(id),
  status TEXT NOT NULL CHECK (status IN ('pending', 'completed')),
  marked_for_review INTEGER NOT NULL,
  updated_at INTEGER NOT NULL,
  UNIQUE (datapoint_id, user_id)
);
CREATE INDEX IF NOT EXISTS assignments_by_user ON assignments(user_id);
CREATE TABLE IF NOT EXISTS segments (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  assignment_id INTEGER NOT NULL REFERENCES assignments(id) ON DELETE CASCADE,
  start_ms INTEGER NOT NULL,
  end_ms INTEGER NOT NULL,
  transcription TEXT NOT NULL,
  created_at INTEGER NOT NULL,
  updated_at INTEGER NOT NULL,
  CHECK (0 <= start_ms AND start_ms < end_ms)
);
CREATE INDEX IF NOT EXISTS segments_by_assignment ON segments(assignment_id, start_ms, end_ms, id);
CREATE TABLE IF NOT EXISTS segment_values (
  segment_id INTEGER NOT NULL REFERENCES segments(id) ON DELETE CASCADE,
  label_id INTEGER NOT NULL REFERENCES labels(id),
  value_id INTEGER NOT NULL REFERENCES label_values(id),
  PRIMARY KEY (segment_id, value_id)
);
CREATE INDEX IF NOT EXISTS segment_values_by_label ON segment_values(label_id);
CREATE INDEX IF NOT EXISTS segment_values_by_value ON segment_values(value_id);
)sql";

// Tables in digest order.
constexpr std::array<std::string_view, 9> kTables = {
    "users",       "projects", "memberships", "labels",        "label_values",
    "datapoints", "assignments", "segments",  "segment_values"};

User read_user(const sql::Statement& s) {
  return User{UserId{s.int64(0)}, s.text(1), s.text(2), parse_role(s.text(3)),
              from_epoch_ms(s.int64(4))};
}
constexpr std::string_view kUserCols =
    "id, username, credential_digest, role, created_at";

Project read_project(const sql::Statement& s) {
  return Project{ProjectId{s.int64(0)}, s.text(1), s.text(2),
                 from_epoch_ms(s.int64(3))};
}
constexpr std::string_view kProjectCols = "id, name, api_key, created_at";

DataPoint read_datapoint(const sql::Statement& s, int off = 0) {
  DataPoint dp;
  dp.id = DataPointId{s.int64(off + 0)};
  dp.project_id = ProjectId{s.int64(off + 1)};
  dp.original_filename = s.text(off + 2);
  dp.stored_name = s.text(off + 3);
  dp.format = parse_audio_format(s.text(off + 4));
  dp.duration_ms = s.int64(off + 5);
  dp.reference_transcription = s.optional_text(off + 6);
  dp.created_at = from_epoch_ms(s.int64(off + 7));
  return dp;
}
constexpr std::string_view kDataPointCols =
    "d.id, d.project_id, d.original_filename, d.stored_name, d.format, "
    "d.duration_ms, d.reference_transcription, d.created_at";

Assignment read_assignment(const sql::Statement& s, int off = 0) {
  return Assignment{AssignmentId{s.int64(off + 0)},
                    DataPointId{s.int64(off + 1)},
                    UserId{s.int64(off + 2)},
                    parse_status(s.text(off + 3)),
                    s.int64(off + 4) != 0,
                    from_epoch_ms(s.int64(off + 5))};
}
constexpr std::string_view kAssignmentCols =
    "a.id, a.datapoint_id, a.user_id, a.status, a.marked_for_review, "
    "a.updated_at";

constexpr std::string_view kSegmentCols =
    "id, assignment_id, start_ms, end_ms, transcription, created_at, "
    "updated_at";

std::string cat(std::initializer_list<std::string_view> parts) {
  std::string out;
  for (auto p : parts) out += p;
  return out;
}

}  // namespace

Category parse_category(std::string_view s) {
  if (s.empty() || s == "all") return Category::kAll;
  if (s == "pending") return Category::kPending;
  if (s == "completed") return Category::kCompleted;
  if (s == "marked_review") return Category::kMarkedReview;
  throw Error(ErrorCode::kBadRequest,
              "category must be all, pending, completed or marked_review");
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::kAll: return "all";
    case Category::kPending: return "pending";
    case Category::kCompleted: return "completed";
    case Category::kMarkedReview: return "marked_review";
  }
  return "all";
}

Store::Store(const std::string& path) : db_(path), tx_(db_) {
  if (sodium_init() < 0) throw Error(ErrorCode::kInternal, "libsodium init failed");
  db_.exec("PRAGMA foreign_keys = ON");
  if (path != ":memory:" && !path.empty()) db_.exec("PRAGMA journal_mode = WAL");
  db_.exec(kSchema);
}

// ---- users ---------------------------------------------------------------

UserId Tx::insert_user(const std::string& username, const std::string& digest,
                       Role role, Timestamp created_at) {
  db_.prepare(
         "INSERT INTO users (username, credential_digest, role, created_at) "
         "VALUES (?, ?, ?, ?)")
      .bind(1, username)
      .bind(2, digest)
      .bind(3, to_string(role))
      .bind(4, to_epoch_ms(created_at))
      .run();
  return UserId{db_.last_insert_id()};
}

std::optional<User> Tx::find_user(UserId id) {
  auto s = db_.prepare(cat({"SELECT ", kUserCols, " FROM users WHERE id = ?"}));
  s.bind(1, id.value);
  if (!s.step()) return std::nullopt;
  return read_user(s);
}

std::optional<User> Tx::find_user_by_name(const std::string& username) {
  auto s = db_.prepare(
      cat({"SELECT ", kUserCols, " FROM users WHERE username = ?"}));
  s.bind(1, username);
  if (!s.step()) return std::nullopt;
  return read_user(s);
}

std::vector<User> Tx::list_users() {
  auto s = db_.prepare(cat({"SELECT ", kUserCols, " FROM users ORDER BY id"}));
  std::vector<User> out;
  while (s.step()) out.push_back(read_user(s));
  return out;
}

void Tx::set_user_role(UserId id, Role role) {
  db_.prepare("UPDATE users SET role = ? WHERE id = ?")
      .bind(1, to_string(role))
      .bind(2, id.value)
      .run();
}

std::int64_t Tx::count_users() {
  auto s = db_.prepare("SELECT COUNT(*) FROM users");
  s.step();
  return s.int64(0);
}

std::int64_t Tx::count_admins() {
  auto s = db_.prepare("SELECT COUNT(*) FROM users WHERE role = 'admin'");
  s.step();
  return s.int64(0);
}

void Tx::delete_user(UserId id) {
  db_.prepare("DELETE FROM users WHERE id = ?").bind(1, id.value).run();
}

// ---- projects ------------------------------------------------------------

ProjectId Tx::insert_project(const std::string& name, const std::string& api_key,
                             Timestamp created_at) {
  db_.prepare("INSERT INTO projects (name, api_key, created_at) VALUES (?, ?, ?)")
      .bind(1, name)
      .bind(2, api_key)
      .bind(3, to_epoch_ms(created_at))
      .run();
  return ProjectId{db_.last_insert_id()};
}

std::optional<Project> Tx::find_project(ProjectId id) {
  auto s = db_.prepare(
      cat({"SELECT ", kProjectCols, " FROM projects WHERE id = ?"}));
  s.bind(1, id.value);
  if (!s.step()) return std::nullopt;
  return read_project(s);
}

std::optional<Project> Tx::find_project_by_api_key(const std::string& api_key) {
  auto s = db_.prepare(
      cat({"SELECT ", kProjectCols, " FROM projects WHERE api_key = ?"}));
  s.bind(1, api_key);
  if (!s.step()) return std::nullopt;
  return read_project(s);
}

std::vector<Project> Tx::list_projects() {
  auto s = db_.prepare(
      cat({"SELECT ", kProjectCols, " FROM projects ORDER BY id"}));
  std::vector<Project> out;
  while (s.step()) out.push_back(read_project(s));
  return out;
}

std::vector<Project> Tx::list_projects_for(UserId user) {
  auto s = db_.prepare(
      "SELECT p.id, p.name, p.api_key, p.created_at FROM projects p "
      "JOIN memberships m ON m.project_id = p.id WHERE m.user_id = ? "
      "ORDER BY p.id");
  s.bind(1, user.value);
  std::vector<Project> out;
  while (s.step()) out.push_back(read_project(s));
  return out;
}

void Tx::rename_project(ProjectId id, const std::string& name) {
  db_.prepare("UPDATE projects SET name = ? WHERE id = ?")
      .bind(1, name)
      .bind(2, id.value)
      .run();
}

void Tx::set_api_key(ProjectId id, const std::string& api_key) {
  db_.prepare("UPDATE projects SET api_key = ? WHERE id = ?")
      .bind(1, api_key)
      .bind(2, id.value)
      .run();
}

std::vector<std::string> Tx::delete_project(ProjectId id) {
  std::vector<std::string> names;
  {
    auto s = db_.prepare("SELECT stored_name FROM datapoints WHERE project_id = ?");
    s.bind(1, id.value);
    while (s.step()) names.push_back(s.text(0));
  }
  db_.prepare("DELETE FROM projects WHERE id = ?").bind(1, id.value).run();
  return names;
}

// ---- memberships ---------------------------------------------------------

bool Tx::insert_membership(UserId user, ProjectId project) {
  db_.prepare(
         "INSERT OR IGNORE INTO memberships (user_id, project_id) VALUES (?, ?)")
      .bind(1, user.value)
      .bind(2, project.value)
      .run();
  return db_.changes() > 0;
}

bool Tx::is_member(UserId user, ProjectId project) {
  auto s = db_.prepare(
      "SELECT 1 FROM memberships WHERE user_id = ? AND project_id = ?");
  s.bind(1, user.value).bind(2, project.value);
  return s.step();
}

std::vector<User> Tx::list_members(ProjectId project) {
  auto s = db_.prepare(
      "SELECT u.id, u.username, u.credential_digest, u.role, u.created_at "
      "FROM users u JOIN memberships m ON m.user_id = u.id "
      "WHERE m.project_id = ? ORDER BY u.id");
  s.bind(1, project.value);
  std::vector<User> out;
  while (s.step()) out.push_back(read_user(s));
  return out;
}

// ---- labels --------------------------------------------------------------

LabelId Tx::insert_label(ProjectId project, const std::string& name,
                         SelectionType type) {
  db_.prepare(
         "INSERT INTO labels (project_id, name, selection_type) VALUES (?, ?, ?)")
      .bind(1, project.value)
      .bind(2, name)
      .bind(3, to_string(type))
      .run();
  return LabelId{db_.last_insert_id()};
}

std::optional<Label> Tx::find_label(LabelId id) {
  auto s = db_.prepare(
      "SELECT id, project_id, name, selection_type FROM labels WHERE id = ?");
  s.bind(1, id.value);
  if (!s.step()) return std::nullopt;
  Label label{LabelId{s.int64(0)}, ProjectId{s.int64(1)}, s.text(2),
              parse_selection_type(s.text(3)), {}};
  auto v = db_.prepare(
      "SELECT id, label_id, value FROM label_values WHERE label_id = ? "
      "ORDER BY id");
  v.bind(1, id.value);
  while (v.step()) {
    label.values.push_back(
        LabelValue{LabelValueId{v.int64(0)}, LabelId{v.int64(1)}, v.text(2)});
  }
  return label;
}

LabelValueId Tx::insert_label_value(LabelId label, const std::string& value) {
  db_.prepare("INSERT INTO label_values (label_id, value) VALUES (?, ?)")
      .bind(1, label.value)
      .bind(2, value)
      .run();
  return LabelValueId{db_.last_insert_id()};
}

LabelSchema Tx::load_schema(ProjectId project) {
  LabelSchema schema;
  auto s = db_.prepare(
      "SELECT id, project_id, name, selection_type FROM labels "
      "WHERE project_id = ? ORDER BY id");
  s.bind(1, project.value);
  while (s.step()) {
    schema.labels.push_back(Label{LabelId{s.int64(0)}, ProjectId{s.int64(1)},
                                  s.text(2), parse_selection_type(s.text(3)),
                                  {}});
  }
  auto v = db_.prepare(
      "SELECT v.id, v.label_id, v.value FROM label_values v "
      "JOIN labels l ON l.id = v.label_id WHERE l.project_id = ? "
      "ORDER BY v.id");
  v.bind(1, project.value);
  while (v.step()) {
    LabelValue lv{LabelValueId{v.int64(0)}, LabelId{v.int64(1)}, v.text(2)};
    for (auto& label : schema.labels) {
      if (label.id == lv.label_id) label.values.push_back(lv);
    }
  }
  return schema;
}

bool Tx::label_in_use(LabelId id) {
  auto s = db_.prepare("SELECT 1 FROM segment_values WHERE label_id = ? LIMIT 1");
  s.bind(1, id.value);
  return s.step();
}

void Tx::delete_label(LabelId id) {
  db_.prepare("DELETE FROM labels WHERE id = ?").bind(1, id.value).run();
}

// ---- datapoints ----------------------------------------------------------

DataPointId Tx::insert_datapoint(const DataPoint& dp) {
  db_.prepare(
         "INSERT INTO datapoints (project_id, original_filename, stored_name, "
         "format, duration_ms, reference_transcription, created_at) "
         "VALUES (?, ?, ?, ?, ?, ?, ?)")
      .bind(1, dp.project_id.value)
      .bind(2, dp.original_filename)
      .bind(3, dp.stored_name)
      .bind(4, to_string(dp.format))
      .bind(5, dp.duration_ms)
      .bind(6, dp.reference_transcription)
      .bind(7, to_epoch_ms(dp.created_at))
      .run();
  return DataPointId{db_.last_insert_id()};
}

std::optional<DataPoint> Tx::find_datapoint(DataPointId id) {
  auto s = db_.prepare(
      cat({"SELECT ", kDataPointCols, " FROM datapoints d WHERE d.id = ?"}));
  s.bind(1, id.value);
  if (!s.step()) return std::nullopt;
  return read_datapoint(s);
}

std::optional<DataPoint> Tx::find_datapoint_by_stored_name(
    const std::string& name) {
  auto s = db_.prepare(cat(
      {"SELECT ", kDataPointCols, " FROM datapoints d WHERE d.stored_name = ?"}));
  s.bind(1, name);
  if (!s.step()) return std::nullopt;
  return read_datapoint(s);
}

std::vector<DataPoint> Tx::list_datapoints(ProjectId project) {
  auto s = db_.prepare(cat({"SELECT ", kDataPointCols,
                            " FROM datapoints d WHERE d.project_id = ? "
                            "ORDER BY d.created_at, d.id"}));
  s.bind(1, project.value);
  std::vector<DataPoint> out;
  while (s.step()) out.push_back(read_datapoint(s));
  return out;
}

bool Tx::stored_name_exists(const std::string& name) {
  auto s = db_.prepare("SELECT 1 FROM datapoints WHERE stored_name = ?");
  s.bind(1, name);
  return s.step();
}

std::vector<std::string> Tx::list_stored_names() {
  auto s = db_.prepare("SELECT stored_name FROM datapoints ORDER BY stored_name");
  std::vector<std::string> out;
  while (s.step()) out.push_back(s.text(0));
  return out;
}

// ---- assignments ---------------------------------------------------------

AssignmentId Tx::insert_assignment(DataPointId dp, UserId user, Status status,
                                   bool marked_for_review, Timestamp updated_at) {
  db_.prepare(
         "INSERT INTO assignments (datapoint_id, user_id, status, "
         "marked_for_review, updated_at) VALUES (?, ?, ?, ?, ?)")
      .bind(1, dp.value)
      .bind(2, user.value)
      .bind(3, to_string(status))
      .bind(4, std::int64_t{marked_for_review ? 1 : 0})
      .bind(5, to_epoch_ms(updated_at))
      .run();
  return AssignmentId{db_.last_insert_id()};
}

std::optional<Assignment> Tx::find_assignment(DataPointId dp, UserId user) {
  auto s = db_.prepare(cat({"SELECT ", kAssignmentCols,
                            " FROM assignments a WHERE a.datapoint_id = ? "
                            "AND a.user_id = ?"}));
  s.bind(1, dp.value).bind(2, user.value);
  if (!s.step()) return std::nullopt;
  return read_assignment(s);
}

std::optional<Assignment> Tx::find_assignment(AssignmentId id) {
  auto s = db_.prepare(
      cat({"SELECT ", kAssignmentCols, " FROM assignments a WHERE a.id = ?"}));
  s.bind(1, id.value);
  if (!s.step()) return std::nullopt;
  return read_assignment(s);
}

std::vector<Assignment> Tx::list_assignments(DataPointId dp) {
  auto s = db_.prepare(cat({"SELECT ", kAssignmentCols,
                            " FROM assignments a WHERE a.datapoint_id = ? "
                            "ORDER BY a.id"}));
  s.bind(1, dp.value);
  std::vector<Assignment> out;
  while (s.step()) out.push_back(read_assignment(s));
  return out;
}

void Tx::update_assignment(const Assignment& a) {
  db_.prepare(
         "UPDATE assignments SET status = ?, marked_for_review = ?, "
         "updated_at = ? WHERE id = ?")
      .bind(1, to_string(a.status))
      .bind(2, std::int64_t{a.marked_for_review ? 1 : 0})
      .bind(3, to_epoch_ms(a.updated_at))
      .bind(4, a.id.value)
      .run();
}

AssignmentPage Tx::list_user_assignments(ProjectId project, UserId user,
                                         Category category, std::int64_t offset,
                                         std::int64_t limit) {
  std::string filter;
  switch (category) {
    case Category::kAll: break;
    case Category::kPending: filter = " AND a.status = 'pending'"; break;
    case Category::kCompleted: filter = " AND a.status = 'completed'"; break;
    case Category::kMarkedReview: filter = " AND a.marked_for_review = 1"; break;
  }
  const std::string from =
      " FROM assignments a JOIN datapoints d ON d.id = a.datapoint_id "
      "WHERE d.project_id = ? AND a.user_id = ?" +
      filter;

  AssignmentPage page;
  {
    auto s = db_.prepare("SELECT COUNT(*)" + from);
    s.bind(1, project.value).bind(2, user.value);
    s.step();
    page.total = s.int64(0);
  }
  auto s = db_.prepare(cat({"SELECT ", kAssignmentCols, ", ", kDataPointCols,
                            from, " ORDER BY d.created_at, d.id LIMIT ? OFFSET ?"}));
  s.bind(1, project.value).bind(2, user.value).bind(3, limit).bind(4, offset);
  while (s.step()) {
    page.rows.push_back(AssignmentRow{read_assignment(s, 0), read_datapoint(s, 6)});
  }
  return page;
}

// ---- segments ------------------------------------------------------------

SegmentId Tx::insert_segment(AssignmentId assignment, const SegmentDraft& draft,
                             Timestamp now) {
  db_.prepare(
         "INSERT INTO segments (assignment_id, start_ms, end_ms, transcription, "
         "created_at, updated_at) VALUES (?, ?, ?, ?, ?, ?)")
      .bind(1, assignment.value)
      .bind(2, draft.start_ms)
      .bind(3, draft.end_ms)
      .bind(4, draft.transcription)
      .bind(5, to_epoch_ms(now))
      .bind(6, to_epoch_ms(now))
      .run();
  SegmentId id{db_.last_insert_id()};
  write_selections(id, draft.selections);
  return id;
}

void Tx::write_selections(SegmentId id, const Selections& selections) {
  auto s = db_.prepare(
      "INSERT INTO segment_values (segment_id, label_id, value_id) "
      "VALUES (?, ?, ?)");
  for (const auto& [label, values] : selections) {
    for (LabelValueId v : values) {
      s.reset().bind(1, id.value).bind(2, label.value).bind(3, v.value).run();
    }
  }
}

Selections Tx::read_selections(SegmentId id) {
  auto s = db_.prepare(
      "SELECT label_id, value_id FROM segment_values WHERE segment_id = ?");
  s.bind(1, id.value);
  Selections out;
  while (s.step()) out[LabelId{s.int64(0)}].insert(LabelValueId{s.int64(1)});
  return out;
}

std::optional<Segment> Tx::find_segment(SegmentId id) {
  auto s = db_.prepare(cat({"SELECT ", kSegmentCols, " FROM segments WHERE id = ?"}));
  s.bind(1, id.value);
  if (!s.step()) return std::nullopt;
  Segment seg{SegmentId{s.int64(0)}, AssignmentId{s.int64(1)}, s.int64(2),
              s.int64(3), s.text(4), {}, from_epoch_ms(s.int64(5)),
              from_epoch_ms(s.int64(6))};
  seg.selections = read_selections(seg.id);
  return seg;
}

std::vector<Segment> Tx::list_segments(AssignmentId assignment) {
  auto s = db_.prepare(cat({"SELECT ", kSegmentCols,
                            " FROM segments WHERE assignment_id = ? "
                            "ORDER BY start_ms, end_ms, id"}));
  s.bind(1, assignment.value);
  std::vector<Segment> out;
  while (s.step()) {
    out.push_back(Segment{SegmentId{s.int64(0)}, AssignmentId{s.int64(1)},
                          s.int64(2), s.int64(3), s.text(4), {},
                          from_epoch_ms(s.int64(5)), from_epoch_ms(s.int64(6))});
  }
  for (auto& seg : out) seg.selections = read_selections(seg.id);
  return out;
}

void Tx::update_segment(SegmentId id, const SegmentDraft& draft, Timestamp now) {
  db_.prepare(
         "UPDATE segments SET start_ms = ?, end_ms = ?, transcription = ?, "
         "updated_at = ? WHERE id = ?")
      .bind(1, draft.start_ms)
      .bind(2, draft.end_ms)
      .bind(3, draft.transcription)
      .bind(4, to_epoch_ms(now))
      .bind(5, id.value)
      .run();
  db_.prepare("DELETE FROM segment_values WHERE segment_id = ?")
      .bind(1, id.value)
      .run();
  write_selections(id, draft.selections);
}

bool Tx::delete_segment(SegmentId id) {
  db_.prepare("DELETE FROM segments WHERE id = ?").bind(1, id.value).run();
  return db_.changes() > 0;
}

// ---- digest --------------------------------------------------------------

std::string Tx::digest() {
  crypto_hash_sha256_state state;
  crypto_hash_sha256_init(&state);
  auto feed = [&](std::string_view bytes) {
    crypto_hash_sha256_update(
        &state, reinterpret_cast<const unsigned char*>(bytes.data()),
        bytes.size());
  };
  for (auto table : kTables) {
    feed(table);
    feed(std::string_view("\x1e", 1));
    auto s = db_.prepare(cat({"SELECT * FROM ", table, " ORDER BY rowid"}));
    while (s.step()) {
      for (int c = 0; c < s.column_count(); ++c) {
        if (s.is_null(c)) {
          feed("N");
        } else {
          std::string v = s.text(c);
          feed(std::to_string(v.size()));
          feed(":");
          feed(v);
        }
        feed(std::string_view("\x1f", 1));
      }
      feed(std::string_view("\x1d", 1));
    }
  }
  std::array<unsigned char, crypto_hash_sha256_BYTES> out{};
  crypto_hash_sha256_final(&state, out.data());
  std::string hex(out.size() * 2 + 1, '\0');
  sodium_bin2hex(hex.data(), hex.size(), out.data(), out.size());
  hex.pop_back();
  return hex;
}

}  // namespace earmark
