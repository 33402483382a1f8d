#pragma once

#include "earmark/domain.hpp"
#include "earmark/sqlite.hpp"

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

namespace earmark {

enum class Category { kAll, kPending, kCompleted, kMarkedReview };

Category parse_category(std::string_view s);
std::string_view to_string(Category c);

struct AssignmentRow {
  Assignment assignment;
  DataPoint datapoint;
};

struct AssignmentPage {
  std::vector<AssignmentRow> rows;
  std::int64_t total = 0;
};

/// Typed access to the entity tables. Only reachable inside Store::transact,
/// so every call runs under the caller's transaction.
class Tx {
 public:
  explicit Tx(sql::Database& db) : db_(db) {}

  // users
  UserId insert_user(const std::string& username, const std::string& digest,
                     Role role, Timestamp created_at);
  std::optional<User> find_user(UserId id);
  std::optional<User> find_user_by_name(const std::string& username);
  std::vector<User> list_users();
  void set_user_role(UserId id, Role role);
  std::int64_t count_users();
  std::int64_t count_admins();
  void delete_user(UserId id);  // kInUse while assignments reference it

  // projects
  ProjectId insert_project(const std::string& name, const std::string& api_key,
                           Timestamp created_at);
  std::optional<Project> find_project(ProjectId id);
  std::optional<Project> find_project_by_api_key(const std::string& api_key);
  std::vector<Project> list_projects();
  std::vector<Project> list_projects_for(UserId user);
  void rename_project(ProjectId id, const std::string& name);
  void set_api_key(ProjectId id, const std::string& api_key);
  /// Cascades to everything the project owns. Returns the stored names of the
  /// removed datapoints so the caller can drop their blobs after commit.
  std::vector<std::string> delete_project(ProjectId id);

  // memberships
  bool insert_membership(UserId user, ProjectId project);  // false if present
  bool is_member(UserId user, ProjectId project);
  std::vector<User> list_members(ProjectId project);

  // labels
  LabelId insert_label(ProjectId project, const std::string& name,
                       SelectionType type);
  std::optional<Label> find_label(LabelId id);
  LabelValueId insert_label_value(LabelId label, const std::string& value);
  LabelSchema load_schema(ProjectId project);
  bool label_in_use(LabelId id);
  void delete_label(LabelId id);

  // datapoints
  DataPointId insert_datapoint(const DataPoint& dp);
  std::optional<DataPoint> find_datapoint(DataPointId id);
  std::optional<DataPoint> find_datapoint_by_stored_name(const std::string& name);
  std::vector<DataPoint> list_datapoints(ProjectId project);
  bool stored_name_exists(const std::string& name);
  std::vector<std::string> list_stored_names();

  // assignments
  AssignmentId insert_assignment(DataPointId dp, UserId user, Status status,
                                 bool marked_for_review, Timestamp updated_at);
  std::optional<Assignment> find_assignment(DataPointId dp, UserId user);
  std::optional<Assignment> find_assignment(AssignmentId id);
  std::vector<Assignment> list_assignments(DataPointId dp);
  void update_assignment(const Assignment& a);
  AssignmentPage list_user_assignments(ProjectId project, UserId user,
                                       Category category, std::int64_t offset,
                                       std::int64_t limit);

  // segments
  SegmentId insert_segment(AssignmentId assignment, const SegmentDraft& draft,
                           Timestamp now);
  std::optional<Segment> find_segment(SegmentId id);
  /// Ordered by (start_ms, end_ms, id).
  std::vector<Segment> list_segments(AssignmentId assignment);
  void update_segment(SegmentId id, const SegmentDraft& draft, Timestamp now);
  bool delete_segment(SegmentId id);

  /// SHA-256 over every entity row in a fixed order, hex encoded.
  std::string digest();

 private:
  void write_selections(SegmentId id, const Selections& selections);
  Selections read_selections(SegmentId id);

  sql::Database& db_;
};

/// Owns the database connection and serializes transactions. Nested calls on
/// the same thread join the outer transaction.
class Store {
 public:
  explicit Store(const std::string& path);

  template <class F>
  auto transact(F&& fn) {
    if (owner_ == std::this_thread::get_id()) return fn(tx_);
    std::lock_guard<std::mutex> lock(mu_);
    Owner owner(*this);
    db_.exec("BEGIN IMMEDIATE");
    try {
      if constexpr (std::is_void_v<decltype(fn(tx_))>) {
        fn(tx_);
        db_.exec("COMMIT");
      } else {
        auto result = fn(tx_);
        db_.exec("COMMIT");
        return result;
      }
    } catch (...) {
      db_.exec("ROLLBACK");
      throw;
    }
  }

  std::string digest() {
    return transact([](Tx& tx) { return tx.digest(); });
  }

 private:
  struct Owner {
    explicit Owner(Store& s) : store(s) { store.owner_ = std::this_thread::get_id(); }
    ~Owner() { store.owner_ = std::thread::id(); }
    Store& store;
  };

  std::mutex mu_;
  sql::Database db_;
  Tx tx_;
  std::atomic<std::thread::id> owner_{};
};

}  // namespace earmark
