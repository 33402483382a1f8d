#include "earmark/admin.hpp"

#include "earmark/crypto.hpp"
#include "earmark/error.hpp"
#include "earmark/text.hpp"

namespace earmark {

namespace {

std::string required_text(const std::string& raw, const char* what) {
  std::string s = text::normalize(raw);
  if (s.empty()) throw Error(ErrorCode::kBadRequest, std::string(what) + " is empty");
  return s;
}

}  // namespace

std::string generate_api_key() { return crypto::random_hex(32); }

User AdminService::create_user(const Principal& caller,
                               const std::string& username,
                               const std::string& password, Role role) {
  auth_.authorize(caller, RequireAdmin{});
  const std::string name = required_text(username, "username");
  const std::string digest = auth_.make_credential(password);
  return store_.transact([&](Tx& tx) {
    UserId id = tx.insert_user(name, digest, role, auth_.clock().now());
    return *tx.find_user(id);
  });
}

std::vector<User> AdminService::list_users(const Principal& caller) {
  auth_.authorize(caller, RequireAdmin{});
  return store_.transact([](Tx& tx) { return tx.list_users(); });
}

User AdminService::update_user_role(const Principal& caller, UserId user,
                                    Role role) {
  auth_.authorize(caller, RequireAdmin{});
  return store_.transact([&](Tx& tx) {
    auto target = tx.find_user(user);
    if (!target) throw Error(ErrorCode::kNotFound, "user not found");
    if (target->role == Role::kAdmin && role != Role::kAdmin &&
        tx.count_admins() <= 1) {
      throw Error(ErrorCode::kLastAdmin, "cannot demote the last admin");
    }
    tx.set_user_role(user, role);
    return *tx.find_user(user);
  });
}

void AdminService::delete_user(const Principal& caller, UserId user) {
  auth_.authorize(caller, RequireAdmin{});
  store_.transact([&](Tx& tx) {
    auto target = tx.find_user(user);
    if (!target) throw Error(ErrorCode::kNotFound, "user not found");
    if (target->role == Role::kAdmin && tx.count_admins() <= 1) {
      throw Error(ErrorCode::kLastAdmin, "cannot delete the last admin");
    }
    tx.delete_user(user);
  });
  auth_.sessions().remove_user(user);
}

Project AdminService::create_project(const Principal& caller,
                                     const std::string& name) {
  auth_.authorize(caller, RequireAdmin{});
  const std::string normalized = required_text(name, "project name");
  return store_.transact([&](Tx& tx) {
    ProjectId id =
        tx.insert_project(normalized, generate_api_key(), auth_.clock().now());
    return *tx.find_project(id);
  });
}

Project AdminService::rename_project(const Principal& caller, ProjectId project,
                                     const std::string& name) {
  auth_.authorize(caller, RequireAdmin{});
  const std::string normalized = required_text(name, "project name");
  return store_.transact([&](Tx& tx) {
    if (!tx.find_project(project)) throw Error(ErrorCode::kNotFound, "project not found");
    tx.rename_project(project, normalized);
    return *tx.find_project(project);
  });
}

void AdminService::delete_project(const Principal& caller, ProjectId project) {
  auth_.authorize(caller, RequireAdmin{});
  auto stored_names = store_.transact([&](Tx& tx) {
    if (!tx.find_project(project)) throw Error(ErrorCode::kNotFound, "project not found");
    return tx.delete_project(project);
  });
  for (const auto& name : stored_names) blobs_.remove(name);
}

Project AdminService::regenerate_api_key(const Principal& caller,
                                         ProjectId project) {
  auth_.authorize(caller, RequireAdmin{});
  return store_.transact([&](Tx& tx) {
    if (!tx.find_project(project)) throw Error(ErrorCode::kNotFound, "project not found");
    tx.set_api_key(project, generate_api_key());
    return *tx.find_project(project);
  });
}

Membership AdminService::assign_user_to_project(const Principal& caller,
                                                UserId user, ProjectId project) {
  auth_.authorize(caller, RequireAdmin{});
  return store_.transact([&](Tx& tx) {
    if (!tx.find_user(user)) throw Error(ErrorCode::kNotFound, "user not found");
    if (!tx.find_project(project)) throw Error(ErrorCode::kNotFound, "project not found");
    tx.insert_membership(user, project);
    return Membership{user, project};
  });
}

std::vector<User> AdminService::list_members(const Principal& caller,
                                             ProjectId project) {
  auth_.authorize(caller, RequireAdmin{});
  return store_.transact([&](Tx& tx) {
    if (!tx.find_project(project)) throw Error(ErrorCode::kNotFound, "project not found");
    return tx.list_members(project);
  });
}

Label AdminService::create_label(const Principal& caller, ProjectId project,
                                 const std::string& name, SelectionType type) {
  auth_.authorize(caller, RequireAdmin{});
  const std::string normalized = required_text(name, "label name");
  return store_.transact([&](Tx& tx) {
    if (!tx.find_project(project)) throw Error(ErrorCode::kNotFound, "project not found");
    LabelId id = tx.insert_label(project, normalized, type);
    return *tx.find_label(id);
  });
}

LabelValue AdminService::create_label_value(const Principal& caller,
                                            LabelId label,
                                            const std::string& value) {
  auth_.authorize(caller, RequireAdmin{});
  const std::string normalized = required_text(value, "label value");
  return store_.transact([&](Tx& tx) {
    if (!tx.find_label(label)) throw Error(ErrorCode::kNotFound, "label not found");
    LabelValueId id = tx.insert_label_value(label, normalized);
    return LabelValue{id, label, normalized};
  });
}

void AdminService::delete_label(const Principal& caller, LabelId label) {
  auth_.authorize(caller, RequireAdmin{});
  store_.transact([&](Tx& tx) {
    if (!tx.find_label(label)) throw Error(ErrorCode::kNotFound, "label not found");
    if (tx.label_in_use(label)) {
      throw Error(ErrorCode::kInUse, "label is selected by existing segments");
    }
    tx.delete_label(label);
  });
}

}  // namespace earmark
