#pragma once

#include "earmark/auth.hpp"
#include "earmark/blob_store.hpp"
#include "earmark/domain.hpp"
#include "earmark/store.hpp"

#include <string>
#include <vector>

namespace earmark {

/// 64 lowercase hex chars, 256 bits from the CSPRNG.
std::string generate_api_key();

/// Admin-panel backend. Every operation checks the admin role before touching
/// the store, so a denied call never mutates anything.
class AdminService {
 public:
  AdminService(Store& store, AuthService& auth, BlobStore& blobs)
      : store_(store), auth_(auth), blobs_(blobs) {}

  User create_user(const Principal& caller, const std::string& username,
                   const std::string& password, Role role);
  std::vector<User> list_users(const Principal& caller);
  /// Refuses to leave the store without an admin (kLastAdmin).
  User update_user_role(const Principal& caller, UserId user, Role role);
  /// kInUse while the user still holds assignments.
  void delete_user(const Principal& caller, UserId user);

  Project create_project(const Principal& caller, const std::string& name);
  Project rename_project(const Principal& caller, ProjectId project,
                         const std::string& name);
  void delete_project(const Principal& caller, ProjectId project);
  Project regenerate_api_key(const Principal& caller, ProjectId project);

  /// Idempotent.
  Membership assign_user_to_project(const Principal& caller, UserId user,
                                    ProjectId project);
  std::vector<User> list_members(const Principal& caller, ProjectId project);

  Label create_label(const Principal& caller, ProjectId project,
                     const std::string& name, SelectionType type);
  LabelValue create_label_value(const Principal& caller, LabelId label,
                                const std::string& value);
  /// kInUse while any segment selects it.
  void delete_label(const Principal& caller, LabelId label);

 private:
  Store& store_;
  AuthService& auth_;
  BlobStore& blobs_;
};

}  // namespace earmark
