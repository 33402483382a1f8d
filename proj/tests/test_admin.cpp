#include "earmark/admin.hpp"
#include "earmark/error.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

using namespace earmark;
using earmark::testing::error_of;
using earmark::testing::TestEnv;

TEST_SUITE("admin") {
  TEST_CASE("users are created with a verify-only credential") {
    TestEnv env;
    auto& admin = env.app().admin;
    User u = admin.create_user(env.admin(), "alice", "long-password", Role::kAnnotator);
    CHECK(u.username == "alice");
    CHECK(u.credential_digest.rfind("$argon2id$", 0) == 0);
    CHECK(u.credential_digest.find("long-password") == std::string::npos);
    CHECK(error_of([&] { admin.create_user(env.admin(), "alice", "long-password", Role::kAdmin); }) ==
          ErrorCode::kConflict);
    CHECK(error_of([&] { admin.create_user(env.admin(), "bob", "short", Role::kAdmin); }) ==
          ErrorCode::kWeakPassword);
    CHECK(error_of([&] { admin.create_user(env.admin(), "", "long-password", Role::kAdmin); }) ==
          ErrorCode::kBadRequest);
    CHECK(admin.list_users(env.admin()).size() == 2);
  }

  TEST_CASE("the last admin can be neither demoted nor deleted") {
    TestEnv env;
    auto& admin = env.app().admin;
    const auto root = env.admin();
    CHECK(error_of([&] { admin.update_user_role(root, root.user_id, Role::kAnnotator); }) ==
          ErrorCode::kLastAdmin);
    CHECK(error_of([&] { admin.delete_user(root, root.user_id); }) == ErrorCode::kLastAdmin);
    auto second = env.add_user("second", Role::kAdmin);
    CHECK(admin.update_user_role(root, root.user_id, Role::kAnnotator).role == Role::kAnnotator);
    CHECK(error_of([&] { admin.update_user_role(second, second.user_id, Role::kAnnotator); }) ==
          ErrorCode::kLastAdmin);
    CHECK(error_of([&] { admin.update_user_role(second, UserId{999}, Role::kAdmin); }) ==
          ErrorCode::kNotFound);
  }

  TEST_CASE("deleting a user ends their sessions") {
    TestEnv env;
    auto bob = env.add_user("bob");
    auto token = env.app().auth.login("bob", TestEnv::password_for("bob")).token;
    env.app().admin.delete_user(env.admin(), bob.user_id);
    CHECK(error_of([&] { env.app().auth.verify(token); }) == ErrorCode::kUnauthenticated);
  }

  TEST_CASE("users holding assignments cannot be deleted") {
    TestEnv env;
    auto bob = env.add_user("bob");
    auto p = env.add_project("P");
    env.join(bob, p);
    env.ingest(p, {"bob"});
    CHECK(error_of([&] { env.app().admin.delete_user(env.admin(), bob.user_id); }) ==
          ErrorCode::kInUse);
  }

  TEST_CASE("projects, keys and memberships") {
    TestEnv env;
    auto& admin = env.app().admin;
    Project p = admin.create_project(env.admin(), "Corpus");
    CHECK(p.api_key.size() == 64);
    Project q = admin.create_project(env.admin(), "Other");
    CHECK(q.api_key != p.api_key);

    Project rotated = admin.regenerate_api_key(env.admin(), p.id);
    CHECK(rotated.api_key != p.api_key);
    CHECK(error_of([&] { env.ingest(p, {}); }) == ErrorCode::kBadApiKey);
    CHECK_NOTHROW(env.ingest(rotated, {}));

    CHECK(admin.rename_project(env.admin(), p.id, "Renamed").name == "Renamed");
    CHECK(error_of([&] { admin.rename_project(env.admin(), ProjectId{99}, "x"); }) ==
          ErrorCode::kNotFound);

    auto alice = env.add_user("alice");
    admin.assign_user_to_project(env.admin(), alice.user_id, p.id);
    admin.assign_user_to_project(env.admin(), alice.user_id, p.id);
    auto members = admin.list_members(env.admin(), p.id);
    REQUIRE(members.size() == 1);
    CHECK(members[0].username == "alice");
    CHECK(error_of([&] { admin.assign_user_to_project(env.admin(), UserId{99}, p.id); }) ==
          ErrorCode::kNotFound);
  }

  TEST_CASE("deleting a project removes its audio") {
    TestEnv env;
    auto p = env.add_project("P");
    auto result = env.ingest(p, {});
    CHECK(env.app().blobs.size(result.datapoint.stored_name));
    env.app().admin.delete_project(env.admin(), p.id);
    CHECK_FALSE(env.app().blobs.size(result.datapoint.stored_name));
    CHECK(env.app().blobs.list().empty());
  }

  TEST_CASE("labels and values") {
    TestEnv env;
    auto& admin = env.app().admin;
    auto p = env.add_project("P");
    Label speaker = admin.create_label(env.admin(), p.id, "speaker", SelectionType::kSingle);
    CHECK(speaker.values.empty());
    auto v = admin.create_label_value(env.admin(), speaker.id, "female");
    CHECK(v.label_id == speaker.id);
    CHECK(error_of([&] { admin.create_label_value(env.admin(), speaker.id, "female"); }) ==
          ErrorCode::kConflict);
    CHECK(error_of([&] { admin.create_label(env.admin(), p.id, "speaker", SelectionType::kMulti); }) ==
          ErrorCode::kConflict);
    CHECK(error_of([&] { admin.create_label_value(env.admin(), LabelId{99}, "x"); }) ==
          ErrorCode::kNotFound);

    // Same label name in another project is fine.
    auto q = env.add_project("Q");
    CHECK_NOTHROW(admin.create_label(env.admin(), q.id, "speaker", SelectionType::kSingle));

    auto alice = env.add_user("alice");
    env.join(alice, p);
    auto dp = env.ingest(p, {"alice"}).datapoint;
    env.app().annotation.create_segment(alice, dp.id,
                                        SegmentDraft{0, 10, "", {{speaker.id, {v.id}}}});
    CHECK(error_of([&] { admin.delete_label(env.admin(), speaker.id); }) == ErrorCode::kInUse);

    Label unused = admin.create_label(env.admin(), p.id, "unused", SelectionType::kMulti);
    admin.create_label_value(env.admin(), unused.id, "x");
    admin.delete_label(env.admin(), unused.id);
    CHECK(env.app().annotation.label_schema(env.admin(), p.id).labels.size() == 1);
  }

  TEST_CASE("annotators are refused before anything changes") {
    TestEnv env;
    auto alice = env.add_user("alice");
    auto p = env.add_project("P");
    auto& admin = env.app().admin;
    const std::string before = env.app().store.digest();
    CHECK(error_of([&] { admin.create_user(alice, "x", "long-password", Role::kAdmin); }) ==
          ErrorCode::kForbidden);
    CHECK(error_of([&] { admin.update_user_role(alice, alice.user_id, Role::kAdmin); }) ==
          ErrorCode::kForbidden);
    CHECK(error_of([&] { admin.create_project(alice, "Mine"); }) == ErrorCode::kForbidden);
    CHECK(error_of([&] { admin.regenerate_api_key(alice, p.id); }) == ErrorCode::kForbidden);
    CHECK(error_of([&] { admin.assign_user_to_project(alice, alice.user_id, p.id); }) ==
          ErrorCode::kForbidden);
    CHECK(error_of([&] { admin.create_label(alice, p.id, "l", SelectionType::kSingle); }) ==
          ErrorCode::kForbidden);
    CHECK(error_of([&] { admin.delete_project(alice, p.id); }) == ErrorCode::kForbidden);
    CHECK(error_of([&] { admin.list_users(alice); }) == ErrorCode::kForbidden);
    CHECK(env.app().store.digest() == before);
  }
}
