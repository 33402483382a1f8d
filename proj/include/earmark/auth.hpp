#pragma once

#include "earmark/clock.hpp"
#include "earmark/crypto.hpp"
#include "earmark/domain.hpp"
#include "earmark/store.hpp"

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>

namespace earmark {

struct Principal {
  UserId user_id;
  std::string username;
  Role role = Role::kAnnotator;

  bool is_admin() const { return role == Role::kAdmin; }
};

/// Server-side registry of live token ids, each with its own expiry.
/// Expired entries are dropped on lookup and by purge().
class SessionStore {
 public:
  void put(const std::string& token_id, UserId user, Timestamp expires_at);
  std::optional<UserId> get(const std::string& token_id, Timestamp now);
  bool remove(const std::string& token_id);
  std::size_t remove_user(UserId user);
  std::size_t purge(Timestamp now);
  std::size_t size() const;

 private:
  struct Entry {
    UserId user;
    Timestamp expires_at;
  };
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, Entry> entries_;
};

struct TokenClaims {
  std::string token_id;  // 32 hex chars
  UserId user_id;
  Role role = Role::kAnnotator;
  std::int64_t exp = 0;  // seconds since epoch
};

/// Compact JWS (RFC 7519) signed with HS256.
class TokenCodec {
 public:
  explicit TokenCodec(std::string secret) : secret_(std::move(secret)) {}

  std::string encode(const TokenClaims& claims) const;
  /// nullopt on any structural, algorithm or signature failure.
  std::optional<TokenClaims> decode(std::string_view token) const;

 private:
  std::string secret_;
};

struct RequireAdmin {};
struct RequireMember {
  ProjectId project;
};
struct RequireAssignee {
  DataPointId datapoint;
};
using Requirement = std::variant<RequireAdmin, RequireMember, RequireAssignee>;

struct AuthConfig {
  std::chrono::milliseconds token_ttl = std::chrono::hours(24);
  std::string signing_secret;  // random per process when empty
  crypto::PasswordParams password;
};

struct LoginResult {
  std::string token;
  Timestamp expires_at;
  Principal principal;
};

class AuthService {
 public:
  AuthService(Store& store, const Clock& clock, AuthConfig config);

  /// Creates the configured admin on first start; a no-op when that admin
  /// already exists.
  User bootstrap_admin(const std::string& username, const std::string& password);

  LoginResult login(std::string_view username, std::string_view password);

  /// Accepts the raw token. Throws kUnauthenticated on any failure.
  Principal verify(std::string_view token);
  /// Accepts an Authorization header value of the form "Bearer <token>".
  Principal verify_header(std::string_view authorization);

  void logout(std::string_view token);

  /// Admins pass every check. Throws kForbidden (or kNotFound for a missing
  /// datapoint under RequireAssignee).
  void authorize(const Principal& principal, const Requirement& requirement);

  /// Rejects passwords shorter than 8 code points, then digests.
  std::string make_credential(std::string_view password) const;

  SessionStore& sessions() { return sessions_; }
  const Clock& clock() const { return clock_; }

 private:
  const std::string& dummy_digest();

  Store& store_;
  const Clock& clock_;
  AuthConfig config_;
  TokenCodec codec_;
  SessionStore sessions_;
  std::once_flag dummy_once_;
  std::string dummy_digest_;
};

/// Extracts the token from "Bearer <token>"; empty when the scheme is absent.
std::string_view bearer_token(std::string_view authorization);

}  // namespace earmark
