#include "earmark/auth.hpp"

#include "earmark/error.hpp"
#include "earmark/text.hpp"

#include <json.hpp>

namespace earmark {

namespace {

constexpr std::size_t kMinPasswordLength = 8;

[[noreturn]] void unauthenticated() {
  throw Error(ErrorCode::kUnauthenticated, "authentication required");
}

}  // namespace

// ---- SessionStore --------------------------------------------------------

void SessionStore::put(const std::string& token_id, UserId user,
                       Timestamp expires_at) {
  std::unique_lock lock(mu_);
  entries_[token_id] = Entry{user, expires_at};
}

std::optional<UserId> SessionStore::get(const std::string& token_id,
                                        Timestamp now) {
  {
    std::shared_lock lock(mu_);
    auto it = entries_.find(token_id);
    if (it == entries_.end()) return std::nullopt;
    if (now < it->second.expires_at) return it->second.user;
  }
  std::unique_lock lock(mu_);
  auto it = entries_.find(token_id);
  if (it != entries_.end() && !(now < it->second.expires_at)) entries_.erase(it);
  return std::nullopt;
}

bool SessionStore::remove(const std::string& token_id) {
  std::unique_lock lock(mu_);
  return entries_.erase(token_id) > 0;
}

std::size_t SessionStore::remove_user(UserId user) {
  std::unique_lock lock(mu_);
  return std::erase_if(entries_,
                       [&](const auto& kv) { return kv.second.user == user; });
}

std::size_t SessionStore::purge(Timestamp now) {
  std::unique_lock lock(mu_);
  return std::erase_if(
      entries_, [&](const auto& kv) { return !(now < kv.second.expires_at); });
}

std::size_t SessionStore::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

// ---- TokenCodec ----------------------------------------------------------

std::string TokenCodec::encode(const TokenClaims& claims) const {
  static const std::string header =
      crypto::base64url_encode(R"({"alg":"HS256","typ":"JWT"})");
  nlohmann::json payload = {{"token_id", claims.token_id},
                            {"user_id", claims.user_id.value},
                            {"role", to_string(claims.role)},
                            {"exp", claims.exp}};
  std::string signing_input = header + "." + crypto::base64url_encode(payload.dump());
  return signing_input + "." +
         crypto::base64url_encode(crypto::hmac_sha256(secret_, signing_input));
}

std::optional<TokenClaims> TokenCodec::decode(std::string_view token) const {
  const auto first = token.find('.');
  if (first == std::string_view::npos) return std::nullopt;
  const auto second = token.find('.', first + 1);
  if (second == std::string_view::npos ||
      token.find('.', second + 1) != std::string_view::npos) {
    return std::nullopt;
  }
  const auto signing_input = token.substr(0, second);
  try {
    const std::string signature = crypto::base64url_decode(token.substr(second + 1));
    if (!crypto::constant_time_equal(
            signature, crypto::hmac_sha256(secret_, signing_input))) {
      return std::nullopt;
    }
    auto header = nlohmann::json::parse(
        crypto::base64url_decode(token.substr(0, first)));
    if (header.value("alg", "") != "HS256") return std::nullopt;
    auto payload = nlohmann::json::parse(
        crypto::base64url_decode(token.substr(first + 1, second - first - 1)));
    TokenClaims claims;
    claims.token_id = payload.at("token_id").get<std::string>();
    claims.user_id = UserId{payload.at("user_id").get<std::int64_t>()};
    claims.role = parse_role(payload.at("role").get<std::string>());
    claims.exp = payload.at("exp").get<std::int64_t>();
    return claims;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// ---- AuthService ---------------------------------------------------------

std::string_view bearer_token(std::string_view authorization) {
  // The scheme name is case-insensitive.
  constexpr std::string_view kScheme = "bearer ";
  if (authorization.size() <= kScheme.size()) return {};
  for (std::size_t i = 0; i < kScheme.size(); ++i) {
    const char c = authorization[i];
    if ((c >= 'A' && c <= 'Z' ? c + ('a' - 'A') : c) != kScheme[i]) return {};
  }
  return authorization.substr(kScheme.size());
}

AuthService::AuthService(Store& store, const Clock& clock, AuthConfig config)
    : store_(store),
      clock_(clock),
      config_(std::move(config)),
      codec_(config_.signing_secret.empty() ? crypto::random_hex(32)
                                            : config_.signing_secret) {}

std::string AuthService::make_credential(std::string_view password) const {
  const std::string normalized = text::normalize(password);
  if (text::code_point_count(normalized) < kMinPasswordLength) {
    throw Error(ErrorCode::kWeakPassword,
                "password must have at least 8 characters");
  }
  return crypto::hash_password(normalized, config_.password);
}

User AuthService::bootstrap_admin(const std::string& username,
                                  const std::string& password) {
  const std::string name = text::normalize(username);
  if (name.empty()) throw Error(ErrorCode::kBadRequest, "username is empty");
  const std::string digest = make_credential(password);
  return store_.transact([&](Tx& tx) {
    if (auto existing = tx.find_user_by_name(name)) {
      if (existing->role != Role::kAdmin) {
        throw Error(ErrorCode::kConflict,
                    "bootstrap user exists without the admin role");
      }
      return *existing;
    }
    UserId id = tx.insert_user(name, digest, Role::kAdmin, clock_.now());
    return *tx.find_user(id);
  });
}

const std::string& AuthService::dummy_digest() {
  std::call_once(dummy_once_, [&] {
    dummy_digest_ = crypto::hash_password(crypto::random_hex(16), config_.password);
  });
  return dummy_digest_;
}

LoginResult AuthService::login(std::string_view username,
                               std::string_view password) {
  std::string name;
  std::string pw;
  try {
    name = text::normalize(username);
    pw = text::normalize(password);
  } catch (const Error&) {
    throw Error(ErrorCode::kBadCredentials, "invalid username or password");
  }
  auto user = store_.transact([&](Tx& tx) { return tx.find_user_by_name(name); });
  // Unknown users still pay for one verification so timing does not reveal
  // which usernames exist.
  const bool ok = crypto::verify_password(
      user ? std::string_view(user->credential_digest) : dummy_digest(), pw);
  if (!user || !ok) {
    throw Error(ErrorCode::kBadCredentials, "invalid username or password");
  }

  const Timestamp now = clock_.now();
  const Timestamp expires_at = now + config_.token_ttl;
  TokenClaims claims;
  claims.token_id = crypto::random_hex(16);
  claims.user_id = user->id;
  claims.role = user->role;
  claims.exp = (to_epoch_ms(expires_at) + 999) / 1000;
  sessions_.put(claims.token_id, user->id, expires_at);
  return LoginResult{codec_.encode(claims), expires_at,
                     Principal{user->id, user->username, user->role}};
}

Principal AuthService::verify(std::string_view token) {
  auto claims = codec_.decode(token);
  if (!claims) unauthenticated();
  const Timestamp now = clock_.now();
  if (to_epoch_ms(now) >= claims->exp * 1000) unauthenticated();
  auto holder = sessions_.get(claims->token_id, now);
  if (!holder || *holder != claims->user_id) unauthenticated();
  // Role comes from the store so demotions take effect immediately.
  auto user = store_.transact([&](Tx& tx) { return tx.find_user(claims->user_id); });
  if (!user) unauthenticated();
  return Principal{user->id, user->username, user->role};
}

Principal AuthService::verify_header(std::string_view authorization) {
  auto token = bearer_token(authorization);
  if (token.empty()) unauthenticated();
  return verify(token);
}

void AuthService::logout(std::string_view token) {
  verify(token);
  auto claims = codec_.decode(token);
  if (!sessions_.remove(claims->token_id)) unauthenticated();
}

void AuthService::authorize(const Principal& principal,
                            const Requirement& requirement) {
  if (principal.is_admin()) return;
  std::visit(
      [&](const auto& req) {
        using T = std::decay_t<decltype(req)>;
        if constexpr (std::is_same_v<T, RequireAdmin>) {
          throw Error(ErrorCode::kForbidden, "admin role required");
        } else if constexpr (std::is_same_v<T, RequireMember>) {
          bool member = store_.transact(
              [&](Tx& tx) { return tx.is_member(principal.user_id, req.project); });
          if (!member) throw Error(ErrorCode::kForbidden, "not a project member");
        } else {
          store_.transact([&](Tx& tx) {
            if (!tx.find_datapoint(req.datapoint)) {
              throw Error(ErrorCode::kNotFound, "datapoint not found");
            }
            if (!tx.find_assignment(req.datapoint, principal.user_id)) {
              throw Error(ErrorCode::kForbidden, "datapoint not assigned to caller");
            }
          });
        }
      },
      requirement);
}

}  // namespace earmark
