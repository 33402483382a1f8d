#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace earmark::crypto {

/// Lowercase hex of `bytes` bytes from the OS CSPRNG.
std::string random_hex(std::size_t bytes);

std::string base64url_encode(std::string_view bytes);
/// Throws std::invalid_argument on malformed input.
std::string base64url_decode(std::string_view text);

/// Raw 32-byte HMAC-SHA-256.
std::string hmac_sha256(std::string_view key, std::string_view message);

bool constant_time_equal(std::string_view a, std::string_view b);

/// Argon2id cost parameters. Defaults are the library's interactive level.
struct PasswordParams {
  unsigned long long ops_limit = 2;
  std::size_t mem_limit = 64u * 1024u * 1024u;

  /// Cheapest settings the library accepts; for tests only.
  static PasswordParams minimal();
};

/// Salted, self-describing digest string (salt and costs embedded).
std::string hash_password(std::string_view password, const PasswordParams& params);
bool verify_password(std::string_view digest, std::string_view password);

}  // namespace earmark::crypto
