#include "earmark/text.hpp"

#include "earmark/error.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/ustring.h>
#include <unicode/utf8.h>

namespace earmark::text {

namespace {

icu::UnicodeString decode_strict(std::string_view utf8) {
  if (!is_valid_utf8(utf8)) {
    throw Error(ErrorCode::kInvalidEncoding, "text is not valid UTF-8");
  }
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
}

icu::UnicodeString nfc(const icu::UnicodeString& s) {
  UErrorCode ec = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(ec);
  if (U_FAILURE(ec)) throw Error(ErrorCode::kInternal, "NFC unavailable");
  if (n->isNormalized(s, ec) && U_SUCCESS(ec)) return s;
  ec = U_ZERO_ERROR;
  icu::UnicodeString out = n->normalize(s, ec);
  if (U_FAILURE(ec)) throw Error(ErrorCode::kInternal, "NFC failed");
  return out;
}

std::string encode(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

}  // namespace

bool is_valid_utf8(std::string_view bytes) {
  const auto* p = reinterpret_cast<const uint8_t*>(bytes.data());
  const auto length = static_cast<int32_t>(bytes.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(p, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

std::string normalize(std::string_view utf8) {
  return encode(nfc(decode_strict(utf8)));
}

std::string casefold(std::string_view utf8) {
  icu::UnicodeString s = nfc(decode_strict(utf8));
  s.foldCase(U_FOLD_CASE_DEFAULT);
  return encode(nfc(s));
}

std::vector<std::string> split_whitespace(std::string_view utf8) {
  if (!is_valid_utf8(utf8)) {
    throw Error(ErrorCode::kInvalidEncoding, "text is not valid UTF-8");
  }
  std::vector<std::string> tokens;
  const auto* p = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  int32_t token_start = -1;
  while (i < length) {
    const int32_t at = i;
    UChar32 c;
    U8_NEXT(p, i, length, c);
    if (u_isUWhiteSpace(c)) {
      if (token_start >= 0) {
        tokens.emplace_back(utf8.substr(token_start, at - token_start));
        token_start = -1;
      }
    } else if (token_start < 0) {
      token_start = at;
    }
  }
  if (token_start >= 0) tokens.emplace_back(utf8.substr(token_start));
  return tokens;
}

std::size_t code_point_count(std::string_view utf8) {
  const auto* p = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  std::size_t n = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(p, i, length, c);
    ++n;
  }
  return n;
}

}  // namespace earmark::text
