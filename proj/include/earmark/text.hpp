#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace earmark::text {

/// NFC form of a UTF-8 string. Throws Error(kInvalidEncoding) on ill-formed
/// UTF-8. Idempotent.
std::string normalize(std::string_view utf8);

/// Unicode default case folding of an NFC string; result is re-normalized.
std::string casefold(std::string_view utf8);

/// Splits on maximal runs of White_Space code points; never yields empties.
std::vector<std::string> split_whitespace(std::string_view utf8);

std::size_t code_point_count(std::string_view utf8);

bool is_valid_utf8(std::string_view bytes);

}  // namespace earmark::text
