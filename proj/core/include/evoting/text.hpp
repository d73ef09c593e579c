#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace evoting {

// Offsets everywhere in the library count decoded code points, so documents are held as UTF-32.

/// Throws Error(IoError) on malformed UTF-8.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view text);

bool is_space(char32_t c) noexcept;
/// ASCII letters/digits and every non-ASCII code point that is not whitespace or in a
/// general punctuation/symbol block.
bool is_word_char(char32_t c) noexcept;

/// ASCII-only lowercasing; non-ASCII bytes pass through unchanged.
std::string ascii_lower(std::string_view s);

std::string read_file(const std::filesystem::path &path);
/// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path &path, std::string_view contents);

}  // namespace evoting
