#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

// Minimal UTF-8 handling for Latin, Greek and Cyrillic scripts. Invalid
// bytes decode to U+FFFD one byte at a time, so offsets always advance.
namespace geniuskit::unicode {

struct Decoded {
  char32_t cp;
  std::size_t len;  // bytes consumed, >= 1
};

Decoded decode(std::string_view s, std::size_t pos);
void append_utf8(std::string& out, char32_t cp);

bool is_space(char32_t cp);
bool is_apostrophe(char32_t cp);
/// Letters and digits, the word-forming characters besides apostrophes.
bool is_alnum(char32_t cp);
bool is_upper(char32_t cp);
char32_t to_lower(char32_t cp);

/// Lowercases every code point this module knows a mapping for.
std::string fold_case(std::string_view s);

/// True when the first code point of `s` is an uppercase letter.
bool starts_upper(std::string_view s);
/// True when `s` has at least two letters and all of them are uppercase.
bool is_acronym(std::string_view s);

std::size_t codepoint_count(std::string_view s);
/// Byte offset of the `cp_index`-th code point; s.size() when past the end.
std::size_t byte_offset_of_codepoint(std::string_view s, std::size_t cp_index);
std::size_t codepoint_offset_of_byte(std::string_view s, std::size_t byte_offset);

}  // namespace geniuskit::unicode
