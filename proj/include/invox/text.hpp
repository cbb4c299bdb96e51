#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace invox::text {

/// Decodes UTF-8 into code points. Invalid bytes are passed through as
/// their raw value so that no input can make decoding fail.
std::u32string decode_utf8(std::string_view s);

std::string encode_utf8(std::u32string_view s);

/// Lowercases a code point. Covers ASCII, Latin-1 and the Czech alphabet.
char32_t fold_char(char32_t c);

std::u32string fold(std::u32string_view s);

/// Lowercased UTF-8 copy (decode, fold, encode).
std::string fold_utf8(std::string_view s);

bool is_space(char32_t c);
bool is_punct(char32_t c);
bool is_digit(char32_t c);
bool is_alpha(char32_t c);
bool is_upper(char32_t c);

/// Number of code points in a UTF-8 string.
std::size_t length_utf8(std::string_view s);

/// Slice [begin, end) measured in code points, returned as UTF-8.
std::string substr_utf8(std::string_view s, std::size_t begin, std::size_t end);

/// Byte offset of the code point with index cp (s.size() when past the end).
std::size_t byte_of_codepoint(std::string_view s, std::size_t cp);

/// Code point index of the byte offset.
std::size_t codepoint_of_byte(std::string_view s, std::size_t byte);

/// Splits on runs of whitespace.
std::vector<std::string> split_words(std::string_view s);

std::string trim(std::string_view s);

/// Collapses whitespace runs to single spaces and trims the ends.
std::string normalize_spaces(std::string_view s);

bool starts_with_icase(std::string_view s, std::string_view prefix);

} // namespace invox::text
