#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared across modules.
namespace socialsim::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);

std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Number of Unicode code points in a UTF-8 string (invalid bytes count as one).
std::size_t utf8_length(std::string_view s);

/// Longest prefix holding at most `max_chars` code points that ends on a word
/// boundary; falls back to a hard cut when the first word alone is too long.
std::string truncate_at_word(std::string_view s, std::size_t max_chars);

std::size_t word_count(std::string_view s);

/// Keeps the first `max_words` whitespace-delimited words, preserving the
/// original spacing between them.
std::string first_words(std::string_view s, std::size_t max_words);

/// Removes a surrounding markdown code fence (```json ... ```), if any.
std::string strip_code_fence(std::string_view s);

std::string sha256_hex(std::string_view data);
std::uint64_t fnv1a(std::string_view data);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace socialsim::text
