#include "socialsim/text.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "socialsim/error.hpp"

namespace socialsim::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_continuation(unsigned char c) { return (c & 0xC0u) == 0x80u; }

}  // namespace

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && to_lower(a) == to_lower(b);
}

bool istarts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) words.emplace_back(s.substr(start, i - start));
  }
  return words;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s)
    if (!is_continuation(static_cast<unsigned char>(c))) ++n;
  return n;
}

std::string truncate_at_word(std::string_view s, std::size_t max_chars) {
  if (utf8_length(s) <= max_chars) return std::string(s);
  // Byte offset just past the max_chars-th code point.
  std::size_t count = 0, cut = 0;
  for (; cut < s.size(); ++cut) {
    if (!is_continuation(static_cast<unsigned char>(s[cut]))) {
      if (count == max_chars) break;
      ++count;
    }
  }
  std::string_view head = s.substr(0, cut);
  // Next character being whitespace means the cut already sits on a boundary.
  if (cut < s.size() && is_space(s[cut])) return std::string(trim(head));
  auto last_space = head.find_last_of(" \t\r\n");
  if (last_space == std::string_view::npos) return std::string(head);
  return std::string(trim(head.substr(0, last_space)));
}

std::size_t word_count(std::string_view s) { return split_whitespace(s).size(); }

std::string first_words(std::string_view s, std::size_t max_words) {
  s = trim(s);
  std::size_t i = 0, words = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    if (i == s.size()) break;
    if (words == max_words) return std::string(trim(s.substr(0, i)));
    while (i < s.size() && !is_space(s[i])) ++i;
    ++words;
  }
  return std::string(s);
}

std::string strip_code_fence(std::string_view s) {
  s = trim(s);
  if (s.substr(0, 3) != "```") return std::string(s);
  auto first_newline = s.find('\n');
  if (first_newline == std::string_view::npos) return std::string(s);
  std::string_view body = s.substr(first_newline + 1);
  auto closing = body.rfind("```");
  if (closing != std::string_view::npos) body = body.substr(0, closing);
  return std::string(trim(body));
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("crypto", "sha256 digest failed");
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError(fmt::format("short write to {}", path.string()));
}

}  // namespace socialsim::text
