#pragma once

#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by the lexicon, ingestion and evaluation code.
namespace scylla::text {

std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

// Lowercases ASCII, Latin-1 Supplement and Latin Extended-A letters.
// Diacritics are preserved: "Ação" -> "ação", never "acao".
std::string to_lower(std::string_view s);
bool starts_upper(std::string_view s);
std::string capitalize_first(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
// Collapses runs of whitespace into one space and trims the ends.
std::string normalize_whitespace(std::string_view s);

bool is_punctuation(char32_t c);
bool is_space(char32_t c);

}  // namespace scylla::text
