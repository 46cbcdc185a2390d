#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clozegen {

// Half-open token range [begin, end) within a token sequence.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool operator==(const Span&) const = default;
};

// Marker inserted in rendered stems where the answer key was removed.
inline constexpr std::string_view kBlankMarker = "**blank**";

namespace text {

// Rule-based word tokenizer. Splits on whitespace, detaches surrounding
// punctuation, keeps hyphenated words, decimal/thousands-grouped numbers,
// word-internal apostrophes, and the blank marker intact.
std::vector<std::string> tokenize(std::string_view s);

// Joins tokens with standard English spacing (no space before closing
// punctuation, none after an opening bracket). Inverse of tokenize for
// ordinary prose.
std::string detokenize(const std::vector<std::string>& tokens);

std::string join(const std::vector<std::string>& tokens,
                 std::string_view sep = " ");

// Lowercase (ASCII) and collapse runs of whitespace to single spaces.
std::string normalize(std::string_view s);

std::string to_lower(std::string_view s);

bool is_punctuation(std::string_view token);
bool is_stopword(std::string_view token);

// True for masked-LM vocabulary fragments that are not standalone words
// ("##ing", empty, or fully non-alphanumeric strings).
bool is_subword_fragment(std::string_view token);

std::vector<std::string> slice(const std::vector<std::string>& tokens,
                               const Span& span);

// FNV-1a. Stable across platforms and runs; used for content keys and the
// mock backends' derived vectors, not for security.
std::uint64_t stable_hash64(std::string_view s);

}  // namespace text
}  // namespace clozegen
