#include "clozegen/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace clozegen::text {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Keeps "5,830", "3.14", "don't" and "blood-red" together.
bool keep_inner(char c, char prev, char next) {
  if (c == '\'' || c == '-') return is_word_char(prev) && is_word_char(next);
  if (c == '.' || c == ',')
    return std::isdigit(static_cast<unsigned char>(prev)) &&
           std::isdigit(static_cast<unsigned char>(next));
  return false;
}

const std::unordered_set<std::string_view>& stopwords() {
  static const std::unordered_set<std::string_view> words = {
      "a",    "an",  "the",  "of",   "and", "or",   "to",   "in",  "on",
      "at",   "by",  "for",  "with", "as",  "is",   "are",  "was", "were",
      "be",   "been", "it",  "its",  "this", "that", "these", "those",
      "he",   "she", "they", "we",   "you",  "i",    "his",  "her", "their",
      "not",  "no",  "but",  "if",   "then", "than", "so",   "such",
  };
  return words;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (s.substr(i, kBlankMarker.size()) == kBlankMarker) {
      tokens.emplace_back(kBlankMarker);
      i += kBlankMarker.size();
      continue;
    }
    if (is_word_char(c)) {
      std::size_t j = i + 1;
      while (j < n &&
             (is_word_char(s[j]) ||
              (j + 1 < n && keep_inner(s[j], s[j - 1], s[j + 1])))) {
        ++j;
      }
      tokens.emplace_back(s.substr(i, j - i));
      i = j;
      continue;
    }
    // Punctuation: one token per character, except runs of the same dot
    // ("...") which stay together.
    std::size_t j = i + 1;
    if (c == '.') {
      while (j < n && s[j] == '.') ++j;
    }
    tokens.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::string detokenize(const std::vector<std::string>& tokens) {
  static const std::string_view no_space_before = ".,!?;:)]}%";
  static const std::string_view no_space_after = "([{";
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (!out.empty()) {
      bool attach = t.size() == 1 &&
                    no_space_before.find(t[0]) != std::string_view::npos;
      if (t == "...") attach = true;
      bool prev_open = tokens[i - 1].size() == 1 &&
                       no_space_after.find(tokens[i - 1][0]) !=
                           std::string_view::npos;
      if (!attach && !prev_open) out += ' ';
    }
    out += t;
  }
  return out;
}

std::string join(const std::vector<std::string>& tokens,
                 std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string normalize(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool is_punctuation(std::string_view token) {
  if (token.empty()) return true;
  return std::all_of(token.begin(), token.end(), [](unsigned char c) {
    return std::ispunct(c) != 0;
  });
}

bool is_stopword(std::string_view token) {
  return stopwords().contains(to_lower(token));
}

bool is_subword_fragment(std::string_view token) {
  if (token.empty()) return true;
  if (token.starts_with("##")) return true;
  return std::none_of(token.begin(), token.end(), [](unsigned char c) {
    return std::isalnum(c) != 0;
  });
}

std::vector<std::string> slice(const std::vector<std::string>& tokens,
                               const Span& span) {
  std::vector<std::string> out;
  for (std::size_t i = span.begin; i < span.end && i < tokens.size(); ++i)
    out.push_back(tokens[i]);
  return out;
}

std::uint64_t stable_hash64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace clozegen::text
