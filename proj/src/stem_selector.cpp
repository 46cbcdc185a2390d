#include "clozegen/stem_selector.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "clozegen/text.hpp"

namespace clozegen {

namespace {

bool is_abbreviation(std::string_view word_with_dot) {
  static const std::set<std::string, std::less<>> known = {
      "dr.", "mr.", "mrs.", "ms.", "prof.", "st.", "jr.", "sr.", "vs.",
      "etc.", "e.g.", "i.e.", "fig.", "no.", "al.", "approx.", "dept.",
      "inc.", "ltd.", "co.", "mt.", "vol."};
  return known.contains(text::to_lower(word_with_dot));
}

bool is_terminator(char c) { return c == '.' || c == '?' || c == '!'; }

}  // namespace

std::string_view to_string(KeyKind kind) {
  switch (kind) {
    case KeyKind::NounChunk: return "noun_chunk";
    case KeyKind::VerbChunk: return "verb_chunk";
    case KeyKind::SingleNoun: return "single_noun";
    case KeyKind::SingleVerb: return "single_verb";
  }
  return "noun_chunk";
}

std::vector<Sentence> segment_sentences(std::string_view article) {
  if (article.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw ArgumentError("segment_sentences: empty article");

  std::vector<Sentence> sentences;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {  // [start, end)
    std::string_view raw = article.substr(start, end - start);
    std::size_t a = raw.find_first_not_of(" \t\r\n");
    if (a == std::string_view::npos) {
      start = end;
      return;
    }
    std::size_t b = raw.find_last_not_of(" \t\r\n");
    Sentence s;
    s.id = static_cast<int>(sentences.size());
    s.text = std::string(raw.substr(a, b - a + 1));
    s.tokens = text::tokenize(s.text);
    sentences.push_back(std::move(s));
    start = end;
  };

  for (std::size_t i = 0; i < article.size(); ++i) {
    if (!is_terminator(article[i])) continue;
    // consume a run of terminators (..., ?!, etc.)
    std::size_t end = i;
    while (end + 1 < article.size() && is_terminator(article[end + 1])) ++end;

    if (article[i] == '.' && end == i) {
      // Decimal point: digit on both sides.
      if (i > 0 && i + 1 < article.size() &&
          std::isdigit(static_cast<unsigned char>(article[i - 1])) &&
          std::isdigit(static_cast<unsigned char>(article[i + 1])))
        continue;
      // Abbreviation: look back to the containing word (dots included, so
      // "e.g." survives its internal dot too).
      std::size_t w = i;
      while (w > 0 && (std::isalpha(static_cast<unsigned char>(
                           article[w - 1])) ||
                       article[w - 1] == '.'))
        --w;
      if (is_abbreviation(article.substr(w, i - w + 1))) continue;
    }

    // include trailing closing quotes/brackets in the sentence
    std::size_t close = end;
    while (close + 1 < article.size() &&
           (article[close + 1] == '"' || article[close + 1] == '\'' ||
            article[close + 1] == ')' || article[close + 1] == ']'))
      ++close;
    // sentence boundary only before whitespace or end of text
    if (close + 1 < article.size() &&
        !std::isspace(static_cast<unsigned char>(article[close + 1]))) {
      i = close;
      continue;
    }
    emit(close + 1);
    i = close;
  }
  if (start < article.size()) emit(article.size());
  return sentences;
}

std::vector<double> CentralityRanker::score(
    const std::vector<Sentence>& sentences) {
  std::vector<EmbeddingVector> vectors;
  vectors.reserve(sentences.size());
  for (const auto& s : sentences)
    vectors.push_back(embedder_->embed(s.tokens, {0, s.tokens.size()}));
  std::vector<double> out(sentences.size(), 1.0);
  if (sentences.size() < 2) return out;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    double sum = 0;
    for (std::size_t j = 0; j < vectors.size(); ++j) {
      if (j == i) continue;
      sum += cosine(vectors[i], vectors[j]);
    }
    out[i] = sum / static_cast<double>(vectors.size() - 1);
  }
  return out;
}

std::vector<Sentence> rank_sentences(std::vector<Sentence> sentences,
                                     SentenceRanker& ranker) {
  if (sentences.empty()) return sentences;
  auto scores = ranker.score(sentences);
  for (std::size_t i = 0; i < sentences.size(); ++i)
    sentences[i].rank_score = scores[i];
  return sentences;
}

bool is_declarative(const Sentence& sentence, const TagResult& tags) {
  if (sentence.tokens.empty()) return false;
  if (sentence.tokens.back() != ".") return false;
  bool has_verb = false;
  for (const auto& t : tags.pos_tags)
    if (t == "VERB" || t == "AUX") has_verb = true;
  if (!has_verb) return false;
  if (tags.pos_tags.front() == "VERB") return false;  // imperative opening
  return true;
}

StemSelection select_stems(const std::vector<Sentence>& ranked, Tagger& tagger,
                           std::size_t n_stems, std::size_t min_len,
                           std::size_t max_len) {
  if (n_stems < 1) throw ArgumentError("select_stems: n_stems must be >= 1");
  StemSelection result;
  for (const auto& s : ranked) {
    if (s.tokens.size() < min_len || s.tokens.size() > max_len) continue;
    if (!is_declarative(s, tagger.tag(s.tokens))) continue;
    result.stems.push_back(s);
  }
  std::stable_sort(result.stems.begin(), result.stems.end(),
                   [](const Sentence& a, const Sentence& b) {
                     if (a.rank_score != b.rank_score)
                       return a.rank_score > b.rank_score;
                     return a.id < b.id;
                   });
  if (result.stems.size() > n_stems) result.stems.resize(n_stems);
  result.shortfall = result.stems.size() < n_stems;
  return result;
}

namespace {

bool is_possessive(std::string_view token) {
  static const std::set<std::string, std::less<>> set = {
      "my", "your", "his", "her", "its", "our", "their", "'s", "'"};
  return set.contains(text::to_lower(token));
}

}  // namespace

std::vector<AnswerKey> identify_answer_keys(const Sentence& stem,
                                            Tagger& tagger) {
  auto tags = tagger.tag(stem.tokens);
  std::vector<AnswerKey> keys;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<bool> chunked(stem.tokens.size(), false);

  auto add = [&](Span span, bool verbal) {
    // strip leading determiners and possessives
    while (span.begin < span.end &&
           (tags.pos_tags[span.begin] == "DET" ||
            is_possessive(stem.tokens[span.begin])))
      ++span.begin;
    if (span.empty()) return;
    for (std::size_t i = span.begin; i < span.end; ++i)
      if (tags.pos_tags[i] == "PRON") return;
    if (!seen.insert({span.begin, span.end}).second) return;
    AnswerKey key;
    key.stem_sentence_id = stem.id;
    key.span = span;
    key.surface = text::join(text::slice(stem.tokens, span));
    key.kind = span.size() > 1
                   ? (verbal ? KeyKind::VerbChunk : KeyKind::NounChunk)
                   : (verbal ? KeyKind::SingleVerb : KeyKind::SingleNoun);
    keys.push_back(std::move(key));
  };

  for (auto span : tags.noun_chunks) {
    for (std::size_t i = span.begin; i < span.end; ++i) chunked[i] = true;
    add(span, false);
  }
  for (auto span : tags.verb_chunks) {
    for (std::size_t i = span.begin; i < span.end; ++i) chunked[i] = true;
    add(span, true);
  }
  for (std::size_t i = 0; i < stem.tokens.size(); ++i) {
    if (chunked[i]) continue;
    const auto& pos = tags.pos_tags[i];
    if (pos == "NOUN" || pos == "PROPN") add({i, i + 1}, false);
    else if (pos == "VERB") add({i, i + 1}, true);
  }
  std::sort(keys.begin(), keys.end(), [](const AnswerKey& a, const AnswerKey& b) {
    if (a.span.begin != b.span.begin) return a.span.begin < b.span.begin;
    return a.span.end < b.span.end;
  });
  return keys;
}

AnswerKey segment_answer_key(const Sentence& sentence, AnswerKey key,
                             const KnowledgeBase& kb) {
  if (key.span.empty() || key.span.end > sentence.tokens.size())
    throw ArgumentError("segment_answer_key: span out of bounds");
  key.instances.clear();
  const auto words = text::slice(sentence.tokens, key.span);

  std::vector<Instance> reversed;
  std::size_t end = words.size();
  while (end > 0) {
    // Grow the suffix while it remains an entry; stop at the first failure.
    std::size_t len = 0;
    while (len < end) {
      Span trial{end - (len + 1), end};
      if (!kb.is_entry(text::join(text::slice(words, trial)))) break;
      ++len;
    }
    Instance inst;
    if (len == 0) {
      inst.surface = words[end - 1];
      inst.span_in_sentence = {key.span.begin + end - 1, key.span.begin + end};
      inst.in_wordnet = false;
      end -= 1;
    } else {
      Span found{end - len, end};
      inst.surface = text::join(text::slice(words, found));
      inst.span_in_sentence = {key.span.begin + found.begin,
                               key.span.begin + found.end};
      inst.in_wordnet = true;
      end -= len;
    }
    reversed.push_back(std::move(inst));
  }
  key.instances.assign(reversed.rbegin(), reversed.rend());
  return key;
}

}  // namespace clozegen
