#pragma once

#include <memory>
#include <string>
#include <vector>

#include "clozegen/backends.hpp"
#include "clozegen/wordnet.hpp"

namespace clozegen {

struct Sentence {
  int id = 0;  // position in the article, 0-based
  std::string text;
  std::vector<std::string> tokens;
  double rank_score = 0.0;
};

enum class KeyKind { NounChunk, VerbChunk, SingleNoun, SingleVerb };

std::string_view to_string(KeyKind kind);

// A maximal WordNet-entry segment of an answer key. `surface` keeps the
// inflected sentence text; `in_wordnet` is false only for dead-end words
// that are no entry even alone.
struct Instance {
  std::string surface;
  Span span_in_sentence;
  bool in_wordnet = false;
};

struct AnswerKey {
  int stem_sentence_id = 0;
  Span span;  // token range within the stem sentence
  std::string surface;
  KeyKind kind = KeyKind::NounChunk;
  std::vector<Instance> instances;  // filled by segment_answer_key
};

// Splits an article into ordered sentences covering all non-whitespace
// text. Sentence terminators inside common abbreviations (Dr., e.g., ...)
// and decimal numbers do not split. Empty input → ArgumentError.
std::vector<Sentence> segment_sentences(std::string_view article_text);

class SentenceRanker {
 public:
  virtual ~SentenceRanker() = default;
  // One finite score per sentence, parallel to the input.
  virtual std::vector<double> score(const std::vector<Sentence>&) = 0;
  virtual std::string name() const = 0;
};

// Default ranker: each sentence scores the mean cosine similarity between
// its embedding and every other sentence's (centrality). A lone sentence
// scores 1.
class CentralityRanker : public SentenceRanker {
 public:
  explicit CentralityRanker(std::shared_ptr<ContextualEmbedder> embedder)
      : embedder_(std::move(embedder)) {}
  std::vector<double> score(const std::vector<Sentence>&) override;
  std::string name() const override { return "centrality"; }

 private:
  std::shared_ptr<ContextualEmbedder> embedder_;
};

std::vector<Sentence> rank_sentences(std::vector<Sentence> sentences,
                                     SentenceRanker& ranker);

// Declarative = ends with "." (not ? or !), contains a finite verb (VERB or
// AUX tag), and does not open with a bare imperative verb.
bool is_declarative(const Sentence& sentence, const TagResult& tags);

struct StemSelection {
  std::vector<Sentence> stems;  // sorted by (rank_score desc, id asc)
  bool shortfall = false;       // fewer eligible stems than requested
};

StemSelection select_stems(const std::vector<Sentence>& ranked, Tagger& tagger,
                           std::size_t n_stems, std::size_t min_len,
                           std::size_t max_len);

// Candidate answer keys of a stem: noun/verb chunks plus single nouns and
// verbs outside any chunk. Leading determiners/possessives are stripped;
// spans containing pronouns are dropped. Instances are not yet attached.
std::vector<AnswerKey> identify_answer_keys(const Sentence& stem,
                                            Tagger& tagger);

// Right-to-left greedy segmentation: grow a suffix while it stays a WordNet
// entry, emit it at the first failure, recurse on the remainder. A rightmost
// word that is no entry even alone becomes a one-word instance with
// in_wordnet=false.
AnswerKey segment_answer_key(const Sentence& sentence, AnswerKey key,
                             const KnowledgeBase& kb);

}  // namespace clozegen
