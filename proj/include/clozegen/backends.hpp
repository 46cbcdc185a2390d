#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clozegen/errors.hpp"
#include "clozegen/text.hpp"
#include "clozegen/wordnet.hpp"

namespace clozegen {

// A sentence with one token span removed: prefix + [MASK] + suffix.
struct MaskedSentence {
  std::vector<std::string> prefix_tokens;
  std::vector<std::string> suffix_tokens;
  int sentence_id = 0;
  Span masked_span;  // the removed span's position in the original sentence

  // prefix + mask marker + suffix, single-space joined.
  std::string render(std::string_view marker = "[MASK]") const;
};

// One masked-LM filler: `position` is its 1-based rank in the
// descending-probability prediction list.
struct Prediction {
  std::string token;
  double probability = 0.0;
  int position = 0;
};

using EmbeddingVector = std::vector<double>;

// Cosine similarity. Throws NumericError on zero-norm input or dimension
// mismatch.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

struct BackendDescriptor {
  std::string kind;      // masked_predictor, contextual_embedder, ...
  std::string model_id;  // non-empty; cache key component
  std::string version;

  std::string cache_key() const { return kind + "/" + model_id + "@" + version; }
};

class MaskedPredictor {
 public:
  virtual ~MaskedPredictor() = default;
  // At most k fillers, strictly descending probability, positions 1..len.
  // k < 1 → ArgumentError. Backend failures → BackendError.
  virtual std::vector<Prediction> predict(const MaskedSentence& ms, int k) = 0;
  virtual const BackendDescriptor& descriptor() const = 0;
};

class ContextualEmbedder {
 public:
  virtual ~ContextualEmbedder() = default;
  // Embedding of `span` within `tokens`; multi-token spans are reduced to
  // the arithmetic mean of their token vectors. Span out of bounds →
  // ArgumentError.
  virtual EmbeddingVector embed(const std::vector<std::string>& tokens,
                                Span span) = 0;
  virtual const BackendDescriptor& descriptor() const = 0;
};

class StaticEmbedder {
 public:
  virtual ~StaticEmbedder() = default;
  // Vector for an in-vocabulary word, absent otherwise. Callers average
  // word vectors for multiword phrases.
  virtual std::optional<EmbeddingVector> embed(const std::string& word) = 0;
  virtual const BackendDescriptor& descriptor() const = 0;
};

class SenseDisambiguator {
 public:
  virtual ~SenseDisambiguator() = default;
  // The synset expressed by `span` in context, or absent when unresolved.
  virtual std::optional<SynsetRef> disambiguate(
      const std::vector<std::string>& tokens, Span span) = 0;
  virtual const BackendDescriptor& descriptor() const = 0;
};

// Per-token POS (coarse universal tagset) and NER tags plus flat chunks.
struct TagResult {
  std::vector<std::string> pos_tags;  // one per token
  std::vector<std::string> ner_tags;  // one per token, "" when untagged
  std::vector<Span> noun_chunks;      // non-overlapping, non-recursive
  std::vector<Span> verb_chunks;
};

class Tagger {
 public:
  virtual ~Tagger() = default;
  // Empty input → ArgumentError.
  virtual TagResult tag(const std::vector<std::string>& tokens) = 0;
  virtual const BackendDescriptor& descriptor() const = 0;
};

class NgramSource {
 public:
  virtual ~NgramSource() = default;
  // True iff the corpus attests the phrase. May throw BackendError with a
  // retryable flag (remote sources).
  virtual bool exists(const std::string& phrase) = 0;
  virtual const BackendDescriptor& descriptor() const = 0;
};

}  // namespace clozegen
