#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <set>

#include "clozegen/backends.hpp"

namespace clozegen {

// Table-driven deterministic test doubles for every backend interface,
// loaded from one structured config file (see MockBackendSet::from_file).
//
// Lookup strategies, in priority order:
//   masked predictor   rendered masked sentence -> filler list (verbatim)
//   contextual embedder
//     1. "<sentence>||<begin>:<end>" exact-span table
//     2. normalized span text table
//     3. per-token vectors (same two lookups per token, then a hash-seeded
//        unit vector), averaged over the span
//   static embedder    word table; out-of-vocabulary -> absent unless the
//                      config opts into hash-fallback vectors
//   wsd                first matching rule (phrase + optional substring of
//                      the sentence) resolved to a synset through the kb
//   tagger             word lexicon with punctuation/number heuristics;
//                      noun chunks = maximal DET/ADJ/NOUN/PROPN/NUM runs
//                      trimmed to end at their last NOUN/PROPN; verb chunks =
//                      VERB/AUX runs
//   ngrams             optional inline phrase list
class MockPredictor;
class MockContextualEmbedder;
class MockStaticEmbedder;
class MockSenseDisambiguator;
class MockTagger;
class MockNgramSource;

struct MockBackendSet {
  std::shared_ptr<MockPredictor> predictor;
  std::shared_ptr<MockContextualEmbedder> contextual;
  std::shared_ptr<MockStaticEmbedder> statics;
  std::shared_ptr<MockSenseDisambiguator> wsd;
  std::shared_ptr<MockTagger> tagger;
  std::shared_ptr<MockNgramSource> ngrams;

  // Parses the mock configuration. Malformed content → ParseError; content
  // violating backend invariants (e.g. increasing probabilities) →
  // ValidationError. `kb` resolves wsd rule targets.
  static MockBackendSet from_file(const std::filesystem::path& path,
                                  const KnowledgeBase& kb);
  static MockBackendSet from_json_text(const std::string& json_text,
                                       const std::string& origin,
                                       const KnowledgeBase& kb);
};

class MockPredictor : public MaskedPredictor {
 public:
  std::vector<Prediction> predict(const MaskedSentence& ms, int k) override;
  const BackendDescriptor& descriptor() const override { return desc_; }

 private:
  friend struct MockBackendSet;
  BackendDescriptor desc_{"masked_predictor", "mock", "1"};
  std::map<std::string, std::vector<Prediction>> table_;
};

class MockContextualEmbedder : public ContextualEmbedder {
 public:
  EmbeddingVector embed(const std::vector<std::string>& tokens,
                        Span span) override;
  const BackendDescriptor& descriptor() const override { return desc_; }

 private:
  friend struct MockBackendSet;
  EmbeddingVector token_vector(const std::vector<std::string>& tokens,
                               std::size_t i) const;
  BackendDescriptor desc_{"contextual_embedder", "mock", "1"};
  std::size_t dimension_ = 8;
  std::map<std::string, EmbeddingVector> by_location_;  // "<sent>||<b>:<e>"
  std::map<std::string, EmbeddingVector> by_phrase_;    // normalized text
};

class MockStaticEmbedder : public StaticEmbedder {
 public:
  std::optional<EmbeddingVector> embed(const std::string& word) override;
  const BackendDescriptor& descriptor() const override { return desc_; }

 private:
  friend struct MockBackendSet;
  BackendDescriptor desc_{"static_embedder", "mock", "1"};
  std::size_t dimension_ = 8;
  bool hash_fallback_ = false;
  std::map<std::string, EmbeddingVector> table_;
};

class MockSenseDisambiguator : public SenseDisambiguator {
 public:
  std::optional<SynsetRef> disambiguate(const std::vector<std::string>& tokens,
                                        Span span) override;
  const BackendDescriptor& descriptor() const override { return desc_; }

 private:
  friend struct MockBackendSet;
  struct Rule {
    std::string phrase;             // normalized span text to match
    std::string sentence_contains;  // "" = any sentence
    SynsetRef target;
  };
  const KnowledgeBase* kb_ = nullptr;
  BackendDescriptor desc_{"wsd", "mock", "1"};
  std::vector<Rule> rules_;
};

class MockTagger : public Tagger {
 public:
  TagResult tag(const std::vector<std::string>& tokens) override;
  const BackendDescriptor& descriptor() const override { return desc_; }

 private:
  friend struct MockBackendSet;
  struct Entry {
    std::string pos;
    std::string ner;  // "" = no entity
  };
  BackendDescriptor desc_{"tagger", "mock", "1"};
  std::map<std::string, Entry> lexicon_;
};

class MockNgramSource : public NgramSource {
 public:
  bool exists(const std::string& phrase) override;
  const BackendDescriptor& descriptor() const override { return desc_; }

 private:
  friend struct MockBackendSet;
  BackendDescriptor desc_{"ngram_source", "mock", "1"};
  std::set<std::string> phrases_;  // normalized
};

// Deterministic unit vector derived from a string key; shared by the mock
// embedders' fallback paths.
EmbeddingVector hash_unit_vector(std::string_view key, std::size_t dimension);

}  // namespace clozegen
