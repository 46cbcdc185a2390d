#pragma once

#include <memory>
#include <string>
#include <vector>

#include "clozegen/backends.hpp"
#include "clozegen/config.hpp"
#include "clozegen/distractors.hpp"
#include "clozegen/evaluation.hpp"
#include "clozegen/stem_selector.hpp"
#include "clozegen/wordnet.hpp"

namespace clozegen {

// One shareable handle per backend interface. All are required except
// `statics`, which only the phrase-similarity report consumes.
struct BackendSet {
  std::shared_ptr<MaskedPredictor> predictor;
  std::shared_ptr<ContextualEmbedder> contextual;
  std::shared_ptr<StaticEmbedder> statics;
  std::shared_ptr<SenseDisambiguator> wsd;
  std::shared_ptr<Tagger> tagger;
  std::shared_ptr<NgramSource> ngrams;
};

// Builds the backend set a config describes: the table-driven deterministic
// backends from backends.file (checked against the pinned model id/version),
// each wrapped in the on-disk cache when cache_dir is set, plus the n-gram
// source the mode selects. Local mode without ngram.file falls back to the
// phrase list inside the backend table.
BackendSet open_backends(const PipelineConfig& config, const KnowledgeBase& kb);

// The whole generation path: stem selection, per-instance candidate
// gathering/filtering/ranking, phrase combination, corpus check, and final
// selection. Deterministic for a fixed config, dictionary, and backend set.
class Pipeline {
 public:
  Pipeline(PipelineConfig config, std::shared_ptr<const KnowledgeBase> kb,
           BackendSet backends);

  // Every question the article yields: stems in rank order, keys in sentence
  // order within a stem. Questions whose key produced no distractors are
  // kept (shortfall set, distractors empty). max_questions 0 = no limit.
  std::vector<ClozeQuestion> generate(const std::string& article_text,
                                      std::size_t max_questions = 0);

  // One question for an already chosen stem sentence and answer key (the key
  // is segmented here; pass it straight from identify_answer_keys).
  ClozeQuestion generate_for_key(const Sentence& sentence, AnswerKey key);
  ClozeQuestion generate_for_key(const Sentence& sentence, AnswerKey key,
                                 const RankParams& params);

  // Rebuilds the sentence behind a dataset entry (blank replaced by the
  // answer key) and generates distractors for exactly that span.
  ClozeQuestion for_entry(const DatasetEntry& entry);
  ClozeQuestion for_entry(const DatasetEntry& entry, const RankParams& params);

  const PipelineConfig& config() const { return config_; }
  const KnowledgeBase& kb() const { return *kb_; }
  BackendSet& backends() { return backends_; }

 private:
  PipelineConfig config_;
  std::shared_ptr<const KnowledgeBase> kb_;
  BackendSet backends_;
};

// One line-delimited output record: stem, answer, answer_kind, sentence,
// span, distractors, shortfall. Key order is alphabetical, so a dump() of
// the result is byte-stable.
std::string question_record(const ClozeQuestion& question);

}  // namespace clozegen
