#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clozegen/backends.hpp"
#include "clozegen/candidates.hpp"
#include "clozegen/stem_selector.hpp"
#include "clozegen/wordnet.hpp"

namespace clozegen {

// Which checker removed a candidate, if any. Checkers run in this order and
// the first failure wins.
enum class RemovedBy { None, Pos, Ner, Lexical, Synonym, Hierarchy };

std::string_view to_string(RemovedBy removed_by);

struct FilterTrace {
  InstanceCandidate candidate;
  RemovedBy removed_by = RemovedBy::None;
  std::string detail;
};

enum class LexicalMode { Strict, Relaxed };

struct RankParams {
  double alpha = 20.5;  // sharpness of the definition-similarity reward
  double beta = 1.1;    // weight of the prediction-rank reward
  double gamma = 0.5;   // label-mismatch penalty (relaxed mode only)
  LexicalMode mode = LexicalMode::Strict;
};

struct RankedCandidate {
  InstanceCandidate candidate;
  double e_score = 0.0;  // contextual similarity to the instance, [-1, 1]
  double w_score = 1.0;  // definition-similarity reward, [1, 2]
  double p_score = 1.0;  // prediction-rank reward, 1 or (1, 1+beta]
  double l_score = 1.0;  // label penalty, 1 in strict mode
  double r_score = 0.0;  // product of the four
};

// A whole-key replacement phrase built from per-instance choices.
struct DistractorCandidate {
  std::string phrase;
  // One entry per answer-key instance; empty = the instance kept its surface.
  std::vector<std::optional<std::string>> substitutions;
  double rank_product = 1.0;  // product of the chosen candidates' r_scores
  bool ngram_verified = false;
  double key_similarity = 0.0;  // contextual similarity to the answer key
};

// Everything computed for one instance, kept for inspection output.
struct InstanceDiagnostics {
  InstanceInfo info;
  std::vector<FilterTrace> traces;
  std::vector<RankedCandidate> ranked;
};

struct ClozeQuestion {
  std::string stem_with_blank;
  AnswerKey answer_key;
  std::vector<std::string> distractors;  // best first, at most n
  bool shortfall = false;                // fewer than n distractors found
  std::vector<DistractorCandidate> scored;  // every considered phrase
  std::vector<InstanceDiagnostics> instance_diagnostics;
};

// Runs the five checkers (part of speech, named entity, lexical label,
// synonym, taxonomic neighborhood) in fixed order. Returns the survivors and
// one trace per input candidate. When the instance has no resolved sense the
// three sense-based checkers pass candidates through, noting that in the
// trace detail.
std::pair<std::vector<InstanceCandidate>, std::vector<FilterTrace>>
feature_filter(const std::vector<InstanceCandidate>& candidates,
               const InstanceInfo& info, LexicalMode mode);

// Cosine similarity between the instance in its sentence and the candidate
// substituted into the same sentence.
double embedding_similarity(const Sentence& sentence, const Instance& inst,
                            const InstanceCandidate& cand,
                            ContextualEmbedder& embedder);

// 1 + (max definition similarity)^alpha over the candidate senses sharing
// the instance's lexical label; 1 when there are none or the instance sense
// is unresolved. Definition similarity is cosine clamped to [0, 1].
double synset_reward(const InstanceInfo& info, const InstanceCandidate& cand,
                     const KnowledgeBase& kb, ContextualEmbedder& gloss_embedder,
                     double alpha);

// The bare formula: 1 + clamp(definition_similarity, 0, 1)^alpha.
// alpha <= 0 → ArgumentError.
double synset_reward_value(double definition_similarity, double alpha);

// 1 + beta / prediction rank for predicted candidates, 1 for siblings.
double prediction_reward(const InstanceCandidate& cand, double beta);

// The bare formula: 1 + beta/position, or 1 when position is absent.
// beta < 0 or position < 1 → ArgumentError.
double prediction_reward_value(std::optional<int> position, double beta);

// gamma when the candidate's in-context label differs from (or lacks) the
// instance's, 1 otherwise. 1 when the instance label is unresolved.
double lexical_penalty(const InstanceInfo& info, const InstanceCandidate& cand,
                       double gamma);

// Scores every candidate and sorts by score descending; ties broken by
// higher contextual similarity, then by surface.
std::vector<RankedCandidate> rank_candidates(
    const std::vector<InstanceCandidate>& candidates, const InstanceInfo& info,
    const Sentence& sentence, const KnowledgeBase& kb,
    ContextualEmbedder& embedder, ContextualEmbedder& gloss_embedder,
    const RankParams& params);

// Drops candidates whose surface already appears verbatim (case-insensitive)
// elsewhere in the sentence, outside the instance span.
std::vector<InstanceCandidate> remove_stem_echoes(
    std::vector<InstanceCandidate> candidates, const Sentence& sentence,
    const Instance& inst);

// All ways of replacing each instance with one of its ranked candidates or
// keeping it, except keeping everything. Ordered by the product of the
// chosen scores (descending; ties by phrase), truncated to `cap`.
std::vector<DistractorCandidate> combine_candidates(
    const AnswerKey& key,
    const std::vector<std::vector<RankedCandidate>>& per_instance,
    std::size_t cap);

enum class NgramErrorPolicy { Fail, KeepWithWarning };

// Keeps phrases attested by the n-gram source. Single-word phrases that are
// WordNet entries skip the lookup. On backend failure either rethrows or
// keeps the phrase unverified, appending a note to `warnings`.
std::vector<DistractorCandidate> ngram_filter(
    std::vector<DistractorCandidate> candidates, NgramSource& source,
    const KnowledgeBase& kb,
    NgramErrorPolicy policy = NgramErrorPolicy::Fail,
    std::vector<std::string>* warnings = nullptr);

// The sentence with the answer-key span replaced by the blank marker,
// padded with single spaces.
std::string render_stem_with_blank(const Sentence& sentence, Span key_span);

// Scores every candidate by contextual similarity to the answer key and
// keeps the best n distinct ones (never the key itself). Sets `shortfall`
// when fewer than n are available.
ClozeQuestion select_distractors(const Sentence& sentence,
                                 const AnswerKey& key,
                                 std::vector<DistractorCandidate> candidates,
                                 ContextualEmbedder& embedder, std::size_t n);

}  // namespace clozegen
