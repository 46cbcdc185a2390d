#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "clozegen/backends.hpp"
#include "clozegen/stem_selector.hpp"
#include "clozegen/wordnet.hpp"

namespace clozegen {

// Where a candidate replacement for an instance came from: the masked-LM
// prediction list, the instance sense's WordNet siblings, or both.
enum class CandidateOrigin { Predicted, Sibling, Both };

std::string_view to_string(CandidateOrigin origin);

// An answer-key instance annotated against the sentence it appears in.
struct InstanceInfo {
  Instance instance;
  std::string pos_tag;
  std::string ner_tag;  // "" when untagged
  std::optional<SynsetRef> synset;           // sense picked in this sentence
  std::optional<std::string> lexical_label;  // label of that sense
  // Ancestors of the sense, breadth-first. Empty when no sense or for
  // adjectives (which have no hypernym tree).
  std::vector<SynsetRef> inherited_hypernyms;
  // Descendant sweep below each ancestor (see NeighborhoodDepths); for
  // adjectives, the similar-to cluster plus antonym clusters instead.
  std::set<SynsetRef> hyponym_set;
};

// A candidate replacement for one instance.
struct InstanceCandidate {
  std::string surface;
  CandidateOrigin origin = CandidateOrigin::Predicted;
  std::optional<int> position;  // 1-based prediction rank, when predicted
  std::string pos_tag;
  std::string ner_tag;
  std::optional<SynsetRef> synset_in_context;  // sense after substitution
  std::optional<std::string> lexical_label;    // label of that sense
  LexicalLabelSet label_set;       // all labels of the surface, any sense
  std::set<SynsetRef> synsets;     // all synsets of the surface
};

// How deep below each ancestor of the instance's sense the descendant sweep
// reaches when building the taxonomic neighborhood. Absent = unbounded.
struct NeighborhoodDepths {
  std::optional<int> below_immediate;     // default: unbounded
  std::optional<int> below_higher = 2;
};

// The sentence with the instance span removed, ready for fill-in prediction.
MaskedSentence mask_instance(const Sentence& sentence, const Instance& inst);

// `tokens` with [span) replaced by the tokens of `replacement`. A "a"/"an"
// directly before the span is re-agreed with the new first word; nothing
// else is altered. If `out_span` is given it receives the replacement's
// span in the result.
std::vector<std::string> substitute_span(const std::vector<std::string>& tokens,
                                         Span span,
                                         const std::string& replacement,
                                         Span* out_span = nullptr);

// Re-applies the inflection that turns base_word into inflected_word onto
// target_word ("cell"/"cells" onto "platelet" -> "platelets"), with basic
// English orthography (foxes, bodies, trailed, chasing). Returns target_word
// unchanged when the pattern does not carry over.
std::string transfer_inflection(const std::string& base_word,
                                const std::string& inflected_word,
                                const std::string& target_word);

// Tags the sentence and, for instances known to WordNet, resolves the sense
// in context (a reported sense that is not a sense of the surface counts as
// unresolved) and collects the taxonomic neighborhood around it.
InstanceInfo annotate_instance(const Sentence& sentence, const Instance& inst,
                               const KnowledgeBase& kb, SenseDisambiguator& wsd,
                               Tagger& tagger,
                               const NeighborhoodDepths& depths = {});

// Top-k masked-LM fillers (minus punctuation, stopwords, and subword
// fragments — surviving fillers keep their original ranks) unioned with the
// sibling entries of the instance's sense, inflected to match the instance
// surface. A filler that is also a sibling becomes one candidate with origin
// Both, keeping its rank. Never contains the instance's own surface.
std::vector<InstanceCandidate> gather_candidates(const InstanceInfo& info,
                                                 const Sentence& sentence,
                                                 const KnowledgeBase& kb,
                                                 MaskedPredictor& predictor,
                                                 int k);

// Fills the tag, sense, and label fields of `cand` by substituting its
// surface into the sentence in place of the instance. Independent of any
// other candidate.
InstanceCandidate annotate_candidate(const Sentence& sentence,
                                     const Instance& inst,
                                     InstanceCandidate cand,
                                     const KnowledgeBase& kb,
                                     SenseDisambiguator& wsd, Tagger& tagger);

}  // namespace clozegen
