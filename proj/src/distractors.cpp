#include "clozegen/distractors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "clozegen/errors.hpp"

namespace clozegen {

namespace {

std::string shown(const std::string& tag) { return tag.empty() ? "-" : tag; }

std::string shown(const std::optional<std::string>& tag) {
  return tag ? *tag : "-";
}

bool spans_overlap(const Span& a, const Span& b) {
  return a.begin < b.end && b.begin < a.end;
}

EmbeddingVector gloss_embedding(const KnowledgeBase& kb, SynsetRef ref,
                                ContextualEmbedder& gloss_embedder) {
  auto tokens = text::tokenize(kb.gloss_of(ref));
  return gloss_embedder.embed(tokens, Span{0, tokens.size()});
}

}  // namespace

std::string_view to_string(RemovedBy removed_by) {
  switch (removed_by) {
    case RemovedBy::None: return "none";
    case RemovedBy::Pos: return "pos";
    case RemovedBy::Ner: return "ner";
    case RemovedBy::Lexical: return "lexical";
    case RemovedBy::Synonym: return "synonym";
    case RemovedBy::Hierarchy: return "hierarchy";
  }
  return "none";
}

std::pair<std::vector<InstanceCandidate>, std::vector<FilterTrace>>
feature_filter(const std::vector<InstanceCandidate>& candidates,
               const InstanceInfo& info, LexicalMode mode) {
  std::set<SynsetRef> neighborhood(info.inherited_hypernyms.begin(),
                                   info.inherited_hypernyms.end());
  neighborhood.insert(info.hyponym_set.begin(), info.hyponym_set.end());
  const bool sense_known = info.synset.has_value();

  std::vector<InstanceCandidate> survivors;
  std::vector<FilterTrace> traces;
  traces.reserve(candidates.size());

  for (const auto& cand : candidates) {
    FilterTrace trace;
    trace.candidate = cand;
    if (cand.pos_tag != info.pos_tag) {
      trace.removed_by = RemovedBy::Pos;
      trace.detail = shown(cand.pos_tag) + " vs " + shown(info.pos_tag);
    } else if (cand.ner_tag != info.ner_tag) {
      trace.removed_by = RemovedBy::Ner;
      trace.detail = shown(cand.ner_tag) + " vs " + shown(info.ner_tag);
    } else if (!sense_known) {
      trace.detail = "sense checks skipped: instance sense unresolved";
    } else {
      bool removed = false;
      if (info.lexical_label) {
        if (mode == LexicalMode::Strict) {
          if (!cand.lexical_label ||
              *cand.lexical_label != *info.lexical_label) {
            trace.removed_by = RemovedBy::Lexical;
            trace.detail =
                shown(cand.lexical_label) + " vs " + *info.lexical_label;
            removed = true;
          }
        } else if (!cand.label_set.count(*info.lexical_label)) {
          trace.removed_by = RemovedBy::Lexical;
          trace.detail = *info.lexical_label + " not among candidate labels";
          removed = true;
        }
      }
      if (!removed && cand.synset_in_context &&
          *cand.synset_in_context == *info.synset) {
        trace.removed_by = RemovedBy::Synonym;
        trace.detail = "same sense as the instance";
        removed = true;
      }
      if (!removed) {
        bool overlap = false;
        for (const auto& ref : cand.synsets) {
          if (neighborhood.count(ref)) {
            overlap = true;
            break;
          }
        }
        if (!overlap) {
          trace.removed_by = RemovedBy::Hierarchy;
          trace.detail = "no sense inside the instance neighborhood";
        }
      }
    }
    if (trace.removed_by == RemovedBy::None) survivors.push_back(cand);
    traces.push_back(std::move(trace));
  }
  return {std::move(survivors), std::move(traces)};
}

double embedding_similarity(const Sentence& sentence, const Instance& inst,
                            const InstanceCandidate& cand,
                            ContextualEmbedder& embedder) {
  EmbeddingVector inst_vec =
      embedder.embed(sentence.tokens, inst.span_in_sentence);
  Span new_span;
  auto substituted = substitute_span(sentence.tokens, inst.span_in_sentence,
                                     cand.surface, &new_span);
  return cosine(inst_vec, embedder.embed(substituted, new_span));
}

double synset_reward_value(double definition_similarity, double alpha) {
  if (alpha <= 0.0)
    throw ArgumentError("synset_reward: alpha must be positive");
  double sd = std::clamp(definition_similarity, 0.0, 1.0);
  return 1.0 + std::pow(sd, alpha);
}

double synset_reward(const InstanceInfo& info, const InstanceCandidate& cand,
                     const KnowledgeBase& kb,
                     ContextualEmbedder& gloss_embedder, double alpha) {
  if (alpha <= 0.0)
    throw ArgumentError("synset_reward: alpha must be positive");
  if (!info.synset || !info.lexical_label) return 1.0;

  std::vector<SynsetRef> same_label;
  for (const auto& ref : cand.synsets)
    if (kb.synset_info(ref).lexical_label == *info.lexical_label)
      same_label.push_back(ref);
  if (same_label.empty()) return 1.0;

  EmbeddingVector inst_gloss = gloss_embedding(kb, *info.synset, gloss_embedder);
  double best = 0.0;
  for (const auto& ref : same_label) {
    double sd = std::clamp(
        cosine(inst_gloss, gloss_embedding(kb, ref, gloss_embedder)), 0.0, 1.0);
    best = std::max(best, sd);
  }
  return synset_reward_value(best, alpha);
}

double prediction_reward_value(std::optional<int> position, double beta) {
  if (beta < 0.0)
    throw ArgumentError("prediction_reward: beta must be non-negative");
  if (!position) return 1.0;
  if (*position < 1)
    throw ArgumentError("prediction_reward: rank must be at least 1");
  return 1.0 + beta / static_cast<double>(*position);
}

double prediction_reward(const InstanceCandidate& cand, double beta) {
  if (cand.origin == CandidateOrigin::Sibling)
    return prediction_reward_value(std::nullopt, beta);
  if (!cand.position)
    throw ArgumentError("prediction_reward: predicted candidate lacks a rank");
  return prediction_reward_value(cand.position, beta);
}

double lexical_penalty(const InstanceInfo& info, const InstanceCandidate& cand,
                       double gamma) {
  if (!info.lexical_label) return 1.0;
  if (!cand.lexical_label || *cand.lexical_label != *info.lexical_label)
    return gamma;
  return 1.0;
}

std::vector<RankedCandidate> rank_candidates(
    const std::vector<InstanceCandidate>& candidates, const InstanceInfo& info,
    const Sentence& sentence, const KnowledgeBase& kb,
    ContextualEmbedder& embedder, ContextualEmbedder& gloss_embedder,
    const RankParams& params) {
  std::vector<RankedCandidate> ranked;
  ranked.reserve(candidates.size());
  for (const auto& cand : candidates) {
    RankedCandidate rc;
    rc.e_score = embedding_similarity(sentence, info.instance, cand, embedder);
    rc.w_score = synset_reward(info, cand, kb, gloss_embedder, params.alpha);
    rc.p_score = prediction_reward(cand, params.beta);
    rc.l_score = params.mode == LexicalMode::Relaxed
                     ? lexical_penalty(info, cand, params.gamma)
                     : 1.0;
    rc.r_score = rc.e_score * rc.w_score * rc.p_score * rc.l_score;
    rc.candidate = cand;
    ranked.push_back(std::move(rc));
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) {
                     if (a.r_score != b.r_score) return a.r_score > b.r_score;
                     if (a.e_score != b.e_score) return a.e_score > b.e_score;
                     return a.candidate.surface < b.candidate.surface;
                   });
  return ranked;
}

std::vector<InstanceCandidate> remove_stem_echoes(
    std::vector<InstanceCandidate> candidates, const Sentence& sentence,
    const Instance& inst) {
  std::vector<std::string> lowered;
  lowered.reserve(sentence.tokens.size());
  for (const auto& token : sentence.tokens)
    lowered.push_back(text::to_lower(token));

  auto echoes = [&](const InstanceCandidate& cand) {
    auto needle = text::tokenize(text::to_lower(cand.surface));
    if (needle.empty() || needle.size() > lowered.size()) return false;
    for (std::size_t start = 0; start + needle.size() <= lowered.size();
         ++start) {
      Span window{start, start + needle.size()};
      if (spans_overlap(window, inst.span_in_sentence)) continue;
      if (std::equal(needle.begin(), needle.end(), lowered.begin() + start))
        return true;
    }
    return false;
  };
  std::erase_if(candidates, echoes);
  return candidates;
}

std::vector<DistractorCandidate> combine_candidates(
    const AnswerKey& key,
    const std::vector<std::vector<RankedCandidate>>& per_instance,
    std::size_t cap) {
  if (per_instance.size() != key.instances.size())
    throw ArgumentError(
        "combine_candidates: one candidate list per instance required");
  if (cap == 0) throw ArgumentError("combine_candidates: cap must be positive");
  const std::size_t slots = per_instance.size();
  if (slots == 0) return {};

  std::vector<std::string> key_tokens = text::tokenize(key.surface);
  if (key_tokens.size() != key.span.size())
    throw ArgumentError(
        "combine_candidates: key surface does not match its span");
  for (const auto& inst : key.instances) {
    if (inst.span_in_sentence.empty() ||
        inst.span_in_sentence.begin < key.span.begin ||
        inst.span_in_sentence.end > key.span.end)
      throw ArgumentError("combine_candidates: instance span outside the key");
  }

  auto build_phrase = [&](const std::vector<int>& choice) {
    std::vector<std::string> out;
    std::size_t cursor = key.span.begin;
    for (std::size_t s = 0; s < slots; ++s) {
      const auto& inst_span = key.instances[s].span_in_sentence;
      for (std::size_t t = cursor; t < inst_span.begin; ++t)
        out.push_back(key_tokens[t - key.span.begin]);
      if (choice[s] < 0) {
        for (std::size_t t = inst_span.begin; t < inst_span.end; ++t)
          out.push_back(key_tokens[t - key.span.begin]);
      } else {
        auto repl = text::tokenize(
            per_instance[s][static_cast<std::size_t>(choice[s])]
                .candidate.surface);
        out.insert(out.end(), repl.begin(), repl.end());
      }
      cursor = inst_span.end;
    }
    for (std::size_t t = cursor; t < key.span.end; ++t)
      out.push_back(key_tokens[t - key.span.begin]);
    return text::join(out);
  };

  // Odometer over (identity | candidate i) per slot; the all-identity start
  // state is advanced past before the first emission.
  std::vector<int> choice(slots, -1);
  std::vector<DistractorCandidate> combos;
  while (true) {
    std::size_t wheel = 0;
    while (wheel < slots) {
      ++choice[wheel];
      if (choice[wheel] < static_cast<int>(per_instance[wheel].size())) break;
      choice[wheel] = -1;
      ++wheel;
    }
    if (wheel == slots) break;

    DistractorCandidate dc;
    dc.substitutions.resize(slots);
    for (std::size_t s = 0; s < slots; ++s) {
      if (choice[s] < 0) continue;
      const auto& rc = per_instance[s][static_cast<std::size_t>(choice[s])];
      dc.substitutions[s] = rc.candidate.surface;
      dc.rank_product *= rc.r_score;
    }
    dc.phrase = build_phrase(choice);
    combos.push_back(std::move(dc));
  }

  std::stable_sort(combos.begin(), combos.end(),
                   [](const DistractorCandidate& a,
                      const DistractorCandidate& b) {
                     if (a.rank_product != b.rank_product)
                       return a.rank_product > b.rank_product;
                     return a.phrase < b.phrase;
                   });
  if (combos.size() > cap) combos.resize(cap);
  return combos;
}

std::vector<DistractorCandidate> ngram_filter(
    std::vector<DistractorCandidate> candidates, NgramSource& source,
    const KnowledgeBase& kb, NgramErrorPolicy policy,
    std::vector<std::string>* warnings) {
  std::vector<DistractorCandidate> kept;
  for (auto& dc : candidates) {
    auto tokens = text::tokenize(dc.phrase);
    if (tokens.size() == 1 && kb.is_entry(tokens.front())) {
      dc.ngram_verified = true;  // single dictionary words are attested
      kept.push_back(std::move(dc));
      continue;
    }
    try {
      if (source.exists(dc.phrase)) {
        dc.ngram_verified = true;
        kept.push_back(std::move(dc));
      }
    } catch (const BackendError& err) {
      if (policy == NgramErrorPolicy::Fail) throw;
      dc.ngram_verified = false;
      if (warnings)
        warnings->push_back("ngram lookup unavailable for \"" + dc.phrase +
                            "\": " + err.what());
      kept.push_back(std::move(dc));
    }
  }
  return kept;
}

std::string render_stem_with_blank(const Sentence& sentence, Span key_span) {
  if (key_span.empty() || key_span.end > sentence.tokens.size())
    throw ArgumentError("render_stem_with_blank: span out of bounds");
  std::vector<std::string> prefix(sentence.tokens.begin(),
                                  sentence.tokens.begin() +
                                      static_cast<std::ptrdiff_t>(key_span.begin));
  std::vector<std::string> suffix(sentence.tokens.begin() +
                                      static_cast<std::ptrdiff_t>(key_span.end),
                                  sentence.tokens.end());
  std::string stem;
  if (!prefix.empty()) stem += text::detokenize(prefix) + " ";
  stem += std::string(kBlankMarker);
  if (!suffix.empty()) stem += " " + text::detokenize(suffix);
  return stem;
}

ClozeQuestion select_distractors(const Sentence& sentence,
                                 const AnswerKey& key,
                                 std::vector<DistractorCandidate> candidates,
                                 ContextualEmbedder& embedder, std::size_t n) {
  if (n == 0) throw ArgumentError("select_distractors: n must be positive");
  EmbeddingVector key_vec = embedder.embed(sentence.tokens, key.span);
  for (auto& dc : candidates) {
    Span new_span;
    auto substituted =
        substitute_span(sentence.tokens, key.span, dc.phrase, &new_span);
    dc.key_similarity = cosine(key_vec, embedder.embed(substituted, new_span));
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const DistractorCandidate& a,
                      const DistractorCandidate& b) {
                     if (a.key_similarity != b.key_similarity)
                       return a.key_similarity > b.key_similarity;
                     return a.phrase < b.phrase;
                   });

  ClozeQuestion question;
  question.answer_key = key;
  question.stem_with_blank = render_stem_with_blank(sentence, key.span);
  std::set<std::string> seen;
  seen.insert(text::normalize(key.surface));
  for (const auto& dc : candidates) {
    if (question.distractors.size() >= n) break;
    if (!seen.insert(text::normalize(dc.phrase)).second) continue;
    question.distractors.push_back(dc.phrase);
  }
  question.shortfall = question.distractors.size() < n;
  question.scored = std::move(candidates);
  return question;
}

}  // namespace clozegen
