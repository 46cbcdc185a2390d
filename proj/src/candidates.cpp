#include "clozegen/candidates.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "clozegen/text.hpp"

namespace clozegen {

namespace {

bool is_vowel(char c) {
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

void check_span(Span span, std::size_t token_count, const char* what) {
  if (span.begin >= span.end || span.end > token_count)
    throw ArgumentError(std::string(what) + ": span out of bounds");
}

std::string add_suffix(const std::string& word, const std::string& suffix) {
  if (suffix == "s") {
    if (word.ends_with("s") || word.ends_with("x") || word.ends_with("z") ||
        word.ends_with("ch") || word.ends_with("sh"))
      return word + "es";
    if (word.size() > 1 && word.ends_with("y") &&
        !is_vowel(word[word.size() - 2]))
      return word.substr(0, word.size() - 1) + "ies";
    return word + "s";
  }
  if (suffix == "d" || suffix == "ed") {
    if (word.ends_with("e")) return word + "d";
    if (word.size() > 1 && word.ends_with("y") &&
        !is_vowel(word[word.size() - 2]))
      return word.substr(0, word.size() - 1) + "ied";
    return word + "ed";
  }
  if (suffix == "ing") {
    if (word.ends_with("e") && !word.ends_with("ee"))
      return word.substr(0, word.size() - 1) + "ing";
    return word + "ing";
  }
  return word + suffix;
}

}  // namespace

std::string_view to_string(CandidateOrigin origin) {
  switch (origin) {
    case CandidateOrigin::Predicted: return "predicted";
    case CandidateOrigin::Sibling: return "sibling";
    case CandidateOrigin::Both: return "both";
  }
  return "?";
}

MaskedSentence mask_instance(const Sentence& sentence, const Instance& inst) {
  const Span span = inst.span_in_sentence;
  check_span(span, sentence.tokens.size(), "mask_instance");
  MaskedSentence ms;
  ms.sentence_id = sentence.id;
  ms.masked_span = span;
  ms.prefix_tokens.assign(sentence.tokens.begin(),
                          sentence.tokens.begin() + span.begin);
  ms.suffix_tokens.assign(sentence.tokens.begin() + span.end,
                          sentence.tokens.end());
  return ms;
}

std::vector<std::string> substitute_span(const std::vector<std::string>& tokens,
                                         Span span,
                                         const std::string& replacement,
                                         Span* out_span) {
  check_span(span, tokens.size(), "substitute_span");
  auto repl = text::tokenize(replacement);
  if (repl.empty()) throw ArgumentError("substitute_span: empty replacement");
  std::vector<std::string> out;
  out.reserve(tokens.size() - span.size() + repl.size());
  out.insert(out.end(), tokens.begin(), tokens.begin() + span.begin);
  out.insert(out.end(), repl.begin(), repl.end());
  out.insert(out.end(), tokens.begin() + span.end, tokens.end());
  if (span.begin > 0) {
    std::string& article = out[span.begin - 1];
    std::string lower = text::to_lower(article);
    if (lower == "a" || lower == "an") {
      std::string fixed = is_vowel(repl.front()[0]) ? "an" : "a";
      if (std::isupper(static_cast<unsigned char>(article[0])))
        fixed[0] = static_cast<char>(std::toupper(fixed[0]));
      article = fixed;
    }
  }
  if (out_span) *out_span = {span.begin, span.begin + repl.size()};
  return out;
}

std::string transfer_inflection(const std::string& base_word,
                                const std::string& inflected_word,
                                const std::string& target_word) {
  if (base_word.empty() || target_word.empty() || base_word == inflected_word)
    return target_word;
  std::size_t common = 0;
  while (common < base_word.size() && common < inflected_word.size() &&
         base_word[common] == inflected_word[common])
    ++common;
  const std::string strip = base_word.substr(common);
  const std::string add = inflected_word.substr(common);
  if (strip.empty()) return add_suffix(target_word, add);
  if (target_word.size() > strip.size() && target_word.ends_with(strip))
    return target_word.substr(0, target_word.size() - strip.size()) + add;
  if (strip == "e") return add_suffix(target_word, add);  // e-drop pattern
  return target_word;
}

InstanceInfo annotate_instance(const Sentence& sentence, const Instance& inst,
                               const KnowledgeBase& kb, SenseDisambiguator& wsd,
                               Tagger& tagger,
                               const NeighborhoodDepths& depths) {
  const Span span = inst.span_in_sentence;
  check_span(span, sentence.tokens.size(), "annotate_instance");
  InstanceInfo info;
  info.instance = inst;
  TagResult tags = tagger.tag(sentence.tokens);
  info.pos_tag = tags.pos_tags[span.end - 1];  // chunk head = last token
  info.ner_tag = tags.ner_tags[span.end - 1];
  if (inst.in_wordnet) {
    if (auto sense = wsd.disambiguate(sentence.tokens, span)) {
      auto all = kb.synsets_of(inst.surface);
      if (std::find(all.begin(), all.end(), *sense) != all.end())
        info.synset = *sense;
    }
  }
  if (!info.synset) return info;
  info.lexical_label = kb.synset_info(*info.synset).lexical_label;
  info.inherited_hypernyms = kb.hypernym_closure(*info.synset);
  if (info.synset->pos == Pos::Adj) {
    info.hyponym_set = kb.adjective_clusters(*info.synset);
    return info;
  }
  const auto& direct_vec = kb.direct_hypernyms(*info.synset);
  std::set<SynsetRef> direct(direct_vec.begin(), direct_vec.end());
  for (const auto& ancestor : info.inherited_hypernyms) {
    auto depth = direct.contains(ancestor) ? depths.below_immediate
                                           : depths.below_higher;
    auto sweep = kb.hyponym_closure(ancestor, depth);
    info.hyponym_set.insert(sweep.begin(), sweep.end());
  }
  return info;
}

std::vector<InstanceCandidate> gather_candidates(const InstanceInfo& info,
                                                 const Sentence& sentence,
                                                 const KnowledgeBase& kb,
                                                 MaskedPredictor& predictor,
                                                 int k) {
  auto masked = mask_instance(sentence, info.instance);
  std::vector<InstanceCandidate> out;
  std::map<std::string, std::size_t> index;  // normalized surface -> position
  const std::string self_key = text::normalize(info.instance.surface);

  for (const auto& pred : predictor.predict(masked, k)) {
    if (text::is_punctuation(pred.token) || text::is_stopword(pred.token) ||
        text::is_subword_fragment(pred.token))
      continue;
    std::string key = text::normalize(pred.token);
    if (key == self_key || index.contains(key)) continue;
    InstanceCandidate cand;
    cand.surface = pred.token;
    cand.origin = CandidateOrigin::Predicted;
    cand.position = pred.position;
    index[key] = out.size();
    out.push_back(std::move(cand));
  }

  if (!info.synset) return out;

  // carry the instance's surface inflection across to each sibling lemma
  const auto inst_words = text::tokenize(info.instance.surface);
  std::vector<std::string> base_words = inst_words;
  if (auto base = kb.base_form(info.instance.surface, info.synset->pos))
    base_words = text::tokenize(*base);
  std::optional<std::size_t> changed;
  if (base_words.size() == inst_words.size()) {
    for (std::size_t i = 0; i < inst_words.size(); ++i) {
      if (base_words[i] == inst_words[i]) continue;
      if (changed) {  // more than one word differs: don't transfer
        changed.reset();
        break;
      }
      changed = i;
    }
  }
  auto inflect = [&](const std::string& lemma) {
    if (!changed) return lemma;
    auto words = text::tokenize(lemma);
    std::size_t site;
    if (inst_words.size() == 1)
      site = info.synset->pos == Pos::Verb ? 0 : words.size() - 1;
    else if (*changed == 0)
      site = 0;
    else if (*changed == inst_words.size() - 1)
      site = words.size() - 1;
    else
      return lemma;
    words[site] = transfer_inflection(base_words[*changed],
                                      inst_words[*changed], words[site]);
    return text::join(words);
  };

  for (const auto& lemma : kb.sibling_entries(*info.synset)) {
    std::string surface = inflect(lemma);
    std::string key = text::normalize(surface);
    if (key == self_key) continue;
    if (auto it = index.find(key); it != index.end()) {
      out[it->second].origin = CandidateOrigin::Both;
      continue;
    }
    InstanceCandidate cand;
    cand.surface = surface;
    cand.origin = CandidateOrigin::Sibling;
    index[key] = out.size();
    out.push_back(std::move(cand));
  }
  return out;
}

InstanceCandidate annotate_candidate(const Sentence& sentence,
                                     const Instance& inst,
                                     InstanceCandidate cand,
                                     const KnowledgeBase& kb,
                                     SenseDisambiguator& wsd, Tagger& tagger) {
  if (cand.surface.empty())
    throw ArgumentError("annotate_candidate: empty surface");
  Span span;
  auto tokens =
      substitute_span(sentence.tokens, inst.span_in_sentence, cand.surface,
                      &span);
  TagResult tags = tagger.tag(tokens);
  cand.pos_tag = tags.pos_tags[span.end - 1];
  cand.ner_tag = tags.ner_tags[span.end - 1];
  auto refs = kb.synsets_of(cand.surface);
  cand.synsets = {refs.begin(), refs.end()};
  cand.label_set = kb.lexical_labels_of(cand.surface);
  cand.synset_in_context.reset();
  cand.lexical_label.reset();
  if (auto sense = wsd.disambiguate(tokens, span);
      sense && cand.synsets.contains(*sense)) {
    cand.synset_in_context = *sense;
    cand.lexical_label = kb.synset_info(*sense).lexical_label;
  }
  return cand;
}

}  // namespace clozegen
