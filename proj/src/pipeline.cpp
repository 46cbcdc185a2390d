#include "clozegen/pipeline.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include <json.hpp>

#include "clozegen/cache.hpp"
#include "clozegen/candidates.hpp"
#include "clozegen/errors.hpp"
#include "clozegen/mock_backends.hpp"
#include "clozegen/ngram.hpp"
#include "clozegen/text.hpp"

namespace clozegen {

namespace {

void check_pin(const BackendDescriptor& found, const std::string& model_id,
               const std::string& version) {
  if (!model_id.empty() && found.model_id != model_id)
    throw ValidationError("backends.model_id: table declares \"" +
                              found.model_id + "\", config pins \"" +
                              model_id + "\"",
                          {});
  if (!version.empty() && found.version != version)
    throw ValidationError("backends.version: table declares \"" +
                              found.version + "\", config pins \"" + version +
                              "\"",
                          {});
}

std::shared_ptr<NgramSource> open_ngrams(const PipelineConfig& config,
                                         std::shared_ptr<NgramSource> inline_table) {
  switch (config.ngram_mode) {
    case NgramMode::Permissive:
      return std::make_shared<PermissiveNgramSource>();
    case NgramMode::Remote:
      return std::make_shared<RemoteNgramClient>(config.ngram_host,
                                                 config.ngram_port);
    case NgramMode::Local:
      break;
  }
  if (config.ngram_file.empty()) return inline_table;
  return std::make_shared<LocalNgramTable>(
      LocalNgramTable::load(config.ngram_file));
}

}  // namespace

BackendSet open_backends(const PipelineConfig& config,
                         const KnowledgeBase& kb) {
  if (config.backends_file.empty())
    throw ValidationError("backends.file: required to run the pipeline", {});
  MockBackendSet table = MockBackendSet::from_file(config.backends_file, kb);
  check_pin(table.predictor->descriptor(), config.backend_model_id,
            config.backend_version);

  BackendSet set{table.predictor, table.contextual, table.statics, table.wsd,
                 table.tagger,    open_ngrams(config, table.ngrams)};
  if (!config.cache_dir.empty()) {
    auto cache = std::make_shared<BackendCache>(config.cache_dir);
    set.predictor = with_cache(set.predictor, cache);
    set.contextual = with_cache(set.contextual, cache);
    set.statics = with_cache(set.statics, cache);
    set.wsd = with_cache(set.wsd, cache);
  }
  return set;
}

Pipeline::Pipeline(PipelineConfig config,
                   std::shared_ptr<const KnowledgeBase> kb,
                   BackendSet backends)
    : config_(std::move(config)),
      kb_(std::move(kb)),
      backends_(std::move(backends)) {
  validate_config(config_);
  if (!kb_) throw ArgumentError("pipeline: dictionary is required");
  if (!backends_.predictor || !backends_.contextual || !backends_.wsd ||
      !backends_.tagger || !backends_.ngrams)
    throw ArgumentError("pipeline: incomplete backend set");
}

std::vector<ClozeQuestion> Pipeline::generate(const std::string& article_text,
                                              std::size_t max_questions) {
  std::vector<Sentence> sentences = segment_sentences(article_text);
  CentralityRanker ranker(backends_.contextual);
  std::vector<Sentence> ranked = rank_sentences(std::move(sentences), ranker);
  StemSelection selection = select_stems(
      ranked, *backends_.tagger, ranked.size(),
      static_cast<std::size_t>(config_.min_stem_tokens),
      static_cast<std::size_t>(config_.max_stem_tokens));

  std::vector<ClozeQuestion> questions;
  for (const Sentence& stem : selection.stems) {
    for (AnswerKey& key : identify_answer_keys(stem, *backends_.tagger)) {
      questions.push_back(generate_for_key(stem, std::move(key)));
      if (max_questions && questions.size() >= max_questions)
        return questions;
    }
  }
  return questions;
}

ClozeQuestion Pipeline::generate_for_key(const Sentence& sentence,
                                         AnswerKey key) {
  return generate_for_key(sentence, std::move(key), config_.rank_params());
}

ClozeQuestion Pipeline::generate_for_key(const Sentence& sentence,
                                         AnswerKey key,
                                         const RankParams& params) {
  key = segment_answer_key(sentence, std::move(key), *kb_);

  std::vector<InstanceDiagnostics> diagnostics;
  std::vector<std::vector<RankedCandidate>> per_instance;
  for (const Instance& inst : key.instances) {
    InstanceInfo info =
        annotate_instance(sentence, inst, *kb_, *backends_.wsd,
                          *backends_.tagger);
    std::vector<InstanceCandidate> candidates;
    for (auto& cand : gather_candidates(info, sentence, *kb_,
                                        *backends_.predictor, config_.k))
      candidates.push_back(annotate_candidate(sentence, inst, std::move(cand),
                                              *kb_, *backends_.wsd,
                                              *backends_.tagger));
    candidates = remove_stem_echoes(std::move(candidates), sentence, inst);
    auto [survivors, traces] = feature_filter(candidates, info, params.mode);
    std::vector<RankedCandidate> ranked =
        rank_candidates(survivors, info, sentence, *kb_, *backends_.contextual,
                        *backends_.contextual, params);

    std::vector<RankedCandidate> top = ranked;
    if (top.size() > static_cast<std::size_t>(config_.m))
      top.resize(static_cast<std::size_t>(config_.m));
    per_instance.push_back(std::move(top));
    diagnostics.push_back(
        InstanceDiagnostics{std::move(info), std::move(traces),
                            std::move(ranked)});
  }

  std::vector<DistractorCandidate> combined = combine_candidates(
      key, per_instance, static_cast<std::size_t>(config_.cap));
  std::vector<DistractorCandidate> considered = combined;  // pre-verdict copy
  std::vector<DistractorCandidate> attested =
      ngram_filter(std::move(combined), *backends_.ngrams, *kb_);

  ClozeQuestion question = select_distractors(
      sentence, key, std::move(attested), *backends_.contextual,
      static_cast<std::size_t>(config_.n));

  // Replace the scored list with every considered phrase: kept ones carry
  // their verdict and similarity, removed ones stay unverified. Selection
  // re-sorts by similarity, so match kept phrases back by text.
  std::map<std::string, const DistractorCandidate*> kept;
  for (const auto& dc : question.scored) kept.emplace(dc.phrase, &dc);
  for (auto& phrase : considered) {
    auto it = kept.find(phrase.phrase);
    if (it != kept.end()) phrase = *it->second;
  }
  question.scored = std::move(considered);
  question.instance_diagnostics = std::move(diagnostics);
  return question;
}

ClozeQuestion Pipeline::for_entry(const DatasetEntry& entry) {
  return for_entry(entry, config_.rank_params());
}

ClozeQuestion Pipeline::for_entry(const DatasetEntry& entry,
                                  const RankParams& params) {
  std::vector<std::string> stem_tokens = text::tokenize(entry.stem);
  std::size_t blank = stem_tokens.size();
  for (std::size_t i = 0; i < stem_tokens.size(); ++i) {
    if (stem_tokens[i] == kBlankMarker) {
      if (blank != stem_tokens.size())
        throw ArgumentError("entry stem has more than one blank");
      blank = i;
    }
  }
  if (blank == stem_tokens.size())
    throw ArgumentError("entry stem has no blank");

  std::vector<std::string> answer_tokens = text::tokenize(entry.answer_key);
  if (answer_tokens.empty()) throw ArgumentError("entry answer key is empty");

  std::vector<std::string> tokens(stem_tokens.begin(),
                                  stem_tokens.begin() +
                                      static_cast<std::ptrdiff_t>(blank));
  tokens.insert(tokens.end(), answer_tokens.begin(), answer_tokens.end());
  tokens.insert(tokens.end(),
                stem_tokens.begin() + static_cast<std::ptrdiff_t>(blank) + 1,
                stem_tokens.end());

  Sentence sentence;
  sentence.id = 0;
  sentence.tokens = std::move(tokens);
  sentence.text = text::detokenize(sentence.tokens);

  AnswerKey key;
  key.stem_sentence_id = 0;
  key.span = Span{blank, blank + answer_tokens.size()};
  key.surface = text::detokenize(answer_tokens);

  TagResult tags = backends_.tagger->tag(sentence.tokens);
  bool all_verbal = true;
  for (std::size_t i = key.span.begin;
       i < key.span.end && i < tags.pos_tags.size(); ++i)
    if (tags.pos_tags[i] != "VERB" && tags.pos_tags[i] != "AUX")
      all_verbal = false;
  if (answer_tokens.size() > 1)
    key.kind = all_verbal ? KeyKind::VerbChunk : KeyKind::NounChunk;
  else
    key.kind = all_verbal ? KeyKind::SingleVerb : KeyKind::SingleNoun;

  return generate_for_key(sentence, std::move(key), params);
}

std::string question_record(const ClozeQuestion& question) {
  nlohmann::json record;
  record["stem"] = question.stem_with_blank;
  record["answer"] = question.answer_key.surface;
  record["answer_kind"] = std::string(to_string(question.answer_key.kind));
  record["sentence"] = question.answer_key.stem_sentence_id;
  record["span"] = {question.answer_key.span.begin,
                    question.answer_key.span.end};
  record["distractors"] = question.distractors;
  record["shortfall"] = question.shortfall;
  return record.dump();
}

}  // namespace clozegen
