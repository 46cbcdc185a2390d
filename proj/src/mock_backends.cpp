#include "clozegen/mock_backends.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace clozegen {

namespace {

using nlohmann::json;

std::string location_key(const std::vector<std::string>& tokens, Span span) {
  return text::join(tokens) + "||" + std::to_string(span.begin) + ":" +
         std::to_string(span.end);
}

void require_span(const std::vector<std::string>& tokens, Span span) {
  if (span.empty() || span.end > tokens.size())
    throw ArgumentError("span [" + std::to_string(span.begin) + "," +
                        std::to_string(span.end) + ") out of bounds for " +
                        std::to_string(tokens.size()) + " tokens");
}

EmbeddingVector parse_vector(const json& j) {
  EmbeddingVector v;
  for (const auto& x : j) v.push_back(x.get<double>());
  return v;
}

}  // namespace

EmbeddingVector hash_unit_vector(std::string_view key, std::size_t dimension) {
  // splitmix64 stream seeded by the stable key hash
  std::uint64_t state = text::stable_hash64(key);
  auto next = [&state]() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  EmbeddingVector v(dimension);
  for (auto& x : v)
    x = static_cast<double>(next() >> 11) / 9007199254740992.0 * 2.0 - 1.0;
  double norm = 0;
  for (auto x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) {  // astronomically unlikely; keep the contract anyway
    v[0] = 1.0;
    norm = 1.0;
  }
  for (auto& x : v) x /= norm;
  return v;
}

std::vector<Prediction> MockPredictor::predict(const MaskedSentence& ms,
                                               int k) {
  if (k < 1) throw ArgumentError("predict_fillers: k must be >= 1");
  auto it = table_.find(ms.render());
  if (it == table_.end()) return {};
  std::vector<Prediction> out = it->second;
  if (out.size() > static_cast<std::size_t>(k)) out.resize(k);
  return out;
}

EmbeddingVector MockContextualEmbedder::token_vector(
    const std::vector<std::string>& tokens, std::size_t i) const {
  if (auto it = by_location_.find(location_key(tokens, {i, i + 1}));
      it != by_location_.end())
    return it->second;
  std::string key = text::normalize(tokens[i]);
  if (auto it = by_phrase_.find(key); it != by_phrase_.end()) return it->second;
  return hash_unit_vector(key, dimension_);
}

EmbeddingVector MockContextualEmbedder::embed(
    const std::vector<std::string>& tokens, Span span) {
  require_span(tokens, span);
  if (auto it = by_location_.find(location_key(tokens, span));
      it != by_location_.end())
    return it->second;
  if (auto it = by_phrase_.find(text::normalize(text::join(
          text::slice(tokens, span))));
      it != by_phrase_.end())
    return it->second;
  EmbeddingVector mean(dimension_, 0.0);
  for (std::size_t i = span.begin; i < span.end; ++i) {
    auto v = token_vector(tokens, i);
    if (v.size() != mean.size())
      throw NumericError("mock embedding tables mix dimensions");
    for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += v[d];
  }
  for (auto& x : mean) x /= static_cast<double>(span.size());
  return mean;
}

std::optional<EmbeddingVector> MockStaticEmbedder::embed(
    const std::string& word) {
  auto it = table_.find(text::normalize(word));
  if (it != table_.end()) return it->second;
  if (hash_fallback_) return hash_unit_vector(text::normalize(word), dimension_);
  return std::nullopt;
}

std::optional<SynsetRef> MockSenseDisambiguator::disambiguate(
    const std::vector<std::string>& tokens, Span span) {
  require_span(tokens, span);
  std::string phrase = text::normalize(text::join(text::slice(tokens, span)));
  std::string sentence = text::normalize(text::join(tokens));
  for (const auto& rule : rules_) {
    if (rule.phrase != phrase) continue;
    if (!rule.sentence_contains.empty() &&
        sentence.find(rule.sentence_contains) == std::string::npos)
      continue;
    // Honor the contract: only ever return a sense of the span's own phrase.
    for (auto ref : kb_->synsets_of(phrase))
      if (ref == rule.target) return rule.target;
    return std::nullopt;
  }
  return std::nullopt;
}

TagResult MockTagger::tag(const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw ArgumentError("tag: empty token list");
  TagResult result;
  result.pos_tags.reserve(tokens.size());
  result.ner_tags.assign(tokens.size(), "");
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string key = text::to_lower(tokens[i]);
    if (auto it = lexicon_.find(key); it != lexicon_.end()) {
      result.pos_tags.push_back(it->second.pos);
      result.ner_tags[i] = it->second.ner;
    } else if (text::is_punctuation(tokens[i])) {
      result.pos_tags.push_back("PUNCT");
    } else if (!tokens[i].empty() &&
               std::isdigit(static_cast<unsigned char>(tokens[i][0]))) {
      result.pos_tags.push_back("NUM");
    } else {
      result.pos_tags.push_back("NOUN");
    }
  }

  // Noun chunks: maximal runs of determiners/adjectives/nominals, trimmed so
  // each chunk ends at its last nominal token.
  auto nominal = [&](std::size_t i) {
    const auto& t = result.pos_tags[i];
    return t == "NOUN" || t == "PROPN";
  };
  auto chunkable = [&](std::size_t i) {
    const auto& t = result.pos_tags[i];
    return t == "DET" || t == "ADJ" || t == "NOUN" || t == "PROPN" ||
           t == "NUM";
  };
  for (std::size_t i = 0; i < tokens.size();) {
    if (!chunkable(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < tokens.size() && chunkable(j)) ++j;
    std::size_t last_nominal = i;
    bool any = false;
    for (std::size_t t = i; t < j; ++t)
      if (nominal(t)) {
        last_nominal = t;
        any = true;
      }
    if (any) result.noun_chunks.push_back({i, last_nominal + 1});
    i = j;
  }
  for (std::size_t i = 0; i < tokens.size();) {
    const auto& t = result.pos_tags[i];
    if (t == "VERB" || t == "AUX") {
      std::size_t j = i;
      while (j < tokens.size() &&
             (result.pos_tags[j] == "VERB" || result.pos_tags[j] == "AUX"))
        ++j;
      result.verb_chunks.push_back({i, j});
      i = j;
    } else {
      ++i;
    }
  }
  return result;
}

bool MockNgramSource::exists(const std::string& phrase) {
  return phrases_.contains(text::normalize(phrase));
}

MockBackendSet MockBackendSet::from_file(const std::filesystem::path& path,
                                         const KnowledgeBase& kb) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.filename().string(), "cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str(), path.filename().string(), kb);
}

MockBackendSet MockBackendSet::from_json_text(const std::string& json_text,
                                              const std::string& origin,
                                              const KnowledgeBase& kb) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin, static_cast<long>(e.byte), e.what());
  }

  MockBackendSet set;
  set.predictor = std::make_shared<MockPredictor>();
  set.contextual = std::make_shared<MockContextualEmbedder>();
  set.statics = std::make_shared<MockStaticEmbedder>();
  set.wsd = std::make_shared<MockSenseDisambiguator>();
  set.tagger = std::make_shared<MockTagger>();
  set.ngrams = std::make_shared<MockNgramSource>();
  set.wsd->kb_ = &kb;

  const std::string model_id = root.value("model_id", "mock");
  const std::string version = root.value("version", "1");
  for (BackendDescriptor* d :
       {&set.predictor->desc_, &set.contextual->desc_, &set.statics->desc_,
        &set.wsd->desc_, &set.tagger->desc_, &set.ngrams->desc_}) {
    d->model_id = model_id;
    d->version = version;
  }

  const std::size_t dimension = root.value("dimension", 8u);
  set.contextual->dimension_ = dimension;
  set.statics->dimension_ = dimension;

  if (root.contains("predictions")) {
    for (auto& [key, arr] : root.at("predictions").items()) {
      std::vector<Prediction> list;
      double prev = 1.0;
      for (const auto& p : arr) {
        Prediction pred;
        pred.token = p.at("token").get<std::string>();
        pred.probability = p.at("probability").get<double>();
        pred.position = static_cast<int>(list.size()) + 1;
        if (pred.probability <= 0 || pred.probability > 1.0 ||
            pred.probability > prev + 1e-15)
          throw ValidationError(
              origin + ": prediction list for '" + key +
                  "' must have probabilities in (0,1], non-increasing",
              {});
        prev = pred.probability;
        list.push_back(std::move(pred));
      }
      set.predictor->table_[key] = std::move(list);
    }
  }

  if (root.contains("contextual_embeddings")) {
    const auto& ce = root.at("contextual_embeddings");
    if (ce.contains("by_location"))
      for (auto& [key, vec] : ce.at("by_location").items())
        set.contextual->by_location_[key] = parse_vector(vec);
    if (ce.contains("by_phrase"))
      for (auto& [key, vec] : ce.at("by_phrase").items())
        set.contextual->by_phrase_[text::normalize(key)] = parse_vector(vec);
  }

  if (root.contains("static_embeddings")) {
    const auto& se = root.at("static_embeddings");
    if (se.contains("vectors"))
      for (auto& [key, vec] : se.at("vectors").items())
        set.statics->table_[text::normalize(key)] = parse_vector(vec);
    set.statics->hash_fallback_ = se.value("hash_fallback", false);
  }

  if (root.contains("wsd_rules")) {
    for (const auto& r : root.at("wsd_rules")) {
      MockSenseDisambiguator::Rule rule;
      rule.phrase = text::normalize(r.at("phrase").get<std::string>());
      rule.sentence_contains =
          text::normalize(r.value("sentence_contains", ""));
      const auto& target = r.at("target");
      const std::string lemma = target.at("lemma").get<std::string>();
      const std::string label = target.at("label").get<std::string>();
      bool found = false;
      for (auto ref : kb.synsets_of(lemma)) {
        if (kb.synset_info(ref).lexical_label == label) {
          rule.target = ref;
          found = true;
          break;
        }
      }
      if (!found)
        throw ValidationError(origin + ": wsd rule target (" + lemma + ", " +
                                  label + ") matches no known synset",
                              {});
      set.wsd->rules_.push_back(std::move(rule));
    }
  }

  if (root.contains("lexicon")) {
    for (auto& [word, entry] : root.at("lexicon").items()) {
      MockTagger::Entry e;
      if (entry.is_string()) {
        e.pos = entry.get<std::string>();
      } else {
        e.pos = entry.at("pos").get<std::string>();
        e.ner = entry.value("ner", "");
      }
      set.tagger->lexicon_[text::to_lower(word)] = std::move(e);
    }
  }

  if (root.contains("ngrams"))
    for (const auto& p : root.at("ngrams"))
      set.ngrams->phrases_.insert(text::normalize(p.get<std::string>()));

  return set;
}

}  // namespace clozegen
