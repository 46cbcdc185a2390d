#include "clozegen/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "clozegen/errors.hpp"

namespace clozegen {
namespace {

using nlohmann::json;

std::string norm(const std::string& s) { return text::normalize(s); }

std::vector<std::string> lower_tokens(const std::string& phrase) {
  return text::tokenize(text::to_lower(phrase));
}

std::vector<std::string> truth_of(const DatasetEntry& entry) {
  return {entry.truth_distractors.begin(), entry.truth_distractors.end()};
}

std::vector<std::string> head(const std::vector<std::string>& items,
                              std::size_t k) {
  if (items.size() <= k) return items;
  return {items.begin(), items.begin() + static_cast<long>(k)};
}

std::size_t count_blank_markers(const std::string& stem) {
  std::size_t count = 0;
  for (std::size_t at = stem.find(kBlankMarker); at != std::string::npos;
       at = stem.find(kBlankMarker, at + kBlankMarker.size()))
    ++count;
  return count;
}

// Index of the single blank-marker token. Throws when absent or repeated.
std::size_t blank_token_index(const std::vector<std::string>& tokens,
                              const std::string& stem) {
  std::size_t found = tokens.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i] == kBlankMarker) {
      found = i;
      ++count;
    }
  if (count != 1)
    throw ArgumentError("stem must contain exactly one blank marker: \"" +
                        stem + "\"");
  return found;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset loading.

namespace {

struct LineProblem {
  long line;
  std::string what;
};

DatasetEntry parse_entry_json(const json& object, const std::string& origin,
                              long line_number) {
  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError(origin, line_number, what);
  };
  if (!object.is_object()) throw fail("expected a JSON object");
  for (const char* field : {"stem", "answer", "source"}) {
    if (!object.contains(field))
      throw fail(std::string("missing field \"") + field + "\"");
    if (!object.at(field).is_string())
      throw fail(std::string("field \"") + field + "\" must be a string");
  }
  if (!object.contains("distractors") || !object.at("distractors").is_array())
    throw fail("field \"distractors\" must be an array");
  const auto& array = object.at("distractors");
  if (array.size() != 3)
    throw fail("expected exactly 3 distractors, got " +
               std::to_string(array.size()));
  DatasetEntry entry;
  entry.stem = object.at("stem").get<std::string>();
  entry.answer_key = object.at("answer").get<std::string>();
  entry.source_tag = object.at("source").get<std::string>();
  for (std::size_t i = 0; i < 3; ++i) {
    if (!array.at(i).is_string())
      throw fail("distractors must be strings");
    entry.truth_distractors[i] = array.at(i).get<std::string>();
  }
  return entry;
}

// Invariant and expectation checks; returns a complaint or nothing.
std::optional<std::string> entry_problem(const DatasetEntry& entry,
                                         DatasetExpectation expect) {
  if (count_blank_markers(entry.stem) != 1)
    return "stem must contain exactly one blank marker";
  if (norm(entry.answer_key).empty()) return "empty answer key";
  std::set<std::string> seen;
  for (const auto& d : entry.truth_distractors) {
    std::string key = norm(d);
    if (key.empty()) return "empty distractor";
    if (!seen.insert(key).second) return "duplicate distractor \"" + d + "\"";
  }
  std::size_t words = text::tokenize(entry.answer_key).size();
  if (expect == DatasetExpectation::Unigram && words != 1)
    return "expected a unigram answer key, got \"" + entry.answer_key + "\"";
  if (expect == DatasetExpectation::Multigram && words < 2)
    return "expected a multiword answer key, got \"" + entry.answer_key + "\"";
  return std::nullopt;
}

}  // namespace

std::vector<DatasetEntry> parse_dataset(const std::string& content,
                                        const std::string& origin,
                                        DatasetExpectation expect) {
  std::vector<DatasetEntry> entries;
  std::vector<LineProblem> problems;
  std::istringstream in(content);
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (norm(line).empty()) continue;
    json object;
    try {
      object = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(origin, line_number, e.what());
    }
    DatasetEntry entry = parse_entry_json(object, origin, line_number);
    if (auto problem = entry_problem(entry, expect))
      problems.push_back({line_number, *problem});
    else
      entries.push_back(std::move(entry));
  }
  if (!problems.empty()) {
    std::string what = origin + ": invalid entries:";
    std::vector<long> lines;
    for (const auto& p : problems) {
      what += "\n  line " + std::to_string(p.line) + ": " + p.what;
      lines.push_back(p.line);
    }
    throw ValidationError(what, std::move(lines));
  }
  if (entries.empty())
    throw ValidationError(origin + ": dataset holds no entries", {});
  return entries;
}

std::vector<DatasetEntry> load_dataset(const std::filesystem::path& path,
                                       DatasetExpectation expect) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string(), "cannot open dataset file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset(buffer.str(), path.string(), expect);
}

std::string dataset_to_text(const std::vector<DatasetEntry>& entries) {
  std::string out;
  for (const auto& entry : entries) {
    json object{{"stem", entry.stem},
                {"answer", entry.answer_key},
                {"distractors", entry.truth_distractors},
                {"source", entry.source_tag}};
    out += object.dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Per-entry metrics.

SetMetrics set_metrics(const std::vector<std::string>& generated,
                       const std::vector<std::string>& truth,
                       std::size_t k_gen) {
  if (k_gen == 0) throw ArgumentError("set_metrics: k_gen must be positive");
  if (truth.empty())
    throw ArgumentError("set_metrics: reference distractors are empty");
  std::set<std::string> truth_set;
  for (const auto& t : truth) truth_set.insert(norm(t));
  std::set<std::string> hits;
  for (std::size_t i = 0; i < generated.size() && i < k_gen; ++i) {
    std::string key = norm(generated[i]);
    if (truth_set.count(key)) hits.insert(key);
  }
  SetMetrics m;
  auto matched = static_cast<double>(hits.size());
  m.precision = matched / static_cast<double>(k_gen);
  m.recall = matched / static_cast<double>(truth_set.size());
  m.f1 = (m.precision + m.recall) > 0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.p_at_1 =
      !generated.empty() && truth_set.count(norm(generated[0])) ? 1.0 : 0.0;
  return m;
}

double mrr(const std::vector<std::string>& generated,
           const std::vector<std::string>& truth, std::size_t cutoff) {
  std::set<std::string> truth_set;
  for (const auto& t : truth) truth_set.insert(norm(t));
  for (std::size_t i = 0; i < generated.size(); ++i) {
    if (cutoff > 0 && i >= cutoff) break;
    if (truth_set.count(norm(generated[i])))
      return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double ndcg_at_k(const std::vector<std::string>& generated,
                 const std::vector<std::string>& truth, std::size_t k) {
  if (k == 0) throw ArgumentError("ndcg_at_k: k must be positive");
  if (truth.empty())
    throw ArgumentError("ndcg_at_k: reference distractors are empty");
  std::set<std::string> truth_set;
  for (const auto& t : truth) truth_set.insert(norm(t));
  std::set<std::string> used;
  double dcg = 0.0;
  for (std::size_t i = 0; i < generated.size() && i < k; ++i) {
    std::string key = norm(generated[i]);
    if (truth_set.count(key) && used.insert(key).second)
      dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  double idcg = 0.0;
  for (std::size_t i = 0; i < truth_set.size() && i < k; ++i)
    idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  return dcg / idcg;
}

namespace {

// Mean of the in-vocabulary word vectors; absent when every word is out.
std::optional<EmbeddingVector> static_phrase_vector(const std::string& phrase,
                                                    StaticEmbedder& embedder) {
  std::optional<EmbeddingVector> sum;
  std::size_t found = 0;
  for (const auto& word : text::tokenize(phrase)) {
    auto vec = embedder.embed(word);
    if (!vec) continue;
    if (!sum) {
      sum = std::move(*vec);
    } else {
      if (vec->size() != sum->size())
        throw NumericError("static embedding dimensions disagree");
      for (std::size_t i = 0; i < sum->size(); ++i) (*sum)[i] += (*vec)[i];
    }
    ++found;
  }
  if (!sum) return std::nullopt;
  for (auto& v : *sum) v /= static_cast<double>(found);
  return sum;
}

}  // namespace

SimilarityBreakdown wss(const std::vector<std::string>& generated,
                        const std::vector<std::string>& truth,
                        StaticEmbedder& embedder) {
  std::vector<std::optional<EmbeddingVector>> gen_vectors, truth_vectors;
  for (const auto& g : generated)
    gen_vectors.push_back(static_phrase_vector(g, embedder));
  for (const auto& t : truth)
    truth_vectors.push_back(static_phrase_vector(t, embedder));

  SimilarityBreakdown result;
  double sum = 0.0;
  for (std::size_t i = 0; i < generated.size(); ++i)
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const std::string* missing = nullptr;
      if (!gen_vectors[i]) missing = &generated[i];
      else if (!truth_vectors[j]) missing = &truth[j];
      if (missing) {
        ++result.pairs_skipped;
        result.notes.push_back("\"" + generated[i] + "\" vs \"" + truth[j] +
                               "\": no vector for \"" + *missing + "\"");
        continue;
      }
      try {
        sum += std::clamp(cosine(*gen_vectors[i], *truth_vectors[j]), 0.0, 1.0);
        ++result.pairs_scored;
      } catch (const NumericError& e) {
        ++result.pairs_skipped;
        result.notes.push_back("\"" + generated[i] + "\" vs \"" + truth[j] +
                               "\": " + e.what());
      }
    }
  if (result.pairs_scored > 0)
    result.mean = sum / static_cast<double>(result.pairs_scored);
  return result;
}

double css(const std::string& stem, const std::vector<std::string>& generated,
           const std::vector<std::string>& truth,
           ContextualEmbedder& embedder) {
  std::vector<std::string> tokens = text::tokenize(stem);
  std::size_t blank = blank_token_index(tokens, stem);

  auto in_blank = [&](const std::string& phrase) {
    std::vector<std::string> phrase_tokens = text::tokenize(phrase);
    if (phrase_tokens.empty())
      throw ArgumentError("cannot place an empty phrase into the blank");
    std::vector<std::string> filled(tokens.begin(),
                                    tokens.begin() + static_cast<long>(blank));
    filled.insert(filled.end(), phrase_tokens.begin(), phrase_tokens.end());
    filled.insert(filled.end(),
                  tokens.begin() + static_cast<long>(blank) + 1, tokens.end());
    return embedder.embed(filled, {blank, blank + phrase_tokens.size()});
  };

  std::vector<EmbeddingVector> gen_vectors, truth_vectors;
  for (const auto& g : generated) gen_vectors.push_back(in_blank(g));
  for (const auto& t : truth) truth_vectors.push_back(in_blank(t));

  if (gen_vectors.empty() || truth_vectors.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& gv : gen_vectors)
    for (const auto& tv : truth_vectors)
      sum += std::clamp(cosine(gv, tv), 0.0, 1.0);
  return sum / static_cast<double>(gen_vectors.size() * truth_vectors.size());
}

// ---------------------------------------------------------------------------
// Phrase-overlap scores.

std::string_view to_string(AveragingScheme scheme) {
  switch (scheme) {
    case AveragingScheme::MultiReference: return "multi_reference";
    case AveragingScheme::Pairwise: return "pairwise";
  }
  return "?";
}

namespace {

using NgramCounts = std::map<std::string, int>;

NgramCounts ngram_counts(const std::vector<std::string>& tokens, int n) {
  NgramCounts counts;
  if (n < 1 || tokens.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t j = 1; j < static_cast<std::size_t>(n); ++j)
      key += " " + tokens[i + j];
    ++counts[key];
  }
  return counts;
}

int counts_total(const NgramCounts& counts) {
  int total = 0;
  for (const auto& [_, c] : counts) total += c;
  return total;
}

// Order-n precision of `candidate` clipped against reference counts, with a
// brevity penalty against the closest reference length (ties favor the
// shorter reference). Zero matches become `epsilon` matches when set.
double bleu_against(const std::vector<std::string>& candidate,
                    const std::vector<std::vector<std::string>>& references,
                    int n, double epsilon) {
  NgramCounts cand = ngram_counts(candidate, n);
  int total = counts_total(cand);
  if (total == 0 || candidate.empty()) return 0.0;

  NgramCounts max_ref;
  for (const auto& ref : references)
    for (const auto& [key, count] : ngram_counts(ref, n))
      max_ref[key] = std::max(max_ref[key], count);
  int clipped = 0;
  for (const auto& [key, count] : cand) {
    auto it = max_ref.find(key);
    if (it != max_ref.end()) clipped += std::min(count, it->second);
  }
  double precision = clipped > 0
                         ? static_cast<double>(clipped) / total
                         : std::min(1.0, epsilon / static_cast<double>(total));

  std::size_t c = candidate.size();
  std::size_t closest = references.empty() ? c : references.front().size();
  for (const auto& ref : references) {
    auto gap = [&](std::size_t len) {
      return len > c ? len - c : c - len;
    };
    if (gap(ref.size()) < gap(closest) ||
        (gap(ref.size()) == gap(closest) && ref.size() < closest))
      closest = ref.size();
  }
  double brevity =
      c >= closest ? 1.0
                   : std::exp(1.0 - static_cast<double>(closest) /
                                        static_cast<double>(c));
  return brevity * precision;
}

double rouge_n_against(const std::vector<std::string>& candidate,
                       const std::vector<std::string>& reference, int n) {
  NgramCounts ref = ngram_counts(reference, n);
  int ref_total = counts_total(ref);
  if (ref_total == 0) return 0.0;
  NgramCounts cand = ngram_counts(candidate, n);
  int overlap = 0;
  for (const auto& [key, count] : ref) {
    auto it = cand.find(key);
    if (it != cand.end()) overlap += std::min(count, it->second);
  }
  return static_cast<double>(overlap) / ref_total;
}

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t above = row[j];
      row[j] = a[i - 1] == b[j - 1] ? diagonal + 1
                                    : std::max(row[j], row[j - 1]);
      diagonal = above;
    }
  }
  return row[b.size()];
}

double rouge_l_against(const std::vector<std::string>& candidate,
                       const std::vector<std::string>& reference) {
  if (reference.empty()) return 0.0;
  return static_cast<double>(lcs_length(candidate, reference)) /
         static_cast<double>(reference.size());
}

// Applies a per-(candidate, references) score under either averaging scheme:
// all references at once vs one pair at a time.
template <typename Score>
double combine_scheme(const std::vector<std::string>& generated,
                      const std::vector<std::string>& truth,
                      AveragingScheme scheme, Score score) {
  if (generated.empty() || truth.empty()) return 0.0;
  std::vector<std::vector<std::string>> refs;
  for (const auto& t : truth) refs.push_back(lower_tokens(t));

  double sum = 0.0;
  std::size_t terms = 0;
  for (const auto& g : generated) {
    std::vector<std::string> cand = lower_tokens(g);
    if (scheme == AveragingScheme::MultiReference) {
      sum += score(cand, refs);
      ++terms;
    } else {
      for (const auto& ref : refs) {
        sum += score(cand, std::vector<std::vector<std::string>>{ref});
        ++terms;
      }
    }
  }
  return sum / static_cast<double>(terms);
}

}  // namespace

double bleu_n(const std::vector<std::string>& generated,
              const std::vector<std::string>& truth, int n,
              AveragingScheme scheme, double epsilon) {
  if (n < 1) throw ArgumentError("bleu_n: order must be positive");
  return combine_scheme(
      generated, truth, scheme,
      [&](const std::vector<std::string>& cand,
          const std::vector<std::vector<std::string>>& refs) {
        return bleu_against(cand, refs, n, epsilon);
      });
}

double rouge_n(const std::vector<std::string>& generated,
               const std::vector<std::string>& truth, int n,
               AveragingScheme scheme) {
  if (n < 1) throw ArgumentError("rouge_n: order must be positive");
  return combine_scheme(
      generated, truth, scheme,
      [&](const std::vector<std::string>& cand,
          const std::vector<std::vector<std::string>>& refs) {
        double best = 0.0;
        for (const auto& ref : refs)
          best = std::max(best, rouge_n_against(cand, ref, n));
        return best;
      });
}

double rouge_l(const std::vector<std::string>& generated,
               const std::vector<std::string>& truth,
               AveragingScheme scheme) {
  return combine_scheme(
      generated, truth, scheme,
      [&](const std::vector<std::string>& cand,
          const std::vector<std::vector<std::string>>& refs) {
        double best = 0.0;
        for (const auto& ref : refs)
          best = std::max(best, rouge_l_against(cand, ref));
        return best;
      });
}

// ---------------------------------------------------------------------------
// Dataset-level evaluation.

std::string to_json(const EvalConfig& config) {
  json object{{"k_gen", config.k_gen},
              {"mrr_cutoff", config.mrr_cutoff},
              {"ndcg_k", config.ndcg_k},
              {"averaging_scheme", std::string(to_string(config.scheme))},
              {"bleu_epsilon", config.bleu_epsilon}};
  return object.dump();
}

EntryScores score_entry(const DatasetEntry& entry,
                        const std::vector<std::string>& generated,
                        const EvalConfig& config, StaticEmbedder* statics,
                        ContextualEmbedder* contextual) {
  std::vector<std::string> truth = truth_of(entry);
  std::vector<std::string> top = head(generated, config.k_gen);

  EntryScores scores;
  scores.set = set_metrics(generated, truth, config.k_gen);
  scores.mrr = mrr(generated, truth, config.mrr_cutoff);
  scores.ndcg = ndcg_at_k(generated, truth, config.ndcg_k);
  if (statics) {
    SimilarityBreakdown breakdown = wss(top, truth, *statics);
    scores.wss = breakdown.mean;
    scores.wss_pairs_skipped = breakdown.pairs_skipped;
  }
  if (contextual) scores.css = css(entry.stem, top, truth, *contextual);
  for (int n = 1; n <= 4; ++n) {
    scores.bleu[n - 1] = bleu_n(top, truth, n, config.scheme, 0.0);
    scores.bleu_smoothed[n - 1] =
        bleu_n(top, truth, n, config.scheme, config.bleu_epsilon);
  }
  scores.rouge_1 = rouge_n(top, truth, 1, config.scheme);
  scores.rouge_2 = rouge_n(top, truth, 2, config.scheme);
  scores.rouge_l = rouge_l(top, truth, config.scheme);
  return scores;
}

EvalReport aggregate_scores(const std::vector<EntryScores>& scores,
                            const EvalConfig& config) {
  if (scores.empty())
    throw ArgumentError("cannot aggregate an empty score list");
  EvalReport report;
  report.entries = scores.size();
  report.config = config;
  double wss_sum = 0.0, css_sum = 0.0;
  for (const auto& s : scores) {
    report.precision += s.set.precision;
    report.recall += s.set.recall;
    report.f1 += s.set.f1;
    report.p_at_1 += s.set.p_at_1;
    report.mrr += s.mrr;
    report.ndcg += s.ndcg;
    if (s.wss) {
      wss_sum += *s.wss;
      ++report.wss_entries;
    }
    if (s.css) {
      css_sum += *s.css;
      ++report.css_entries;
    }
    report.wss_pairs_skipped += s.wss_pairs_skipped;
    for (int n = 0; n < 4; ++n) {
      report.bleu[n] += s.bleu[n];
      report.bleu_smoothed[n] += s.bleu_smoothed[n];
    }
    report.rouge_1 += s.rouge_1;
    report.rouge_2 += s.rouge_2;
    report.rouge_l += s.rouge_l;
  }
  auto count = static_cast<double>(report.entries);
  report.precision /= count;
  report.recall /= count;
  report.f1 /= count;
  report.p_at_1 /= count;
  report.mrr /= count;
  report.ndcg /= count;
  if (report.wss_entries > 0)
    report.wss = wss_sum / static_cast<double>(report.wss_entries);
  if (report.css_entries > 0)
    report.css = css_sum / static_cast<double>(report.css_entries);
  for (int n = 0; n < 4; ++n) {
    report.bleu[n] /= count;
    report.bleu_smoothed[n] /= count;
  }
  report.rouge_1 /= count;
  report.rouge_2 /= count;
  report.rouge_l /= count;
  return report;
}

EvalReport evaluate_entries(const std::vector<DatasetEntry>& entries,
                            const std::vector<std::vector<std::string>>& generated,
                            const EvalConfig& config, StaticEmbedder* statics,
                            ContextualEmbedder* contextual) {
  if (entries.size() != generated.size())
    throw ArgumentError("one generated list per dataset entry required");
  std::vector<EntryScores> scores;
  scores.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i)
    scores.push_back(
        score_entry(entries[i], generated[i], config, statics, contextual));
  return aggregate_scores(scores, config);
}

std::string to_json(const EvalReport& report) {
  json object{
      {"entries", report.entries},
      {"precision", report.precision},
      {"recall", report.recall},
      {"f1", report.f1},
      {"p_at_1", report.p_at_1},
      {"mrr", report.mrr},
      {"ndcg", report.ndcg},
      {"wss", report.wss},
      {"css", report.css},
      {"wss_entries", report.wss_entries},
      {"css_entries", report.css_entries},
      {"wss_pairs_skipped", report.wss_pairs_skipped},
      {"bleu", report.bleu_smoothed},
      {"bleu_unsmoothed", report.bleu},
      {"rouge_1", report.rouge_1},
      {"rouge_2", report.rouge_2},
      {"rouge_l", report.rouge_l},
      {"config", json::parse(to_json(report.config))},
  };
  return object.dump(2);
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  auto pct = [](double v) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(1);
    s << 100.0 * v;
    return s.str();
  };
  auto row = [&](const std::string& label, const std::string& value) {
    out << "  " << label;
    for (std::size_t i = label.size(); i < 22; ++i) out << ' ';
    out << value << '\n';
  };
  out << "entries: " << report.entries << '\n';
  out << "set metrics (top " << report.config.k_gen << ", %):\n";
  row("precision", pct(report.precision));
  row("recall", pct(report.recall));
  row("f1", pct(report.f1));
  row("p@1", pct(report.p_at_1));
  row("mrr", pct(report.mrr));
  row("ndcg@" + std::to_string(report.config.ndcg_k), pct(report.ndcg));
  out << "similarity (%):\n";
  row("wss", report.wss_entries ? pct(report.wss) : "n/a");
  row("css", report.css_entries ? pct(report.css) : "n/a");
  if (report.wss_pairs_skipped)
    row("wss pairs skipped", std::to_string(report.wss_pairs_skipped));
  out << "phrase overlap (" << to_string(report.config.scheme) << ", %):\n";
  for (int n = 0; n < 4; ++n)
    row("bleu-" + std::to_string(n + 1),
        pct(report.bleu_smoothed[n]) + "  (unsmoothed " + pct(report.bleu[n]) +
            ")");
  row("rouge-1", pct(report.rouge_1));
  row("rouge-2", pct(report.rouge_2));
  row("rouge-l", pct(report.rouge_l));
  return out.str();
}

// ---------------------------------------------------------------------------
// Parameter search.

namespace {

// Grid coordinates snapped to a micro precision so that e.g. 0.5 + 15 steps
// of 0.1 reads back as 2.0, not 2.0000000000000004.
double grid_value(double lo, std::size_t index, double step) {
  double v = lo + static_cast<double>(index) * step;
  return std::round(v * 1e6) / 1e6;
}

std::size_t grid_points(const GridRange& range, double step,
                        const char* name) {
  if (range.hi < range.lo)
    throw ArgumentError(std::string("grid range for ") + name +
                        " ends before it starts");
  return static_cast<std::size_t>(
             std::floor((range.hi - range.lo) / step + 1e-9)) +
         1;
}

}  // namespace

GridSearchResult grid_search(const std::vector<DatasetEntry>& entries,
                             const GridSpec& spec,
                             const EntryGenerator& generate,
                             std::size_t folds, std::size_t k_gen) {
  if (entries.empty())
    throw ArgumentError("grid_search: no entries to score against");
  if (spec.step <= 0) throw ArgumentError("grid_search: step must be positive");
  if (folds == 0 || folds > entries.size())
    throw ArgumentError("grid_search: fold count must be in [1, entries]");
  if (!generate) throw ArgumentError("grid_search: generator is required");

  std::size_t na = grid_points(spec.alpha, spec.step, "alpha");
  std::size_t nb = grid_points(spec.beta, spec.step, "beta");
  std::size_t ng =
      spec.gamma ? grid_points(*spec.gamma, spec.step, "gamma") : 1;

  // Contiguous fold boundaries.
  std::vector<std::pair<std::size_t, std::size_t>> fold_ranges;
  for (std::size_t f = 0; f < folds; ++f)
    fold_ranges.emplace_back(f * entries.size() / folds,
                             (f + 1) * entries.size() / folds);

  auto score_point = [&](const RankParams& params) {
    double fold_sum = 0.0;
    for (const auto& [begin, end] : fold_ranges) {
      double f1_sum = 0.0;
      for (std::size_t i = begin; i < end; ++i)
        f1_sum += set_metrics(generate(entries[i], params),
                              truth_of(entries[i]), k_gen)
                      .f1;
      fold_sum += end > begin ? f1_sum / static_cast<double>(end - begin) : 0.0;
    }
    return fold_sum / static_cast<double>(folds);
  };

  GridSearchResult result;
  result.best_f1 = -1.0;
  for (std::size_t ai = 0; ai < na; ++ai)
    for (std::size_t bi = 0; bi < nb; ++bi)
      for (std::size_t gi = 0; gi < ng; ++gi) {
        RankParams params;
        params.alpha = grid_value(spec.alpha.lo, ai, spec.step);
        params.beta = grid_value(spec.beta.lo, bi, spec.step);
        if (spec.gamma)
          params.gamma = grid_value(spec.gamma->lo, gi, spec.step);
        double mean_f1 = score_point(params);
        result.table.push_back({params, mean_f1});
        // Ascending scan order makes "strictly better" keep the
        // lexicographically smallest tie.
        if (mean_f1 > result.best_f1) {
          result.best_f1 = mean_f1;
          result.best = params;
        }
      }
  return result;
}

// ---------------------------------------------------------------------------
// Prediction-position profile.

std::size_t PositionHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), not_found);
}

PositionHistogram prediction_position_histogram(
    const std::vector<DatasetEntry>& entries, MaskedPredictor& predictor,
    std::size_t k) {
  if (k == 0)
    throw ArgumentError("prediction histogram needs a positive list size");
  PositionHistogram histogram;
  histogram.counts.assign(k, 0);
  int sentence_id = 0;
  for (const auto& entry : entries) {
    std::vector<std::string> tokens = text::tokenize(entry.stem);
    std::size_t blank = blank_token_index(tokens, entry.stem);
    MaskedSentence masked;
    masked.prefix_tokens.assign(tokens.begin(),
                                tokens.begin() + static_cast<long>(blank));
    masked.suffix_tokens.assign(tokens.begin() + static_cast<long>(blank) + 1,
                                tokens.end());
    masked.sentence_id = sentence_id++;
    masked.masked_span = {blank, blank + 1};
    std::vector<Prediction> predictions =
        predictor.predict(masked, static_cast<int>(k));
    for (const auto& t : entry.truth_distractors) {
      std::string key = norm(t);
      const Prediction* hit = nullptr;
      for (const auto& p : predictions)
        if (norm(p.token) == key) {
          hit = &p;
          break;
        }
      if (hit && hit->position >= 1 &&
          static_cast<std::size_t>(hit->position) <= k)
        ++histogram.counts[static_cast<std::size_t>(hit->position) - 1];
      else
        ++histogram.not_found;
    }
  }
  return histogram;
}

std::string format_histogram(const PositionHistogram& histogram) {
  std::string out = "position\tcount\n";
  for (std::size_t i = 0; i < histogram.counts.size(); ++i)
    out += std::to_string(i + 1) + "\t" + std::to_string(histogram.counts[i]) +
           "\n";
  out += "none\t" + std::to_string(histogram.not_found) + "\n";
  return out;
}

}  // namespace clozegen
