#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clozegen/backends.hpp"
#include "clozegen/distractors.hpp"

namespace clozegen {

// What kind of answer keys a dataset file is expected to hold.
enum class DatasetExpectation { Unigram, Multigram, Any };

// One benchmark cloze question: a stem with exactly one blank marker, the
// removed answer key, and three reference distractors.
struct DatasetEntry {
  std::string stem;  // contains kBlankMarker exactly once
  std::string answer_key;
  std::array<std::string, 3> truth_distractors;  // non-empty, distinct
  std::string source_tag;
};

// Reads a line-delimited dataset file: one JSON object per line with fields
// stem, answer, distractors (exactly 3), source. Blank lines are ignored.
// Malformed lines → ParseError with the line number; lines whose content
// violates the entry invariants or the expectation → ValidationError listing
// every offending line; an empty file → ValidationError.
std::vector<DatasetEntry> load_dataset(
    const std::filesystem::path& path,
    DatasetExpectation expect = DatasetExpectation::Any);

// Same parse on in-memory text; `origin` names the source in errors.
std::vector<DatasetEntry> parse_dataset(
    const std::string& content, const std::string& origin,
    DatasetExpectation expect = DatasetExpectation::Any);

// Serializes entries back to the line-delimited form read by load_dataset.
std::string dataset_to_text(const std::vector<DatasetEntry>& entries);

// ---------------------------------------------------------------------------
// Per-entry metrics. "Match" always means case-insensitive comparison after
// whitespace normalization; no stemming or lemmatization.

struct SetMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double p_at_1 = 0.0;
};

// Overlap of the top k_gen generated phrases with the reference set:
// P = |top-k ∩ truth| / k_gen, R = |top-k ∩ truth| / |truth|, F1 their
// harmonic mean (0 when both are 0), P@1 = whether the first generated
// phrase is a reference. Generated phrases are assumed deduplicated.
// k_gen = 0 or empty truth → ArgumentError.
SetMetrics set_metrics(const std::vector<std::string>& generated,
                       const std::vector<std::string>& truth,
                       std::size_t k_gen = 3);

// Reciprocal rank of the first generated phrase found in `truth`; 0 when
// none is. `cutoff` limits how deep the list is searched (0 = no limit).
double mrr(const std::vector<std::string>& generated,
           const std::vector<std::string>& truth, std::size_t cutoff = 0);

// Discounted cumulative gain over the top k with binary relevance and
// 1/log2(rank+1) discounting, normalized by the ideal ordering of |truth|
// relevant items. Each reference counts at most once. Empty truth or k = 0
// → ArgumentError.
double ndcg_at_k(const std::vector<std::string>& generated,
                 const std::vector<std::string>& truth, std::size_t k = 10);

// Mean static-embedding cosine over all generated×truth pairs, with the
// bookkeeping of pairs that could not be scored.
struct SimilarityBreakdown {
  double mean = 0.0;          // over scored pairs; 0 when none scored
  std::size_t pairs_scored = 0;
  std::size_t pairs_skipped = 0;
  std::vector<std::string> notes;  // one per skipped pair
};

// A phrase's vector is the mean of its in-vocabulary word vectors; a pair is
// skipped (and noted) when either phrase has no vector at all. Pair cosines
// are clamped to [0, 1] so the mean respects the report's value range.
SimilarityBreakdown wss(const std::vector<std::string>& generated,
                        const std::vector<std::string>& truth,
                        StaticEmbedder& embedder);

// Mean contextual cosine over all generated×truth pairs: each phrase is
// substituted into the stem's blank and embedded at the resulting span; pair
// cosines are clamped to [0, 1]. `stem` must contain the blank marker
// exactly once → ArgumentError.
double css(const std::string& stem, const std::vector<std::string>& generated,
           const std::vector<std::string>& truth,
           ContextualEmbedder& embedder);

// How phrase-overlap scores combine three generated phrases with three
// references: MultiReference scores each generated phrase against all
// references at once; Pairwise averages over the nine individual pairs.
enum class AveragingScheme { MultiReference, Pairwise };

std::string_view to_string(AveragingScheme scheme);

// Order-n modified precision with brevity penalty, averaged per the scheme.
// `epsilon` > 0 substitutes for zero match counts (phrases shorter than n
// still score 0). n < 1 → ArgumentError.
double bleu_n(const std::vector<std::string>& generated,
              const std::vector<std::string>& truth, int n,
              AveragingScheme scheme = AveragingScheme::MultiReference,
              double epsilon = 0.0);

// N-gram recall against the reference; MultiReference keeps the best
// reference per generated phrase, Pairwise averages all nine pairs.
double rouge_n(const std::vector<std::string>& generated,
               const std::vector<std::string>& truth, int n,
               AveragingScheme scheme = AveragingScheme::MultiReference);

// Longest-common-subsequence recall, combined like rouge_n.
double rouge_l(const std::vector<std::string>& generated,
               const std::vector<std::string>& truth,
               AveragingScheme scheme = AveragingScheme::MultiReference);

// ---------------------------------------------------------------------------
// Dataset-level evaluation.

struct EvalConfig {
  std::size_t k_gen = 3;       // generated phrases considered by set metrics
  std::size_t mrr_cutoff = 0;  // 0 = rank over the whole generated list
  std::size_t ndcg_k = 10;
  AveragingScheme scheme = AveragingScheme::MultiReference;
  double bleu_epsilon = 0.1;  // smoothing for the reported BLEU numbers
};

std::string to_json(const EvalConfig& config);

// Every metric for one entry. wss/css are absent when no embedder was given.
struct EntryScores {
  SetMetrics set;
  double mrr = 0.0;
  double ndcg = 0.0;
  std::optional<double> wss;
  std::optional<double> css;
  std::size_t wss_pairs_skipped = 0;
  std::array<double, 4> bleu{};           // unsmoothed, orders 1..4
  std::array<double, 4> bleu_smoothed{};  // epsilon-smoothed, orders 1..4
  double rouge_1 = 0.0;
  double rouge_2 = 0.0;
  double rouge_l = 0.0;
};

EntryScores score_entry(const DatasetEntry& entry,
                        const std::vector<std::string>& generated,
                        const EvalConfig& config,
                        StaticEmbedder* statics = nullptr,
                        ContextualEmbedder* contextual = nullptr);

// Arithmetic means over entries. wss/css average only the entries that have
// them; their entry counts are reported alongside.
struct EvalReport {
  std::size_t entries = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double p_at_1 = 0.0;
  double mrr = 0.0;
  double ndcg = 0.0;
  double wss = 0.0;
  double css = 0.0;
  std::size_t wss_entries = 0;
  std::size_t css_entries = 0;
  std::size_t wss_pairs_skipped = 0;
  std::array<double, 4> bleu{};
  std::array<double, 4> bleu_smoothed{};
  double rouge_1 = 0.0;
  double rouge_2 = 0.0;
  double rouge_l = 0.0;
  EvalConfig config;  // snapshot of how the numbers were produced
};

// Means of per-entry scores. Empty input → ArgumentError.
EvalReport aggregate_scores(const std::vector<EntryScores>& scores,
                            const EvalConfig& config);

// score_entry on every (entry, generated) pair, then aggregate_scores.
// Sizes must match → ArgumentError.
EvalReport evaluate_entries(
    const std::vector<DatasetEntry>& entries,
    const std::vector<std::vector<std::string>>& generated,
    const EvalConfig& config, StaticEmbedder* statics = nullptr,
    ContextualEmbedder* contextual = nullptr);

// Machine-readable report (JSON object, metric values in [0, 1]).
std::string to_json(const EvalReport& report);

// Human-readable table; values shown as percentages.
std::string format_report(const EvalReport& report);

// ---------------------------------------------------------------------------
// Parameter search.

struct GridRange {
  double lo = 0.0;
  double hi = 0.0;  // inclusive
};

struct GridSpec {
  GridRange alpha;
  GridRange beta;
  std::optional<GridRange> gamma;  // absent = keep the default
  double step = 0.1;
};

struct GridPoint {
  RankParams params;
  double mean_f1 = 0.0;
};

struct GridSearchResult {
  RankParams best;
  double best_f1 = 0.0;
  std::vector<GridPoint> table;  // every point visited, scan order
};

// Produces ranked distractors for one entry under the given parameters.
using EntryGenerator = std::function<std::vector<std::string>(
    const DatasetEntry&, const RankParams&)>;

// Exhaustive scan of the grid maximizing mean F1 over the entries, scored
// as the mean of per-fold means (contiguous folds). Ties resolve to the
// smallest (alpha, beta, gamma) in lexicographic order. Empty entries,
// step <= 0, hi < lo, folds = 0, or folds > |entries| → ArgumentError.
GridSearchResult grid_search(const std::vector<DatasetEntry>& entries,
                             const GridSpec& spec,
                             const EntryGenerator& generate,
                             std::size_t folds = 1, std::size_t k_gen = 3);

// ---------------------------------------------------------------------------
// Prediction-position profile.

// Where reference distractors land in a predictor's filler list.
struct PositionHistogram {
  std::vector<std::size_t> counts;  // index i = 1-based position i+1
  std::size_t not_found = 0;

  std::size_t total() const;  // sum of counts + not_found
};

// Masks each entry's blank, asks for the top k fillers, and tallies the
// 1-based position of every reference distractor (or not_found). k = 0 →
// ArgumentError.
PositionHistogram prediction_position_histogram(
    const std::vector<DatasetEntry>& entries, MaskedPredictor& predictor,
    std::size_t k);

// Two-column (position, count) table; the last row is the not-found bucket.
std::string format_histogram(const PositionHistogram& histogram);

}  // namespace clozegen
