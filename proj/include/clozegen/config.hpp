#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "clozegen/distractors.hpp"

namespace clozegen {

// How candidate phrases are checked against a corpus:
//   Local      phrase table on disk (config.ngram.file), falling back to the
//              list inside the backend table when no file is configured
//   Remote     web service at config.ngram host/port
//   Permissive every phrase passes (offline smoke runs)
enum class NgramMode { Local, Remote, Permissive };

std::string_view to_string(NgramMode mode);

// Everything a run needs: scoring knobs, per-stage limits, and where the
// dictionary, backends, cache, and corpus live. Loaded from a JSON file in
// which every field is optional; relative paths resolve against the file's
// directory.
struct PipelineConfig {
  // Scoring.
  double alpha = 20.5;  // sharpness of the definition-similarity reward
  double beta = 1.1;    // weight of the prediction-rank reward
  double gamma = 0.5;   // label-mismatch penalty (relaxed mode only)
  LexicalMode lexical_mode = LexicalMode::Strict;

  // Stage limits.
  int m = 10;     // ranked replacements kept per instance before combining
  int n = 3;      // distractors per question
  int k = 50;     // fillers requested per masked instance
  int cap = 500;  // combined phrases kept per answer key

  // Stem eligibility, in tokens.
  int min_stem_tokens = 8;
  int max_stem_tokens = 40;

  // Data locations.
  std::filesystem::path wordnet_dir;    // dictionary database directory
  std::filesystem::path backends_file;  // table-driven backend definitions

  // Expected identity of the backend table; empty = accept what it declares.
  std::string backend_model_id;
  std::string backend_version;

  // On-disk result cache; empty = caching off. The CLOZEGEN_CACHE_DIR
  // environment variable, when set, wins over both the file and the default.
  std::filesystem::path cache_dir;

  NgramMode ngram_mode = NgramMode::Local;
  std::filesystem::path ngram_file;  // "phrase<TAB>count" lines (Local)
  std::string ngram_host;            // Remote
  int ngram_port = 80;

  RankParams rank_params() const {
    return RankParams{alpha, beta, gamma, lexical_mode};
  }
};

// Throws ValidationError listing every violated field constraint
// ("alpha: must be > 0") — nothing is clamped silently.
void validate_config(const PipelineConfig& config);

// Parses a JSON object with any subset of the fields printed by
// config_to_json. Unknown keys and wrongly typed values are rejected with
// the offending field's name; the result is validated. Relative paths are
// resolved against `base_dir` when given.
PipelineConfig parse_config(const std::string& json_text,
                            const std::string& origin,
                            const std::filesystem::path& base_dir = {});

// parse_config over a file's contents, resolving paths against its parent
// directory and applying the environment override afterwards.
PipelineConfig load_config(const std::filesystem::path& path);

// Replaces cache_dir with $CLOZEGEN_CACHE_DIR when that is set and non-empty.
void apply_env_overrides(PipelineConfig& config);

// Full round-trippable JSON rendering (the --print-config output).
std::string config_to_json(const PipelineConfig& config);

}  // namespace clozegen
