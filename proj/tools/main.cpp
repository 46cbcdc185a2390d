// Command-line front end: generate questions from an article, evaluate
// generated distractors against a dataset, tune ranking parameters, and
// inspect per-instance pipeline diagnostics.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clozegen/config.hpp"
#include "clozegen/errors.hpp"
#include "clozegen/evaluation.hpp"
#include "clozegen/pipeline.hpp"
#include "clozegen/text.hpp"

namespace {

using namespace clozegen;

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kEmpty = 2;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

PipelineConfig effective_config(const std::string& config_path) {
  if (config_path.empty()) {
    PipelineConfig config;
    apply_env_overrides(config);
    return config;
  }
  return load_config(config_path);
}

Pipeline make_pipeline(const PipelineConfig& config) {
  validate_config(config);
  if (config.wordnet_dir.empty())
    throw ValidationError("wordnet_dir: required to run the pipeline", {});
  auto kb = std::make_shared<const KnowledgeBase>(
      KnowledgeBase::load(config.wordnet_dir));
  BackendSet backends = open_backends(config, *kb);
  return Pipeline(config, kb, std::move(backends));
}

// Writes to the named file, or to stdout for "-" / empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw LoadError(path, "cannot open output file");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
};

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    std::string trimmed = text::normalize(item);
    if (!trimmed.empty()) out.push_back(trimmed);
  }
  return out;
}

double parse_real(const std::string& text, const std::string& field) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size())
      throw ArgumentError(field + ": \"" + text + "\" is not a number");
    return v;
  } catch (const std::logic_error&) {
    throw ArgumentError(field + ": \"" + text + "\" is not a number");
  }
}

GridRange parse_range(const std::string& text, const std::string& field) {
  auto colon = text.find(':');
  if (colon == std::string::npos) {
    double v = parse_real(text, field);
    return GridRange{v, v};
  }
  GridRange r{parse_real(text.substr(0, colon), field),
              parse_real(text.substr(colon + 1), field)};
  if (r.hi < r.lo)
    throw ArgumentError(field + ": range \"" + text + "\" runs backwards");
  return r;
}

std::pair<int, int> parse_split(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ArgumentError("--split: expected TRAIN:HELDOUT, e.g. 3:1");
  int train = static_cast<int>(
      parse_real(text.substr(0, colon), "--split"));
  int heldout = static_cast<int>(parse_real(text.substr(colon + 1), "--split"));
  if (train < 1 || heldout < 0)
    throw ArgumentError("--split: parts must be positive");
  return {train, heldout};
}

std::vector<std::string> truth_of(const DatasetEntry& entry) {
  return {entry.truth_distractors.begin(), entry.truth_distractors.end()};
}

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const std::string& config_path, const std::string& article,
                 const std::string& out_path, std::size_t num_questions) {
  PipelineConfig config = effective_config(config_path);
  Pipeline pipeline = make_pipeline(config);
  std::string text = read_text_file(article);

  std::vector<ClozeQuestion> questions =
      pipeline.generate(text, num_questions);
  Output out(out_path);
  for (const ClozeQuestion& q : questions)
    out.stream() << question_record(q) << '\n';
  if (questions.empty()) {
    std::cerr << "no questions generated\n";
    return kEmpty;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// evaluate

const std::map<std::string, std::vector<std::string>>& metric_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"precision", {"precision"}},
      {"recall", {"recall"}},
      {"f1", {"f1"}},
      {"p_at_1", {"p_at_1"}},
      {"mrr", {"mrr"}},
      {"ndcg", {"ndcg"}},
      {"wss", {"wss", "wss_entries", "wss_pairs_skipped"}},
      {"css", {"css", "css_entries"}},
      {"bleu", {"bleu", "bleu_unsmoothed"}},
      {"rouge", {"rouge_1", "rouge_2", "rouge_l"}},
  };
  return keys;
}

DatasetExpectation expectation_from(const std::string& name) {
  if (name == "any") return DatasetExpectation::Any;
  if (name == "unigram") return DatasetExpectation::Unigram;
  if (name == "multigram") return DatasetExpectation::Multigram;
  throw ArgumentError("--expect: expected any, unigram, or multigram, got \"" +
                      name + "\"");
}

int cmd_evaluate(const std::string& config_path, const std::string& dataset,
                 const std::string& out_path, const std::string& metrics_csv,
                 const std::string& expect) {
  std::vector<std::string> wanted = split_csv(metrics_csv);
  for (const std::string& name : wanted)
    if (!metric_keys().count(name))
      throw ArgumentError("--metrics: unknown metric \"" + name + "\"");

  PipelineConfig config = effective_config(config_path);
  Pipeline pipeline = make_pipeline(config);
  std::vector<DatasetEntry> entries =
      load_dataset(dataset, expectation_from(expect));

  std::vector<std::vector<std::string>> generated;
  generated.reserve(entries.size());
  for (const DatasetEntry& entry : entries)
    generated.push_back(pipeline.for_entry(entry).distractors);

  bool want_wss = wanted.empty() ||
                  std::count(wanted.begin(), wanted.end(), "wss") > 0;
  bool want_css = wanted.empty() ||
                  std::count(wanted.begin(), wanted.end(), "css") > 0;
  EvalConfig eval_config;
  eval_config.k_gen = static_cast<std::size_t>(config.n);
  EvalReport report = evaluate_entries(
      entries, generated, eval_config,
      want_wss ? pipeline.backends().statics.get() : nullptr,
      want_css ? pipeline.backends().contextual.get() : nullptr);

  Output out(out_path);
  if (wanted.empty()) {
    out.stream() << to_json(report) << '\n';
    if (out.to_file()) std::cout << format_report(report);
  } else {
    nlohmann::json full = nlohmann::json::parse(to_json(report));
    nlohmann::json restricted;
    restricted["entries"] = full.at("entries");
    restricted["config"] = full.at("config");
    for (const std::string& name : wanted)
      for (const std::string& key : metric_keys().at(name))
        restricted[key] = full.at(key);
    out.stream() << restricted.dump(2) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// tune

int cmd_tune(const std::string& config_path, const std::string& dataset,
             const std::string& alpha_range, const std::string& beta_range,
             const std::string& gamma_range, double step,
             const std::string& split, std::size_t folds,
             const std::string& out_path) {
  PipelineConfig config = effective_config(config_path);
  Pipeline pipeline = make_pipeline(config);
  std::vector<DatasetEntry> entries = load_dataset(dataset);

  GridSpec spec;
  spec.alpha = parse_range(alpha_range, "--alpha");
  spec.beta = parse_range(beta_range, "--beta");
  if (!gamma_range.empty()) spec.gamma = parse_range(gamma_range, "--gamma");
  spec.step = step;

  auto [train_parts, heldout_parts] = parse_split(split);
  std::size_t total_parts =
      static_cast<std::size_t>(train_parts + heldout_parts);
  std::size_t n_train =
      (entries.size() * static_cast<std::size_t>(train_parts) +
       total_parts / 2) /
      total_parts;
  n_train = std::min(std::max<std::size_t>(n_train, 1), entries.size());
  std::vector<DatasetEntry> train(entries.begin(),
                                  entries.begin() +
                                      static_cast<std::ptrdiff_t>(n_train));
  std::vector<DatasetEntry> heldout(
      entries.begin() + static_cast<std::ptrdiff_t>(n_train), entries.end());

  EntryGenerator generate = [&pipeline](const DatasetEntry& entry,
                                        const RankParams& params) {
    return pipeline.for_entry(entry, params).distractors;
  };
  GridSearchResult result = grid_search(
      train, spec, generate, folds, static_cast<std::size_t>(config.n));

  std::optional<double> heldout_f1;
  if (!heldout.empty()) {
    double sum = 0.0;
    for (const DatasetEntry& entry : heldout)
      sum += set_metrics(generate(entry, result.best), truth_of(entry),
                         static_cast<std::size_t>(config.n))
                 .f1;
    heldout_f1 = sum / static_cast<double>(heldout.size());
  }

  nlohmann::json doc;
  doc["best"] = {{"alpha", result.best.alpha},
                 {"beta", result.best.beta},
                 {"gamma", result.best.gamma}};
  doc["train_f1"] = result.best_f1;
  if (heldout_f1)
    doc["heldout_f1"] = *heldout_f1;
  else
    doc["heldout_f1"] = nullptr;
  doc["split"] = {{"train", train.size()}, {"heldout", heldout.size()}};
  doc["step"] = spec.step;
  nlohmann::json table = nlohmann::json::array();
  for (const GridPoint& point : result.table)
    table.push_back({{"alpha", point.params.alpha},
                     {"beta", point.params.beta},
                     {"gamma", point.params.gamma},
                     {"f1", point.mean_f1}});
  doc["table"] = std::move(table);

  Output out(out_path);
  out.stream() << doc.dump(2) << '\n';
  if (out.to_file())
    std::cout << "best: alpha=" << result.best.alpha
              << " beta=" << result.best.beta
              << " gamma=" << result.best.gamma
              << " (train f1 " << result.best_f1 << ", points "
              << result.table.size() << ")\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// inspect

std::string fmt(double v) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << v;
  return out.str();
}

void print_question(std::ostream& out, std::size_t index,
                    const ClozeQuestion& q) {
  out << "== question " << index << "\n";
  out << "stem: " << q.stem_with_blank << "\n";
  out << "answer key: " << q.answer_key.surface << " ("
      << to_string(q.answer_key.kind) << ")\n";
  out << "instances:";
  for (const Instance& inst : q.answer_key.instances)
    out << " [" << inst.surface << (inst.in_wordnet ? "" : " (no entry)")
        << "]";
  out << "\n";

  for (const InstanceDiagnostics& diag : q.instance_diagnostics) {
    out << "-- instance \"" << diag.info.instance.surface << "\"\n";
    out << "   candidates:\n";
    if (diag.traces.empty()) out << "     (none)\n";
    for (const FilterTrace& trace : diag.traces) {
      out << "     " << trace.candidate.surface << "  ["
          << to_string(trace.candidate.origin);
      if (trace.candidate.position)
        out << " #" << *trace.candidate.position;
      out << "]\n";
    }
    out << "   filters:\n";
    for (const FilterTrace& trace : diag.traces) {
      out << "     " << trace.candidate.surface << ": ";
      if (trace.removed_by == RemovedBy::None)
        out << "kept";
      else
        out << "removed by " << to_string(trace.removed_by);
      if (!trace.detail.empty()) out << " (" << trace.detail << ")";
      out << "\n";
    }
    out << "   ranked:\n";
    for (const RankedCandidate& rc : diag.ranked)
      out << "     " << rc.candidate.surface << "  E=" << fmt(rc.e_score)
          << " W=" << fmt(rc.w_score) << " P=" << fmt(rc.p_score)
          << " L=" << fmt(rc.l_score) << " R=" << fmt(rc.r_score) << "\n";
    if (diag.ranked.empty()) out << "     (none)\n";
  }

  out << "-- phrases:\n";
  for (const DistractorCandidate& dc : q.scored) {
    out << "   " << dc.phrase << "  product=" << fmt(dc.rank_product)
        << " corpus=" << (dc.ngram_verified ? "yes" : "no");
    if (dc.ngram_verified) out << " similarity=" << fmt(dc.key_similarity);
    out << "\n";
  }
  if (q.scored.empty()) out << "   (none)\n";

  out << "distractors:";
  for (const std::string& d : q.distractors) out << " [" << d << "]";
  if (q.distractors.empty()) out << " (none)";
  if (q.shortfall) out << "  -- shortfall";
  out << "\n";
}

int cmd_inspect(const std::string& config_path, const std::string& target,
                const std::string& article) {
  PipelineConfig config = effective_config(config_path);
  Pipeline pipeline = make_pipeline(config);

  if (!article.empty()) {
    // Numeric target: index into the article's generated questions.
    std::size_t id = 0;
    try {
      std::size_t used = 0;
      id = std::stoul(target, &used);
      if (used != target.size()) throw std::invalid_argument(target);
    } catch (const std::logic_error&) {
      throw ArgumentError("inspect: question id \"" + target +
                          "\" is not a number");
    }
    std::vector<ClozeQuestion> questions =
        pipeline.generate(read_text_file(article));
    if (id >= questions.size())
      throw ArgumentError("inspect: unknown question id " + target +
                          " (article yields " +
                          std::to_string(questions.size()) + " questions)");
    print_question(std::cout, id, questions[id]);
    return kOk;
  }

  if (text::normalize(target).empty())
    throw ArgumentError("inspect: stem text is empty");

  // Free-text target: treat each sentence as a stem, no eligibility gating.
  std::size_t printed = 0;
  for (const Sentence& sentence : segment_sentences(target)) {
    for (AnswerKey& key :
         identify_answer_keys(sentence, *pipeline.backends().tagger)) {
      ClozeQuestion q = pipeline.generate_for_key(sentence, std::move(key));
      print_question(std::cout, printed++, q);
    }
  }
  if (printed == 0) {
    std::cerr << "no answer keys found\n";
    return kEmpty;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cloze question generator"};
  app.require_subcommand(0, 1);

  std::string config_path;
  bool print_config = false;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_flag("--print-config", print_config,
               "Print the effective configuration and exit");

  auto* gen = app.add_subcommand(
      "generate", "Generate cloze questions from an article");
  gen->fallthrough();
  std::string gen_article, gen_out;
  std::size_t gen_num = 0;
  std::uint64_t seed = 0;  // reserved for tie-breaking; the pipeline is
                           // deterministic and currently ignores it
  gen->add_option("article", gen_article, "Article text file")->required();
  gen->add_option("--out,-o", gen_out, "Output file (default stdout)");
  gen->add_option("--num-questions", gen_num, "Stop after this many (0 = all)");
  gen->add_option("--seed", seed, "Tie-breaking seed (reserved)");

  auto* eval = app.add_subcommand(
      "evaluate", "Score generated distractors against a dataset");
  eval->fallthrough();
  std::string eval_dataset, eval_out, eval_metrics, eval_expect = "any";
  eval->add_option("dataset", eval_dataset, "Line-delimited dataset file")
      ->required();
  eval->add_option("--out,-o", eval_out, "Report file (default stdout)");
  eval->add_option("--metrics", eval_metrics,
                   "Comma-separated metric names to report");
  eval->add_option("--expect", eval_expect,
                   "Dataset shape: any, unigram, or multigram");

  auto* tune = app.add_subcommand(
      "tune", "Grid-search ranking parameters on a dataset");
  tune->fallthrough();
  std::string tune_dataset, tune_out, tune_split = "3:1";
  std::string tune_alpha = "20.5", tune_beta = "1.1", tune_gamma;
  double tune_step = 0.1;
  std::size_t tune_folds = 1;
  tune->add_option("dataset", tune_dataset, "Line-delimited dataset file")
      ->required();
  tune->add_option("--alpha", tune_alpha, "Alpha range LO:HI (or one value)");
  tune->add_option("--beta", tune_beta, "Beta range LO:HI (or one value)");
  tune->add_option("--gamma", tune_gamma, "Gamma range LO:HI (optional)");
  tune->add_option("--step", tune_step, "Grid step");
  tune->add_option("--split", tune_split, "Train:heldout ratio");
  tune->add_option("--folds", tune_folds, "Cross-validation folds on train");
  tune->add_option("--out,-o", tune_out, "Result file (default stdout)");

  auto* inspect = app.add_subcommand(
      "inspect", "Show per-instance candidates, filters, and scores");
  inspect->fallthrough();
  std::string inspect_target, inspect_article;
  inspect
      ->add_option("target", inspect_target,
                   "Stem text, or a question id with --article")
      ->required();
  inspect->add_option("--article", inspect_article,
                      "Article file the question id refers to");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  try {
    if (print_config) {
      std::cout << config_to_json(effective_config(config_path)) << '\n';
      return kOk;
    }
    if (*gen) return cmd_generate(config_path, gen_article, gen_out, gen_num);
    if (*eval)
      return cmd_evaluate(config_path, eval_dataset, eval_out, eval_metrics,
                          eval_expect);
    if (*tune)
      return cmd_tune(config_path, tune_dataset, tune_alpha, tune_beta,
                      tune_gamma, tune_step, tune_split, tune_folds, tune_out);
    if (*inspect)
      return cmd_inspect(config_path, inspect_target, inspect_article);
    std::cerr << app.help();
    return kError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
}
