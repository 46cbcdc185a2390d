// Regenerates the committed fixtures under data/: the demo bundle
// (dictionary, backend table, article, config, small dataset) and the two
// synthetic evaluation datasets. Deterministic — running it twice produces
// identical bytes.
//
//   make_fixtures [repo_root]

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "clozegen/evaluation.hpp"
#include "support/scenario.hpp"
#include "support/toy_wordnet.hpp"

namespace fs = std::filesystem;
using clozegen::DatasetEntry;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    std::exit(1);
  }
}

DatasetEntry entry(std::string stem, std::string answer,
                   std::array<std::string, 3> distractors,
                   std::string source) {
  DatasetEntry e;
  e.stem = std::move(stem);
  e.answer_key = std::move(answer);
  e.truth_distractors = std::move(distractors);
  e.source_tag = std::move(source);
  return e;
}

void write_demo(const fs::path& root) {
  const fs::path demo = root / "data" / "demo";
  testsupport::write_toy_wordnet(demo / "wordnet");
  write_file(demo / "backends.json", testsupport::scenario_mocks_json());
  write_file(demo / "article.txt",
             std::string(testsupport::scenario_article()) + "\n");
  write_file(demo / "config.json", R"({
  "wordnet_dir": "wordnet",
  "backends": {"file": "backends.json", "model_id": "scenario-mock"},
  "ngram": {"mode": "local"}
}
)");

  // Entries whose rebuilt sentences the demo backends know how to serve.
  std::vector<DatasetEntry> demo_set;
  demo_set.push_back(entry(
      "Virchow was the first scientist to discover that leukemia produces "
      "**blank** .",
      "abnormal white blood cells",
      {"abnormal red blood cells", "defective genes",
       "atypical white blood cells"},
      "demo"));
  demo_set.push_back(entry("Leukemia is a **blank** of the blood .", "cancer",
                           {"leukaemia", "cancer of the blood", "malignancy"},
                           "demo"));
  demo_set.push_back(entry(
      "Scientists study **blank** in modern laboratories today .",
      "abnormal cells", {"defective cells", "normal cells", "faulty genes"},
      "demo"));
  write_file(demo / "dataset.jsonl", clozegen::dataset_to_text(demo_set));
}

// ---------------------------------------------------------------------------
// Calibration bundle for parameter tuning. Four word families, each a parent
// with three leaf members: the blanked key, a "goal" the tuned parameters
// should rank first, and a "foil" that wins under the wrong parameters.
// The embeddings are chosen so the goal beats the foil on
//   family a  iff alpha <= 2.05   (definition-similarity reward)
//   family b  iff alpha >= 1.95
//   family c  iff beta  >= 0.35   (prediction-rank reward)
//   family d  iff beta  <= 0.45
// so on a 0.1 grid exactly (alpha, beta) = (2.0, 0.4) wins all four.

void write_tune(const fs::path& root) {
  using nlohmann::json;
  const fs::path dir = root / "data" / "tune";

  testsupport::WordnetSpec spec;
  for (char f : {'a', 'b', 'c', 'd'}) {
    const std::string F(1, f);
    testsupport::SynsetSpec parent;
    parent.id = "parent_" + F;
    parent.lexfile = "noun.plant";
    parent.lemmas = {"parent" + F};
    parent.gloss = "parentgloss" + F;
    for (const char* role : {"key", "goal", "foil"})
      parent.pointers.push_back({"~", std::string(role) + "_" + F});
    spec.synsets.push_back(parent);
    for (const char* role : {"key", "goal", "foil"}) {
      testsupport::SynsetSpec leaf;
      leaf.id = std::string(role) + "_" + F;
      leaf.lexfile = "noun.plant";
      leaf.lemmas = {std::string(role) + F};
      leaf.gloss = std::string(role) + "gloss" + F;
      leaf.pointers.push_back({"@", "parent_" + F});
      spec.synsets.push_back(leaf);
    }
  }
  testsupport::write_wordnet(dir / "wordnet", spec);

  auto unit = [](double x) {
    return std::vector<double>{x, std::sqrt(1.0 - x * x)};
  };
  json phrases;
  for (char f : {'a', 'b', 'c', 'd'}) {
    const std::string F(1, f);
    phrases["key" + F] = {1.0, 0.0};
    phrases["keygloss" + F] = {1.0, 0.0};
  }
  phrases["goala"] = unit(0.55115);
  phrases["foila"] = unit(0.9);
  phrases["goalb"] = unit(0.8235);
  phrases["foilb"] = unit(0.5);
  phrases["goalc"] = unit(0.76596);
  phrases["foilc"] = unit(0.9);
  phrases["goald"] = unit(0.9);
  phrases["foild"] = unit(0.734694);
  phrases["goalglossa"] = {0.8, 0.6};  // definition similarity 0.8
  phrases["foilglossa"] = {0.0, 1.0};
  phrases["goalglossb"] = {0.0, 1.0};
  phrases["foilglossb"] = {0.8, 0.6};
  for (const char* k : {"goalglossc", "foilglossc", "goalglossd",
                        "foilglossd"})
    phrases[k] = {0.0, 1.0};

  json backends;
  backends["model_id"] = "tune-mock";
  backends["version"] = "1";
  backends["dimension"] = 2;
  backends["contextual_embeddings"] = {{"by_phrase", phrases}};
  backends["static_embeddings"] = {{"hash_fallback", true}};
  // Rank-2 fillers: the stopword in first place is discarded but the
  // survivor keeps its original position.
  backends["predictions"] = {
      {"A [MASK] hums in the workshop .",
       {{{"token", "the"}, {"probability", 0.5}},
        {{"token", "goalc"}, {"probability", 0.4}}}},
      {"A [MASK] hums in the cellar .",
       {{{"token", "the"}, {"probability", 0.5}},
        {{"token", "foild"}, {"probability", 0.4}}}},
  };
  json rules = json::array();
  json lexicon = {{"a", "DET"},     {"the", "DET"},     {"in", "ADP"},
                  {"rests", "VERB"}, {"hums", "VERB"},   {"garden", "NOUN"},
                  {"meadow", "NOUN"}, {"workshop", "NOUN"}, {"cellar", "NOUN"}};
  for (char f : {'a', 'b', 'c', 'd'}) {
    const std::string F(1, f);
    lexicon["parent" + F] = "NOUN";
    for (const char* role : {"key", "goal", "foil"}) {
      const std::string word = std::string(role) + F;
      lexicon[word] = "NOUN";
      rules.push_back(
          {{"phrase", word},
           {"target", {{"lemma", word}, {"label", "noun.plant"}}}});
    }
  }
  backends["wsd_rules"] = rules;
  backends["lexicon"] = lexicon;
  write_file(dir / "backends.json", backends.dump(2) + "\n");

  write_file(dir / "config.json", R"({
  "m": 1,
  "k": 5,
  "wordnet_dir": "wordnet",
  "backends": {"file": "backends.json", "model_id": "tune-mock"},
  "ngram": {"mode": "permissive"}
}
)");

  std::vector<DatasetEntry> entries;
  const std::vector<std::array<std::string, 2>> families = {
      {"a", "rests in the garden"},
      {"b", "rests in the meadow"},
      {"c", "hums in the workshop"},
      {"d", "hums in the cellar"},
  };
  for (const char* pass : {"", "-again"}) {
    for (const auto& [f, scene] : families)
      entries.push_back(entry("A **blank** " + scene + " .", "key" + f,
                              {"goal" + f, "padone", "padtwo"},
                              "tune-" + f + pass));
  }
  write_file(dir / "dataset.jsonl", clozegen::dataset_to_text(entries));
}

// ---------------------------------------------------------------------------
// Synthetic evaluation datasets. Shapes and counts are what matters: the
// unigram file has 2880 single-token answers, the multigram file has 252
// multi-token answers (210 bigrams, 39 trigrams, 3 longer).

const std::vector<std::string>& unigram_answers() {
  static const std::vector<std::string> words = {
      "photosynthesis", "mitochondria", "chloroplast", "ribosome",
      "nucleus",        "enzyme",       "protein",     "glucose",
      "oxygen",         "nitrogen",     "carbon",      "hydrogen",
      "electron",       "proton",       "neutron",     "molecule",
      "atom",           "ion",          "isotope",     "catalyst",
      "membrane",       "cytoplasm",    "chromosome",  "gene",
      "allele",         "mutation",     "meiosis",     "mitosis",
      "osmosis",        "diffusion",    "gravity",     "friction",
      "momentum",       "velocity",     "acceleration", "energy",
      "entropy",        "magma",        "sediment",    "erosion",
      "precipitation",  "evaporation",  "condensation", "humidity",
      "bacteria",       "virus",        "fungus",      "algae",
      "predator",       "herbivore",    "carnivore",   "ecosystem",
      "habitat",        "biome",        "climate",     "mineral",
      "crystal",        "alloy",        "polymer",     "solvent",
  };
  return words;
}

const std::vector<std::string>& unigram_templates() {
  static const std::vector<std::string> templates = [] {
    const std::vector<std::string> subjects = {
        "Scientists observed that the **blank**",
        "The textbook explains how the **blank**",
        "Each experiment showed that the **blank**",
        "Researchers confirmed that the **blank**",
        "Students learned that the **blank**",
        "The diagram labels where the **blank**",
    };
    const std::vector<std::string> predicates = {
        "drives the reaction inside the cell .",
        "changes during the second stage .",
        "stores the energy for later use .",
        "moves across the outer boundary .",
        "controls the rate of the process .",
        "breaks down under higher temperatures .",
        "supports the structure of the tissue .",
        "interacts with the surrounding medium .",
    };
    std::vector<std::string> out;
    for (const auto& s : subjects)
      for (const auto& p : predicates) out.push_back(s + " " + p);
    return out;
  }();
  return templates;
}

std::vector<DatasetEntry> unigram_dataset() {
  const auto& answers = unigram_answers();
  const auto& templates = unigram_templates();
  std::vector<DatasetEntry> entries;
  for (std::size_t t = 0; t < templates.size(); ++t) {
    for (std::size_t a = 0; a < answers.size(); ++a) {
      std::string stem = templates[t];
      auto at = stem.find("**blank**");
      (void)at;
      const std::size_t n = answers.size();
      entries.push_back(entry(
          stem, answers[a],
          {answers[(a + 1 + t) % n], answers[(a + 11 + t) % n],
           answers[(a + 29 + t) % n]},
          "sciq-u"));
    }
  }
  return entries;
}

std::vector<DatasetEntry> multigram_dataset() {
  std::vector<DatasetEntry> entries;

  const std::vector<std::string> adjectives = {
      "abnormal", "stable",   "reactive", "volatile", "dense",
      "porous",   "magnetic", "neutral",  "acidic",   "alkaline",
      "organic",  "inorganic", "kinetic", "thermal",  "electric",
      "chemical", "physical", "cellular", "genetic",  "molecular",
      "atomic",
  };
  const std::vector<std::string> nouns = {
      "blood cells", "gas exchange",   "rock layers", "acid rain",
      "cell walls",  "energy transfer", "food webs",  "water cycles",
      "ice sheets",  "light waves",
  };
  // 21 x 10 = 210 bigram answers: adjective + the noun pair's head word.
  for (std::size_t i = 0; i < adjectives.size(); ++i) {
    for (std::size_t j = 0; j < nouns.size(); ++j) {
      std::string head = nouns[j].substr(nouns[j].find(' ') + 1);
      std::string answer = adjectives[i] + " " + head;
      std::string stem = "The survey described the **blank** found near the " +
                         nouns[(j + 1) % nouns.size()] + " .";
      const std::size_t n = adjectives.size();
      entries.push_back(entry(
          stem, answer,
          {adjectives[(i + 1) % n] + " " + head,
           adjectives[(i + 5) % n] + " " + head,
           adjectives[(i + 9) % n] + " " + head},
          "sciq-m"));
    }
  }

  // 39 trigram answers: 13 modifiers x 3 two-word tails.
  const std::vector<std::string> modifiers = {
      "rapid",  "gradual", "partial",  "complete", "visible",
      "hidden", "early",   "delayed",  "uneven",   "uniform",
      "strong", "weak",    "seasonal",
  };
  const std::vector<std::string> tails = {"cell division", "heat transfer",
                                          "plate movement"};
  for (std::size_t i = 0; i < modifiers.size(); ++i) {
    for (std::size_t j = 0; j < tails.size(); ++j) {
      std::string answer = modifiers[i] + " " + tails[j];
      std::string stem =
          "Field notes recorded the **blank** across every sample site .";
      const std::size_t n = modifiers.size();
      entries.push_back(entry(stem, answer,
                              {modifiers[(i + 1) % n] + " " + tails[j],
                               modifiers[(i + 4) % n] + " " + tails[j],
                               modifiers[(i + 7) % n] + " " + tails[j]},
                              "sciq-m"));
    }
  }

  // 3 longer answers (four tokens).
  entries.push_back(entry(
      "The report blamed the decline on **blank** in the region .",
      "loss of natural habitat",
      {"loss of fertile soil", "loss of clean water", "loss of native species"},
      "sciq-m"));
  entries.push_back(entry(
      "The chapter closes by describing **blank** over geologic time .",
      "movement of tectonic plates",
      {"movement of ocean currents", "movement of polar air",
       "movement of surface water"},
      "sciq-m"));
  entries.push_back(entry(
      "The lab measured **blank** under controlled conditions .",
      "rate of chemical reaction",
      {"rate of heat loss", "rate of cell growth", "rate of energy use"},
      "sciq-m"));
  return entries;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path(".");
  write_demo(root);
  write_tune(root);
  write_file(root / "data" / "sciq_unigram.jsonl",
             clozegen::dataset_to_text(unigram_dataset()));
  write_file(root / "data" / "sciq_multigram.jsonl",
             clozegen::dataset_to_text(multigram_dataset()));
  std::cout << "fixtures written under " << (root / "data").string() << "\n";
  return 0;
}
