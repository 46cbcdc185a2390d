#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>

#include "clozegen/wordnet.hpp"
#include "support/test_util.hpp"

using namespace clozegen;
using testsupport::TempDir;
using testsupport::synset_with_label;
using testsupport::toy_kb;

TEST_CASE("database loads and exposes the expected shape") {
  const auto& kb = toy_kb();
  CHECK(kb.lexicographer_names().size() == 45);
  CHECK(kb.synset_count() == testsupport::toy_wordnet_spec().synsets.size());
  CHECK(kb.lexicographer_names()[0] == "adj.all");
  CHECK(kb.lexicographer_names()[44] == "adj.ppl");
}

TEST_CASE("polysemous lookup: dog") {
  const auto& kb = toy_kb();
  auto synsets = kb.synsets_of("dog");
  CHECK(synsets.size() == 8);
  auto labels = kb.lexical_labels_of("dog");
  CHECK(labels == LexicalLabelSet{"noun.animal", "noun.artifact", "noun.food",
                                  "noun.person", "verb.motion"});
  CHECK(kb.synsets_of("dog", Pos::Noun).size() == 7);
  CHECK(kb.synsets_of("dog", Pos::Verb).size() == 1);
}

TEST_CASE("entry membership, multiword phrases, normalization") {
  const auto& kb = toy_kb();
  CHECK(kb.is_entry("white blood cell"));
  CHECK(kb.is_entry("white blood cells"));  // plural resolves to the entry
  CHECK(kb.is_entry("White  Blood   Cells"));
  CHECK(kb.is_entry("cancer of the blood"));
  CHECK(kb.is_entry("liquid body substance"));
  CHECK_FALSE(kb.is_entry("abnormal white blood cells"));
  CHECK_FALSE(kb.is_entry("the blood"));
  CHECK_FALSE(kb.is_entry("of"));
  CHECK_FALSE(kb.is_entry(""));
  CHECK(kb.is_entry("dog", Pos::Verb));
  CHECK_FALSE(kb.is_entry("wolf", Pos::Verb));
}

TEST_CASE("morphology: suffix detachment and exception lists") {
  const auto& kb = toy_kb();
  CHECK(kb.base_form("cells", Pos::Noun) == "cell");
  CHECK(kb.base_form("laboratories", Pos::Noun) == "laboratory");
  CHECK(kb.base_form("wolves", Pos::Noun) == std::nullopt);  // irregular, unlisted
  CHECK(kb.base_form("foxes", Pos::Noun) == "fox");
  CHECK(kb.base_form("men", Pos::Noun) == "man");
  CHECK(kb.base_form("was", Pos::Verb) == "be");
  CHECK(kb.base_form("were", Pos::Verb) == "be");
  CHECK(kb.base_form("ran", Pos::Verb) == "run");
  CHECK(kb.base_form("found", Pos::Verb) == "find");
  CHECK(kb.base_form("studies", Pos::Verb) == "study");
  CHECK(kb.base_form("produced", Pos::Verb) == "produce");
  CHECK(kb.base_form("chasing", Pos::Verb) == "chase");
  CHECK(kb.base_form("causes", Pos::Verb) == "cause");
  // exception maps to a base that is itself absent from the index
  CHECK_FALSE(kb.is_entry("mice"));
  // multiword: last word is morphed
  CHECK(kb.base_form("white blood cells", Pos::Noun) == "white blood cell");
  CHECK(kb.base_form("wild dogs", Pos::Noun) == "wild dog");
  CHECK(kb.base_form("domestic animals", Pos::Noun) == "domestic animal");
  // already in base form
  CHECK(kb.base_form("dog", Pos::Noun) == "dog");
}

TEST_CASE("hypernym closure is breadth-first, deduplicated, self-free") {
  const auto& kb = toy_kb();
  auto dog = synset_with_label(kb, "dog", "noun.animal");
  auto closure = kb.hypernym_closure(dog);
  REQUIRE(closure.size() >= 5);
  auto name = [&](SynsetRef r) { return kb.synset_info(r).lemmas.front(); };
  CHECK(name(closure[0]) == "canine");
  CHECK(name(closure[1]) == "domestic animal");
  std::set<std::string> all;
  for (auto r : closure) all.insert(name(r));
  CHECK(all == std::set<std::string>{"canine", "domestic animal", "carnivore",
                                     "animal", "organism", "entity"});
  for (auto r : closure) CHECK(r != dog);
}

TEST_CASE("instance hypernyms participate in closures") {
  const auto& kb = toy_kb();
  auto virchow = kb.synsets_of("virchow").at(0);
  auto closure = kb.hypernym_closure(virchow);
  std::set<std::string> lemmas;
  for (auto r : closure) lemmas.insert(kb.synset_info(r).lemmas.front());
  CHECK(lemmas.contains("pathologist"));
  CHECK(lemmas.contains("scientist"));
  CHECK(lemmas.contains("person"));

  auto scientist = kb.synsets_of("scientist").at(0);
  auto below = kb.hyponym_closure(scientist, 2);
  CHECK(below.contains(virchow));
}

TEST_CASE("hyponym closure respects the depth bound") {
  const auto& kb = toy_kb();
  auto carnivore = kb.synsets_of("carnivore").at(0);
  auto names = [&](const std::set<SynsetRef>& refs) {
    std::set<std::string> out;
    for (auto r : refs) out.insert(kb.synset_info(r).lemmas.front());
    return out;
  };
  CHECK(names(kb.hyponym_closure(carnivore, 1)) ==
        std::set<std::string>{"canine", "feline"});
  CHECK(names(kb.hyponym_closure(carnivore)) ==
        std::set<std::string>{"canine", "feline", "dog", "wolf", "fox",
                              "wild dog", "cat"});
  CHECK(kb.hyponym_closure(carnivore, 0).empty());
}

TEST_CASE("closures never overlap for tree members") {
  const auto& kb = toy_kb();
  for (const char* phrase : {"dog", "blood cell", "scientist", "disease"}) {
    for (auto ref : kb.synsets_of(phrase, Pos::Noun)) {
      auto up = kb.hypernym_closure(ref);
      auto down = kb.hyponym_closure(ref);
      for (auto r : up) CHECK_FALSE(down.contains(r));
    }
  }
}

TEST_CASE("sibling entries are co-hyponym lemmas") {
  const auto& kb = toy_kb();
  auto dog = synset_with_label(kb, "dog", "noun.animal");
  auto sibs = kb.sibling_entries(dog);
  std::set<std::string> set(sibs.begin(), sibs.end());
  CHECK(set.contains("wolf"));
  CHECK(set.contains("fox"));
  CHECK(set.contains("wild dog"));
  CHECK(set.contains("cat"));  // via the second hypernym
  CHECK_FALSE(set.contains("dog"));
  CHECK_FALSE(set.contains("domestic dog"));

  auto wbc = synset_with_label(kb, "white blood cell", "noun.body");
  auto cell_sibs = kb.sibling_entries(wbc);
  std::set<std::string> cs(cell_sibs.begin(), cell_sibs.end());
  CHECK(cs == std::set<std::string>{"red blood cell", "rbc", "erythrocyte",
                                    "platelet", "blood platelet",
                                    "thrombocyte"});
}

TEST_CASE("adjective siblings come from the similar-to cluster") {
  const auto& kb = toy_kb();
  auto abnormal = kb.synsets_of("abnormal", Pos::Adj).at(0);
  auto sibs = kb.sibling_entries(abnormal);
  std::set<std::string> set(sibs.begin(), sibs.end());
  CHECK(set == std::set<std::string>{"atypical", "irregular", "defective",
                                     "faulty", "normal", "standard"});

  // satellites resolve through their head adjective
  auto defective = kb.synsets_of("defective", Pos::Adj).at(0);
  auto dsibs = kb.sibling_entries(defective);
  std::set<std::string> dset(dsibs.begin(), dsibs.end());
  CHECK(dset.contains("abnormal"));
  CHECK(dset.contains("atypical"));
  CHECK(dset.contains("normal"));
  CHECK_FALSE(dset.contains("defective"));
  CHECK_FALSE(dset.contains("faulty"));
  CHECK_FALSE(dset.contains("white"));
}

TEST_CASE("synset metadata: glosses and lexical labels") {
  const auto& kb = toy_kb();
  auto wbc = synset_with_label(kb, "leukocyte", "noun.body");
  CHECK(kb.gloss_of(wbc).find("defense system") != std::string::npos);
  CHECK(kb.synset_info(wbc).lemmas.size() == 6);
  for (const auto& lemma : kb.synset_info(wbc).lemmas) CHECK(kb.is_entry(lemma));
  CHECK(kb.lexical_labels_of("first") ==
        LexicalLabelSet{"noun.time", "adj.all"});
  CHECK(kb.lexical_labels_of("today") ==
        LexicalLabelSet{"noun.time", "adv.all"});
  CHECK(kb.lexical_labels_of("not-a-word").empty());
}

TEST_CASE("every synset carries a known lexical label and resolvable links") {
  const auto& kb = toy_kb();
  std::set<std::string> known(kb.lexicographer_names().begin(),
                              kb.lexicographer_names().end());
  for (Pos pos : kAllPos) {
    for (const auto& entry : kb.all_entries(pos)) {
      for (auto ref : kb.synsets_of(entry, pos)) {
        const auto& info = kb.synset_info(ref);
        CHECK(known.contains(info.lexical_label));
        CHECK_FALSE(info.gloss.empty());
        CHECK_FALSE(info.lemmas.empty());
      }
    }
  }
}

TEST_CASE("all_entries reports space-joined lemmas incl. multiword phrases") {
  const auto& kb = toy_kb();
  auto nouns = kb.all_entries(Pos::Noun);
  std::set<std::string> set(nouns.begin(), nouns.end());
  CHECK(set.contains("cancer of the blood"));
  CHECK(set.contains("white blood cell"));
  CHECK(set.contains("rudolf karl virchow"));
  int multiword = 0;
  for (const auto& e : nouns)
    if (e.find(' ') != std::string::npos) ++multiword;
  CHECK(multiword >= 20);
}

TEST_CASE("load failures name the offending file") {
  TempDir dir("wn-bad");

  SUBCASE("empty directory") {
    CHECK_THROWS_AS(KnowledgeBase::load(dir.path()), LoadError);
  }

  SUBCASE("wrong version in the license header") {
    auto spec = testsupport::toy_wordnet_spec();
    spec.version = "2.1";
    testsupport::write_wordnet(dir.path(), spec);
    CHECK_THROWS_WITH_AS(KnowledgeBase::load(dir.path()),
                         doctest::Contains("2.1"), VersionError);
  }

  SUBCASE("truncated data file") {
    testsupport::write_toy_wordnet(dir.path());
    auto file = dir.path() / "data.noun";
    auto size = std::filesystem::file_size(file);
    std::filesystem::resize_file(file, size / 2);
    CHECK_THROWS_WITH_AS(KnowledgeBase::load(dir.path()),
                         doctest::Contains("data.noun"), LoadError);
  }

  SUBCASE("index entry pointing at a missing synset") {
    testsupport::write_toy_wordnet(dir.path());
    std::ofstream out(dir.path() / "index.noun", std::ios::app);
    out << "zzzz n 1 0 1 0 99999999\n";
    out.close();
    CHECK_THROWS_WITH_AS(KnowledgeBase::load(dir.path()),
                         doctest::Contains("data.noun"), LoadError);
  }

  SUBCASE("garbage in a data record") {
    testsupport::write_toy_wordnet(dir.path());
    std::ofstream out(dir.path() / "data.verb", std::ios::app);
    out << "not a synset line\n";
    out.close();
    CHECK_THROWS_WITH_AS(KnowledgeBase::load(dir.path()),
                         doctest::Contains("data.verb"), LoadError);
  }
}
