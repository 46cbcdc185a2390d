#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "clozegen/distractors.hpp"
#include "clozegen/mock_backends.hpp"
#include "support/scenario.hpp"
#include "support/test_util.hpp"

using namespace clozegen;
using testsupport::synset_with_label;
using testsupport::toy_kb;

namespace {

MockBackendSet mocks() {
  return MockBackendSet::from_json_text(testsupport::scenario_mocks_json(),
                                        "scenario", toy_kb());
}

Sentence scenario_sentence(std::size_t index) {
  auto sentences = segment_sentences(testsupport::scenario_article());
  REQUIRE(index < sentences.size());
  return sentences[index];
}

Instance wbc_instance() {
  return Instance{"white blood cells", {11, 14}, true};
}

Instance abnormal_instance() { return Instance{"abnormal", {10, 11}, true}; }

struct SlotPipeline {
  InstanceInfo info;
  std::vector<InstanceCandidate> candidates;
  std::vector<InstanceCandidate> survivors;
  std::vector<FilterTrace> traces;
  std::vector<RankedCandidate> ranked;
};

SlotPipeline run_slot(MockBackendSet& m, const Sentence& s,
                      const Instance& inst,
                      LexicalMode mode = LexicalMode::Strict) {
  const auto& kb = toy_kb();
  SlotPipeline sp;
  sp.info = annotate_instance(s, inst, kb, *m.wsd, *m.tagger);
  auto gathered = gather_candidates(sp.info, s, kb, *m.predictor, 10);
  for (auto& cand : gathered)
    sp.candidates.push_back(
        annotate_candidate(s, inst, std::move(cand), kb, *m.wsd, *m.tagger));
  auto cleaned = remove_stem_echoes(sp.candidates, s, inst);
  auto filtered = feature_filter(cleaned, sp.info, mode);
  sp.survivors = std::move(filtered.first);
  sp.traces = std::move(filtered.second);
  RankParams params;
  params.mode = mode;
  sp.ranked = rank_candidates(sp.survivors, sp.info, s, kb, *m.contextual,
                              *m.contextual, params);
  return sp;
}

std::map<std::string, RemovedBy> removal_map(
    const std::vector<FilterTrace>& traces) {
  std::map<std::string, RemovedBy> out;
  for (const auto& t : traces) out[t.candidate.surface] = t.removed_by;
  return out;
}

std::vector<std::string> surfaces_of(const std::vector<RankedCandidate>& rcs) {
  std::vector<std::string> out;
  for (const auto& rc : rcs) out.push_back(rc.candidate.surface);
  return out;
}

std::vector<std::string> phrases_of(
    const std::vector<DistractorCandidate>& dcs) {
  std::vector<std::string> out;
  for (const auto& dc : dcs) out.push_back(dc.phrase);
  return out;
}

const InstanceCandidate& find_candidate(
    const std::vector<InstanceCandidate>& candidates,
    const std::string& surface) {
  auto it = std::find_if(
      candidates.begin(), candidates.end(),
      [&](const InstanceCandidate& c) { return c.surface == surface; });
  REQUIRE(it != candidates.end());
  return *it;
}

// The answer key "abnormal white blood cells" as the analysis stage emits it.
AnswerKey scenario_key(MockBackendSet& m, const Sentence& s0) {
  auto keys = identify_answer_keys(s0, *m.tagger);
  auto it = std::find_if(keys.begin(), keys.end(), [](const AnswerKey& k) {
    return k.surface == "abnormal white blood cells";
  });
  REQUIRE(it != keys.end());
  return segment_answer_key(s0, *it, toy_kb());
}

RankedCandidate make_ranked(std::string surface, double r_score) {
  RankedCandidate rc;
  rc.candidate.surface = std::move(surface);
  rc.r_score = r_score;
  return rc;
}

InstanceCandidate make_sibling(std::string surface) {
  InstanceCandidate c;
  c.surface = std::move(surface);
  c.origin = CandidateOrigin::Sibling;
  for (auto ref : toy_kb().synsets_of(c.surface)) c.synsets.insert(ref);
  return c;
}

DistractorCandidate make_phrase(std::string phrase) {
  DistractorCandidate dc;
  dc.phrase = std::move(phrase);
  return dc;
}

struct ThrowingNgram : NgramSource {
  BackendDescriptor desc{"ngram_source", "unavailable", "1"};
  bool exists(const std::string&) override {
    throw BackendError("ngram backend down", true);
  }
  const BackendDescriptor& descriptor() const override { return desc; }
};

const std::vector<std::string> kCombinedOrder = {
    "defective red blood cells",  "defective white blood cells",
    "defective genes",            "abnormal red blood cells",
    "normal red blood cells",     "atypical red blood cells",
    "normal white blood cells",   "abnormal genes",
    "atypical white blood cells", "normal genes",
    "irregular red blood cells",  "faulty red blood cells",
    "atypical genes",             "irregular white blood cells",
    "faulty white blood cells",   "irregular genes",
    "faulty genes",               "standard red blood cells",
    "standard white blood cells", "standard genes"};

const std::vector<std::string> kAttestedOrder = {
    "defective white blood cells", "defective genes",
    "abnormal red blood cells",    "normal white blood cells",
    "atypical white blood cells",  "normal genes",
    "faulty genes"};

}  // namespace

TEST_CASE("checkers remove candidates in fixed order with one reason each") {
  auto m = mocks();
  auto s0 = scenario_sentence(0);
  auto sp = run_slot(m, s0, wbc_instance());

  // traces partition the input, in input order
  REQUIRE(sp.traces.size() == sp.candidates.size());
  for (std::size_t i = 0; i < sp.traces.size(); ++i)
    CHECK(sp.traces[i].candidate.surface == sp.candidates[i].surface);

  auto removed = removal_map(sp.traces);
  CHECK(removed["rapidly"] == RemovedBy::Pos);
  CHECK(removed["americans"] == RemovedBy::Ner);
  CHECK(removed["proteins"] == RemovedBy::Lexical);
  CHECK(removed["leukocytes"] == RemovedBy::Synonym);
  CHECK(removed["enzymes"] == RemovedBy::Hierarchy);
  CHECK(removed["genes"] == RemovedBy::None);
  CHECK(removed["red blood cells"] == RemovedBy::None);
  // siblings with no in-context sense fail the strict label check
  for (const char* surface : {"rbcs", "erythrocytes", "platelets",
                              "blood platelets", "thrombocytes"})
    CHECK(removed[surface] == RemovedBy::Lexical);

  // every checker type fires at least once, and the survivors are exactly
  // the two attested replacements
  std::set<RemovedBy> fired;
  for (const auto& t : sp.traces) fired.insert(t.removed_by);
  for (RemovedBy r : {RemovedBy::Pos, RemovedBy::Ner, RemovedBy::Lexical,
                      RemovedBy::Synonym, RemovedBy::Hierarchy})
    CHECK(fired.count(r) == 1);

  std::vector<std::string> survivor_surfaces;
  for (const auto& c : sp.survivors) survivor_surfaces.push_back(c.surface);
  CHECK(survivor_surfaces ==
        std::vector<std::string>{"genes", "red blood cells"});

  // removal reasons carry a readable detail
  for (const auto& t : sp.traces)
    if (t.removed_by != RemovedBy::None) CHECK_FALSE(t.detail.empty());

  CHECK(to_string(RemovedBy::Pos) == "pos");
  CHECK(to_string(RemovedBy::Hierarchy) == "hierarchy");
  CHECK(to_string(RemovedBy::None) == "none");
}

TEST_CASE("relaxed label checking keeps same-family candidates") {
  auto m = mocks();
  auto s0 = scenario_sentence(0);
  auto sp = run_slot(m, s0, wbc_instance(), LexicalMode::Relaxed);

  std::vector<std::string> survivor_surfaces;
  for (const auto& c : sp.survivors) survivor_surfaces.push_back(c.surface);
  CHECK(survivor_surfaces ==
        std::vector<std::string>{"genes", "red blood cells", "rbcs",
                                 "erythrocytes", "platelets",
                                 "blood platelets", "thrombocytes"});

  auto removed = removal_map(sp.traces);
  CHECK(removed["proteins"] == RemovedBy::Lexical);   // label set disjoint
  CHECK(removed["leukocytes"] == RemovedBy::Synonym); // still a synonym
  CHECK(removed["enzymes"] == RemovedBy::Hierarchy);
}

TEST_CASE("sense checks pass through when the instance sense is unresolved") {
  auto m = mocks();
  auto s0 = scenario_sentence(0);
  const auto& kb = toy_kb();
  auto info = annotate_instance(s0, wbc_instance(), kb, *m.wsd, *m.tagger);
  auto gathered = gather_candidates(info, s0, kb, *m.predictor, 10);
  std::vector<InstanceCandidate> cands;
  for (auto& c : gathered)
    cands.push_back(annotate_candidate(s0, wbc_instance(), std::move(c), kb,
                                       *m.wsd, *m.tagger));

  info.synset.reset();
  info.lexical_label.reset();
  info.inherited_hypernyms.clear();
  info.hyponym_set.clear();

  auto [survivors, traces] = feature_filter(cands, info, LexicalMode::Strict);
  auto removed = removal_map(traces);
  CHECK(removed["rapidly"] == RemovedBy::Pos);
  CHECK(removed["americans"] == RemovedBy::Ner);
  // nothing else can be tested, so everything else survives
  CHECK(survivors.size() == cands.size() - 2);
  for (const auto& t : traces)
    if (t.removed_by == RemovedBy::None &&
        t.candidate.pos_tag == info.pos_tag)
      CHECK(t.detail.find("unresolved") != std::string::npos);
}

TEST_CASE("contextual similarity compares the candidate in place") {
  auto m = mocks();
  auto s0 = scenario_sentence(0);
  Instance wbc = wbc_instance();

  InstanceCandidate same;
  same.surface = "white blood cells";
  CHECK(embedding_similarity(s0, wbc, same, *m.contextual) ==
        doctest::Approx(1.0).epsilon(1e-12));

  InstanceCandidate genes;
  genes.surface = "genes";
  CHECK(embedding_similarity(s0, wbc, genes, *m.contextual) ==
        doctest::Approx(0.8).epsilon(1e-6));

  InstanceCandidate orthogonal;
  orthogonal.surface = "abnormal";
  CHECK(std::abs(embedding_similarity(s0, wbc, orthogonal, *m.contextual)) <
        1e-12);
}

TEST_CASE("definition-similarity reward") {
  auto m = mocks();
  auto s0 = scenario_sentence(0);
  const auto& kb = toy_kb();
  auto sp = run_slot(m, s0, wbc_instance());

  SUBCASE("same synset means maximal reward at any sharpness") {
    const auto& leukocytes = find_candidate(sp.candidates, "leukocytes");
    CHECK(synset_reward(sp.info, leukocytes, kb, *m.contextual, 5.0) ==
          doctest::Approx(2.0).epsilon(1e-9));
    CHECK(synset_reward(sp.info, leukocytes, kb, *m.contextual, 33.0) ==
          doctest::Approx(2.0).epsilon(1e-9));
  }

  SUBCASE("close definitions earn a measurable reward") {
    const auto& rbc = find_candidate(sp.candidates, "red blood cells");
    CHECK(synset_reward(sp.info, rbc, kb, *m.contextual, 20.5) ==
          doctest::Approx(1.0 + std::pow(0.9, 20.5)).epsilon(1e-5));
    const auto& genes = find_candidate(sp.candidates, "genes");
    CHECK(synset_reward(sp.info, genes, kb, *m.contextual, 20.5) ==
          doctest::Approx(1.0 + std::pow(0.6, 20.5)).epsilon(1e-5));
  }

  SUBCASE("no same-label sense means no reward") {
    const auto& rapidly = find_candidate(sp.candidates, "rapidly");
    CHECK(synset_reward(sp.info, rapidly, kb, *m.contextual, 20.5) == 1.0);
  }

  SUBCASE("unresolved instance sense means no reward") {
    InstanceInfo blank = sp.info;
    blank.synset.reset();
    blank.lexical_label.reset();
    const auto& genes = find_candidate(sp.candidates, "genes");
    CHECK(synset_reward(blank, genes, kb, *m.contextual, 20.5) == 1.0);
  }

  SUBCASE("sharpness must be positive") {
    const auto& genes = find_candidate(sp.candidates, "genes");
    CHECK_THROWS_AS(synset_reward(sp.info, genes, kb, *m.contextual, 0.0),
                    ArgumentError);
    CHECK_THROWS_AS(synset_reward_value(0.5, -1.0), ArgumentError);
  }

  SUBCASE("bare formula clamps similarity into the unit interval") {
    CHECK(synset_reward_value(1.0, 7.0) == 2.0);
    CHECK(synset_reward_value(1.5, 7.0) == 2.0);
    CHECK(synset_reward_value(-0.5, 7.0) == 1.0);
    CHECK(synset_reward_value(0.0, 7.0) == 1.0);
    CHECK(synset_reward_value(0.9, 20.5) ==
          doctest::Approx(1.1153).epsilon(2e-4));
    CHECK(synset_reward_value(1.0, 20.5) == 2.0);
  }

  SUBCASE("opposed definitions clamp to no reward") {
    // an embedder whose two gloss vectors point in opposite directions
    auto opposed = MockBackendSet::from_json_text(R"JSON({
      "dimension": 4,
      "contextual_embeddings": {"by_phrase": {
        "the fluid that is pumped through the body by the heart": [1.0, 0.0, 0.0, 0.0],
        "an amber watery fluid rich in proteins": [-1.0, 0.0, 0.0, 0.0]
      }}
    })JSON",
                                                  "opposed", kb);
    InstanceInfo blood_info;
    blood_info.instance = Instance{"blood", {6, 7}, true};
    blood_info.pos_tag = "NOUN";
    blood_info.synset = synset_with_label(kb, "blood", "noun.body");
    blood_info.lexical_label = "noun.body";
    auto serum = make_sibling("serum");
    CHECK(synset_reward(blood_info, serum, kb, *opposed.contextual, 20.5) ==
          1.0);
  }
}

TEST_CASE("prediction-rank reward") {
  CHECK(prediction_reward_value(1, 1.1) == doctest::Approx(2.1).epsilon(1e-12));
  CHECK(prediction_reward_value(10, 1.1) ==
        doctest::Approx(1.11).epsilon(1e-12));
  CHECK(prediction_reward_value(3, 1.1) ==
        doctest::Approx(1.0 + 1.1 / 3.0).epsilon(1e-12));
  CHECK(prediction_reward_value(std::nullopt, 1.1) == 1.0);
  CHECK(prediction_reward_value(4, 0.0) == 1.0);
  CHECK_THROWS_AS(prediction_reward_value(0, 1.1), ArgumentError);
  CHECK_THROWS_AS(prediction_reward_value(2, -0.1), ArgumentError);

  InstanceCandidate sibling = make_sibling("serum");
  CHECK(prediction_reward(sibling, 1.1) == 1.0);

  InstanceCandidate both;
  both.surface = "red blood cells";
  both.origin = CandidateOrigin::Both;
  both.position = 10;
  CHECK(prediction_reward(both, 1.1) == doctest::Approx(1.11).epsilon(1e-12));

  InstanceCandidate broken;
  broken.surface = "x";
  broken.origin = CandidateOrigin::Predicted;
  CHECK_THROWS_AS(prediction_reward(broken, 1.1), ArgumentError);
}

TEST_CASE("label penalty applies only to mismatches") {
  auto m = mocks();
  auto s0 = scenario_sentence(0);
  auto sp = run_slot(m, s0, wbc_instance());

  const auto& genes = find_candidate(sp.candidates, "genes");
  CHECK(lexical_penalty(sp.info, genes, 0.5) == 1.0);

  const auto& proteins = find_candidate(sp.candidates, "proteins");
  CHECK(lexical_penalty(sp.info, proteins, 0.5) == 0.5);

  const auto& rbcs = find_candidate(sp.candidates, "rbcs");  // no sense
  CHECK(lexical_penalty(sp.info, rbcs, 0.5) == 0.5);

  InstanceInfo blank = sp.info;
  blank.lexical_label.reset();
  CHECK(lexical_penalty(blank, proteins, 0.5) == 1.0);

  // strict mode never applies the penalty; relaxed mode records it
  for (const auto& rc : sp.ranked) CHECK(rc.l_score == 1.0);
  auto relaxed = run_slot(m, s0, wbc_instance(), LexicalMode::Relaxed);
  for (const auto& rc : relaxed.ranked) {
    bool penalized = rc.l_score == 0.5;
    bool clean = rc.l_score == 1.0;
    CHECK((penalized || clean));
  }
}

TEST_CASE("candidates rank by the product of the four scores") {
  auto m = mocks();
  auto s0 = scenario_sentence(0);
  auto sp = run_slot(m, s0, wbc_instance());

  REQUIRE(sp.ranked.size() == 2);
  CHECK(surfaces_of(sp.ranked) ==
        std::vector<std::string>{"red blood cells", "genes"});

  const auto& rbc = sp.ranked[0];
  CHECK(rbc.e_score == doctest::Approx(0.95).epsilon(1e-6));
  CHECK(rbc.p_score == doctest::Approx(1.11).epsilon(1e-12));
  CHECK(rbc.r_score == doctest::Approx(1.1761).epsilon(1e-3));

  const auto& genes = sp.ranked[1];
  CHECK(genes.e_score == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(genes.p_score == doctest::Approx(1.0 + 1.1 / 9.0).epsilon(1e-12));
  CHECK(genes.r_score == doctest::Approx(0.8978).epsilon(1e-3));

  for (const auto& rc : sp.ranked)
    CHECK(rc.r_score ==
          doctest::Approx(rc.e_score * rc.w_score * rc.p_score * rc.l_score)
              .epsilon(1e-12));
}

TEST_CASE("adjective slot ranking matches hand scores") {
  auto m = mocks();
  auto s0 = scenario_sentence(0);
  auto sp = run_slot(m, s0, abnormal_instance());

  auto removed = removal_map(sp.traces);
  CHECK(removed["red"] == RemovedBy::Hierarchy);

  REQUIRE(sp.ranked.size() == 6);
  CHECK(surfaces_of(sp.ranked) ==
        std::vector<std::string>{"defective", "normal", "atypical",
                                 "irregular", "faulty", "standard"});
  const std::vector<double> expected = {1.9095, 0.9300, 0.8523,
                                        0.7019, 0.6567, 0.3000};
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(sp.ranked[i].r_score ==
          doctest::Approx(expected[i]).epsilon(1e-3));
}

TEST_CASE("ties fall back to similarity and then to the surface") {
  const auto& kb = toy_kb();
  auto tie = MockBackendSet::from_json_text(R"JSON({
    "dimension": 4,
    "contextual_embeddings": {"by_phrase": {
      "blood": [0.5, 0.5, 0.5, 0.5],
      "serum": [1.0, 0.0, 0.0, 0.0],
      "plasma": [0.5, 0.5, 0.5, 0.5],
      "albumin": [0.5, 0.5, 0.5, 0.5],
      "globulin": [0.5, 0.5, 0.5, 0.5],
      "the fluid that is pumped through the body by the heart": [0.5, 0.5, 0.5, 0.5],
      "an amber watery fluid rich in proteins": [0.5, 0.5, 0.5, 0.5]
    }}
  })JSON",
                                            "tie", kb);

  auto s1 = scenario_sentence(1);
  REQUIRE(s1.tokens[6] == "blood");
  InstanceInfo info;
  info.instance = Instance{"blood", {6, 7}, true};
  info.pos_tag = "NOUN";
  info.synset = synset_with_label(kb, "blood", "noun.body");
  info.lexical_label = "noun.body";

  // serum: half the similarity, twice the reward -> same product exactly
  std::vector<InstanceCandidate> candidates = {
      make_sibling("serum"), make_sibling("plasma"), make_sibling("albumin"),
      make_sibling("globulin")};
  auto ranked = rank_candidates(candidates, info, s1, kb, *tie.contextual,
                                *tie.contextual, RankParams{});

  REQUIRE(ranked.size() == 4);
  for (const auto& rc : ranked) CHECK(rc.r_score == 1.0);
  CHECK(surfaces_of(ranked) == std::vector<std::string>{"albumin", "globulin",
                                                        "plasma", "serum"});
  CHECK(ranked[3].e_score == 0.5);
  CHECK(ranked[3].w_score == 2.0);
}

TEST_CASE("candidates echoing the rest of the sentence are dropped") {
  auto s0 = scenario_sentence(0);
  Instance wbc = wbc_instance();

  std::vector<InstanceCandidate> candidates;
  for (const char* surface :
       {"leukemia", "Leukemia", "first scientist", "genes",
        "white blood cells", "produces abnormal"}) {
    InstanceCandidate c;
    c.surface = surface;
    candidates.push_back(std::move(c));
  }
  auto kept = remove_stem_echoes(candidates, s0, wbc);
  std::vector<std::string> surfaces;
  for (const auto& c : kept) surfaces.push_back(c.surface);
  // the instance's own span does not count as an echo
  CHECK(surfaces == std::vector<std::string>{"genes", "white blood cells"});
}

TEST_CASE("combinations multiply out without the identity") {
  AnswerKey key;
  key.span = {0, 2};
  key.surface = "alpha beta";
  key.instances = {Instance{"alpha", {0, 1}, true},
                   Instance{"beta", {1, 2}, true}};

  SUBCASE("a two-slot key with one candidate each yields three phrases") {
    auto combos = combine_candidates(
        key, {{make_ranked("gamma", 0.9)}, {make_ranked("delta", 0.8)}}, 500);
    REQUIRE(combos.size() == 3);
    CHECK(phrases_of(combos) ==
          std::vector<std::string>{"gamma beta", "alpha delta", "gamma delta"});
    CHECK(combos[0].rank_product == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(combos[1].rank_product == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(combos[2].rank_product == doctest::Approx(0.72).epsilon(1e-12));
    CHECK(combos[0].substitutions ==
          std::vector<std::optional<std::string>>{"gamma", std::nullopt});
    CHECK(combos[1].substitutions ==
          std::vector<std::optional<std::string>>{std::nullopt, "delta"});
    CHECK(combos[2].substitutions ==
          std::vector<std::optional<std::string>>{"gamma", "delta"});
    for (const auto& dc : combos) CHECK(dc.phrase != key.surface);
  }

  SUBCASE("the phrase count follows the closed form") {
    auto combos = combine_candidates(
        key,
        {{make_ranked("c1", 0.9), make_ranked("c2", 0.8),
          make_ranked("c3", 0.7)},
         {make_ranked("d1", 0.6), make_ranked("d2", 0.5)}},
        500);
    CHECK(combos.size() == 4 * 3 - 1);

    AnswerKey three;
    three.span = {0, 3};
    three.surface = "a b c";
    three.instances = {Instance{"a", {0, 1}, true}, Instance{"b", {1, 2}, true},
                       Instance{"c", {2, 3}, true}};
    auto combos3 = combine_candidates(
        three,
        {{make_ranked("x1", 0.9), make_ranked("x2", 0.8)},
         {make_ranked("y1", 0.7)},
         {make_ranked("z1", 0.6), make_ranked("z2", 0.5),
          make_ranked("z3", 0.4)}},
        10000);
    CHECK(combos3.size() == 3 * 2 * 4 - 1);
  }

  SUBCASE("an empty slot still combines through the identity") {
    auto combos =
        combine_candidates(key, {{make_ranked("gamma", 0.9)}, {}}, 500);
    REQUIRE(combos.size() == 1);
    CHECK(combos[0].phrase == "gamma beta");
  }

  SUBCASE("equal products order by phrase") {
    AnswerKey single;
    single.span = {0, 1};
    single.surface = "alpha";
    single.instances = {Instance{"alpha", {0, 1}, true}};
    auto combos = combine_candidates(
        single, {{make_ranked("zeta", 0.5), make_ranked("eta", 0.5)}}, 500);
    CHECK(phrases_of(combos) == std::vector<std::string>{"eta", "zeta"});
  }

  SUBCASE("the cap keeps the best phrases") {
    auto combos = combine_candidates(
        key, {{make_ranked("gamma", 0.9)}, {make_ranked("delta", 0.8)}}, 2);
    CHECK(phrases_of(combos) ==
          std::vector<std::string>{"gamma beta", "alpha delta"});
  }

  SUBCASE("argument errors") {
    CHECK_THROWS_AS(combine_candidates(key, {{}}, 500), ArgumentError);
    CHECK_THROWS_AS(combine_candidates(key, {{}, {}}, 0), ArgumentError);
  }
}

TEST_CASE("the full key scenario yields twenty ordered phrases") {
  auto m = mocks();
  auto s0 = scenario_sentence(0);
  AnswerKey key = scenario_key(m, s0);
  REQUIRE(key.span == Span{10, 14});
  REQUIRE(key.instances.size() == 2);
  CHECK(key.instances[0].surface == "abnormal");
  CHECK(key.instances[1].surface == "white blood cells");

  auto slot_adj = run_slot(m, s0, key.instances[0]);
  auto slot_noun = run_slot(m, s0, key.instances[1]);
  auto combos =
      combine_candidates(key, {slot_adj.ranked, slot_noun.ranked}, 500);

  REQUIRE(combos.size() == 7 * 3 - 1);
  CHECK(phrases_of(combos) == kCombinedOrder);
  CHECK(combos[0].rank_product == doctest::Approx(2.2458).epsilon(1e-3));
}

TEST_CASE("attested phrases survive the corpus check") {
  auto m = mocks();
  auto s0 = scenario_sentence(0);
  AnswerKey key = scenario_key(m, s0);
  auto slot_adj = run_slot(m, s0, key.instances[0]);
  auto slot_noun = run_slot(m, s0, key.instances[1]);
  auto combos =
      combine_candidates(key, {slot_adj.ranked, slot_noun.ranked}, 500);

  auto kept = ngram_filter(combos, *m.ngrams, toy_kb());
  CHECK(phrases_of(kept) == kAttestedOrder);
  for (const auto& dc : kept) CHECK(dc.ngram_verified);
  // the top-ranked phrase was never attested, so it is gone
  for (const auto& dc : kept) CHECK(dc.phrase != "defective red blood cells");
}

TEST_CASE("single dictionary words bypass the corpus check") {
  const auto& kb = toy_kb();
  auto m = mocks();
  std::vector<DistractorCandidate> phrases = {
      make_phrase("cancer"), make_phrase("glorbix"), make_phrase("leukaemia")};
  auto kept = ngram_filter(phrases, *m.ngrams, kb);
  CHECK(phrases_of(kept) == std::vector<std::string>{"cancer", "leukaemia"});
  for (const auto& dc : kept) CHECK(dc.ngram_verified);

  ThrowingNgram down;
  // dictionary bypass happens before the backend is consulted
  auto bypass = ngram_filter({make_phrase("cancer")}, down, kb);
  REQUIRE(bypass.size() == 1);
  CHECK(bypass[0].ngram_verified);
}

TEST_CASE("a failing corpus backend either fails or keeps unverified") {
  const auto& kb = toy_kb();
  ThrowingNgram down;
  std::vector<DistractorCandidate> phrases = {make_phrase("defective genes")};

  CHECK_THROWS_AS(
      ngram_filter(phrases, down, kb, NgramErrorPolicy::Fail), BackendError);

  std::vector<std::string> warnings;
  auto kept = ngram_filter(phrases, down, kb, NgramErrorPolicy::KeepWithWarning,
                           &warnings);
  REQUIRE(kept.size() == 1);
  CHECK_FALSE(kept[0].ngram_verified);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("defective genes") != std::string::npos);
}

TEST_CASE("stems render with a single padded blank") {
  auto s0 = scenario_sentence(0);
  std::string stem = render_stem_with_blank(s0, {10, 14});
  CHECK(stem ==
        "Virchow was the first scientist to discover that leukemia produces "
        "**blank** .");
  CHECK(stem.find(kBlankMarker) == stem.rfind(kBlankMarker));

  auto s1 = scenario_sentence(1);
  CHECK(render_stem_with_blank(s1, {0, 1}) ==
        "**blank** is a cancer of the blood.");
  CHECK(render_stem_with_blank(s1, {0, s1.tokens.size()}) == "**blank**");

  std::string padded = " " + std::string(kBlankMarker) + " ";
  CHECK(padded.size() == 11);

  CHECK_THROWS_AS(render_stem_with_blank(s1, {3, 3}), ArgumentError);
  CHECK_THROWS_AS(render_stem_with_blank(s1, {3, s1.tokens.size() + 1}),
                  ArgumentError);
}

TEST_CASE("distractor selection ranks by similarity to the key") {
  auto m = mocks();
  auto s0 = scenario_sentence(0);
  AnswerKey key = scenario_key(m, s0);
  auto slot_adj = run_slot(m, s0, key.instances[0]);
  auto slot_noun = run_slot(m, s0, key.instances[1]);
  auto combos =
      combine_candidates(key, {slot_adj.ranked, slot_noun.ranked}, 500);
  auto kept = ngram_filter(combos, *m.ngrams, toy_kb());

  auto question = select_distractors(s0, key, kept, *m.contextual, 3);
  CHECK(question.distractors ==
        std::vector<std::string>{"abnormal red blood cells", "defective genes",
                                 "atypical white blood cells"});
  CHECK_FALSE(question.shortfall);
  CHECK(question.stem_with_blank ==
        "Virchow was the first scientist to discover that leukemia produces "
        "**blank** .");
  CHECK(question.answer_key.surface == "abnormal white blood cells");

  REQUIRE(question.scored.size() == 7);
  const std::vector<double> expected_css = {0.97, 0.93, 0.90, 0.85,
                                            0.60, 0.55, 0.50};
  for (std::size_t i = 0; i < expected_css.size(); ++i)
    CHECK(question.scored[i].key_similarity ==
          doctest::Approx(expected_css[i]).epsilon(1e-4));

  // asking for more than exists flags the shortfall
  auto short_q = select_distractors(s0, key, kept, *m.contextual, 10);
  CHECK(short_q.distractors.size() == 7);
  CHECK(short_q.shortfall);
}

TEST_CASE("selection drops duplicates and the key itself") {
  auto m = mocks();
  auto s1 = scenario_sentence(1);
  AnswerKey key;
  key.stem_sentence_id = s1.id;
  key.span = {3, 4};
  key.surface = "cancer";
  key.kind = KeyKind::SingleNoun;
  key.instances = {Instance{"cancer", {3, 4}, true}};

  std::vector<DistractorCandidate> candidates = {
      make_phrase("Leukaemia"), make_phrase("leukaemia"),
      make_phrase("Cancer"), make_phrase("malignancy")};
  auto question = select_distractors(s1, key, candidates, *m.contextual, 3);
  CHECK(question.distractors ==
        std::vector<std::string>{"Leukaemia", "malignancy"});
  CHECK(question.shortfall);
  CHECK(question.scored.size() == 4);

  auto empty_q = select_distractors(s1, key, {}, *m.contextual, 3);
  CHECK(empty_q.distractors.empty());
  CHECK(empty_q.shortfall);
  CHECK(empty_q.stem_with_blank == "Leukemia is a **blank** of the blood.");

  CHECK_THROWS_AS(select_distractors(s1, key, {}, *m.contextual, 0),
                  ArgumentError);
}

TEST_CASE("ranking order survives uniform scaling of similarities") {
  auto m = mocks();
  auto s0 = scenario_sentence(0);
  auto sp = run_slot(m, s0, abnormal_instance());
  auto expected = surfaces_of(sp.ranked);

  std::mt19937 rng(2024);
  for (double scale : {1e-3, 0.25, 7.3, 1e6}) {
    struct Row {
      double r, e;
      std::string surface;
    };
    std::vector<Row> rows;
    for (const auto& rc : sp.ranked)
      rows.push_back({scale * rc.e_score * rc.w_score * rc.p_score *
                          rc.l_score,
                      scale * rc.e_score, rc.candidate.surface});
    std::shuffle(rows.begin(), rows.end(), rng);
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      if (a.r != b.r) return a.r > b.r;
      if (a.e != b.e) return a.e > b.e;
      return a.surface < b.surface;
    });
    std::vector<std::string> order;
    for (const auto& row : rows) order.push_back(row.surface);
    CHECK(order == expected);
  }
}

TEST_CASE("score bounds hold across the scenario") {
  auto m = mocks();
  auto s0 = scenario_sentence(0);
  for (const Instance& inst : {abnormal_instance(), wbc_instance()}) {
    auto sp = run_slot(m, s0, inst);
    for (const auto& rc : sp.ranked) {
      CHECK(rc.w_score >= 1.0);
      CHECK(rc.w_score <= 2.0);
      CHECK(rc.p_score >= 1.0);
      CHECK(rc.p_score <= 1.0 + 1.1);
      CHECK(rc.l_score == 1.0);
      CHECK(rc.r_score ==
            doctest::Approx(rc.e_score * rc.w_score * rc.p_score * rc.l_score)
                .epsilon(1e-12));
    }
  }

  std::mt19937 rng(42);
  std::uniform_real_distribution<double> sd_dist(-0.2, 1.2);
  std::uniform_real_distribution<double> alpha_dist(0.1, 40.0);
  std::uniform_real_distribution<double> beta_dist(0.0, 3.0);
  std::uniform_int_distribution<int> pos_dist(1, 50);
  for (int i = 0; i < 1000; ++i) {
    double sd = sd_dist(rng);
    double alpha = alpha_dist(rng);
    double w = synset_reward_value(sd, alpha);
    CHECK(w >= 1.0);
    CHECK(w <= 2.0);
    double beta = beta_dist(rng);
    double p = prediction_reward_value(pos_dist(rng), beta);
    CHECK(p >= 1.0);
    CHECK(p <= 1.0 + beta);
  }
  // monotone in similarity and in rank
  CHECK(synset_reward_value(0.4, 5.0) <= synset_reward_value(0.6, 5.0));
  CHECK(prediction_reward_value(2, 1.1) >= prediction_reward_value(3, 1.1));
}

TEST_CASE("the pipeline is identical across repeated runs") {
  auto render = [] {
    auto m = mocks();
    auto s0 = scenario_sentence(0);
    AnswerKey key = scenario_key(m, s0);
    auto slot_adj = run_slot(m, s0, key.instances[0]);
    auto slot_noun = run_slot(m, s0, key.instances[1]);
    auto combos =
        combine_candidates(key, {slot_adj.ranked, slot_noun.ranked}, 500);
    auto kept = ngram_filter(combos, *m.ngrams, toy_kb());
    auto question = select_distractors(s0, key, kept, *m.contextual, 3);

    std::ostringstream out;
    out << std::setprecision(17);
    out << question.stem_with_blank << "\n";
    for (const auto& d : question.distractors) out << d << "\n";
    for (const auto& dc : question.scored)
      out << dc.phrase << " " << dc.key_similarity << " " << dc.rank_product
          << "\n";
    for (const auto& sp : {slot_adj, slot_noun}) {
      for (const auto& t : sp.traces)
        out << t.candidate.surface << " " << to_string(t.removed_by) << "\n";
      for (const auto& rc : sp.ranked)
        out << rc.candidate.surface << " " << rc.r_score << " " << rc.e_score
            << " " << rc.w_score << " " << rc.p_score << "\n";
    }
    return out.str();
  };

  std::string first = render();
  for (int i = 0; i < 2; ++i) CHECK(render() == first);
}
