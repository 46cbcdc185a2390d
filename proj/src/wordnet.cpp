#include "clozegen/wordnet.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <sstream>

#include "clozegen/text.hpp"

namespace clozegen {

namespace {

constexpr std::array<std::string_view, 4> kIndexFiles = {
    "index.noun", "index.verb", "index.adj", "index.adv"};
constexpr std::array<std::string_view, 4> kDataFiles = {
    "data.noun", "data.verb", "data.adj", "data.adv"};
constexpr std::array<std::string_view, 4> kExcFiles = {"noun.exc", "verb.exc",
                                                       "adj.exc", "adv.exc"};

bool is_header_line(const std::string& line) {
  return line.size() >= 2 && line[0] == ' ' && line[1] == ' ';
}

std::string underscore_join(std::string_view normalized) {
  std::string out(normalized);
  std::replace(out.begin(), out.end(), ' ', '_');
  return out;
}

std::string space_join(std::string_view key) {
  std::string out(key);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

// Adjective lemmas may carry syntactic markers: "galore(ip)".
std::string strip_marker(std::string word) {
  auto p = word.find('(');
  if (p != std::string::npos && word.back() == ')') word.erase(p);
  return word;
}

Pos pos_from_ss_type(char c, const std::string& file, long line) {
  switch (c) {
    case 'n': return Pos::Noun;
    case 'v': return Pos::Verb;
    case 'a':
    case 's': return Pos::Adj;
    case 'r': return Pos::Adv;
    default:
      throw LoadError(file, "line " + std::to_string(line) +
                                ": unknown synset type '" + c + "'");
  }
}

struct DetachmentRule {
  std::string_view suffix;
  std::string_view replacement;
};

// The standard suffix-detachment rules, per part of speech.
const std::vector<DetachmentRule>& detachment_rules(Pos pos) {
  static const std::vector<DetachmentRule> noun = {
      {"ses", "s"}, {"xes", "x"},   {"zes", "z"}, {"ches", "ch"},
      {"shes", "sh"}, {"men", "man"}, {"ies", "y"}, {"s", ""}};
  static const std::vector<DetachmentRule> verb = {
      {"ies", "y"}, {"es", "e"}, {"es", ""},  {"ed", "e"},
      {"ed", ""},   {"ing", "e"}, {"ing", ""}, {"s", ""}};
  static const std::vector<DetachmentRule> adj = {
      {"er", ""}, {"est", ""}, {"er", "e"}, {"est", "e"}};
  static const std::vector<DetachmentRule> none = {};
  switch (pos) {
    case Pos::Noun: return noun;
    case Pos::Verb: return verb;
    case Pos::Adj: return adj;
    case Pos::Adv: return none;
  }
  return none;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string_view to_string(Pos pos) {
  switch (pos) {
    case Pos::Noun: return "noun";
    case Pos::Verb: return "verb";
    case Pos::Adj: return "adj";
    case Pos::Adv: return "adv";
  }
  return "noun";
}

std::optional<Pos> pos_from_string(std::string_view s) {
  if (s == "noun" || s == "n") return Pos::Noun;
  if (s == "verb" || s == "v") return Pos::Verb;
  if (s == "adj" || s == "a" || s == "adjective") return Pos::Adj;
  if (s == "adv" || s == "r" || s == "adverb") return Pos::Adv;
  return std::nullopt;
}

KnowledgeBase KnowledgeBase::load(
    const std::filesystem::path& database_directory) {
  KnowledgeBase kb;
  kb.load_lexnames(database_directory / "lexnames");
  for (Pos pos : kAllPos) {
    auto i = pos_index(pos);
    kb.check_header_version(database_directory / kDataFiles[i]);
    kb.load_data(database_directory / kDataFiles[i], pos);
    kb.check_header_version(database_directory / kIndexFiles[i]);
    kb.load_index(database_directory / kIndexFiles[i], pos);
    kb.load_exceptions(database_directory / kExcFiles[i], pos);
  }
  kb.verify_index_targets(database_directory);
  return kb;
}

void KnowledgeBase::load_lexnames(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw LoadError(file.filename().string(), "cannot open");
  std::string line;
  long lineno = 0;
  std::map<int, std::string> by_num;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    int num = -1;
    std::string name, category;
    if (!(ls >> num >> name >> category))
      throw LoadError(file.filename().string(),
                      "line " + std::to_string(lineno) + ": malformed entry");
    by_num[num] = name;
  }
  lexnames_.clear();
  for (auto& [num, name] : by_num) {
    if (num != static_cast<int>(lexnames_.size()))
      throw LoadError(file.filename().string(),
                      "non-contiguous lexicographer file numbers");
    lexnames_.push_back(name);
  }
  if (lexnames_.empty())
    throw LoadError(file.filename().string(), "no lexicographer names");
}

void KnowledgeBase::check_header_version(
    const std::filesystem::path& file) const {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw LoadError(file.filename().string(), "cannot open");
  std::string line;
  while (std::getline(in, line) && is_header_line(line)) {
    auto p = line.find("WordNet ");
    if (p == std::string::npos) continue;
    p += 8;
    std::string version;
    while (p < line.size() &&
           (std::isdigit(static_cast<unsigned char>(line[p])) ||
            line[p] == '.'))
      version += line[p++];
    if (!version.empty() && version != "3.0")
      throw VersionError(file.filename().string(), version);
    return;
  }
}

void KnowledgeBase::load_data(const std::filesystem::path& file, Pos pos) {
  const std::string name = file.filename().string();
  std::ifstream in(file, std::ios::binary);
  if (!in) throw LoadError(name, "cannot open");
  std::string line;
  long lineno = 0;
  std::uint64_t line_start = 0;
  while (true) {
    line_start = static_cast<std::uint64_t>(in.tellg());
    if (!std::getline(in, line)) break;
    ++lineno;
    if (is_header_line(line) || line.empty()) continue;

    auto fail = [&](const std::string& why) -> void {
      throw LoadError(name, "line " + std::to_string(lineno) + ": " + why);
    };

    std::istringstream ls(line);
    std::string offset_str, lexnum_str, ss_type_str, wcnt_str;
    if (!(ls >> offset_str >> lexnum_str >> ss_type_str >> wcnt_str))
      fail("truncated synset record");
    std::uint32_t offset = 0;
    int lexnum = 0, wcnt = 0;
    try {
      offset = static_cast<std::uint32_t>(std::stoul(offset_str));
      lexnum = std::stoi(lexnum_str);
      wcnt = std::stoi(wcnt_str, nullptr, 16);
    } catch (const std::exception&) {
      fail("bad numeric field");
    }
    if (offset != line_start)
      fail("synset offset " + offset_str + " does not match file position " +
           std::to_string(line_start));
    if (lexnum < 0 || lexnum >= static_cast<int>(lexnames_.size()))
      fail("lexicographer file number out of range");
    if (ss_type_str.size() != 1) fail("bad synset type");
    if (wcnt <= 0) fail("synset with no lemmas");

    SynsetData data;
    data.ss_type = ss_type_str[0];
    data.info.ref = SynsetRef{pos, offset};
    data.info.lexical_label = lexnames_[static_cast<std::size_t>(lexnum)];
    for (int w = 0; w < wcnt; ++w) {
      std::string word, lexid;
      if (!(ls >> word >> lexid)) fail("truncated lemma list");
      data.info.lemmas.push_back(
          space_join(text::to_lower(strip_marker(word))));
    }

    std::string pcnt_str;
    if (!(ls >> pcnt_str)) fail("missing pointer count");
    int pcnt = 0;
    try {
      pcnt = std::stoi(pcnt_str);
    } catch (const std::exception&) {
      fail("bad pointer count");
    }
    for (int p = 0; p < pcnt; ++p) {
      std::string sym, target_str, target_pos_str, source_target;
      if (!(ls >> sym >> target_str >> target_pos_str >> source_target))
        fail("truncated pointer list");
      std::uint32_t target = 0;
      try {
        target = static_cast<std::uint32_t>(std::stoul(target_str));
      } catch (const std::exception&) {
        fail("bad pointer offset");
      }
      Pos target_pos = pos_from_ss_type(target_pos_str[0], name, lineno);
      SynsetRef tref{target_pos, target};
      if (sym == "@" || sym == "@i")
        data.hypernyms.push_back(tref);
      else if (sym == "~" || sym == "~i")
        data.hyponyms.push_back(tref);
      else if (sym == "&")
        data.similar.push_back(tref);
      else if (sym == "!")
        data.antonyms.push_back(tref);
    }
    if (pos == Pos::Verb) {
      std::string fcnt_str;
      if (ls >> fcnt_str) {
        int fcnt = 0;
        try {
          fcnt = std::stoi(fcnt_str);
        } catch (const std::exception&) {
          fail("bad frame count");
        }
        std::string plus, fnum, wnum;
        for (int f = 0; f < fcnt; ++f)
          if (!(ls >> plus >> fnum >> wnum)) fail("truncated frame list");
      }
    }

    auto bar = line.find(" | ");
    if (bar == std::string::npos) fail("missing gloss");
    std::string gloss = line.substr(bar + 3);
    while (!gloss.empty() &&
           std::isspace(static_cast<unsigned char>(gloss.back())))
      gloss.pop_back();
    if (gloss.empty()) fail("empty gloss");
    data.info.gloss = std::move(gloss);

    synsets_.emplace(data.info.ref, std::move(data));
  }
}

void KnowledgeBase::load_index(const std::filesystem::path& file, Pos pos) {
  const std::string name = file.filename().string();
  std::ifstream in(file);
  if (!in) throw LoadError(name, "cannot open");
  std::string line;
  long lineno = 0;
  auto& index = index_[pos_index(pos)];
  while (std::getline(in, line)) {
    ++lineno;
    if (is_header_line(line) || line.empty()) continue;
    auto fail = [&](const std::string& why) -> void {
      throw LoadError(name, "line " + std::to_string(lineno) + ": " + why);
    };
    auto tokens = split_ws(line);
    if (tokens.size() < 6) fail("truncated index record");
    const std::string lemma = text::to_lower(tokens[0]);
    int synset_cnt = 0, p_cnt = 0;
    try {
      synset_cnt = std::stoi(tokens[2]);
      p_cnt = std::stoi(tokens[3]);
    } catch (const std::exception&) {
      fail("bad numeric field");
    }
    std::size_t at = 4 + static_cast<std::size_t>(p_cnt);  // skip ptr symbols
    at += 2;                                               // sense/tagsense
    if (at + static_cast<std::size_t>(synset_cnt) > tokens.size())
      fail("offset list shorter than synset count");
    std::vector<std::uint32_t> offsets;
    for (int s = 0; s < synset_cnt; ++s) {
      try {
        offsets.push_back(
            static_cast<std::uint32_t>(std::stoul(tokens[at + s])));
      } catch (const std::exception&) {
        fail("bad synset offset");
      }
    }
    index[lemma] = std::move(offsets);
  }
}

void KnowledgeBase::load_exceptions(const std::filesystem::path& file,
                                    Pos pos) {
  std::ifstream in(file);
  if (!in) return;  // exception lists are optional
  std::string line;
  auto& exc = exceptions_[pos_index(pos)];
  while (std::getline(in, line)) {
    if (is_header_line(line) || line.empty()) continue;
    auto tokens = split_ws(line);
    if (tokens.size() < 2) continue;
    exc[text::to_lower(tokens[0])] = text::to_lower(tokens[1]);
  }
}

void KnowledgeBase::verify_index_targets(
    const std::filesystem::path& dir) const {
  for (Pos pos : kAllPos) {
    for (const auto& [lemma, offsets] : index_[pos_index(pos)]) {
      for (auto off : offsets) {
        if (!synsets_.contains(SynsetRef{pos, off}))
          throw LoadError(
              std::string(kDataFiles[pos_index(pos)]),
              "index entry '" + lemma + "' references missing synset " +
                  std::to_string(off) + " (file truncated or corrupt)");
      }
    }
  }
  for (const auto& [ref, data] : synsets_) {
    auto check = [&](const std::vector<SynsetRef>& targets) {
      for (auto t : targets) {
        if (!synsets_.contains(t))
          throw LoadError(std::string(kDataFiles[pos_index(t.pos)]),
                          "synset " + std::to_string(ref.offset) +
                              " points at missing synset " +
                              std::to_string(t.offset));
      }
    };
    check(data.hypernyms);
    check(data.hyponyms);
    check(data.similar);
    check(data.antonyms);
  }
  (void)dir;
}

std::optional<std::string> KnowledgeBase::exact_key(
    std::string_view normalized, std::optional<Pos> pos) const {
  std::string key = underscore_join(normalized);
  if (pos) {
    if (index_[pos_index(*pos)].contains(key)) return key;
    return std::nullopt;
  }
  for (Pos p : kAllPos)
    if (index_[pos_index(p)].contains(key)) return key;
  return std::nullopt;
}

// Resolves a surface phrase to an index key: exact lookup, then the
// exception lists, then suffix detachment. Multiword phrases detach on the
// last word, and verb phrases also on the first.
std::optional<std::string> KnowledgeBase::lookup_key(
    std::string_view phrase, std::optional<Pos> pos) const {
  std::string norm = text::normalize(phrase);
  if (norm.empty()) return std::nullopt;
  if (auto k = exact_key(norm, pos)) return k;

  auto try_pos = [&](Pos p) -> std::optional<std::string> {
    const auto& exc = exceptions_[pos_index(p)];
    auto it = exc.find(underscore_join(norm));
    if (it != exc.end() && index_[pos_index(p)].contains(it->second))
      return it->second;

    std::vector<std::string> words;
    {
      std::istringstream in(norm);
      std::string w;
      while (in >> w) words.push_back(w);
    }
    auto morph_word = [&](const std::string& word) {
      std::vector<std::string> candidates;
      auto wit = exc.find(word);
      if (wit != exc.end()) candidates.push_back(wit->second);
      for (const auto& rule : detachment_rules(p)) {
        if (word.size() > rule.suffix.size() && word.ends_with(rule.suffix))
          candidates.push_back(
              word.substr(0, word.size() - rule.suffix.size()) +
              std::string(rule.replacement));
      }
      return candidates;
    };
    std::vector<std::size_t> slots = {words.size() - 1};
    if (p == Pos::Verb && words.size() > 1) slots.push_back(0);
    for (auto slot : slots) {
      for (const auto& candidate : morph_word(words[slot])) {
        std::vector<std::string> trial = words;
        trial[slot] = candidate;
        std::string key = underscore_join(text::join(trial));
        if (index_[pos_index(p)].contains(key)) return key;
      }
    }
    return std::nullopt;
  };

  if (pos) return try_pos(*pos);
  for (Pos p : kAllPos)
    if (auto k = try_pos(p)) return k;
  return std::nullopt;
}

bool KnowledgeBase::is_entry(std::string_view phrase,
                             std::optional<Pos> pos) const {
  return lookup_key(phrase, pos).has_value();
}

std::vector<SynsetRef> KnowledgeBase::synsets_of(std::string_view phrase,
                                                 std::optional<Pos> pos) const {
  std::vector<SynsetRef> out;
  std::string norm = text::normalize(phrase);
  if (norm.empty()) return out;
  for (Pos p : kAllPos) {
    if (pos && *pos != p) continue;
    auto key = lookup_key(norm, p);
    if (!key) continue;
    const auto& index = index_[pos_index(p)];
    auto it = index.find(*key);
    if (it == index.end()) continue;
    for (auto off : it->second) out.push_back(SynsetRef{p, off});
  }
  return out;
}

LexicalLabelSet KnowledgeBase::lexical_labels_of(
    std::string_view phrase) const {
  LexicalLabelSet labels;
  for (auto ref : synsets_of(phrase))
    labels.insert(data_of(ref).info.lexical_label);
  return labels;
}

const KnowledgeBase::SynsetData& KnowledgeBase::data_of(SynsetRef ref) const {
  auto it = synsets_.find(ref);
  if (it == synsets_.end())
    throw LookupError("unresolvable synset " + std::string(to_string(ref.pos)) +
                      ":" + std::to_string(ref.offset));
  return it->second;
}

const SynsetInfo& KnowledgeBase::synset_info(SynsetRef ref) const {
  return data_of(ref).info;
}

const std::string& KnowledgeBase::gloss_of(SynsetRef ref) const {
  return data_of(ref).info.gloss;
}

std::vector<SynsetRef> KnowledgeBase::hypernym_closure(SynsetRef ref) const {
  std::vector<SynsetRef> out;
  std::set<SynsetRef> seen = {ref};
  std::deque<SynsetRef> frontier = {ref};
  while (!frontier.empty()) {
    SynsetRef cur = frontier.front();
    frontier.pop_front();
    for (auto parent : data_of(cur).hypernyms) {
      if (seen.insert(parent).second) {
        out.push_back(parent);
        frontier.push_back(parent);
      }
    }
  }
  return out;
}

std::set<SynsetRef> KnowledgeBase::hyponym_closure(
    SynsetRef ref, std::optional<int> max_depth) const {
  std::set<SynsetRef> out;
  std::set<SynsetRef> seen = {ref};
  std::deque<std::pair<SynsetRef, int>> frontier = {{ref, 0}};
  while (!frontier.empty()) {
    auto [cur, depth] = frontier.front();
    frontier.pop_front();
    if (max_depth && depth >= *max_depth) continue;
    for (auto child : data_of(cur).hyponyms) {
      if (seen.insert(child).second) {
        out.insert(child);
        frontier.push_back({child, depth + 1});
      }
    }
  }
  return out;
}

const std::vector<SynsetRef>& KnowledgeBase::direct_hypernyms(
    SynsetRef ref) const {
  return data_of(ref).hypernyms;
}

std::set<SynsetRef> KnowledgeBase::adjective_clusters(SynsetRef ref) const {
  std::set<SynsetRef> out;
  if (ref.pos != Pos::Adj) return out;
  auto head_of = [&](SynsetRef r) {
    const SynsetData& d = data_of(r);
    if (d.ss_type != 's') return r;
    for (auto s : d.similar)
      if (data_of(s).ss_type == 'a') return s;
    return r;
  };
  auto add_cluster = [&](SynsetRef head) {
    out.insert(head);
    for (auto member : data_of(head).similar) out.insert(member);
  };
  SynsetRef head = head_of(ref);
  add_cluster(head);
  for (auto anto : data_of(head).antonyms) add_cluster(head_of(anto));
  return out;
}

std::vector<std::string> KnowledgeBase::sibling_entries(SynsetRef ref) const {
  const SynsetData& self = data_of(ref);
  std::set<std::string> own(self.info.lemmas.begin(), self.info.lemmas.end());
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto add_lemmas = [&](SynsetRef other) {
    if (other == ref) return;
    for (const auto& lemma : data_of(other).info.lemmas) {
      if (own.contains(lemma)) continue;
      if (seen.insert(lemma).second) out.push_back(lemma);
    }
  };

  if (ref.pos == Pos::Adj) {
    // Similar-to cluster around the head adjective, plus antonym clusters,
    // restricted to the same lexicographer file.
    auto head_of = [&](SynsetRef r) {
      const SynsetData& d = data_of(r);
      if (d.ss_type != 's') return r;
      for (auto s : d.similar)
        if (data_of(s).ss_type == 'a') return s;
      return r;
    };
    auto add_cluster = [&](SynsetRef head) {
      if (data_of(head).info.lexical_label == self.info.lexical_label)
        add_lemmas(head);
      for (auto member : data_of(head).similar)
        if (data_of(member).info.lexical_label == self.info.lexical_label)
          add_lemmas(member);
    };
    SynsetRef head = head_of(ref);
    add_cluster(head);
    for (auto anto : data_of(head).antonyms) add_cluster(head_of(anto));
    return out;
  }

  for (auto parent : self.hypernyms)
    for (auto child : data_of(parent).hyponyms) add_lemmas(child);
  return out;
}

std::optional<std::string> KnowledgeBase::base_form(std::string_view phrase,
                                                    Pos pos) const {
  auto key = lookup_key(phrase, pos);
  if (!key) return std::nullopt;
  return space_join(*key);
}

std::vector<std::string> KnowledgeBase::all_entries(Pos pos) const {
  std::vector<std::string> out;
  out.reserve(index_[pos_index(pos)].size());
  for (const auto& [lemma, offsets] : index_[pos_index(pos)])
    out.push_back(space_join(lemma));
  return out;
}

}  // namespace clozegen
