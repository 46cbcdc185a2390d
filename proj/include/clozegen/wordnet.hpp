#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clozegen/errors.hpp"

namespace clozegen {

enum class Pos { Noun, Verb, Adj, Adv };

constexpr std::array<Pos, 4> kAllPos = {Pos::Noun, Pos::Verb, Pos::Adj,
                                        Pos::Adv};

std::string_view to_string(Pos pos);
std::optional<Pos> pos_from_string(std::string_view s);

// (pos, byte offset in the data file) uniquely identifies a synset.
struct SynsetRef {
  Pos pos = Pos::Noun;
  std::uint32_t offset = 0;

  auto operator<=>(const SynsetRef&) const = default;
};

struct SynsetInfo {
  SynsetRef ref;
  std::vector<std::string> lemmas;  // multiword lemmas space-separated
  std::string gloss;
  std::string lexical_label;  // one of the 45 lexicographer-file names
};

using LexicalLabelSet = std::set<std::string>;

// In-memory view of a WordNet 3.0 flat-file database. Immutable after load;
// safe for concurrent readers.
class KnowledgeBase {
 public:
  // Parses index.{noun,verb,adj,adv}, data.*, lexnames and the optional
  // *.exc exception lists from `database_directory`. Throws LoadError
  // naming the offending file, or VersionError if a file header declares a
  // version other than 3.0.
  static KnowledgeBase load(const std::filesystem::path& database_directory);

  // True iff the phrase (normalized; inflected forms resolved through the
  // standard detachment rules and exception lists) is an entry in any index
  // file, or in the given part of speech's index.
  bool is_entry(std::string_view phrase, std::optional<Pos> pos = {}) const;

  // All synsets containing the phrase as a lemma, in index-file order.
  std::vector<SynsetRef> synsets_of(std::string_view phrase,
                                    std::optional<Pos> pos = {}) const;

  // Union of lexical labels over synsets_of(phrase). Empty for non-entries.
  LexicalLabelSet lexical_labels_of(std::string_view phrase) const;

  const SynsetInfo& synset_info(SynsetRef ref) const;
  const std::string& gloss_of(SynsetRef ref) const;

  // All ancestors via hypernym and instance-hypernym links, breadth-first,
  // deduplicated, excluding `ref` itself.
  std::vector<SynsetRef> hypernym_closure(SynsetRef ref) const;

  // All descendants via hyponym links up to max_depth (unbounded if absent),
  // excluding `ref`.
  std::set<SynsetRef> hyponym_closure(SynsetRef ref,
                                      std::optional<int> max_depth = {}) const;

  // Immediate parents via hypernym and instance-hypernym links.
  const std::vector<SynsetRef>& direct_hypernyms(SynsetRef ref) const;

  // For an adjective: every synset in the similar-to cluster around its head
  // adjective, plus the clusters of the head's direct antonyms, including
  // `ref` itself. Empty set for other parts of speech.
  std::set<SynsetRef> adjective_clusters(SynsetRef ref) const;

  // Lemmas of co-hyponym synsets (children of ref's hypernyms, excluding ref
  // itself), deduplicated, excluding ref's own lemmas. Adjectives, which have
  // no hypernym tree, take their siblings from the similar-to cluster around
  // the head adjective plus any antonym head's cluster.
  std::vector<std::string> sibling_entries(SynsetRef ref) const;

  // Base form after detachment rules and exception lists, if it is an entry.
  std::optional<std::string> base_form(std::string_view phrase, Pos pos) const;

  const std::vector<std::string>& lexicographer_names() const {
    return lexnames_;
  }

  // Entries of one index, in file order. Lemmas reported space-separated.
  std::vector<std::string> all_entries(Pos pos) const;

  std::size_t synset_count() const { return synsets_.size(); }

 private:
  struct SynsetData {
    SynsetInfo info;
    char ss_type = 'n';  // n/v/a/s/r as in the data file
    std::vector<SynsetRef> hypernyms;  // includes instance hypernyms
    std::vector<SynsetRef> hyponyms;   // includes instance hyponyms
    std::vector<SynsetRef> similar;    // adjective similar-to
    std::vector<SynsetRef> antonyms;   // adjective head antonyms
  };

  static std::size_t pos_index(Pos pos) { return static_cast<std::size_t>(pos); }

  const SynsetData& data_of(SynsetRef ref) const;
  std::optional<std::string> lookup_key(std::string_view phrase,
                                        std::optional<Pos> pos) const;
  std::optional<std::string> exact_key(std::string_view normalized,
                                       std::optional<Pos> pos) const;

  void load_lexnames(const std::filesystem::path& file);
  void load_index(const std::filesystem::path& file, Pos pos);
  void load_data(const std::filesystem::path& file, Pos pos);
  void load_exceptions(const std::filesystem::path& file, Pos pos);
  void check_header_version(const std::filesystem::path& file) const;
  void verify_index_targets(const std::filesystem::path& dir) const;

  std::vector<std::string> lexnames_;
  // lemma (underscore-joined, lowercase) -> synset offsets, per pos.
  std::array<std::map<std::string, std::vector<std::uint32_t>>, 4> index_;
  std::array<std::unordered_map<std::string, std::string>, 4> exceptions_;
  std::map<SynsetRef, SynsetData> synsets_;
};

}  // namespace clozegen
