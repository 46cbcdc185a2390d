#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "clozegen/backends.hpp"

namespace clozegen {

// Content-addressed store: one file per key hash under a directory, payload
// is the serialized backend result. Keys are hash(descriptor, operation,
// canonicalized input). Concurrent readers are safe; inserts write to a
// temporary file and rename into place atomically.
class BackendCache {
 public:
  explicit BackendCache(std::filesystem::path directory);

  std::optional<std::string> get(const std::string& key_material) const;
  void put(const std::string& key_material, const std::string& payload) const;

  // SHA-256 hex digest used as the on-disk file name.
  static std::string key_hash(const std::string& key_material);

  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

// Decorators that satisfy each backend interface by consulting the cache
// before the wrapped backend and persisting fresh results after it.
std::shared_ptr<MaskedPredictor> with_cache(std::shared_ptr<MaskedPredictor>,
                                            std::shared_ptr<BackendCache>);
std::shared_ptr<ContextualEmbedder> with_cache(
    std::shared_ptr<ContextualEmbedder>, std::shared_ptr<BackendCache>);
std::shared_ptr<StaticEmbedder> with_cache(std::shared_ptr<StaticEmbedder>,
                                           std::shared_ptr<BackendCache>);
std::shared_ptr<SenseDisambiguator> with_cache(
    std::shared_ptr<SenseDisambiguator>, std::shared_ptr<BackendCache>);

}  // namespace clozegen
