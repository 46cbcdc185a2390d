#pragma once

#include <chrono>
#include <filesystem>
#include <set>
#include <string>

#include "clozegen/backends.hpp"

namespace clozegen {

// Offline corpus lookup over a newline-delimited "phrase<TAB>count" file.
class LocalNgramTable : public NgramSource {
 public:
  static LocalNgramTable load(const std::filesystem::path& path);

  bool exists(const std::string& phrase) override;
  const BackendDescriptor& descriptor() const override { return desc_; }
  std::size_t size() const { return phrases_.size(); }

 private:
  BackendDescriptor desc_{"ngram_source", "local-table", "1"};
  std::set<std::string> phrases_;  // normalized, count > 0 only
};

// Attests every phrase; the documented test/fallback mode.
class PermissiveNgramSource : public NgramSource {
 public:
  bool exists(const std::string&) override { return true; }
  const BackendDescriptor& descriptor() const override { return desc_; }

 private:
  BackendDescriptor desc_{"ngram_source", "permissive", "1"};
};

// Web-service adapter: GET {base_url}/exists?q=<phrase>, expecting body "1"
// (attested) or "0". Transient failures (timeouts, 5xx) are retried with
// exponential backoff; exhaustion raises a retryable BackendError, malformed
// responses a non-retryable one.
class RemoteNgramClient : public NgramSource {
 public:
  RemoteNgramClient(std::string host, int port, int max_attempts = 3,
                    std::chrono::milliseconds initial_backoff =
                        std::chrono::milliseconds(50));

  bool exists(const std::string& phrase) override;
  const BackendDescriptor& descriptor() const override { return desc_; }

 private:
  BackendDescriptor desc_{"ngram_source", "remote", "1"};
  std::string host_;
  int port_;
  int max_attempts_;
  std::chrono::milliseconds initial_backoff_;
};

}  // namespace clozegen
