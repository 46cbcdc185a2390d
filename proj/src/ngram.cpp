#include "clozegen/ngram.hpp"

#include <fstream>
#include <thread>

#include <httplib.h>

namespace clozegen {

LocalNgramTable LocalNgramTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.filename().string(), "cannot open");
  LocalNgramTable table;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path.filename().string(), lineno,
                       "expected phrase<TAB>count");
    long count = 0;
    try {
      count = std::stol(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ParseError(path.filename().string(), lineno, "bad count field");
    }
    if (count > 0) table.phrases_.insert(text::normalize(line.substr(0, tab)));
  }
  return table;
}

bool LocalNgramTable::exists(const std::string& phrase) {
  return phrases_.contains(text::normalize(phrase));
}

RemoteNgramClient::RemoteNgramClient(std::string host, int port,
                                     int max_attempts,
                                     std::chrono::milliseconds initial_backoff)
    : host_(std::move(host)),
      port_(port),
      max_attempts_(max_attempts),
      initial_backoff_(initial_backoff) {
  desc_.model_id = "remote:" + host_ + ":" + std::to_string(port_);
}

bool RemoteNgramClient::exists(const std::string& phrase) {
  httplib::Client client(host_, port_);
  client.set_connection_timeout(2, 0);
  client.set_read_timeout(2, 0);
  auto backoff = initial_backoff_;
  for (int attempt = 1; attempt <= max_attempts_; ++attempt) {
    auto res = client.Get("/exists",
                          httplib::Params{{"q", text::normalize(phrase)}},
                          httplib::Headers{});
    if (res) {
      if (res->status == 200) {
        if (res->body == "1") return true;
        if (res->body == "0") return false;
        throw BackendError("n-gram service returned an unrecognized body: '" +
                               res->body.substr(0, 64) + "'",
                           /*retryable=*/false);
      }
      if (res->status < 500)
        throw BackendError(
            "n-gram service rejected the request (HTTP " +
                std::to_string(res->status) + ")",
            /*retryable=*/false);
    }
    if (attempt < max_attempts_) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw BackendError("n-gram service unreachable after " +
                         std::to_string(max_attempts_) + " attempts",
                     /*retryable=*/true);
}

}  // namespace clozegen
