#include "clozegen/cache.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace clozegen {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

BackendCache::BackendCache(std::filesystem::path directory)
    : dir_(std::move(directory)) {
  std::filesystem::create_directories(dir_);
}

std::string BackendCache::key_hash(const std::string& key_material) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(key_material.data(), key_material.size(), digest, &len,
             EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::optional<std::string> BackendCache::get(
    const std::string& key_material) const {
  auto path = dir_ / key_hash(key_material);
  if (!std::filesystem::exists(path)) return std::nullopt;
  return read_file(path);
}

void BackendCache::put(const std::string& key_material,
                       const std::string& payload) const {
  auto path = dir_ / key_hash(key_material);
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << payload;
  }
  std::filesystem::rename(tmp, path);
}

namespace {

std::string span_key(const std::vector<std::string>& tokens, Span span) {
  json j = {{"tokens", tokens}, {"begin", span.begin}, {"end", span.end}};
  return j.dump();
}

class CachedPredictor : public MaskedPredictor {
 public:
  CachedPredictor(std::shared_ptr<MaskedPredictor> inner,
                  std::shared_ptr<BackendCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}

  std::vector<Prediction> predict(const MaskedSentence& ms, int k) override {
    if (k < 1) throw ArgumentError("predict_fillers: k must be >= 1");
    const std::string key = descriptor().cache_key() + "\npredict\n" +
                            ms.render() + "\nk=" + std::to_string(k);
    if (auto hit = cache_->get(key)) {
      std::vector<Prediction> out;
      for (const auto& p : json::parse(*hit))
        out.push_back({p.at(0).get<std::string>(), p.at(1).get<double>(),
                       p.at(2).get<int>()});
      return out;
    }
    auto fresh = inner_->predict(ms, k);
    json j = json::array();
    for (const auto& p : fresh)
      j.push_back(json::array({p.token, p.probability, p.position}));
    cache_->put(key, j.dump());
    return fresh;
  }
  const BackendDescriptor& descriptor() const override {
    return inner_->descriptor();
  }

 private:
  std::shared_ptr<MaskedPredictor> inner_;
  std::shared_ptr<BackendCache> cache_;
};

class CachedContextualEmbedder : public ContextualEmbedder {
 public:
  CachedContextualEmbedder(std::shared_ptr<ContextualEmbedder> inner,
                           std::shared_ptr<BackendCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}

  EmbeddingVector embed(const std::vector<std::string>& tokens,
                        Span span) override {
    const std::string key =
        descriptor().cache_key() + "\nembed\n" + span_key(tokens, span);
    if (auto hit = cache_->get(key))
      return json::parse(*hit).get<EmbeddingVector>();
    auto fresh = inner_->embed(tokens, span);
    cache_->put(key, json(fresh).dump());
    return fresh;
  }
  const BackendDescriptor& descriptor() const override {
    return inner_->descriptor();
  }

 private:
  std::shared_ptr<ContextualEmbedder> inner_;
  std::shared_ptr<BackendCache> cache_;
};

class CachedStaticEmbedder : public StaticEmbedder {
 public:
  CachedStaticEmbedder(std::shared_ptr<StaticEmbedder> inner,
                       std::shared_ptr<BackendCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}

  std::optional<EmbeddingVector> embed(const std::string& word) override {
    const std::string key =
        descriptor().cache_key() + "\nstatic_embed\n" + word;
    if (auto hit = cache_->get(key)) {
      json j = json::parse(*hit);
      if (j.is_null()) return std::nullopt;
      return j.get<EmbeddingVector>();
    }
    auto fresh = inner_->embed(word);
    cache_->put(key, fresh ? json(*fresh).dump() : json(nullptr).dump());
    return fresh;
  }
  const BackendDescriptor& descriptor() const override {
    return inner_->descriptor();
  }

 private:
  std::shared_ptr<StaticEmbedder> inner_;
  std::shared_ptr<BackendCache> cache_;
};

class CachedWsd : public SenseDisambiguator {
 public:
  CachedWsd(std::shared_ptr<SenseDisambiguator> inner,
            std::shared_ptr<BackendCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}

  std::optional<SynsetRef> disambiguate(const std::vector<std::string>& tokens,
                                        Span span) override {
    const std::string key =
        descriptor().cache_key() + "\ndisambiguate\n" + span_key(tokens, span);
    if (auto hit = cache_->get(key)) {
      json j = json::parse(*hit);
      if (j.is_null()) return std::nullopt;
      return SynsetRef{*pos_from_string(j.at("pos").get<std::string>()),
                       j.at("offset").get<std::uint32_t>()};
    }
    auto fresh = inner_->disambiguate(tokens, span);
    json j = fresh ? json{{"pos", std::string(to_string(fresh->pos))},
                          {"offset", fresh->offset}}
                   : json(nullptr);
    cache_->put(key, j.dump());
    return fresh;
  }
  const BackendDescriptor& descriptor() const override {
    return inner_->descriptor();
  }

 private:
  std::shared_ptr<SenseDisambiguator> inner_;
  std::shared_ptr<BackendCache> cache_;
};

}  // namespace

std::shared_ptr<MaskedPredictor> with_cache(
    std::shared_ptr<MaskedPredictor> inner,
    std::shared_ptr<BackendCache> cache) {
  return std::make_shared<CachedPredictor>(std::move(inner), std::move(cache));
}

std::shared_ptr<ContextualEmbedder> with_cache(
    std::shared_ptr<ContextualEmbedder> inner,
    std::shared_ptr<BackendCache> cache) {
  return std::make_shared<CachedContextualEmbedder>(std::move(inner),
                                                    std::move(cache));
}

std::shared_ptr<StaticEmbedder> with_cache(
    std::shared_ptr<StaticEmbedder> inner,
    std::shared_ptr<BackendCache> cache) {
  return std::make_shared<CachedStaticEmbedder>(std::move(inner),
                                                std::move(cache));
}

std::shared_ptr<SenseDisambiguator> with_cache(
    std::shared_ptr<SenseDisambiguator> inner,
    std::shared_ptr<BackendCache> cache) {
  return std::make_shared<CachedWsd>(std::move(inner), std::move(cache));
}

}  // namespace clozegen
