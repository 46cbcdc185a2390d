#include "clozegen/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "clozegen/errors.hpp"

namespace clozegen {

namespace {

using nlohmann::json;

std::string lexical_mode_name(LexicalMode mode) {
  return mode == LexicalMode::Strict ? "strict" : "relaxed";
}

LexicalMode lexical_mode_from(const std::string& name,
                              std::vector<std::string>& problems) {
  if (name == "strict") return LexicalMode::Strict;
  if (name == "relaxed") return LexicalMode::Relaxed;
  problems.push_back("lexical_mode: expected \"strict\" or \"relaxed\", got \"" +
                     name + "\"");
  return LexicalMode::Strict;
}

NgramMode ngram_mode_from(const std::string& name,
                          std::vector<std::string>& problems) {
  if (name == "local") return NgramMode::Local;
  if (name == "remote") return NgramMode::Remote;
  if (name == "permissive") return NgramMode::Permissive;
  problems.push_back(
      "ngram.mode: expected \"local\", \"remote\", or \"permissive\", got \"" +
      name + "\"");
  return NgramMode::Local;
}

// Pulls `field` out of `obj` if present, enforcing its JSON type; records a
// problem (and leaves the target untouched) otherwise.
class FieldReader {
 public:
  FieldReader(const json& obj, std::string prefix,
              std::vector<std::string>& problems)
      : obj_(obj), prefix_(std::move(prefix)), problems_(problems) {}

  void number(const char* field, double& target) {
    const json* v = get(field);
    if (!v) return;
    if (!v->is_number()) return wrong_type(field, "a number");
    target = v->get<double>();
  }

  void integer(const char* field, int& target) {
    const json* v = get(field);
    if (!v) return;
    if (!v->is_number_integer()) return wrong_type(field, "an integer");
    target = v->get<int>();
  }

  void text(const char* field, std::string& target) {
    const json* v = get(field);
    if (!v) return;
    if (!v->is_string()) return wrong_type(field, "a string");
    target = v->get<std::string>();
  }

  void path(const char* field, std::filesystem::path& target) {
    std::string s = target.string();
    text(field, s);
    target = std::filesystem::path(s);
  }

  // Marks every recognized key; leftovers are reported as unknown.
  void finish() {
    for (const auto& [key, value] : obj_.items()) {
      (void)value;
      bool known = false;
      for (const auto& k : seen_)
        if (k == key) known = true;
      if (!known) problems_.push_back(prefix_ + key + ": unknown field");
    }
  }

  const json* get(const char* field) {
    seen_.push_back(field);
    auto it = obj_.find(field);
    return it == obj_.end() ? nullptr : &*it;
  }

  void wrong_type(const char* field, const char* expected) {
    problems_.push_back(prefix_ + field + ": expected " + expected);
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::vector<std::string>& problems_;
  std::vector<std::string> seen_;
};

[[noreturn]] void throw_problems(const std::string& origin,
                                 const std::vector<std::string>& problems) {
  std::ostringstream msg;
  msg << origin << ": invalid configuration:";
  for (const auto& p : problems) msg << "\n  " << p;
  throw ValidationError(msg.str(), {});
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  if (p.empty() || base.empty() || p.is_absolute()) return p;
  return base / p;
}

}  // namespace

std::string_view to_string(NgramMode mode) {
  switch (mode) {
    case NgramMode::Local: return "local";
    case NgramMode::Remote: return "remote";
    case NgramMode::Permissive: return "permissive";
  }
  return "local";
}

void validate_config(const PipelineConfig& c) {
  std::vector<std::string> problems;
  if (!(c.alpha > 0)) problems.push_back("alpha: must be > 0");
  if (!(c.beta >= 0)) problems.push_back("beta: must be >= 0");
  if (!(c.gamma >= 0 && c.gamma <= 1))
    problems.push_back("gamma: must be in [0, 1]");
  if (c.m < 1) problems.push_back("m: must be >= 1");
  if (c.n < 1) problems.push_back("n: must be >= 1");
  if (c.k < 1) problems.push_back("k: must be >= 1");
  if (c.cap < 1) problems.push_back("cap: must be >= 1");
  if (c.min_stem_tokens < 1)
    problems.push_back("stem_tokens.min: must be >= 1");
  if (c.max_stem_tokens < c.min_stem_tokens)
    problems.push_back("stem_tokens.max: must be >= stem_tokens.min");
  if (c.ngram_mode == NgramMode::Remote && c.ngram_host.empty())
    problems.push_back("ngram.host: required when ngram.mode is \"remote\"");
  if (c.ngram_port < 1 || c.ngram_port > 65535)
    problems.push_back("ngram.port: must be in [1, 65535]");
  if (!problems.empty()) throw_problems("config", problems);
}

PipelineConfig parse_config(const std::string& json_text,
                            const std::string& origin,
                            const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(origin, 0, e.what());
  }
  if (!root.is_object())
    throw ParseError(origin, 0, "expected a JSON object at the top level");

  PipelineConfig c;
  std::vector<std::string> problems;
  FieldReader top(root, "", problems);
  top.number("alpha", c.alpha);
  top.number("beta", c.beta);
  top.number("gamma", c.gamma);
  top.integer("m", c.m);
  top.integer("n", c.n);
  top.integer("k", c.k);
  top.integer("cap", c.cap);

  std::string mode = lexical_mode_name(c.lexical_mode);
  top.text("lexical_mode", mode);
  c.lexical_mode = lexical_mode_from(mode, problems);

  if (const json* stem = top.get("stem_tokens")) {
    if (!stem->is_object()) {
      top.wrong_type("stem_tokens", "an object");
    } else {
      FieldReader r(*stem, "stem_tokens.", problems);
      r.integer("min", c.min_stem_tokens);
      r.integer("max", c.max_stem_tokens);
      r.finish();
    }
  }

  top.path("wordnet_dir", c.wordnet_dir);
  top.path("cache_dir", c.cache_dir);

  if (const json* backends = top.get("backends")) {
    if (!backends->is_object()) {
      top.wrong_type("backends", "an object");
    } else {
      FieldReader r(*backends, "backends.", problems);
      r.path("file", c.backends_file);
      r.text("model_id", c.backend_model_id);
      r.text("version", c.backend_version);
      r.finish();
    }
  }

  if (const json* ngram = top.get("ngram")) {
    if (!ngram->is_object()) {
      top.wrong_type("ngram", "an object");
    } else {
      FieldReader r(*ngram, "ngram.", problems);
      std::string nmode(to_string(c.ngram_mode));
      r.text("mode", nmode);
      c.ngram_mode = ngram_mode_from(nmode, problems);
      r.path("file", c.ngram_file);
      r.text("host", c.ngram_host);
      r.integer("port", c.ngram_port);
      r.finish();
    }
  }
  top.finish();
  if (!problems.empty()) throw_problems(origin, problems);

  c.wordnet_dir = resolve(base_dir, c.wordnet_dir);
  c.backends_file = resolve(base_dir, c.backends_file);
  c.cache_dir = resolve(base_dir, c.cache_dir);
  c.ngram_file = resolve(base_dir, c.ngram_file);

  validate_config(c);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string(), "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  PipelineConfig c =
      parse_config(buf.str(), path.string(), path.parent_path());
  apply_env_overrides(c);
  return c;
}

void apply_env_overrides(PipelineConfig& config) {
  if (const char* dir = std::getenv("CLOZEGEN_CACHE_DIR"))
    if (*dir) config.cache_dir = dir;
}

std::string config_to_json(const PipelineConfig& c) {
  json root;
  root["alpha"] = c.alpha;
  root["beta"] = c.beta;
  root["gamma"] = c.gamma;
  root["lexical_mode"] = lexical_mode_name(c.lexical_mode);
  root["m"] = c.m;
  root["n"] = c.n;
  root["k"] = c.k;
  root["cap"] = c.cap;
  root["stem_tokens"] = {{"min", c.min_stem_tokens},
                         {"max", c.max_stem_tokens}};
  root["wordnet_dir"] = c.wordnet_dir.string();
  root["backends"] = {{"file", c.backends_file.string()},
                      {"model_id", c.backend_model_id},
                      {"version", c.backend_version}};
  root["cache_dir"] = c.cache_dir.string();
  root["ngram"] = {{"mode", std::string(to_string(c.ngram_mode))},
                   {"file", c.ngram_file.string()},
                   {"host", c.ngram_host},
                   {"port", c.ngram_port}};
  return root.dump(2);
}

}  // namespace clozegen
