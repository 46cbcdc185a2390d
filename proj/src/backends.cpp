#include "clozegen/backends.hpp"

#include <cmath>

namespace clozegen {

std::string MaskedSentence::render(std::string_view marker) const {
  std::string out;
  for (const auto& t : prefix_tokens) {
    out += t;
    out += ' ';
  }
  out += marker;
  for (const auto& t : suffix_tokens) {
    out += ' ';
    out += t;
  }
  return out;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.size() != b.size())
    throw NumericError("cosine: dimension mismatch (" +
                       std::to_string(a.size()) + " vs " +
                       std::to_string(b.size()) + ")");
  if (a.empty()) throw NumericError("cosine: empty vectors");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw NumericError("cosine: zero-norm vector");
  double value = dot / (std::sqrt(na) * std::sqrt(nb));
  if (!std::isfinite(value)) throw NumericError("cosine: non-finite result");
  return value;
}

}  // namespace clozegen
