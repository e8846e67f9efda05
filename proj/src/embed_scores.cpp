#include "fontsynth/embed_scores.hpp"

#include <algorithm>
#include <cmath>

#include "fontsynth/error.hpp"

namespace fontsynth {

std::string_view to_string(EmbeddingFamily family) {
  return family == EmbeddingFamily::clip ? "clip" : "siglip";
}

EmbeddingFamily parse_embedding_family(std::string_view name) {
  if (name == "clip") return EmbeddingFamily::clip;
  if (name == "siglip") return EmbeddingFamily::siglip;
  throw Error(ErrorCode::SchemaViolation, "unknown embedding family '" + std::string(name) + "'");
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "embedding dimensions differ (" +
                                                  std::to_string(a.size()) + " vs " +
                                                  std::to_string(b.size()) + ")");
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::ZeroVector, "embedding has zero norm");
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

double clip_score(const EmbeddingPair& pair) {
  if (pair.family != EmbeddingFamily::clip) {
    throw Error(ErrorCode::FamilyMismatch, "clip_score needs a clip embedding pair");
  }
  return 100.0 * std::max(0.0, cosine_similarity(pair.image_vec, pair.text_vec));
}

double siglip_score(const EmbeddingPair& pair, double logit_scale, double logit_bias) {
  if (pair.family != EmbeddingFamily::siglip) {
    throw Error(ErrorCode::FamilyMismatch, "siglip_score needs a siglip embedding pair");
  }
  const double z = logit_scale * cosine_similarity(pair.image_vec, pair.text_vec) + logit_bias;
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace fontsynth
