#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fontsynth {

enum class EmbeddingFamily { clip, siglip };

std::string_view to_string(EmbeddingFamily family);
/// Throws SchemaViolation on an unknown name.
EmbeddingFamily parse_embedding_family(std::string_view name);

struct EmbeddingPair {
  std::vector<double> image_vec;
  std::vector<double> text_vec;
  EmbeddingFamily family = EmbeddingFamily::clip;
};

/// Throws DimensionMismatch or ZeroVector.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

/// 100 * max(0, cos). Throws FamilyMismatch for non-CLIP pairs.
double clip_score(const EmbeddingPair& pair);

/// sigmoid(logit_scale * cos + logit_bias). Throws FamilyMismatch for
/// non-SigLIP pairs.
double siglip_score(const EmbeddingPair& pair, double logit_scale, double logit_bias);

}  // namespace fontsynth
