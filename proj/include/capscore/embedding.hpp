#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace capscore {

using Vector = std::vector<double>;

struct CaptionEmbedding {
  std::vector<std::string> tokens;
  std::vector<Vector> token_vectors;
  Vector sentence_vector;
};

/// Vectors produced by an external encoder, keyed by caption id and image id.
struct EmbeddingBundle {
  std::size_t dim = 0;
  std::unordered_map<std::string, CaptionEmbedding> captions;
  std::unordered_map<std::string, Vector> images;

  /// Throw IntegrityError naming the id when absent.
  const CaptionEmbedding& caption(const std::string& id) const;
  const Vector& image(const std::string& id) const;
};

/// Zero-magnitude operands give 0. Throws UsageError on dimension mismatch.
double cosine(std::span<const double> a, std::span<const double> b);

struct LabeledVectors {
  std::vector<std::string> labels;
  std::vector<Vector> vectors;
};

struct SimilarityMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<double> values;  // row-major

  double at(std::size_t r, std::size_t c) const { return values[r * cols.size() + c]; }
};

SimilarityMatrix similarity_matrix(const LabeledVectors& candidate, const LabeledVectors& reference);

struct BertScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Optional importance weights keyed by token surface; tokens not listed
/// weigh 1.
using TokenWeights = std::unordered_map<std::string, double>;

/// Greedy matching of one candidate against one reference.
BertScore greedy_match(const CaptionEmbedding& candidate, const CaptionEmbedding& reference,
                       const TokenWeights* weights = nullptr);

/// Scores each reference independently and keeps the one with the highest F1.
BertScore bertscore(const std::string& candidate_id, std::span<const std::string> ref_ids,
                    const EmbeddingBundle& bundle, const TokenWeights* weights = nullptr);

/// w * max(cos(image, caption), 0).
double clipscore(const std::string& image_id, const std::string& candidate_id,
                 const EmbeddingBundle& bundle, double w = 1.0);

/// Harmonic mean of clipscore and the best clamped candidate/reference
/// sentence cosine.
double clipscore_ref(const std::string& image_id, const std::string& candidate_id,
                     std::span<const std::string> ref_ids, const EmbeddingBundle& bundle,
                     double w = 1.0);

double harmonic_mean(double a, double b);

/// One JSON record per line: a `{"dim": n}` header, then caption and image
/// records.
EmbeddingBundle parse_embeddings(std::string_view document);
EmbeddingBundle load_embeddings(const std::filesystem::path& path);

}  // namespace capscore
