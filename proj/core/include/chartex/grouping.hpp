#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace chartex {

using Embedding = std::vector<double>;

struct GroupingParams {
  double temperature = 0.2;  // > 0
  double bias = 0.0;
};

/// Symmetric pair supervision: same_line[i][j] plus per-mark image ids for
/// cross-image masking in batched instances.
struct PairLabels {
  int n = 0;
  std::vector<std::uint8_t> same;  // row-major n*n, symmetric
  std::vector<int> image_ids;      // one per mark; empty means single image

  static PairLabels from_series_ids(std::span<const int> series_ids,
                                    std::span<const int> image_ids = {});

  bool same_line(int i, int j) const {
    return same[std::size_t(i) * n + j] != 0;
  }
  bool same_image(int i, int j) const {
    return image_ids.empty() || image_ids[std::size_t(i)] == image_ids[std::size_t(j)];
  }
};

/// Dense symmetric logit matrix; the diagonal is masked (stored as 0 and
/// never read by the loss).
struct SimilarityMatrix {
  int n = 0;
  std::vector<double> logits;  // row-major n*n

  double at(int i, int j) const { return logits[std::size_t(i) * n + j]; }
};

/// logits[i][j] = cos(f_i, f_j) / temperature + bias.
/// Throws errc::zero_norm_embedding.
SimilarityMatrix similarity_logits(std::span<const Embedding> embeddings,
                                   const GroupingParams& params);

/// Logistic squashing of a pair logit into a same-line probability.
double pair_probability(double logit);

/// Binary cross-entropy summed over ordered pairs i != j within the same
/// image (each unordered pair counts twice).
double grouping_loss(std::span<const Embedding> embeddings,
                     const PairLabels& labels, const GroupingParams& params);

struct GroupingGradient {
  std::vector<Embedding> d_embeddings;
  double d_temperature = 0;
  double d_bias = 0;
};

/// Analytic gradient of grouping_loss with respect to every embedding
/// component, the temperature, and the bias.
GroupingGradient grouping_loss_gradient(std::span<const Embedding> embeddings,
                                        const PairLabels& labels,
                                        const GroupingParams& params);

/// Average-linkage agglomerative clustering on pairwise probabilities;
/// merging continues while the best pair of clusters has average linkage
/// probability above `prob_threshold`. Returns the partition as index lists.
std::vector<std::vector<int>> cluster_marks(std::span<const Embedding> embeddings,
                                            const GroupingParams& params,
                                            double prob_threshold = 0.5);

}  // namespace chartex
