#include <chartex/grouping.hpp>

#include <chartex/error.hpp>

#include <algorithm>
#include <cmath>

namespace chartex {

PairLabels PairLabels::from_series_ids(std::span<const int> series_ids,
                                       std::span<const int> image_ids) {
  PairLabels labels;
  labels.n = static_cast<int>(series_ids.size());
  labels.same.assign(std::size_t(labels.n) * labels.n, 0);
  for (int i = 0; i < labels.n; ++i)
    for (int j = 0; j < labels.n; ++j)
      labels.same[std::size_t(i) * labels.n + j] =
          series_ids[std::size_t(i)] == series_ids[std::size_t(j)] ? 1 : 0;
  labels.image_ids.assign(image_ids.begin(), image_ids.end());
  return labels;
}

namespace {

double embedding_norm(const Embedding& e) {
  double acc = 0;
  for (double v : e) acc += v * v;
  return std::sqrt(acc);
}

double cosine(const Embedding& a, const Embedding& b, double na, double nb) {
  double acc = 0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc / (na * nb);
}

std::vector<double> checked_norms(std::span<const Embedding> embeddings) {
  std::vector<double> norms(embeddings.size());
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    norms[i] = embedding_norm(embeddings[i]);
    if (!(norms[i] > 1e-12))
      raise(errc::zero_norm_embedding,
            "embedding " + std::to_string(i) + " has zero norm");
  }
  return norms;
}

}  // namespace

SimilarityMatrix similarity_logits(std::span<const Embedding> embeddings,
                                   const GroupingParams& params) {
  if (!(params.temperature > 0))
    raise(errc::invalid_argument, "temperature must be > 0");
  const auto norms = checked_norms(embeddings);
  const int n = static_cast<int>(embeddings.size());
  SimilarityMatrix m;
  m.n = n;
  m.logits.assign(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double logit =
          cosine(embeddings[std::size_t(i)], embeddings[std::size_t(j)],
                 norms[std::size_t(i)], norms[std::size_t(j)]) /
              params.temperature +
          params.bias;
      m.logits[std::size_t(i) * n + j] = logit;
      m.logits[std::size_t(j) * n + i] = logit;
    }
  return m;
}

double pair_probability(double logit) { return 1.0 / (1.0 + std::exp(-logit)); }

namespace {

// Numerically stable BCE from the logit:
// max(z, 0) - g*z + log(1 + exp(-|z|)).
double bce_from_logit(double z, bool same) {
  return std::max(z, 0.0) - (same ? z : 0.0) + std::log1p(std::exp(-std::abs(z)));
}

void check_labels(std::span<const Embedding> embeddings,
                  const PairLabels& labels) {
  if (labels.n != static_cast<int>(embeddings.size()) ||
      labels.same.size() != std::size_t(labels.n) * labels.n ||
      (!labels.image_ids.empty() &&
       labels.image_ids.size() != embeddings.size()))
    raise(errc::invalid_argument, "labels do not match embedding count");
}

}  // namespace

double grouping_loss(std::span<const Embedding> embeddings,
                     const PairLabels& labels, const GroupingParams& params) {
  check_labels(embeddings, labels);
  const SimilarityMatrix m = similarity_logits(embeddings, params);
  double loss = 0;
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) {
      if (i == j || !labels.same_image(i, j)) continue;
      loss += bce_from_logit(m.at(i, j), labels.same_line(i, j));
    }
  return loss;
}

GroupingGradient grouping_loss_gradient(std::span<const Embedding> embeddings,
                                        const PairLabels& labels,
                                        const GroupingParams& params) {
  check_labels(embeddings, labels);
  const auto norms = checked_norms(embeddings);
  const int n = static_cast<int>(embeddings.size());
  const std::size_t dim = embeddings.empty() ? 0 : embeddings[0].size();

  GroupingGradient grad;
  grad.d_embeddings.assign(embeddings.size(), Embedding(dim, 0.0));

  // Each ordered pair (i, j) is its own BCE term with dL/dz = (p - g) and
  // z = cos(f_i, f_j) / tau + bias; z depends on both endpoint embeddings.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || !labels.same_image(i, j)) continue;
      const auto& fi = embeddings[std::size_t(i)];
      const auto& fj = embeddings[std::size_t(j)];
      const double ni = norms[std::size_t(i)], nj = norms[std::size_t(j)];
      const double cos_ij = cosine(fi, fj, ni, nj);
      const double z = cos_ij / params.temperature + params.bias;
      const double dz = pair_probability(z) - (labels.same_line(i, j) ? 1 : 0);

      grad.d_bias += dz;
      grad.d_temperature += dz * (-cos_ij / (params.temperature * params.temperature));
      // d cos / d f_i = f_j / (|f_i||f_j|) - cos * f_i / |f_i|^2, same with
      // the roles swapped for f_j.
      const double s = dz / params.temperature;
      for (std::size_t k = 0; k < dim; ++k) {
        grad.d_embeddings[std::size_t(i)][k] +=
            s * (fj[k] / (ni * nj) - cos_ij * fi[k] / (ni * ni));
        grad.d_embeddings[std::size_t(j)][k] +=
            s * (fi[k] / (ni * nj) - cos_ij * fj[k] / (nj * nj));
      }
    }
  return grad;
}

std::vector<std::vector<int>> cluster_marks(std::span<const Embedding> embeddings,
                                            const GroupingParams& params,
                                            double prob_threshold) {
  const int n = static_cast<int>(embeddings.size());
  if (n == 0) return {};
  const SimilarityMatrix m = similarity_logits(embeddings, params);

  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) clusters.push_back({i});

  while (clusters.size() > 1) {
    double best = -1;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double acc = 0;
        for (int a : clusters[i])
          for (int b : clusters[j]) acc += pair_probability(m.at(a, b));
        const double linkage =
            acc / (double(clusters[i].size()) * double(clusters[j].size()));
        if (linkage > best) {
          best = linkage;
          bi = i;
          bj = j;
        }
      }
    if (!(best > prob_threshold)) break;
    auto& into = clusters[bi];
    into.insert(into.end(), clusters[bj].begin(), clusters[bj].end());
    std::sort(into.begin(), into.end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return clusters;
}

}  // namespace chartex
