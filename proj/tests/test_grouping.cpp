#include <chartex/error.hpp>
#include <chartex/grouping.hpp>
#include <chartex/rng.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

using namespace chartex;

namespace {

Embedding unit(int dim, int axis) {
  Embedding e(std::size_t(dim), 0.0);
  e[std::size_t(axis)] = 1.0;
  return e;
}

std::vector<Embedding> random_embeddings(Rng& rng, int n, int dim) {
  std::vector<Embedding> out;
  for (int i = 0; i < n; ++i) {
    Embedding e(static_cast<std::size_t>(dim), 0.0);
    for (double& v : e) v = rng.normal(0, 1);
    out.push_back(std::move(e));
  }
  return out;
}

// Scalar per-pair BCE oracle, evaluated completely independently of the
// matrix implementation.
double loss_oracle(const std::vector<Embedding>& embeddings,
                   const PairLabels& labels, const GroupingParams& params) {
  double total = 0;
  const int n = int(embeddings.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || !labels.same_image(i, j)) continue;
      double dot_ij = 0, ni = 0, nj = 0;
      for (std::size_t k = 0; k < embeddings[std::size_t(i)].size(); ++k) {
        dot_ij += embeddings[std::size_t(i)][k] * embeddings[std::size_t(j)][k];
        ni += embeddings[std::size_t(i)][k] * embeddings[std::size_t(i)][k];
        nj += embeddings[std::size_t(j)][k] * embeddings[std::size_t(j)][k];
      }
      const double cos_ij = dot_ij / std::sqrt(ni * nj);
      const double p = 1.0 / (1.0 + std::exp(-(cos_ij / params.temperature +
                                               params.bias)));
      total += labels.same_line(i, j) ? -std::log(p) : -std::log(1.0 - p);
    }
  return total;
}

// Rand index of two partitions given as per-item cluster ids.
double rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  int agree = 0, total = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      ++total;
      if ((a[i] == a[j]) == (b[i] == b[j])) ++agree;
    }
  return total > 0 ? double(agree) / total : 1.0;
}

std::vector<int> flatten(const std::vector<std::vector<int>>& clusters, int n) {
  std::vector<int> ids(std::size_t(n), -1);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (int i : clusters[c]) ids[std::size_t(i)] = int(c);
  return ids;
}

}  // namespace

TEST_CASE("similarity_logits pinned values") {
  const std::vector<Embedding> same{unit(4, 0), unit(4, 0)};
  const SimilarityMatrix m1 = similarity_logits(same, {1.0, 0.0});
  CHECK(m1.at(0, 1) == doctest::Approx(1.0));

  const std::vector<Embedding> ortho{unit(4, 0), unit(4, 1)};
  const SimilarityMatrix m2 = similarity_logits(ortho, {0.5, 0.0});
  CHECK(m2.at(0, 1) == doctest::Approx(0.0));

  std::vector<Embedding> anti{unit(4, 0), unit(4, 0)};
  for (double& v : anti[1]) v = -v;
  const SimilarityMatrix m3 = similarity_logits(anti, {0.5, 0.2});
  CHECK(m3.at(0, 1) == doctest::Approx(-1.8));
}

TEST_CASE("similarity_logits rejects zero-norm embeddings") {
  const std::vector<Embedding> bad{unit(4, 0), Embedding(4, 0.0)};
  try {
    similarity_logits(bad, {});
    FAIL("expected ZeroNormEmbedding");
  } catch (const Error& e) {
    CHECK(e.code() == errc::zero_norm_embedding);
  }
}

TEST_CASE("similarity matrix is symmetric and cosine is scale invariant") {
  Rng rng(42);
  auto embeddings = random_embeddings(rng, 6, 8);
  const SimilarityMatrix base = similarity_logits(embeddings, {0.3, 0.1});
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(base.at(i, j) == base.at(j, i));

  for (double& v : embeddings[2]) v *= 37.5;  // positive rescaling
  const SimilarityMatrix scaled = similarity_logits(embeddings, {0.3, 0.1});
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(scaled.at(i, j) == doctest::Approx(base.at(i, j)).epsilon(1e-12));
}

TEST_CASE("pair_probability pinned values") {
  CHECK(pair_probability(0.0) == doctest::Approx(0.5));
  CHECK(pair_probability(1.0) == doctest::Approx(0.7310585786300049));
  CHECK(pair_probability(40.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pair_probability(-40.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("grouping_loss pinned case: two marks, logit zero") {
  // cos = 1, tau = 1, bias = -1 gives logit 0 and BCE ln 2 per ordered pair.
  const std::vector<Embedding> embeddings{unit(4, 0), unit(4, 0)};
  const PairLabels labels = PairLabels::from_series_ids(std::array{0, 0});
  const double loss = grouping_loss(embeddings, labels, {1.0, -1.0});
  CHECK(loss == doctest::Approx(2.0 * std::numbers::ln2));
}

TEST_CASE("grouping_loss vanishes for separated clusters at low temperature") {
  // Antipodal clusters: within-cos 1, across-cos -1. As tau -> 0+ the
  // logits saturate and the BCE goes to zero.
  std::vector<Embedding> embeddings{unit(4, 0), unit(4, 0), unit(4, 0),
                                    unit(4, 0)};
  for (double& v : embeddings[2]) v = -v;
  for (double& v : embeddings[3]) v = -v;
  const PairLabels labels = PairLabels::from_series_ids(std::array{0, 0, 1, 1});
  const double loss = grouping_loss(embeddings, labels, {1e-2, 0.0});
  CHECK(loss == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("grouping_loss equals the scalar oracle on random instances") {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + int(rng.uniform_int(0, 6));  // up to 8 marks
    const auto embeddings = random_embeddings(rng, n, 8);
    std::vector<int> series(static_cast<std::size_t>(n), 0);
    for (int& s : series) s = int(rng.uniform_int(0, 1));
    const PairLabels labels =
        PairLabels::from_series_ids({series.data(), series.size()});
    const GroupingParams params{rng.uniform(0.1, 1.0), rng.uniform(-0.5, 0.5)};
    CHECK(grouping_loss(embeddings, labels, params) ==
          doctest::Approx(loss_oracle(embeddings, labels, params)).epsilon(1e-12));
  }
}

TEST_CASE("cross-image pairs contribute exactly zero") {
  Rng rng(19);
  const auto embeddings = random_embeddings(rng, 6, 8);
  const std::vector<int> series{0, 0, 1, 0, 1, 1};
  const std::vector<int> one_image{7, 7, 7, 7, 7, 7};
  const std::vector<int> two_images{1, 1, 1, 2, 2, 2};
  const GroupingParams params{0.25, 0.0};

  const PairLabels all = PairLabels::from_series_ids(
      {series.data(), series.size()}, {one_image.data(), one_image.size()});
  const PairLabels split = PairLabels::from_series_ids(
      {series.data(), series.size()}, {two_images.data(), two_images.size()});

  // Oracle with masking handles it; also check gradient contributions.
  CHECK(grouping_loss(embeddings, split, params) ==
        doctest::Approx(loss_oracle(embeddings, split, params)).epsilon(1e-12));
  CHECK(grouping_loss(embeddings, all, params) >
        grouping_loss(embeddings, split, params));

  // Zeroing an embedding's cross-image partners must not affect its gradient.
  const GroupingGradient g = grouping_loss_gradient(embeddings, split, params);
  std::vector<Embedding> only_first(embeddings.begin(), embeddings.begin() + 3);
  const PairLabels first_labels = PairLabels::from_series_ids(
      {series.data(), 3});
  const GroupingGradient g_first =
      grouping_loss_gradient(only_first, first_labels, params);
  for (int k = 0; k < 8; ++k)
    CHECK(g.d_embeddings[0][std::size_t(k)] ==
          doctest::Approx(g_first.d_embeddings[0][std::size_t(k)]).epsilon(1e-12));
}

TEST_CASE("gradient vanishes for identical embeddings in one line") {
  // cos is at its maximum, so every embedding partial is exactly zero.
  const std::vector<Embedding> embeddings{unit(4, 1), unit(4, 1), unit(4, 1)};
  const PairLabels labels = PairLabels::from_series_ids(std::array{3, 3, 3});
  const GroupingGradient g = grouping_loss_gradient(embeddings, labels, {0.5, 0.0});
  for (const Embedding& d : g.d_embeddings)
    for (double v : d) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(2718);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6, dim = 8;
    auto embeddings = random_embeddings(rng, n, dim);
    std::vector<int> series(static_cast<std::size_t>(n), 0);
    for (int& s : series) s = int(rng.uniform_int(0, 2));
    const PairLabels labels =
        PairLabels::from_series_ids({series.data(), series.size()});
    GroupingParams params{rng.uniform(0.15, 0.8), rng.uniform(-0.4, 0.4)};

    const GroupingGradient g = grouping_loss_gradient(embeddings, labels, params);

    for (int i = 0; i < n; ++i)
      for (int k = 0; k < dim; ++k) {
        auto perturbed = embeddings;
        perturbed[std::size_t(i)][std::size_t(k)] += h;
        const double up = grouping_loss(perturbed, labels, params);
        perturbed[std::size_t(i)][std::size_t(k)] -= 2 * h;
        const double down = grouping_loss(perturbed, labels, params);
        const double fd = (up - down) / (2 * h);
        const double scale =
            std::max({1.0, std::abs(fd),
                      std::abs(g.d_embeddings[std::size_t(i)][std::size_t(k)])});
        CHECK(std::abs(g.d_embeddings[std::size_t(i)][std::size_t(k)] - fd) /
                  scale <
              1e-4);
      }

    GroupingParams up_t = params, down_t = params;
    up_t.temperature += h;
    down_t.temperature -= h;
    const double fd_t = (grouping_loss(embeddings, labels, up_t) -
                         grouping_loss(embeddings, labels, down_t)) /
                        (2 * h);
    CHECK(std::abs(g.d_temperature - fd_t) /
              std::max({1.0, std::abs(fd_t), std::abs(g.d_temperature)}) <
          1e-4);

    GroupingParams up_b = params, down_b = params;
    up_b.bias += h;
    down_b.bias -= h;
    const double fd_b = (grouping_loss(embeddings, labels, up_b) -
                         grouping_loss(embeddings, labels, down_b)) /
                        (2 * h);
    CHECK(std::abs(g.d_bias - fd_b) /
              std::max({1.0, std::abs(fd_b), std::abs(g.d_bias)}) <
          1e-4);
  }
}

TEST_CASE("bias gradient equals the sum of (p - G) over unmasked pairs") {
  Rng rng(13);
  const auto embeddings = random_embeddings(rng, 6, 8);
  const std::vector<int> series{0, 1, 0, 2, 1, 2};
  const PairLabels labels =
      PairLabels::from_series_ids({series.data(), series.size()});
  const GroupingParams params{0.3, 0.15};
  const SimilarityMatrix m = similarity_logits(embeddings, params);

  double expected = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      if (i == j) continue;
      expected += pair_probability(m.at(i, j)) - (labels.same_line(i, j) ? 1 : 0);
    }
  const GroupingGradient g = grouping_loss_gradient(embeddings, labels, params);
  CHECK(g.d_bias == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("cluster_marks merges identical embeddings into one cluster") {
  const std::vector<Embedding> embeddings{unit(4, 2), unit(4, 2), unit(4, 2)};
  const auto clusters = cluster_marks(embeddings, {0.2, 0.0}, 0.5);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0] == std::vector<int>{0, 1, 2});
}

TEST_CASE("cluster_marks separates orthogonal groups at threshold 0.5") {
  // Within-group cosine 1 -> probability ~1; across groups cosine 0 ->
  // probability exactly 0.5, which must NOT merge at threshold 0.5.
  const std::vector<Embedding> embeddings{unit(4, 0), unit(4, 0), unit(4, 1),
                                          unit(4, 1)};
  const auto clusters = cluster_marks(embeddings, {0.2, 0.0}, 0.5);
  REQUIRE(clusters.size() == 2);
  std::set<std::vector<int>> got(clusters.begin(), clusters.end());
  CHECK(got.count({0, 1}) == 1);
  CHECK(got.count({2, 3}) == 1);
}

TEST_CASE("cluster_marks recovers a 3-line partition under angular noise") {
  Rng rng(35);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Embedding> embeddings;
    std::vector<int> truth;
    for (int line = 0; line < 3; ++line)
      for (int k = 0; k < 3; ++k) {
        // Base vector per line, tilted by <= 10 degrees within a plane
        // orthogonal to every other line's plane.
        const double tilt = rng.uniform(-10, 10) * std::numbers::pi / 180.0;
        Embedding e(8, 0.0);
        e[std::size_t(line)] = std::cos(tilt);
        e[std::size_t(3 + line)] = std::sin(tilt);
        embeddings.push_back(std::move(e));
        truth.push_back(line);
      }
    const auto clusters = cluster_marks(embeddings, {0.2, 0.0}, 0.5);
    CHECK(rand_index(flatten(clusters, 9), truth) == doctest::Approx(1.0));
  }
}

TEST_CASE("clustering is invariant to input permutation") {
  Rng rng(64);
  const auto base = random_embeddings(rng, 7, 8);
  const auto clusters_a = cluster_marks(base, {0.25, 0.0}, 0.5);

  std::vector<std::size_t> perm{3, 1, 6, 0, 5, 2, 4};
  std::vector<Embedding> shuffled;
  for (const std::size_t p : perm) shuffled.push_back(base[p]);
  const auto clusters_b = cluster_marks(shuffled, {0.25, 0.0}, 0.5);

  // Compare as partitions of the original indices.
  auto canon = [&](std::vector<std::vector<int>> cs, bool mapped) {
    std::set<std::set<int>> out;
    for (auto& c : cs) {
      std::set<int> s;
      for (int i : c) s.insert(mapped ? int(perm[std::size_t(i)]) : i);
      out.insert(std::move(s));
    }
    return out;
  };
  CHECK(canon(clusters_a, false) == canon(clusters_b, true));
}

TEST_CASE("single mark clusters as a singleton") {
  const std::vector<Embedding> one{unit(4, 0)};
  const auto clusters = cluster_marks(one, {0.2, 0.0}, 0.5);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0] == std::vector<int>{0});
}
