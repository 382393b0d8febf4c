#pragma once

#include <random>

#include "gssl/kernel_graph.hpp"
#include "gssl/types.hpp"

namespace gssl::test {

// Random instance helpers shared across test binaries. All draws come from a
// caller-owned engine so individual cases stay reproducible.

inline MatrixXd random_points(std::mt19937_64& rng, Index count, Index dim,
                              double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  MatrixXd points(count, dim);
  for (Index i = 0; i < count; ++i)
    for (Index j = 0; j < dim; ++j) points(i, j) = unif(rng);
  return points;
}

inline VectorXd random_labels(std::mt19937_64& rng, Index count, double lo = 0.0,
                              double hi = 1.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  VectorXd labels(count);
  for (Index i = 0; i < count; ++i) labels(i) = unif(rng);
  return labels;
}

inline Dataset<double> random_dataset(std::mt19937_64& rng, Index n, Index m,
                                      Index dim) {
  return Dataset<double>(random_points(rng, n + m, dim),
                         random_labels(rng, n));
}

/// Well-connected random RBF instance: points in the unit cube, bandwidth
/// wide enough that every pair keeps a meaningfully positive similarity.
inline SimilarityGraph<double> random_rbf_graph(std::mt19937_64& rng, Index n,
                                                Index m, Index dim,
                                                double bandwidth = 0.8) {
  return build_graph(random_dataset(rng, n, m, dim),
                     KernelSpec<double>(bandwidth));
}

}  // namespace gssl::test
