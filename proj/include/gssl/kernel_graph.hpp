#pragma once

#include <cmath>
#include <stdexcept>

#include "gssl/types.hpp"

namespace gssl {

/// Gaussian RBF similarity exp(-||x - y||^2 / bandwidth^2). Equals 1 iff
/// x == y and decays toward 0 with distance (it underflows to exactly 0 in
/// floating point far beyond ~27 bandwidths).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar rbf_similarity(const Eigen::MatrixBase<DerivedA>& x,
                                         const Eigen::MatrixBase<DerivedB>& y,
                                         typename DerivedA::Scalar bandwidth) {
  using Scalar = typename DerivedA::Scalar;
  if (x.size() != y.size())
    throw std::invalid_argument("rbf_similarity: dimension mismatch");
  if (!(bandwidth > Scalar(0)))
    throw std::invalid_argument("rbf_similarity: bandwidth must be positive");
  // reshaped() flattens either orientation, so rows and columns mix freely.
  const Scalar sq =
      (x.derived().reshaped() - y.derived().reshaped()).squaredNorm();
  return std::exp(-sq / (bandwidth * bandwidth));
}

/// Similarity under the configured kernel family.
template <typename Scalar, typename DerivedA, typename DerivedB>
Scalar kernel_similarity(const KernelSpec<Scalar>& kernel,
                         const Eigen::MatrixBase<DerivedA>& x,
                         const Eigen::MatrixBase<DerivedB>& y) {
  switch (kernel.family) {
    case KernelFamily::GaussianRBF:
      return rbf_similarity(x, y, kernel.bandwidth);
  }
  throw std::logic_error("kernel_similarity: unhandled kernel family");
}

/// Builds the dense similarity matrix w_ij = K((x_i - x_j)/h) over all
/// labeled and unlabeled points, including self-similarities w_ii = K(0) = 1,
/// plus the degree vector d_i = sum_j w_ij.
///
/// Each unordered pair is evaluated once and mirrored, so w is symmetric
/// bit-exactly.
template <typename Scalar>
SimilarityGraph<Scalar> build_graph(const Dataset<Scalar>& data,
                                    const KernelSpec<Scalar>& kernel) {
  switch (kernel.family) {
    case KernelFamily::GaussianRBF:
      break;  // evaluated inline below; new families must dispatch here
  }
  const Index total = data.inputs.rows();
  const Scalar inv_h2 = Scalar(1) / (kernel.bandwidth * kernel.bandwidth);

  // Transposed copy so each point is a contiguous column.
  const Matrix<Scalar> points = data.inputs.transpose();

  SimilarityGraph<Scalar> graph;
  graph.w.resize(total, total);
  graph.n_labeled = data.n_labeled();
  for (Index i = 0; i < total; ++i) {
    graph.w(i, i) = Scalar(1);
    for (Index j = i + 1; j < total; ++j) {
      const Scalar sq = (points.col(i) - points.col(j)).squaredNorm();
      const Scalar s = std::exp(-sq * inv_h2);
      graph.w(i, j) = s;
      graph.w(j, i) = s;
    }
  }
  graph.degrees = graph.w.rowwise().sum();
  return graph;
}

/// Unnormalized graph Laplacian L = D - W. Rows sum to zero and L is
/// symmetric positive semi-definite, with f' L f = 1/2 sum_ij w_ij (f_i - f_j)^2.
template <typename Scalar>
Matrix<Scalar> laplacian(const SimilarityGraph<Scalar>& graph) {
  Matrix<Scalar> l = -graph.w;
  l.diagonal() += graph.degrees;
  return l;
}

/// Labeled/unlabeled blocks of W and D. Block 1 is the labeled prefix,
/// block 2 the unlabeled suffix; d1 and d2 are the diagonals of D11 and D22.
template <typename Scalar>
struct GraphBlocks {
  Matrix<Scalar> w11;  // n x n
  Matrix<Scalar> w12;  // n x m
  Matrix<Scalar> w21;  // m x n, equals w12 transposed
  Matrix<Scalar> w22;  // m x m
  Vector<Scalar> d1;   // n
  Vector<Scalar> d2;   // m
};

template <typename Scalar>
GraphBlocks<Scalar> partition(const SimilarityGraph<Scalar>& graph) {
  const Index n = graph.n_labeled;
  const Index m = graph.n_unlabeled();
  if (n < 1)
    throw std::invalid_argument("partition: need at least one labeled point");
  if (m < 1)
    throw std::invalid_argument("partition: need at least one unlabeled point");

  GraphBlocks<Scalar> blocks;
  blocks.w11 = graph.w.topLeftCorner(n, n);
  blocks.w12 = graph.w.topRightCorner(n, m);
  blocks.w21 = graph.w.bottomLeftCorner(m, n);
  blocks.w22 = graph.w.bottomRightCorner(m, m);
  blocks.d1 = graph.degrees.head(n);
  blocks.d2 = graph.degrees.tail(m);
  return blocks;
}

}  // namespace gssl
