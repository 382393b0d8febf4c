#pragma once

#include <limits>
#include <stdexcept>
#include <string>

#include "gssl/kernel_graph.hpp"
#include "gssl/types.hpp"

namespace gssl {

/// Kernel-weighted average of the labeled responses at a query point:
///   sum_i K((q - x_i)/h) y_i / sum_i K((q - x_i)/h),
/// with both sums over the labeled points only. A denominator at the
/// underflow floor means no labeled point retains any weight at the query.
template <typename DerivedX, typename DerivedY, typename DerivedQ>
typename DerivedX::Scalar nw_estimate(
    const Eigen::MatrixBase<DerivedX>& labeled_inputs,
    const Eigen::MatrixBase<DerivedY>& labels,
    const Eigen::MatrixBase<DerivedQ>& query,
    const KernelSpec<typename DerivedX::Scalar>& kernel) {
  using Scalar = typename DerivedX::Scalar;
  const Index n = labeled_inputs.rows();
  if (n < 1)
    throw std::invalid_argument("nw_estimate: need at least one labeled point");
  if (labels.size() != n)
    throw std::invalid_argument("nw_estimate: labels length does not match inputs");
  if (query.size() != labeled_inputs.cols())
    throw std::invalid_argument("nw_estimate: query dimension mismatch");

  Scalar numerator = 0;
  Scalar denominator = 0;
  for (Index i = 0; i < n; ++i) {
    const Scalar w = kernel_similarity(kernel, query, labeled_inputs.row(i));
    numerator += w * labels(i);
    denominator += w;
  }
  if (denominator < Scalar(kSimilarityUnderflow))
    throw EmptyNeighborhoodError(
        "nw_estimate: all kernel weights underflowed at the query point");
  return numerator / denominator;
}

/// Applies nw_estimate at every unlabeled point of the dataset. The result
/// carries lambda = NaN: kernel regression is not a regularized solve.
template <typename Scalar>
ScoreVector<Scalar> nw_batch(const Dataset<Scalar>& data,
                             const KernelSpec<Scalar>& kernel) {
  const Index n = data.n_labeled();
  const Index m = data.n_unlabeled();
  const auto labeled = data.inputs.topRows(n);

  ScoreVector<Scalar> scores;
  scores.values.resize(m);
  scores.lambda = std::numeric_limits<Scalar>::quiet_NaN();
  for (Index a = 0; a < m; ++a) {
    try {
      scores.values(a) =
          nw_estimate(labeled, data.labels, data.inputs.row(n + a), kernel);
    } catch (const EmptyNeighborhoodError& e) {
      throw EmptyNeighborhoodError(
          std::string(e.what()) + " (unlabeled index " + std::to_string(a) + ")", a);
    }
  }
  return scores;
}

}  // namespace gssl
