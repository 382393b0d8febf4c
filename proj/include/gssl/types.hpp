#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gssl {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

/// Similarities at or below this value are treated as numerically absent:
/// Gaussian weights are analytically positive but underflow to zero in
/// floating point for distant points at small bandwidth.
inline constexpr double kSimilarityUnderflow = 1e-300;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// A linear system whose factorization reported a pivot below the
/// singularity threshold. When the failure is traceable to unlabeled nodes
/// with no similarity path to any labeled node, their row indices in the
/// original point ordering are listed.
class SingularSystemError : public std::runtime_error {
public:
  explicit SingularSystemError(const std::string& what,
                               std::vector<Index> disconnected = {})
      : std::runtime_error(what), disconnected_(std::move(disconnected)) {}

  const std::vector<Index>& disconnected_indices() const { return disconnected_; }

private:
  std::vector<Index> disconnected_;
};

/// Fixed-point iteration exhausted its iteration budget before the sup-norm
/// change dropped below tolerance. Carries the last iterate so callers can
/// inspect or resume.
class NonConvergenceError : public std::runtime_error {
public:
  NonConvergenceError(const std::string& what, std::vector<double> last_iterate,
                      double final_change, std::size_t iterations)
      : std::runtime_error(what),
        last_iterate_(std::move(last_iterate)),
        final_change_(final_change),
        iterations_(iterations) {}

  const std::vector<double>& last_iterate() const { return last_iterate_; }
  double final_change() const { return final_change_; }
  std::size_t iterations() const { return iterations_; }

private:
  std::vector<double> last_iterate_;
  double final_change_;
  std::size_t iterations_;
};

/// All kernel weights at a query point underflowed to zero, so a weighted
/// average is undefined there. `index` is the offending unlabeled row for
/// batch estimation, or -1 for a single-point query.
class EmptyNeighborhoodError : public std::runtime_error {
public:
  explicit EmptyNeighborhoodError(const std::string& what, Index index = -1)
      : std::runtime_error(what), index_(index) {}

  Index index() const { return index_; }

private:
  Index index_;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class KernelFamily { GaussianRBF };

/// Kernel family plus bandwidth h. Similarities are K((x_i - x_j)/h); for the
/// Gaussian RBF family this is exp(-||x_i - x_j||^2 / h^2).
template <typename Scalar>
struct KernelSpec {
  KernelFamily family = KernelFamily::GaussianRBF;
  Scalar bandwidth;

  explicit KernelSpec(Scalar bandwidth_in,
                      KernelFamily family_in = KernelFamily::GaussianRBF)
      : family(family_in), bandwidth(bandwidth_in) {
    if (!(bandwidth > Scalar(0)))
      throw std::invalid_argument("KernelSpec: bandwidth must be positive");
  }
};

/// Point data with the first n rows labeled. Labels are real-valued; binary
/// problems encode classes as 0.0 / 1.0.
template <typename Scalar>
struct Dataset {
  Matrix<Scalar> inputs;  // (n + m) x d
  Vector<Scalar> labels;  // n

  Dataset(Matrix<Scalar> inputs_in, Vector<Scalar> labels_in)
      : inputs(std::move(inputs_in)), labels(std::move(labels_in)) {
    if (labels.size() < 1)
      throw std::invalid_argument("Dataset: need at least one labeled point");
    if (inputs.rows() <= labels.size())
      throw std::invalid_argument("Dataset: need at least one unlabeled point");
    if (!inputs.allFinite())
      throw std::invalid_argument("Dataset: inputs contain non-finite entries");
    if (!labels.allFinite())
      throw std::invalid_argument("Dataset: labels contain non-finite entries");
  }

  Index n_labeled() const { return labels.size(); }
  Index n_unlabeled() const { return inputs.rows() - labels.size(); }
  Index dimension() const { return inputs.cols(); }
};

/// Symmetric similarity matrix over all points, its row-sum degrees, and the
/// labeled/unlabeled split position. Built by build_graph; symmetry is exact
/// because each pair is evaluated once.
template <typename Scalar>
struct SimilarityGraph {
  Matrix<Scalar> w;        // (n + m) x (n + m), entries in [0, 1]
  Vector<Scalar> degrees;  // d_i = sum_j w_ij
  Index n_labeled = 0;

  Index n_total() const { return w.rows(); }
  Index n_unlabeled() const { return w.rows() - n_labeled; }
};

/// Estimated scores on the unlabeled points, tagged with the regularization
/// weight that produced them (0 = hard criterion, INFINITY = mean collapse,
/// NaN = not a regularized solve, e.g. kernel regression output).
template <typename Scalar>
struct ScoreVector {
  Vector<Scalar> values;
  Scalar lambda = Scalar(0);
};

/// Stopping rule for the fixed-point solver.
struct FixedPointOptions {
  double tolerance = 1e-10;          // sup-norm change threshold
  std::size_t max_iterations = 100000;
};

}  // namespace gssl
