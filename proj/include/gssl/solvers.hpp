#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "gssl/kernel_graph.hpp"
#include "gssl/types.hpp"

namespace gssl {

namespace detail {

/// A factorization pivot below this fraction of the largest one means the
/// system is treated as singular rather than solved into garbage.
inline constexpr double kPivotRatio = 1e-12;

inline std::string append_pivot_note(std::string what) {
  return what + " (pivot ratio below 1e-12)";
}

/// Symmetric solve: robust pivoted LDLT on the fast path, full-pivot LU when
/// the matrix is not numerically semi-definite. Both paths declare the
/// system singular on a tiny pivot ratio.
template <typename Scalar>
class SymmetricSolver {
public:
  SymmetricSolver(const Matrix<Scalar>& a, const std::string& context) {
    ldlt_.compute(a);
    const Vector<Scalar> d = ldlt_.vectorD();
    const Scalar dmax = d.size() > 0 ? d.cwiseAbs().maxCoeff() : Scalar(0);
    const bool semidefinite =
        ldlt_.info() == Eigen::Success && d.minCoeff() >= -Scalar(kPivotRatio) * dmax;
    if (semidefinite) {
      if (!(dmax > Scalar(0)) || d.cwiseAbs().minCoeff() <= Scalar(kPivotRatio) * dmax)
        throw SingularSystemError(append_pivot_note(context));
      return;
    }
    use_lu_ = true;
    lu_.compute(a);
    const Vector<Scalar> pivots = lu_.matrixLU().diagonal().cwiseAbs();
    const Scalar pmax = lu_.maxPivot();
    if (!(pmax > Scalar(0)) || pivots.minCoeff() <= Scalar(kPivotRatio) * pmax)
      throw SingularSystemError(append_pivot_note(context));
  }

  template <typename Derived>
  auto solve(const Eigen::MatrixBase<Derived>& rhs) const {
    using Result = Matrix<Scalar>;
    return use_lu_ ? Result(lu_.solve(rhs.derived()))
                   : Result(ldlt_.solve(rhs.derived()));
  }

private:
  Eigen::LDLT<Matrix<Scalar>> ldlt_;
  Eigen::FullPivLU<Matrix<Scalar>> lu_;
  bool use_lu_ = false;
};

/// Full-pivot LU inverse with the same singularity rule as SymmetricSolver.
template <typename Scalar>
Matrix<Scalar> invert_general(const Matrix<Scalar>& a, const std::string& context) {
  Eigen::FullPivLU<Matrix<Scalar>> lu(a);
  const Vector<Scalar> pivots = lu.matrixLU().diagonal().cwiseAbs();
  const Scalar pmax = a.size() > 0 ? lu.maxPivot() : Scalar(0);
  if (!(pmax > Scalar(0)) || pivots.minCoeff() <= Scalar(kPivotRatio) * pmax)
    throw SingularSystemError(append_pivot_note(context));
  return lu.inverse();
}

/// Unlabeled rows with no similarity path to any labeled point. Components
/// are taken over w22 edges above the underflow floor; a component whose
/// total coupling to the labeled block is itself at the floor makes
/// D22 - W22 singular. Returned indices are rows of the original ordering.
template <typename Scalar>
std::vector<Index> disconnected_unlabeled(const SimilarityGraph<Scalar>& graph) {
  const Index n = graph.n_labeled;
  const Index m = graph.n_unlabeled();
  std::vector<Index> parent(static_cast<std::size_t>(m));
  std::iota(parent.begin(), parent.end(), Index(0));
  auto find = [&](Index a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (Index a = 0; a < m; ++a)
    for (Index b = a + 1; b < m; ++b)
      if (graph.w(n + a, n + b) > Scalar(kSimilarityUnderflow))
        parent[find(a)] = find(b);

  std::vector<double> coupling(static_cast<std::size_t>(m), 0.0);
  for (Index a = 0; a < m; ++a)
    coupling[find(a)] += static_cast<double>(graph.w.row(n + a).head(n).sum());

  std::vector<Index> result;
  for (Index a = 0; a < m; ++a)
    if (coupling[find(a)] <= static_cast<double>(n) * kSimilarityUnderflow)
      result.push_back(n + a);
  return result;
}

template <typename Scalar>
[[noreturn]] void rethrow_with_disconnected(const SingularSystemError& error,
                                            const SimilarityGraph<Scalar>& graph) {
  std::vector<Index> bad = disconnected_unlabeled(graph);
  std::string what = error.what();
  if (!bad.empty()) {
    what += "; unlabeled rows with no path to a labeled point:";
    for (Index idx : bad) what += " " + std::to_string(idx);
  }
  throw SingularSystemError(what, std::move(bad));
}

template <typename Scalar>
void check_labels(const SimilarityGraph<Scalar>& graph, Index label_count) {
  if (label_count != graph.n_labeled)
    throw std::invalid_argument("labels length does not match the labeled block");
}

}  // namespace detail

/// Hard-criterion scores: the harmonic extension of the labels, solving
/// (D22 - W22) f = W21 y. Scores lie within [min y, max y].
template <typename Scalar, typename Derived>
ScoreVector<Scalar> solve_hard(const SimilarityGraph<Scalar>& graph,
                               const Eigen::MatrixBase<Derived>& labels) {
  detail::check_labels(graph, labels.size());
  const Vector<Scalar> y = labels.derived();
  const GraphBlocks<Scalar> blocks = partition(graph);

  Matrix<Scalar> a = -blocks.w22;
  a.diagonal() += blocks.d2;
  const Vector<Scalar> rhs = blocks.w21 * y;

  try {
    detail::SymmetricSolver<Scalar> solver(a, "solve_hard: D22 - W22 is singular");
    Vector<Scalar> f = solver.solve(rhs);
    // One refinement pass; the hard solve carries a 1e-10 residual contract.
    f += solver.solve(rhs - a * f);
    return {std::move(f), Scalar(0)};
  } catch (const SingularSystemError& e) {
    detail::rethrow_with_disconnected(e, graph);
  }
}

/// Iterative hard solver: repeats f_a <- sum_i w_ai f_i / d_a over the
/// unlabeled entries (labeled entries pinned to y, start at 0) until the
/// sup-norm change drops below tolerance.
template <typename Scalar, typename Derived>
ScoreVector<Scalar> solve_hard_fixed_point(const SimilarityGraph<Scalar>& graph,
                                           const Eigen::MatrixBase<Derived>& labels,
                                           const FixedPointOptions& opts = {}) {
  if (!(opts.tolerance > 0))
    throw std::invalid_argument("solve_hard_fixed_point: tolerance must be positive");
  if (opts.max_iterations < 1)
    throw std::invalid_argument("solve_hard_fixed_point: max_iterations must be >= 1");
  detail::check_labels(graph, labels.size());
  const GraphBlocks<Scalar> blocks = partition(graph);

  if (blocks.d2.minCoeff() <= Scalar(kSimilarityUnderflow))
    detail::rethrow_with_disconnected(
        SingularSystemError("solve_hard_fixed_point: zero-degree unlabeled node"),
        graph);

  const Vector<Scalar> pinned = blocks.w21 * labels.derived();
  Vector<Scalar> f = Vector<Scalar>::Zero(blocks.d2.size());
  Scalar change = std::numeric_limits<Scalar>::infinity();
  for (std::size_t iteration = 0; iteration < opts.max_iterations; ++iteration) {
    Vector<Scalar> next = (pinned + blocks.w22 * f).cwiseQuotient(blocks.d2);
    change = (next - f).template lpNorm<Eigen::Infinity>();
    f = std::move(next);
    if (change < Scalar(opts.tolerance)) return {std::move(f), Scalar(0)};
  }
  std::vector<double> last(f.size());
  for (Index i = 0; i < f.size(); ++i)
    last[static_cast<std::size_t>(i)] = static_cast<double>(f(i));
  std::ostringstream what;
  what << "solve_hard_fixed_point: no convergence after " << opts.max_iterations
       << " iterations (last change " << static_cast<double>(change) << ")";
  throw NonConvergenceError(what.str(), std::move(last),
                            static_cast<double>(change), opts.max_iterations);
}

/// Mean-collapse limit of the soft criterion on a connected graph: every
/// unlabeled score equals the label mean. The caller asserts connectivity.
template <typename Derived>
ScoreVector<typename Derived::Scalar> solve_soft_infinite(
    const Eigen::MatrixBase<Derived>& labels, Index n_unlabeled) {
  using Scalar = typename Derived::Scalar;
  if (labels.size() < 1)
    throw std::invalid_argument("solve_soft_infinite: labels must be non-empty");
  if (n_unlabeled < 1)
    throw std::invalid_argument("solve_soft_infinite: need at least one unlabeled point");
  return {Vector<Scalar>::Constant(n_unlabeled, labels.mean()),
          std::numeric_limits<Scalar>::infinity()};
}

/// Soft-criterion scores on the unlabeled block,
///   f = (D22 - W22 - t W21 (I + t D11 - t W11)^-1 W12)^-1
///         W21 (I + t D11 - t W11)^-1 y      with t = lambda.
/// lambda = 0 dispatches to solve_hard (algebraically identical, one
/// inversion cheaper).
template <typename Scalar, typename Derived>
ScoreVector<Scalar> solve_soft(const SimilarityGraph<Scalar>& graph,
                               const Eigen::MatrixBase<Derived>& labels,
                               std::type_identity_t<Scalar> lambda) {
  if (!(lambda >= Scalar(0)) || std::isinf(lambda))
    throw std::invalid_argument(
        "solve_soft: lambda must be finite and nonnegative (use solve_soft_infinite "
        "for the limit)");
  if (lambda == Scalar(0)) return solve_hard(graph, labels);
  detail::check_labels(graph, labels.size());
  const Vector<Scalar> y = labels.derived();
  const GraphBlocks<Scalar> blocks = partition(graph);
  const Index n = graph.n_labeled;

  Matrix<Scalar> inner = -lambda * blocks.w11;
  inner.diagonal() += Vector<Scalar>::Ones(n) + lambda * blocks.d1;
  detail::SymmetricSolver<Scalar> inner_solver(
      inner, "solve_soft: I + lambda (D11 - W11) is singular");
  const Matrix<Scalar> t = inner_solver.solve(blocks.w12);
  const Vector<Scalar> u = inner_solver.solve(y);

  Matrix<Scalar> outer = -blocks.w22 - lambda * (blocks.w21 * t);
  outer.diagonal() += blocks.d2;
  detail::SymmetricSolver<Scalar> outer_solver(
      outer, "solve_soft: Schur complement is singular");
  return {outer_solver.solve(blocks.w21 * u), lambda};
}

/// Stationarity system of the matrix-form soft criterion, solved whole:
/// (V + lambda L) f = (y, 0). Returns the full length-(n+m) vector; the
/// unlabeled tail is the cross-check target for solve_soft.
template <typename Scalar, typename Derived>
Vector<Scalar> solve_soft_oracle(const SimilarityGraph<Scalar>& graph,
                                 const Eigen::MatrixBase<Derived>& labels,
                                 std::type_identity_t<Scalar> lambda) {
  if (!(lambda > Scalar(0)) || std::isinf(lambda))
    throw std::invalid_argument("solve_soft_oracle: lambda must be finite and positive");
  detail::check_labels(graph, labels.size());
  const Index n = graph.n_labeled;

  Matrix<Scalar> a = lambda * laplacian(graph);
  a.diagonal().head(n) += Vector<Scalar>::Ones(n);
  Vector<Scalar> rhs = Vector<Scalar>::Zero(graph.n_total());
  rhs.head(n) = labels.derived();
  detail::SymmetricSolver<Scalar> solver(a, "solve_soft_oracle: V + lambda L is singular");
  return solver.solve(rhs);
}

/// Scores under an arbitrary lambda: 0 means the hard criterion, a positive
/// finite value the soft criterion, INFINITY the mean collapse.
template <typename Scalar, typename Derived>
ScoreVector<Scalar> solve(const SimilarityGraph<Scalar>& graph,
                          const Eigen::MatrixBase<Derived>& labels,
                          std::type_identity_t<Scalar> lambda) {
  if (std::isinf(lambda) && lambda > Scalar(0))
    return solve_soft_infinite(labels, graph.n_unlabeled());
  return solve_soft(graph, labels, lambda);
}

/// Inverse of [[a11, a12], [a21, a22]] assembled from the four-block
/// Schur-complement formula:
///   top-left      (a11 - a12 a22^-1 a21)^-1
///   top-right    -(a11 - a12 a22^-1 a21)^-1 a12 a22^-1
///   bottom-left  -(a22 - a21 a11^-1 a12)^-1 a21 a11^-1
///   bottom-right  (a22 - a21 a11^-1 a12)^-1
template <typename D11, typename D12, typename D21, typename D22>
Matrix<typename D11::Scalar> block_inverse(const Eigen::MatrixBase<D11>& a11_in,
                                           const Eigen::MatrixBase<D12>& a12_in,
                                           const Eigen::MatrixBase<D21>& a21_in,
                                           const Eigen::MatrixBase<D22>& a22_in) {
  using Scalar = typename D11::Scalar;
  const Matrix<Scalar> a11 = a11_in.derived();
  const Matrix<Scalar> a12 = a12_in.derived();
  const Matrix<Scalar> a21 = a21_in.derived();
  const Matrix<Scalar> a22 = a22_in.derived();
  const Index r = a11.rows();
  const Index s = a22.rows();
  if (a11.cols() != r || a22.cols() != s)
    throw std::invalid_argument("block_inverse: diagonal blocks must be square");
  if (a12.rows() != r || a12.cols() != s || a21.rows() != s || a21.cols() != r)
    throw std::invalid_argument("block_inverse: off-diagonal block shapes do not match");

  const Matrix<Scalar> inv11 = detail::invert_general(a11, "block_inverse: a11 is singular");
  const Matrix<Scalar> inv22 = detail::invert_general(a22, "block_inverse: a22 is singular");
  const Matrix<Scalar> schur11 = a11 - a12 * inv22 * a21;
  const Matrix<Scalar> schur22 = a22 - a21 * inv11 * a12;
  const Matrix<Scalar> inv_schur11 =
      detail::invert_general(schur11, "block_inverse: Schur complement of a22 is singular");
  const Matrix<Scalar> inv_schur22 =
      detail::invert_general(schur22, "block_inverse: Schur complement of a11 is singular");

  Matrix<Scalar> out(r + s, r + s);
  out.topLeftCorner(r, r) = inv_schur11;
  out.topRightCorner(r, s) = -inv_schur11 * a12 * inv22;
  out.bottomLeftCorner(s, r) = -inv_schur22 * a21 * inv11;
  out.bottomRightCorner(s, s) = inv_schur22;
  return out;
}

}  // namespace gssl
