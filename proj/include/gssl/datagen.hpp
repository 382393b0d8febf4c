#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "gssl/types.hpp"

namespace gssl {

inline constexpr Index kSimDimension = 5;

enum class SimModel : int { Model1 = 1, Model2 = 2 };

/// Root of the reproducibility contract: every random draw in a simulation
/// comes from a substream derived as (master_seed, replication, role).
struct RngSeed {
  std::uint64_t master_seed = 0;
};

enum class StreamRole : std::uint64_t { Inputs = 1, Labels = 2 };

/// splitmix64 finalizer; chained applications with xor-folded tags derive
/// substream seeds that are independent of evaluation order.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_stream_seed(RngSeed seed, std::uint64_t replication,
                                        StreamRole role) {
  std::uint64_t h = mix64(seed.master_seed);
  h = mix64(h ^ replication);
  h = mix64(h ^ static_cast<std::uint64_t>(role));
  return h;
}

inline std::mt19937_64 make_stream(RngSeed seed, std::uint64_t replication,
                                   StreamRole role) {
  return std::mt19937_64(derive_stream_seed(seed, replication, role));
}

/// Covariance of the simulation inputs: 0.1 on the diagonal, 0.05 off it.
inline const Eigen::Matrix<double, 5, 5>& truncated_mvn_covariance() {
  static const Eigen::Matrix<double, 5, 5> cov = [] {
    Eigen::Matrix<double, 5, 5> c = Eigen::Matrix<double, 5, 5>::Constant(0.05);
    c.diagonal().setConstant(0.1);
    return c;
  }();
  return cov;
}

/// Draws `count` rows from the 5-dimensional normal with mean (0.5,...,0.5)
/// and the covariance above, then zeroes every component that falls outside
/// [0,1]. All outputs lie in [0,1]^5.
inline MatrixXd sample_truncated_mvn(std::mt19937_64& rng, Index count) {
  if (count < 1)
    throw std::invalid_argument("sample_truncated_mvn: count must be positive");
  static const Eigen::Matrix<double, 5, 5> chol =
      truncated_mvn_covariance().llt().matrixL();

  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Matrix<double, 5, 1> z;
  MatrixXd out(count, kSimDimension);
  for (Index i = 0; i < count; ++i) {
    for (Index k = 0; k < kSimDimension; ++k) z(k) = gauss(rng);
    const Eigen::Matrix<double, 5, 1> x =
        Eigen::Matrix<double, 5, 1>::Constant(0.5) + chol * z;
    for (Index k = 0; k < kSimDimension; ++k)
      out(i, k) = (x(k) >= 0.0 && x(k) <= 1.0) ? x(k) : 0.0;
  }
  return out;
}

template <typename Derived>
double logit_model1(const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != kSimDimension)
    throw std::invalid_argument("logit_model1: expected a length-5 input");
  return -1.35 + 2.0 * x(0) - x(1) + x(2) - x(3) + 2.0 * x(4);
}

/// Model 1 plus the interactions x1*x3 + x2*x4.
template <typename Derived>
double logit_model2(const Eigen::MatrixBase<Derived>& x) {
  return logit_model1(x) + x(0) * x(2) + x(1) * x(3);
}

template <typename Derived>
double model_logit(SimModel model, const Eigen::MatrixBase<Derived>& x) {
  return model == SimModel::Model1 ? logit_model1(x) : logit_model2(x);
}

/// Logistic transform of the model's logit; strictly inside (0,1).
template <typename Derived>
double true_probability(SimModel model, const Eigen::MatrixBase<Derived>& x) {
  return 1.0 / (1.0 + std::exp(-model_logit(model, x)));
}

/// Independent Bernoulli draws, one per probability.
inline VectorXd sample_labels(std::mt19937_64& rng, const VectorXd& probs) {
  for (Index i = 0; i < probs.size(); ++i)
    if (!(probs(i) > 0.0 && probs(i) < 1.0))
      throw std::invalid_argument("sample_labels: probabilities must lie in (0,1)");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  VectorXd out(probs.size());
  for (Index i = 0; i < probs.size(); ++i)
    out(i) = unif(rng) < probs(i) ? 1.0 : 0.0;
  return out;
}

/// Bandwidth schedule h_n = (ln n / n)^(1/5). Decreasing in n, while
/// n * h_n^5 = ln n still grows.
inline double bandwidth(Index n) {
  if (n < 2) throw std::invalid_argument("bandwidth: need n >= 2");
  const double nn = static_cast<double>(n);
  return std::pow(std::log(nn) / nn, 0.2);
}

}  // namespace gssl
