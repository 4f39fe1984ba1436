#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>

#include "wdecor/linmodel.hpp"
#include "wdecor/noise.hpp"
#include "wdecor/random.hpp"

namespace wdecor {

/// y_i = sum_l coefficients(l-1) * y_{i-l} + eps_i for i = 1..n.
/// initial_values(k) holds y_{-k} (so initial_values(0) is y_0); an empty
/// vector means all zeros.
struct ArSpec {
  Eigen::VectorXd coefficients;
  std::size_t n = 1;
  NoiseSpec noise;
  Eigen::VectorXd initial_values;

  Eigen::Index order() const noexcept { return coefficients.size(); }
  /// initial_values padded to length p.
  Eigen::VectorXd lags() const;
  void validate() const;
};

/// Magnitude above which a simulated series is declared divergent.
inline constexpr double kDivergenceBound = 1e150;

/// Deterministic recursion with the given innovations (length n).
Eigen::VectorXd simulate_ar(const ArSpec& spec, const Eigen::VectorXd& innovations);
Eigen::VectorXd simulate_ar(const ArSpec& spec, Rng& rng);
Eigen::VectorXd simulate_ar(const ArSpec& spec, std::uint64_t seed);

/// Row i is (y_{i-1}, ..., y_{i-p}) with response y_i for i = p..len-1, so
/// n = len - p. Throws SeriesTooShort unless len > p.
AdaptiveDataset ar_dataset(const Eigen::VectorXd& series, Eigen::Index order);

/// Lagged design over all n simulated values, reading lags before time 1
/// from spec.initial_values (zeros by default).
AdaptiveDataset ar_dataset(const ArSpec& spec, const Eigen::VectorXd& series);

}  // namespace wdecor
