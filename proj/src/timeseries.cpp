#include "wdecor/timeseries.hpp"

#include <cmath>
#include <string>

#include "wdecor/error.hpp"

namespace wdecor {

Eigen::VectorXd ArSpec::lags() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(order());
  if (initial_values.size() > 0) out = initial_values;
  return out;
}

void ArSpec::validate() const {
  if (order() < 1) throw Error(ErrorCode::InvalidArgument, "AR order must be >= 1");
  if (!coefficients.allFinite()) throw Error(ErrorCode::NonFiniteInput, "AR coefficients");
  if (n <= static_cast<std::size_t>(order())) {
    throw Error(ErrorCode::InvalidArgument, "AR length n must exceed the order p");
  }
  if (initial_values.size() != 0 && initial_values.size() != order()) {
    throw Error(ErrorCode::DimensionMismatch, "initial_values must have length p");
  }
  if (!initial_values.allFinite()) throw Error(ErrorCode::NonFiniteInput, "AR initial values");
}

Eigen::VectorXd simulate_ar(const ArSpec& spec, const Eigen::VectorXd& innovations) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto p = spec.order();
  if (innovations.size() != n) throw Error(ErrorCode::DimensionMismatch, "need n innovations");

  // history(k) = y_{k - p}; the first p entries are y_{1-p}..y_0.
  const Eigen::VectorXd init = spec.lags();
  Eigen::VectorXd history(n + p);
  for (Eigen::Index k = 0; k < p; ++k) history(p - 1 - k) = init(k);

  for (Eigen::Index i = 0; i < n; ++i) {
    double value = innovations(i);
    for (Eigen::Index l = 1; l <= p; ++l) value += spec.coefficients(l - 1) * history(p + i - l);
    if (!std::isfinite(value) || std::abs(value) > kDivergenceBound) {
      throw Error(ErrorCode::NonFiniteOutput,
                  "series diverged at step " + std::to_string(i + 1));
    }
    history(p + i) = value;
  }
  return history.tail(n);
}

Eigen::VectorXd simulate_ar(const ArSpec& spec, Rng& rng) {
  Eigen::VectorXd innovations(static_cast<Eigen::Index>(spec.n));
  for (Eigen::Index i = 0; i < innovations.size(); ++i) innovations(i) = spec.noise.sample(rng);
  return simulate_ar(spec, innovations);
}

Eigen::VectorXd simulate_ar(const ArSpec& spec, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return simulate_ar(spec, rng);
}

AdaptiveDataset ar_dataset(const Eigen::VectorXd& series, Eigen::Index order) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "AR order must be >= 1");
  if (series.size() <= order) {
    throw Error(ErrorCode::SeriesTooShort, "series of length " + std::to_string(series.size()) +
                                               " cannot support order " + std::to_string(order));
  }
  const Eigen::Index rows = series.size() - order;
  Eigen::MatrixXd X(rows, order);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index i = r + order;
    for (Eigen::Index l = 1; l <= order; ++l) X(r, l - 1) = series(i - l);
  }
  return AdaptiveDataset(std::move(X), series.tail(rows));
}

AdaptiveDataset ar_dataset(const ArSpec& spec, const Eigen::VectorXd& series) {
  const auto p = spec.order();
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "AR order must be >= 1");
  if (series.size() < 1) throw Error(ErrorCode::SeriesTooShort, "empty series");
  const Eigen::VectorXd init = spec.lags();
  if (init.size() != p) throw Error(ErrorCode::DimensionMismatch, "initial_values must have length p");

  Eigen::VectorXd padded(series.size() + p);
  for (Eigen::Index k = 0; k < p; ++k) padded(p - 1 - k) = init(k);
  padded.tail(series.size()) = series;
  return ar_dataset(padded, p);
}

}  // namespace wdecor
