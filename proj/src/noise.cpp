#include "wdecor/noise.hpp"

#include <cmath>
#include <random>

#include "wdecor/error.hpp"

namespace wdecor {

NoiseSpec::NoiseSpec(UniformNoise u) : kind_(u) {
  if (!std::isfinite(u.low) || !std::isfinite(u.high) || u.low > u.high) {
    throw Error(ErrorCode::InvalidArgument, "uniform noise needs finite low <= high");
  }
  if (std::abs(u.low + u.high) > 1e-12 * (1.0 + std::abs(u.high))) {
    throw Error(ErrorCode::InvalidArgument, "uniform noise must have mean zero (low = -high)");
  }
}

NoiseSpec::NoiseSpec(GaussianNoise g) : kind_(g) {
  if (!(g.sigma >= 0.0) || !std::isfinite(g.sigma)) {
    throw Error(ErrorCode::InvalidArgument, "gaussian noise needs finite sigma >= 0");
  }
}

double NoiseSpec::variance() const {
  if (const auto* u = std::get_if<UniformNoise>(&kind_)) {
    const double width = u->high - u->low;
    return width * width / 12.0;
  }
  const double s = std::get<GaussianNoise>(kind_).sigma;
  return s * s;
}

double NoiseSpec::sample(Rng& rng) const {
  if (const auto* u = std::get_if<UniformNoise>(&kind_)) {
    if (u->low == u->high) return u->low;
    return std::uniform_real_distribution<double>(u->low, u->high)(rng);
  }
  const double s = std::get<GaussianNoise>(kind_).sigma;
  if (s == 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, s)(rng);
}

}  // namespace wdecor
