#pragma once

#include <variant>

#include "wdecor/random.hpp"

namespace wdecor {

struct UniformNoise {
  double low = -1.0;
  double high = 1.0;
};

struct GaussianNoise {
  double sigma = 1.0;
};

/// Mean-zero additive noise. Uniform noise must be symmetric about zero.
class NoiseSpec {
 public:
  NoiseSpec() = default;
  NoiseSpec(UniformNoise u);  // NOLINT(google-explicit-constructor)
  NoiseSpec(GaussianNoise g);  // NOLINT(google-explicit-constructor)

  double variance() const;
  double sample(Rng& rng) const;

  const std::variant<UniformNoise, GaussianNoise>& kind() const noexcept { return kind_; }

 private:
  std::variant<UniformNoise, GaussianNoise> kind_ = UniformNoise{};
};

}  // namespace wdecor
