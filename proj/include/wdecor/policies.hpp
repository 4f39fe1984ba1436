#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "wdecor/linmodel.hpp"
#include "wdecor/noise.hpp"
#include "wdecor/random.hpp"

namespace wdecor {

/// ECB: epsilon-greedy on Gaussian posterior means. UCB: lil'UCB-style score.
/// TS: Thompson sampling from the Gaussian posterior. RoundRobin cycles the
/// arms deterministically and serves as a fixture with known counts.
enum class PolicyKind { ECB, UCB, TS, RoundRobin };

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view name);

struct UcbParams {
  double epsilon = 0.01;
  double beta = 0.5;
  double delta = 0.1;
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::ECB;
  double epsilon = 0.1;
  double prior_mean = 0.3;
  double prior_var = 0.33;
  double assumed_noise_var = 1.0 / 3.0;
  UcbParams ucb;

  /// Throws InvalidArgument / NonPositiveVariance on a bad spec.
  void validate() const;
};

struct BanditEnv {
  Eigen::VectorXd arm_means;
  NoiseSpec noise;
  std::size_t horizon = 1;

  std::size_t arms() const noexcept { return static_cast<std::size_t>(arm_means.size()); }
  void validate() const;
};

/// Rows of `dataset` are basis vectors e_a.
struct BanditTrace {
  AdaptiveDataset dataset;
  std::vector<std::size_t> arm_counts;
  std::vector<std::size_t> per_step_arms;
};

struct Posterior {
  double mean = 0.0;
  double var = 0.0;
};

/// Gaussian-conjugate update of one arm's belief after observing y.
Posterior posterior_update(double mean, double var, double y, double noise_var);

class PolicyState {
 public:
  PolicyState(const PolicySpec& spec, std::size_t arms);

  /// State with explicit per-arm posteriors (counts start at zero).
  static PolicyState with_posteriors(const PolicySpec& spec, std::vector<Posterior> posteriors);

  void observe(std::size_t arm, double reward);

  const PolicySpec& spec() const noexcept { return spec_; }
  std::size_t arms() const noexcept { return counts_.size(); }
  const std::vector<Posterior>& posteriors() const noexcept { return posteriors_; }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }
  const std::vector<double>& reward_sums() const noexcept { return reward_sums_; }

 private:
  PolicySpec spec_;
  std::vector<Posterior> posteriors_;
  std::vector<std::size_t> counts_;
  std::vector<double> reward_sums_;
};

/// Returns an arm in [0, arms). Ties go to the lowest index; UCB pulls every
/// unpulled arm before any pulled one. `step` is the 0-based time index.
std::size_t select_arm(const PolicyState& state, std::size_t step, Rng& rng);

/// Simulates `env.horizon` rounds of select -> observe -> update.
BanditTrace run_bandit(const BanditEnv& env, const PolicySpec& policy, std::uint64_t seed);
BanditTrace run_bandit(const BanditEnv& env, const PolicySpec& policy, Rng& rng);

/// Uniform per-step exploration lower bound epsilon / arms for ECB.
/// Throws Unsupported for policies without a closed-form bound.
double exploration_rate(const PolicySpec& policy, std::size_t arms);

}  // namespace wdecor
