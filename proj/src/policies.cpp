#include "wdecor/policies.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "wdecor/error.hpp"

namespace wdecor {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::ECB: return "ECB";
    case PolicyKind::UCB: return "UCB";
    case PolicyKind::TS: return "TS";
    case PolicyKind::RoundRobin: return "RR";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  if (name == "ECB") return PolicyKind::ECB;
  if (name == "UCB") return PolicyKind::UCB;
  if (name == "TS") return PolicyKind::TS;
  if (name == "RR") return PolicyKind::RoundRobin;
  return std::nullopt;
}

void PolicySpec::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in [0, 1]");
  }
  if (!(prior_var > 0.0) || !(assumed_noise_var > 0.0)) {
    throw Error(ErrorCode::NonPositiveVariance, "prior_var and assumed_noise_var must be positive");
  }
  if (!std::isfinite(prior_mean)) throw Error(ErrorCode::InvalidArgument, "prior_mean must be finite");
  if (!(ucb.epsilon > 0.0) || !(ucb.beta > 0.0) || !(ucb.delta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "UCB parameters must be positive");
  }
}

void BanditEnv::validate() const {
  if (arm_means.size() < 1) throw Error(ErrorCode::InvalidArgument, "bandit needs at least one arm");
  if (!arm_means.allFinite()) throw Error(ErrorCode::NonFiniteInput, "arm means must be finite");
  if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 1");
}

Posterior posterior_update(double mean, double var, double y, double noise_var) {
  if (!(var > 0.0) || !(noise_var > 0.0)) {
    throw Error(ErrorCode::NonPositiveVariance, "posterior_update needs var > 0 and noise_var > 0");
  }
  Posterior post;
  post.var = 1.0 / (1.0 / var + 1.0 / noise_var);
  post.mean = post.var * (mean / var + y / noise_var);
  return post;
}

PolicyState::PolicyState(const PolicySpec& spec, std::size_t arms)
    : spec_(spec),
      posteriors_(arms, Posterior{spec.prior_mean, spec.prior_var}),
      counts_(arms, 0),
      reward_sums_(arms, 0.0) {
  spec_.validate();
  if (arms == 0) throw Error(ErrorCode::InvalidArgument, "policy needs at least one arm");
}

PolicyState PolicyState::with_posteriors(const PolicySpec& spec, std::vector<Posterior> posteriors) {
  PolicyState state(spec, posteriors.size());
  state.posteriors_ = std::move(posteriors);
  return state;
}

void PolicyState::observe(std::size_t arm, double reward) {
  if (arm >= counts_.size()) throw Error(ErrorCode::DimensionMismatch, "arm index out of range");
  auto& post = posteriors_[arm];
  post = posterior_update(post.mean, post.var, reward, spec_.assumed_noise_var);
  ++counts_[arm];
  reward_sums_[arm] += reward;
}

namespace {

template <typename Score>
std::size_t argmax(std::size_t arms, Score&& score) {
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < arms; ++a) {
    const double value = score(a);
    if (value > best_value) {
      best_value = value;
      best = a;
    }
  }
  return best;
}

double lil_ucb_score(const PolicyState& state, std::size_t arm) {
  const auto& u = state.spec().ucb;
  const double n = static_cast<double>(state.counts()[arm]);
  const double mean = state.reward_sums()[arm] / n;
  const double log_term = std::log(std::log((1.0 + u.epsilon) * n + 2.0) / u.delta);
  const double bonus =
      (1.0 + u.beta) *
      std::sqrt(2.0 * state.spec().assumed_noise_var * (1.0 + u.epsilon) * log_term / n);
  return mean + bonus;
}

}  // namespace

std::size_t select_arm(const PolicyState& state, std::size_t step, Rng& rng) {
  const std::size_t arms = state.arms();
  const auto& posteriors = state.posteriors();
  switch (state.spec().kind) {
    case PolicyKind::ECB: {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      if (unit(rng) < state.spec().epsilon) {
        return std::uniform_int_distribution<std::size_t>(0, arms - 1)(rng);
      }
      return argmax(arms, [&](std::size_t a) { return posteriors[a].mean; });
    }
    case PolicyKind::TS: {
      std::normal_distribution<double> standard(0.0, 1.0);
      return argmax(arms, [&](std::size_t a) {
        return posteriors[a].mean + std::sqrt(posteriors[a].var) * standard(rng);
      });
    }
    case PolicyKind::UCB: {
      for (std::size_t a = 0; a < arms; ++a) {
        if (state.counts()[a] == 0) return a;
      }
      return argmax(arms, [&](std::size_t a) { return lil_ucb_score(state, a); });
    }
    case PolicyKind::RoundRobin:
      return step % arms;
  }
  return 0;
}

BanditTrace run_bandit(const BanditEnv& env, const PolicySpec& policy, Rng& rng) {
  env.validate();
  const std::size_t arms = env.arms();
  PolicyState state(policy, arms);

  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(env.horizon),
                                               static_cast<Eigen::Index>(arms));
  Eigen::VectorXd y(static_cast<Eigen::Index>(env.horizon));
  std::vector<std::size_t> per_step(env.horizon);

  for (std::size_t i = 0; i < env.horizon; ++i) {
    const std::size_t arm = select_arm(state, i, rng);
    const double reward = env.arm_means(static_cast<Eigen::Index>(arm)) + env.noise.sample(rng);
    state.observe(arm, reward);
    rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(arm)) = 1.0;
    y(static_cast<Eigen::Index>(i)) = reward;
    per_step[i] = arm;
  }
  return BanditTrace{AdaptiveDataset(std::move(rows), std::move(y)), state.counts(),
                     std::move(per_step)};
}

BanditTrace run_bandit(const BanditEnv& env, const PolicySpec& policy, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return run_bandit(env, policy, rng);
}

double exploration_rate(const PolicySpec& policy, std::size_t arms) {
  if (policy.kind != PolicyKind::ECB) {
    throw Error(ErrorCode::Unsupported,
                std::string("no closed-form exploration bound for ") + std::string(to_string(policy.kind)));
  }
  if (arms == 0) throw Error(ErrorCode::InvalidArgument, "arms must be >= 1");
  return policy.epsilon / static_cast<double>(arms);
}

}  // namespace wdecor
