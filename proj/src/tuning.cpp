#include "wdecor/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wdecor/error.hpp"
#include "wdecor/parallel.hpp"

namespace wdecor {

std::string_view to_string(LambdaRuleKind kind) {
  switch (kind) {
    case LambdaRuleKind::Percentile: return "percentile";
    case LambdaRuleKind::Exploration: return "exploration";
    case LambdaRuleKind::Fixed: return "fixed";
  }
  return "?";
}

std::optional<LambdaRuleKind> parse_lambda_rule_kind(std::string_view name) {
  if (name == "percentile") return LambdaRuleKind::Percentile;
  if (name == "exploration") return LambdaRuleKind::Exploration;
  if (name == "fixed") return LambdaRuleKind::Fixed;
  return std::nullopt;
}

void LambdaRule::validate() const {
  if (!(percentile > 0.0 && percentile < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "percentile must lie in (0, 1)");
  }
  if (pilot_runs < 1) throw Error(ErrorCode::InvalidArgument, "pilot_runs must be >= 1");
  if (kind == LambdaRuleKind::Fixed && !(fixed_value > 0.0 && std::isfinite(fixed_value))) {
    throw Error(ErrorCode::InvalidArgument, "fixed lambda must be positive");
  }
}

double lower_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::EmptyInput, "quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile level outside [0, 1]");
  const auto index = static_cast<std::size_t>(std::floor(q * static_cast<double>(sorted.size() - 1)));
  return sorted[index];
}

LambdaSelection select_lambda_detailed(const LambdaRule& rule, const Process& process,
                                       std::uint64_t seed, unsigned workers) {
  rule.validate();
  validate(process);

  LambdaSelection out;
  double raw = 1.0;
  const auto n = static_cast<double>(horizon(process));
  switch (rule.kind) {
    case LambdaRuleKind::Fixed:
      raw = rule.fixed_value;
      break;
    case LambdaRuleKind::Exploration: {
      const auto* bandit = std::get_if<BanditProcess>(&process);
      if (bandit == nullptr) {
        throw Error(ErrorCode::Unsupported, "exploration rule needs an epsilon-greedy bandit");
      }
      const double mu = exploration_rate(bandit->policy, bandit->env.arms());
      const double denom = std::log(static_cast<double>(bandit->env.arms()) * std::log(n));
      if (!(denom > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "horizon too short for the exploration rule");
      }
      raw = n * mu / denom;
      break;
    }
    case LambdaRuleKind::Percentile: {
      out.pilot_lambda_mins.resize(rule.pilot_runs);
      parallel_for(rule.pilot_runs, workers, [&](std::size_t k) {
        Rng rng = make_rng(seed ^ static_cast<std::uint64_t>(k), Stream::Pilot);
        out.pilot_lambda_mins[k] = realized_lambda_min(simulate(process, rng));
      });
      std::sort(out.pilot_lambda_mins.begin(), out.pilot_lambda_mins.end());
      raw = lower_quantile(out.pilot_lambda_mins, rule.percentile);
      if (rule.loglog_discount) raw /= std::max(1.0, std::log(std::log(n)));
      break;
    }
  }
  out.lambda = std::max(1.0, raw);
  return out;
}

double select_lambda(const LambdaRule& rule, const Process& process, std::uint64_t seed,
                     unsigned workers) {
  return select_lambda_detailed(rule, process, seed, workers).lambda;
}

}  // namespace wdecor
