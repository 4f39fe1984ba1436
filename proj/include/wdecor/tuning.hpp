#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "wdecor/process.hpp"

namespace wdecor {

enum class LambdaRuleKind { Percentile, Exploration, Fixed };

std::string_view to_string(LambdaRuleKind kind);
std::optional<LambdaRuleKind> parse_lambda_rule_kind(std::string_view name);

struct LambdaRule {
  LambdaRuleKind kind = LambdaRuleKind::Percentile;
  double percentile = 0.05;
  std::size_t pilot_runs = 200;
  double fixed_value = 1.0;
  /// Divide the percentile by log log n (never by less than 1).
  bool loglog_discount = false;

  void validate() const;
};

struct LambdaSelection {
  double lambda = 1.0;
  /// Sorted lambda_min(X^T X) values from the pilot runs (percentile rule only).
  std::vector<double> pilot_lambda_mins;
};

/// Lower empirical quantile: the element at index floor(q * (m - 1)) of the
/// sorted sample. Throws EmptyInput on an empty sample.
double lower_quantile(const std::vector<double>& sorted, double q);

/// Regularizer for the whitening recursion, clamped to be >= 1.
///  - Percentile: pilot_runs simulations on the pilot stream of `seed`, then
///    the configured lower quantile of lambda_min(X^T X).
///  - Exploration: n * mu / log(p log n) with mu = exploration_rate (ECB only).
///  - Fixed: fixed_value.
LambdaSelection select_lambda_detailed(const LambdaRule& rule, const Process& process,
                                       std::uint64_t seed, unsigned workers = 0);

double select_lambda(const LambdaRule& rule, const Process& process, std::uint64_t seed,
                     unsigned workers = 0);

}  // namespace wdecor
