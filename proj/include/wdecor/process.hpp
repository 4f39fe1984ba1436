#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "wdecor/linmodel.hpp"
#include "wdecor/policies.hpp"
#include "wdecor/random.hpp"
#include "wdecor/timeseries.hpp"

namespace wdecor {

struct BanditProcess {
  BanditEnv env;
  PolicySpec policy;
};

/// A data-generating process: a bandit policy run against an environment, or
/// an autoregressive series.
using Process = std::variant<BanditProcess, ArSpec>;

/// One realization of a process in regression form.
struct ProcessDraw {
  AdaptiveDataset data;
  std::vector<std::size_t> arm_counts;  // empty for AR processes
};

void validate(const Process& process);
bool is_bandit(const Process& process) noexcept;
Eigen::Index dimension(const Process& process);
std::size_t horizon(const Process& process);
/// True regression coefficients (arm means or AR coefficients).
Eigen::VectorXd true_beta(const Process& process);

ProcessDraw simulate(const Process& process, Rng& rng);

/// lambda_min(X^T X) of a draw. For bandits this is min_a N_a(n), exactly.
double realized_lambda_min(const ProcessDraw& draw);

}  // namespace wdecor
