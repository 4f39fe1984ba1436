#include "wdecor/process.hpp"

#include <algorithm>

namespace wdecor {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

void validate(const Process& process) {
  std::visit(overloaded{[](const BanditProcess& b) {
                          b.env.validate();
                          b.policy.validate();
                        },
                        [](const ArSpec& a) { a.validate(); }},
             process);
}

bool is_bandit(const Process& process) noexcept {
  return std::holds_alternative<BanditProcess>(process);
}

Eigen::Index dimension(const Process& process) {
  return std::visit(overloaded{[](const BanditProcess& b) { return b.env.arm_means.size(); },
                               [](const ArSpec& a) { return a.order(); }},
                    process);
}

std::size_t horizon(const Process& process) {
  return std::visit(overloaded{[](const BanditProcess& b) { return b.env.horizon; },
                               [](const ArSpec& a) { return a.n; }},
                    process);
}

Eigen::VectorXd true_beta(const Process& process) {
  return std::visit(
      overloaded{[](const BanditProcess& b) -> Eigen::VectorXd { return b.env.arm_means; },
                 [](const ArSpec& a) -> Eigen::VectorXd { return a.coefficients; }},
      process);
}

ProcessDraw simulate(const Process& process, Rng& rng) {
  return std::visit(overloaded{[&](const BanditProcess& b) {
                                 BanditTrace trace = run_bandit(b.env, b.policy, rng);
                                 return ProcessDraw{std::move(trace.dataset),
                                                    std::move(trace.arm_counts)};
                               },
                               [&](const ArSpec& a) {
                                 const Eigen::VectorXd series = simulate_ar(a, rng);
                                 return ProcessDraw{ar_dataset(a, series), {}};
                               }},
                    process);
}

double realized_lambda_min(const ProcessDraw& draw) {
  if (!draw.arm_counts.empty()) {
    return static_cast<double>(*std::min_element(draw.arm_counts.begin(), draw.arm_counts.end()));
  }
  const auto& X = draw.data.covariates();
  return min_eigenvalue(X.transpose() * X);
}

}  // namespace wdecor
