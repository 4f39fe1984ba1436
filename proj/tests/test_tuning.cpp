#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "wdecor/error.hpp"
#include "wdecor/process.hpp"
#include "wdecor/tuning.hpp"

using namespace wdecor;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected wdecor::Error");
  return ErrorCode::InvalidArgument;
}

Process bandit(PolicyKind kind, std::size_t n, Eigen::VectorXd means = Eigen::Vector2d(0.3, 0.3)) {
  BanditProcess b;
  b.env = BanditEnv{std::move(means), UniformNoise{-1.0, 1.0}, n};
  b.policy.kind = kind;
  return b;
}

LambdaRule rule(LambdaRuleKind kind) {
  LambdaRule r;
  r.kind = kind;
  return r;
}

}  // namespace

TEST_SUITE("tuning") {

TEST_CASE("fixed rule echoes its value") {
  auto r = rule(LambdaRuleKind::Fixed);
  r.fixed_value = 7.0;
  CHECK(select_lambda(r, bandit(PolicyKind::ECB, 10), 1) == 7.0);
  r.fixed_value = 0.25;
  CHECK(select_lambda(r, bandit(PolicyKind::ECB, 10), 1) == 1.0);  // clamp
}

TEST_CASE("exploration rule") {
  const double expected = 1000.0 * 0.05 / std::log(2.0 * std::log(1000.0));
  CHECK(select_lambda(rule(LambdaRuleKind::Exploration), bandit(PolicyKind::ECB, 1000), 1) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(19.0).epsilon(0.01));
  CHECK(code_of([] { select_lambda(rule(LambdaRuleKind::Exploration), bandit(PolicyKind::UCB, 100), 1); }) ==
        ErrorCode::Unsupported);
  CHECK(code_of([] { select_lambda(rule(LambdaRuleKind::Exploration), bandit(PolicyKind::TS, 100), 1); }) ==
        ErrorCode::Unsupported);
  ArSpec a;
  a.coefficients = Eigen::VectorXd::Constant(1, 0.5);
  a.n = 20;
  CHECK(code_of([&] { select_lambda(rule(LambdaRuleKind::Exploration), a, 1); }) == ErrorCode::Unsupported);
}

TEST_CASE("round robin pilots give n/p at every percentile") {
  for (const double q : {0.01, 0.05, 0.5, 0.99}) {
    auto r = rule(LambdaRuleKind::Percentile);
    r.percentile = q;
    r.pilot_runs = 20;
    CHECK(select_lambda(r, bandit(PolicyKind::RoundRobin, 1000), 3) == 500.0);
    CHECK(select_lambda(r, bandit(PolicyKind::RoundRobin, 1000, Eigen::Vector3d(0, 0, 0)), 3) == 333.0);
  }
}

TEST_CASE("percentile rule is deterministic, monotone and uses sorted pilots") {
  auto r = rule(LambdaRuleKind::Percentile);
  r.pilot_runs = 200;
  const auto a = select_lambda_detailed(r, bandit(PolicyKind::ECB, 1000), 42, 1);
  const auto b = select_lambda_detailed(r, bandit(PolicyKind::ECB, 1000), 42, 4);
  CHECK(a.lambda == b.lambda);
  CHECK(a.pilot_lambda_mins == b.pilot_lambda_mins);
  CHECK(a.pilot_lambda_mins.size() == 200);
  CHECK(std::is_sorted(a.pilot_lambda_mins.begin(), a.pilot_lambda_mins.end()));
  CHECK(a.lambda == lower_quantile(a.pilot_lambda_mins, 0.05));
  CHECK(lower_quantile(a.pilot_lambda_mins, 0.05) <= lower_quantile(a.pilot_lambda_mins, 0.5));

  double previous = 0.0;
  for (const double q : {0.01, 0.05, 0.25, 0.5, 0.75, 0.99}) {
    r.percentile = q;
    const double lam = select_lambda(r, bandit(PolicyKind::ECB, 1000), 42);
    CHECK(lam >= previous);
    previous = lam;
  }
}

TEST_CASE("log log discount") {
  auto r = rule(LambdaRuleKind::Percentile);
  r.pilot_runs = 10;
  r.loglog_discount = true;
  CHECK(select_lambda(r, bandit(PolicyKind::RoundRobin, 1000), 3) ==
        doctest::Approx(500.0 / std::log(std::log(1000.0))));
  // log log n < 1 never inflates lambda.
  CHECK(select_lambda(r, bandit(PolicyKind::RoundRobin, 10), 3) == 5.0);
}

TEST_CASE("pilots are disjoint from trial seeds") {
  // The pilot stream of seed s must not replay the trial stream of any seed.
  auto r = rule(LambdaRuleKind::Percentile);
  r.pilot_runs = 1;
  r.percentile = 0.5;
  const auto sel = select_lambda_detailed(r, bandit(PolicyKind::ECB, 200), 0);
  Rng trial = make_rng(0, Stream::Trial);
  const auto draw = simulate(bandit(PolicyKind::ECB, 200), trial);
  Rng pilot = make_rng(0, Stream::Pilot);
  const auto pilot_draw = simulate(bandit(PolicyKind::ECB, 200), pilot);
  CHECK(sel.pilot_lambda_mins.front() == realized_lambda_min(pilot_draw));
  CHECK(draw.data.responses() != pilot_draw.data.responses());
}

TEST_CASE("quantile helper and rule validation") {
  CHECK(lower_quantile({1, 2, 3, 4, 5}, 0.0) == 1);
  CHECK(lower_quantile({1, 2, 3, 4, 5}, 0.5) == 3);
  CHECK(lower_quantile({1, 2, 3, 4, 5}, 0.99) == 4);
  CHECK(code_of([] { lower_quantile({}, 0.5); }) == ErrorCode::EmptyInput);
  auto r = rule(LambdaRuleKind::Percentile);
  r.percentile = 1.0;
  CHECK(code_of([&] { r.validate(); }) == ErrorCode::InvalidArgument);
  r = rule(LambdaRuleKind::Percentile);
  r.pilot_runs = 0;
  CHECK(code_of([&] { r.validate(); }) == ErrorCode::InvalidArgument);
  r = rule(LambdaRuleKind::Fixed);
  r.fixed_value = -1.0;
  CHECK(code_of([&] { r.validate(); }) == ErrorCode::InvalidArgument);
  for (const auto k : {LambdaRuleKind::Percentile, LambdaRuleKind::Exploration, LambdaRuleKind::Fixed}) {
    CHECK(parse_lambda_rule_kind(to_string(k)) == k);
  }
}

}  // TEST_SUITE
