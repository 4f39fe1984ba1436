#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "wdecor/error.hpp"
#include "wdecor/intervals.hpp"
#include "wdecor/linmodel.hpp"
#include "wdecor/whitening.hpp"

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

AdaptiveDataset two_ones() { return {Eigen::MatrixXd::Ones(2, 1), Eigen::Vector2d(0.0, 2.0)}; }

DecorrelatedEstimate decorrelate(const AdaptiveDataset& d, double lambda) {
  return w_decorrelate(ols_fit(d), whitening_run(d.covariates(), lambda), d);
}

const Eigen::VectorXd kOne = Eigen::VectorXd::Ones(1);

}  // namespace

TEST_SUITE("intervals") {

TEST_CASE("critical values") {
  CHECK(critical_value(0.05, true) == doctest::Approx(1.959963984540054));
  CHECK(critical_value(0.10, false) == doctest::Approx(1.281551565544601));
  CHECK(critical_value(0.5, true) == doctest::Approx(0.674489750196082));
  CHECK(code_of([] { critical_value(0.0, true); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { critical_value(1.0, true); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("decorrelated interval on the two-point example") {
  const auto iv = ci_w_decorrelated(decorrelate(two_ones(), 1.0), kOne, 0.10);
  const double half = 1.6448536269514722 * std::sqrt(0.3125);
  CHECK(iv.estimate == doctest::Approx(0.75));
  CHECK(iv.lower == doctest::Approx(0.75 - half).epsilon(1e-12));
  CHECK(iv.upper == doctest::Approx(0.75 + half).epsilon(1e-12));
  CHECK(iv.lower == doctest::Approx(-0.169).epsilon(1e-3));
  CHECK(iv.upper == doctest::Approx(1.669).epsilon(1e-3));
  CHECK(iv.method == IntervalMethod::WDecorrelated);
  CHECK(iv.nominal_level == doctest::Approx(0.9));
}

TEST_CASE("decorrelated interval edge cases") {
  DecorrelatedEstimate est;
  est.beta_d = Eigen::Vector2d(0.5, 1.5);
  est.beta_ols = est.beta_d;
  est.w_gram = Eigen::Matrix2d::Zero();
  est.bias_matrix = Eigen::Matrix2d::Identity();
  est.sigma2_hat = 4.0;
  est.lambda = 1.0;
  const auto degenerate = ci_w_decorrelated(est, Eigen::Vector2d(1, 1), 0.1);
  CHECK(degenerate.lower == 2.0);
  CHECK(degenerate.upper == 2.0);

  est.w_gram = Eigen::Matrix2d::Identity();
  const auto quartile = ci_w_decorrelated(est, Eigen::Vector2d(1, 0), 0.5);
  CHECK(quartile.half_width() == doctest::Approx(0.6744897501960817 * 2.0));
  CHECK(code_of([&] { ci_w_decorrelated(est, Eigen::Vector2d::Zero(), 0.1); }) == ErrorCode::ZeroDirection);
  CHECK(code_of([&] { ci_w_decorrelated(est, Eigen::Vector3d::Ones(), 0.1); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("Gaussian OLS interval") {
  SUBCASE("two points at 95%") {
    const auto iv = ci_gaussian_ols(ols_fit(two_ones()), kOne, 0.05);
    CHECK(iv.lower == doctest::Approx(1.0 - 1.959963984540054 / std::sqrt(2.0)));
    CHECK(iv.upper == doctest::Approx(1.0 + 1.959963984540054 / std::sqrt(2.0)));
    CHECK(iv.lower == doctest::Approx(-0.386).epsilon(1e-3));
    CHECK(iv.upper == doctest::Approx(2.386).epsilon(1e-3));
  }
  SUBCASE("orthogonal design: half-width sigma z / sqrt(N_a)") {
    Eigen::MatrixXd X(7, 2);
    X << 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 1, 0;
    Eigen::VectorXd y(7);
    y << 0.1, 0.5, 0.2, -0.3, 0.7, 0.0, 0.9;
    const auto fit = ols_fit({X, y});
    const auto iv = ci_gaussian_ols(fit, Eigen::Vector2d(1, 0), 0.1);
    CHECK(iv.half_width() == doctest::Approx(std::sqrt(fit.sigma2_hat) * 1.6448536269514722 / std::sqrt(5.0)));
  }
  SUBCASE("zero noise gives a zero-width interval at the truth") {
    Eigen::MatrixXd X(3, 2);
    X << 1, 0, 0, 1, 1, 1;
    const auto iv = ci_gaussian_ols(ols_fit({X, X * Eigen::Vector2d(0.3, 0.4)}), Eigen::Vector2d(1, 1), 0.1);
    CHECK(iv.half_width() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(iv.estimate == doctest::Approx(0.7));
  }
  SUBCASE("a fit without a Gram inverse is singular") {
    OlsFit fit;
    fit.beta_ols = Eigen::Vector2d::Zero();
    CHECK(code_of([&] { ci_gaussian_ols(fit, Eigen::Vector2d(1, 0), 0.1); }) == ErrorCode::SingularDesign);
  }
}

TEST_CASE("concentration interval") {
  const ConcentrationParams unit{1.0, 1.0, 1.0};
  SUBCASE("worked plug-in") {
    const auto iv = ci_concentration(two_ones(), kOne, 0.1, unit);
    const double rho = std::sqrt(2.0 * std::log(std::sqrt(3.0) / 0.1)) + 1.0;
    CHECK(iv.half_width() == doctest::Approx(rho / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(rho == doctest::Approx(3.390).epsilon(1e-3));
    CHECK(iv.half_width() == doctest::Approx(1.957).epsilon(1e-3));
    CHECK(iv.estimate == doctest::Approx(2.0 / 3.0));  // ridge center
  }
  SUBCASE("alpha -> 1 leaves only sqrt(c) S when the log-det term vanishes") {
    const ConcentrationParams p{1.0, 2.0, 4.0};
    const auto iv = ci_concentration(AdaptiveDataset(2), Eigen::Vector2d(1, 0), 1.0 - 1e-12, p);
    // Empty data: V = cI, so the half-width is |v|_{V^-1} * sqrt(c) S = S.
    CHECK(iv.half_width() == doctest::Approx(2.0).epsilon(1e-5));
    const auto loose = ci_concentration(two_ones(), kOne, 1.0 - 1e-12, unit);
    const double expected = (std::sqrt(2.0 * std::log(std::sqrt(3.0))) + 1.0) / std::sqrt(3.0);
    CHECK(loose.half_width() == doctest::Approx(expected).epsilon(1e-6));
  }
  SUBCASE("default S is twice the OLS norm") {
    const auto data = two_ones();
    const auto fit = ols_fit(data);
    const auto a = ci_concentration(fit, data, kOne, 0.1);
    const auto b = ci_concentration(data, kOne, 0.1, {1.0, 2.0, 1.0});
    CHECK(a.lower == b.lower);
    CHECK(a.upper == b.upper);
  }
  SUBCASE("invalid parameters") {
    CHECK(code_of([] { ci_concentration(two_ones(), kOne, 0.1, {1.0, std::nullopt, 1.0}); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([] { ci_concentration(two_ones(), kOne, 0.1, {0.0, 1.0, 1.0}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { ci_concentration(two_ones(), kOne, 0.1, {1.0, 1.0, 0.0}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { ci_concentration(two_ones(), Eigen::VectorXd::Zero(1), 0.1, {1.0, 1.0, 1.0}); }) ==
          ErrorCode::ZeroDirection);
  }
}

TEST_CASE("property: widths grow with the nominal level") {
  gen::Rng rng(67);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(gen::index(rng, 3));
    const auto data = gen::dataset(rng, p, p + 10 + static_cast<Eigen::Index>(gen::index(rng, 50)));
    const auto fit = ols_fit(data);
    const auto est = w_decorrelate(fit, whitening_run(data.covariates(), 3.0), data);
    const Eigen::VectorXd v = Eigen::VectorXd::Random(p) + Eigen::VectorXd::Constant(p, 2.0);
    double prev_w = 0.0, prev_g = 0.0, prev_c = 0.0;
    for (const double alpha : {0.5, 0.2, 0.1, 0.05, 0.01}) {
      const double w = ci_w_decorrelated(est, v, alpha).half_width();
      const double g = ci_gaussian_ols(fit, v, alpha).half_width();
      const double c = ci_concentration(fit, data, v, alpha).half_width();
      CHECK(w > prev_w);
      CHECK(g > prev_g);
      CHECK(c > prev_c);
      prev_w = w, prev_g = g, prev_c = c;
      CHECK(ci_w_decorrelated(est, v, alpha, false).half_width() < w);
    }
  }
}

TEST_CASE("property: translation equivariance") {
  gen::Rng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(gen::index(rng, 4));
    const auto data = gen::dataset(rng, p, p + 5 + static_cast<Eigen::Index>(gen::index(rng, 60)));
    const Eigen::VectorXd delta = 3.0 * Eigen::VectorXd::Random(p);
    const AdaptiveDataset shifted(data.covariates(), data.responses() + data.covariates() * delta);
    const Eigen::VectorXd v = Eigen::VectorXd::Random(p) + Eigen::VectorXd::Constant(p, 2.0);
    const double shift = v.dot(delta);
    const double lambda = gen::uniform(rng, 1.0, 10.0);

    const auto g0 = ci_gaussian_ols(ols_fit(data), v, 0.1);
    const auto g1 = ci_gaussian_ols(ols_fit(shifted), v, 0.1);
    CHECK(g1.lower - g0.lower == doctest::Approx(shift).epsilon(1e-9));
    CHECK(g1.upper - g0.upper == doctest::Approx(shift).epsilon(1e-9));

    const auto w0 = ci_w_decorrelated(decorrelate(data, lambda), v, 0.1);
    const auto w1 = ci_w_decorrelated(decorrelate(shifted, lambda), v, 0.1);
    CHECK(w1.lower - w0.lower == doctest::Approx(shift).epsilon(1e-9));
    CHECK(w1.upper - w0.upper == doctest::Approx(shift).epsilon(1e-9));

    // The ridge center shrinks the shift, so only the width is invariant.
    const ConcentrationParams fixed{1.0, 1.0, 1.0};
    const auto c0 = ci_concentration(data, v, 0.1, fixed);
    const auto c1 = ci_concentration(shifted, v, 0.1, fixed);
    CHECK(c1.half_width() == doctest::Approx(c0.half_width()).epsilon(1e-12));
  }
}

TEST_CASE("method names round-trip") {
  for (const auto m : {IntervalMethod::OlsGaussian, IntervalMethod::OlsConcentration, IntervalMethod::WDecorrelated}) {
    CHECK(parse_interval_method(to_string(m)) == m);
  }
  CHECK(to_string(IntervalMethod::OlsGaussian) == "OLS_GSN");
  CHECK(to_string(IntervalMethod::OlsConcentration) == "OLS_CONC");
  CHECK(to_string(IntervalMethod::WDecorrelated) == "W_DECORR");
}

}  // TEST_SUITE
