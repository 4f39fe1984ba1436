#include "wdecor/intervals.hpp"

#include <algorithm>
#include <cmath>

#include "wdecor/error.hpp"
#include "wdecor/normal.hpp"

namespace wdecor {

std::string_view to_string(IntervalMethod method) {
  switch (method) {
    case IntervalMethod::OlsGaussian: return "OLS_GSN";
    case IntervalMethod::OlsConcentration: return "OLS_CONC";
    case IntervalMethod::WDecorrelated: return "W_DECORR";
  }
  return "?";
}

std::optional<IntervalMethod> parse_interval_method(std::string_view name) {
  if (name == "OLS_GSN") return IntervalMethod::OlsGaussian;
  if (name == "OLS_CONC") return IntervalMethod::OlsConcentration;
  if (name == "W_DECORR") return IntervalMethod::WDecorrelated;
  return std::nullopt;
}

double critical_value(double alpha, bool two_sided) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  }
  return normal_quantile(two_sided ? 1.0 - alpha / 2.0 : 1.0 - alpha);
}

namespace {

void check_direction(const Eigen::VectorXd& v, Eigen::Index p) {
  if (v.size() != p) throw Error(ErrorCode::DimensionMismatch, "direction length differs from p");
  if (!v.allFinite()) throw Error(ErrorCode::NonFiniteInput, "direction");
  if (v.squaredNorm() == 0.0) throw Error(ErrorCode::ZeroDirection, "direction v must be nonzero");
}

Interval symmetric(const Eigen::VectorXd& v, double center, double half, IntervalMethod method,
                   double alpha, bool two_sided) {
  return Interval{v, center, center - half, center + half, method, 1.0 - alpha, two_sided};
}

}  // namespace

Interval ci_w_decorrelated(const DecorrelatedEstimate& est, const Eigen::VectorXd& v, double alpha,
                           bool two_sided) {
  check_direction(v, est.beta_d.size());
  const double z = critical_value(alpha, two_sided);
  const double quad = std::max(0.0, v.dot(est.w_gram * v));
  const double half = std::sqrt(est.sigma2_hat) * std::sqrt(quad) * z;
  return symmetric(v, v.dot(est.beta_d), half, IntervalMethod::WDecorrelated, alpha, two_sided);
}

Interval ci_gaussian_ols(const OlsFit& fit, const Eigen::VectorXd& v, double alpha, bool two_sided) {
  check_direction(v, fit.beta_ols.size());
  if (fit.gram_inverse.rows() != fit.beta_ols.size()) {
    throw Error(ErrorCode::SingularDesign, "fit carries no Gram inverse");
  }
  const double z = critical_value(alpha, two_sided);
  const double quad = std::max(0.0, v.dot(fit.gram_inverse * v));
  const double half = std::sqrt(fit.sigma2_hat) * std::sqrt(quad) * z;
  return symmetric(v, v.dot(fit.beta_ols), half, IntervalMethod::OlsGaussian, alpha, two_sided);
}

Interval ci_concentration(const AdaptiveDataset& data, const Eigen::VectorXd& v, double alpha,
                          const ConcentrationParams& params) {
  const auto p = data.p();
  check_direction(v, p);
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  if (!(params.sub_gaussian_r > 0.0) || !(params.reg_lambda_c > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "concentration R and c must be positive");
  }
  if (!params.norm_bound_s || !(*params.norm_bound_s >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "concentration needs a nonnegative norm bound S");
  }

  const auto& X = data.covariates();
  const double c = params.reg_lambda_c;
  const Eigen::MatrixXd regularized =
      c * Eigen::MatrixXd::Identity(p, p) + X.transpose() * X;
  const Eigen::LLT<Eigen::MatrixXd> chol(regularized);
  const Eigen::VectorXd beta_ridge = chol.solve(X.transpose() * data.responses());

  // log(det(V)^{1/2} det(cI)^{-1/2}) via the Cholesky diagonal.
  const double half_log_det = chol.matrixLLT().diagonal().array().log().sum();
  const double log_ratio = half_log_det - 0.5 * static_cast<double>(p) * std::log(c);
  const double log_term = std::max(0.0, log_ratio - std::log(alpha));
  const double radius = params.sub_gaussian_r * std::sqrt(2.0 * log_term) +
                        std::sqrt(c) * *params.norm_bound_s;
  const double v_norm = std::sqrt(v.dot(chol.solve(v)));

  return symmetric(v, v.dot(beta_ridge), v_norm * radius, IntervalMethod::OlsConcentration, alpha,
                   true);
}

Interval ci_concentration(const OlsFit& fit, const AdaptiveDataset& data, const Eigen::VectorXd& v,
                          double alpha, const ConcentrationParams& params) {
  ConcentrationParams resolved = params;
  if (!resolved.norm_bound_s) resolved.norm_bound_s = 2.0 * fit.beta_ols.norm();
  return ci_concentration(data, v, alpha, resolved);
}

}  // namespace wdecor
