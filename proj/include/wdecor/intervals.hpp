#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string_view>

#include "wdecor/linmodel.hpp"

namespace wdecor {

/// Stable identifiers; they appear verbatim in CSV output.
enum class IntervalMethod { OlsGaussian, OlsConcentration, WDecorrelated };

std::string_view to_string(IntervalMethod method);
std::optional<IntervalMethod> parse_interval_method(std::string_view name);

/// Interval for <v, beta>. For one-sided use only one endpoint is meaningful:
/// lower-tail coverage asks truth >= lower, upper-tail asks truth <= upper.
struct Interval {
  Eigen::VectorXd target;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  IntervalMethod method = IntervalMethod::WDecorrelated;
  double nominal_level = 0.9;
  bool two_sided = true;

  double half_width() const noexcept { return 0.5 * (upper - lower); }
};

/// Normal critical value: Phi^{-1}(1 - alpha/2) two-sided, Phi^{-1}(1 - alpha)
/// one-sided. Throws InvalidArgument unless 0 < alpha < 1.
double critical_value(double alpha, bool two_sided);

/// <v, beta_d> +/- sigma_hat * sqrt(v^T W W^T v) * z.
Interval ci_w_decorrelated(const DecorrelatedEstimate& est, const Eigen::VectorXd& v, double alpha,
                           bool two_sided = true);

/// <v, beta_ols> +/- sigma_hat * sqrt(v^T (X^T X)^{-1} v) * z.
Interval ci_gaussian_ols(const OlsFit& fit, const Eigen::VectorXd& v, double alpha,
                         bool two_sided = true);

struct ConcentrationParams {
  double sub_gaussian_r = 1.0;
  /// Bound S on |beta|. Unset means 2 |beta_ols| when a fit is supplied.
  std::optional<double> norm_bound_s;
  double reg_lambda_c = 1.0;
};

/// Self-normalized confidence ellipsoid around the ridge estimate
/// beta_r = (cI + X^T X)^{-1} X^T y, projected onto v:
///   rho = R sqrt(2 log(det(V)^{1/2} det(cI)^{-1/2} / alpha)) + sqrt(c) S,
///   <v, beta_r> +/- |v|_{V^{-1}} rho,  V = cI + X^T X.
/// The ellipsoid is used as-is for both one- and two-sided questions.
Interval ci_concentration(const AdaptiveDataset& data, const Eigen::VectorXd& v, double alpha,
                          const ConcentrationParams& params);

/// As above, filling an unset norm_bound_s with 2 |fit.beta_ols|.
Interval ci_concentration(const OlsFit& fit, const AdaptiveDataset& data, const Eigen::VectorXd& v,
                          double alpha, const ConcentrationParams& params = {});

}  // namespace wdecor
