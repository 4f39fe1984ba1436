#pragma once

#include <Eigen/Dense>
#include <cstddef>

namespace wdecor {

struct WhiteningResult;

/// Time-ordered covariate/response pairs. Row i of `covariates()` is x_i and
/// the row order is the order in which the data were collected.
class AdaptiveDataset {
 public:
  /// Empty dataset with `p` covariates.
  explicit AdaptiveDataset(Eigen::Index p);
  AdaptiveDataset(Eigen::MatrixXd covariates, Eigen::VectorXd responses);

  Eigen::Index p() const noexcept { return covariates_.cols(); }
  Eigen::Index n() const noexcept { return covariates_.rows(); }
  const Eigen::MatrixXd& covariates() const noexcept { return covariates_; }
  const Eigen::VectorXd& responses() const noexcept { return responses_; }

 private:
  Eigen::MatrixXd covariates_;
  Eigen::VectorXd responses_;
};

/// Eigen-decomposition based factorization of a symmetric Gram matrix.
struct GramFactor {
  Eigen::MatrixXd inverse;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Relative singularity tolerance: lambda_min must exceed scale * Tr(G) / p.
inline constexpr double kSingularityScale = 1e-10;

/// Throws SingularDesign when lambda_min(G) < kSingularityScale * Tr(G) / p.
GramFactor factor_gram(const Eigen::MatrixXd& gram);

/// Smallest eigenvalue of a symmetric matrix; no singularity check.
double min_eigenvalue(const Eigen::MatrixXd& symmetric);

struct OlsOptions {
  /// Divide the residual sum of squares by n - p instead of n.
  bool dof_correction = false;
};

struct OlsFit {
  Eigen::VectorXd beta_ols;
  Eigen::MatrixXd gram;
  Eigen::MatrixXd gram_inverse;
  double sigma2_hat = 0.0;
  Eigen::VectorXd residuals;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

OlsFit ols_fit(const AdaptiveDataset& data, const OlsOptions& options = {});

struct DecorrelatedEstimate {
  Eigen::VectorXd beta_d;
  Eigen::VectorXd beta_ols;
  Eigen::MatrixXd w_gram;       // W_n W_n^T
  Eigen::MatrixXd bias_matrix;  // I - W_n X_n
  double sigma2_hat = 0.0;
  double lambda = 0.0;
};

/// beta_d = beta_ols + W_n (y - X beta_ols), with W_n taken from `whitening`.
/// Throws StaleWhitening if the whitening covers a different number of rows.
DecorrelatedEstimate w_decorrelate(const OlsFit& fit, const WhiteningResult& whitening,
                                   const AdaptiveDataset& data);

struct BiasVarianceDiagnostics {
  double frobenius_bias = 0.0;
  double operator_bias = 0.0;
  double variance_trace = 0.0;
};

BiasVarianceDiagnostics bias_variance_diagnostics(const Eigen::MatrixXd& bias_matrix,
                                                  const Eigen::MatrixXd& w_gram);
BiasVarianceDiagnostics bias_variance_diagnostics(const DecorrelatedEstimate& est);

}  // namespace wdecor
