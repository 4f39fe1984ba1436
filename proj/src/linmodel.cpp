#include "wdecor/linmodel.hpp"

#include <cmath>
#include <string>

#include "wdecor/error.hpp"
#include "wdecor/whitening.hpp"

namespace wdecor {

AdaptiveDataset::AdaptiveDataset(Eigen::Index p)
    : covariates_(Eigen::MatrixXd::Zero(0, p)), responses_(Eigen::VectorXd::Zero(0)) {
  if (p < 1) throw Error(ErrorCode::DimensionMismatch, "dataset needs p >= 1");
}

AdaptiveDataset::AdaptiveDataset(Eigen::MatrixXd covariates, Eigen::VectorXd responses)
    : covariates_(std::move(covariates)), responses_(std::move(responses)) {
  if (covariates_.cols() < 1) throw Error(ErrorCode::DimensionMismatch, "dataset needs p >= 1");
  if (covariates_.rows() != responses_.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(covariates_.rows()) + " covariate rows but " +
                    std::to_string(responses_.size()) + " responses");
  }
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

GramFactor factor_gram(const Eigen::MatrixXd& gram) {
  const auto p = gram.rows();
  if (p == 0 || gram.cols() != p) throw Error(ErrorCode::DimensionMismatch, "Gram must be square, p >= 1");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double tolerance = kSingularityScale * gram.trace() / static_cast<double>(p);
  if (!(values(0) > tolerance) || !(values(0) > 0.0)) {
    throw Error(ErrorCode::SingularDesign,
                "lambda_min(X^T X) = " + std::to_string(values(0)) +
                    " below tolerance; some direction was never explored");
  }
  GramFactor out;
  out.lambda_min = values(0);
  out.lambda_max = values(p - 1);
  const Eigen::MatrixXd& vecs = eig.eigenvectors();
  out.inverse = vecs * values.cwiseInverse().asDiagonal() * vecs.transpose();
  return out;
}

OlsFit ols_fit(const AdaptiveDataset& data, const OlsOptions& options) {
  const auto& X = data.covariates();
  const auto& y = data.responses();
  if (!X.allFinite() || !y.allFinite()) throw Error(ErrorCode::NonFiniteInput, "ols_fit input");

  OlsFit fit;
  fit.gram = X.transpose() * X;
  GramFactor factor = factor_gram(fit.gram);
  fit.gram_inverse = std::move(factor.inverse);
  fit.lambda_min = factor.lambda_min;
  fit.lambda_max = factor.lambda_max;

  fit.beta_ols = fit.gram.ldlt().solve(X.transpose() * y);
  fit.residuals = y - X * fit.beta_ols;

  const auto n = data.n();
  const auto denom = options.dof_correction ? n - data.p() : n;
  if (denom <= 0) {
    throw Error(ErrorCode::SingularDesign, "no residual degrees of freedom for sigma^2");
  }
  fit.sigma2_hat = fit.residuals.squaredNorm() / static_cast<double>(denom);
  return fit;
}

DecorrelatedEstimate w_decorrelate(const OlsFit& fit, const WhiteningResult& whitening,
                                   const AdaptiveDataset& data) {
  const auto p = data.p();
  if (fit.beta_ols.size() != p || whitening.bias_matrix.rows() != p ||
      whitening.columns.rows() != p) {
    throw Error(ErrorCode::DimensionMismatch, "fit, whitening and data disagree on p");
  }
  if (whitening.columns.cols() != data.n()) {
    throw Error(ErrorCode::StaleWhitening, "whitening has " +
                                               std::to_string(whitening.columns.cols()) +
                                               " columns, data has " + std::to_string(data.n()) +
                                               " rows");
  }
  const Eigen::VectorXd residuals = data.responses() - data.covariates() * fit.beta_ols;

  DecorrelatedEstimate est;
  est.beta_ols = fit.beta_ols;
  est.beta_d = fit.beta_ols + whitening.columns * residuals;
  est.w_gram = whitening.w_gram;
  est.bias_matrix = whitening.bias_matrix;
  est.sigma2_hat = fit.sigma2_hat;
  est.lambda = whitening.lambda;
  return est;
}

BiasVarianceDiagnostics bias_variance_diagnostics(const Eigen::MatrixXd& bias_matrix,
                                                  const Eigen::MatrixXd& w_gram) {
  BiasVarianceDiagnostics d;
  d.frobenius_bias = bias_matrix.norm();
  if (bias_matrix.size() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(bias_matrix);
    d.operator_bias = svd.singularValues()(0);
  }
  d.variance_trace = w_gram.trace();
  return d;
}

BiasVarianceDiagnostics bias_variance_diagnostics(const DecorrelatedEstimate& est) {
  return bias_variance_diagnostics(est.bias_matrix, est.w_gram);
}

}  // namespace wdecor
