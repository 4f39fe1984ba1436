#include "wdecor/whitening.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wdecor/error.hpp"

namespace wdecor {

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be positive and finite");
  }
}

void check_covariate(const Eigen::VectorXd& x, Eigen::Index p) {
  if (x.size() != p) {
    throw Error(ErrorCode::DimensionMismatch,
                "covariate has length " + std::to_string(x.size()) + ", expected " +
                    std::to_string(p));
  }
  if (!x.allFinite()) throw Error(ErrorCode::NonFiniteInput, "covariate contains NaN or Inf");
}

}  // namespace

WhiteningState::WhiteningState(Eigen::Index p, double lambda)
    : lambda_(lambda),
      bias_matrix_(Eigen::MatrixXd::Identity(p, p)),
      w_gram_(Eigen::MatrixXd::Zero(p, p)) {
  if (p < 1) throw Error(ErrorCode::DimensionMismatch, "whitening needs p >= 1");
  check_lambda(lambda);
}

double WhiteningState::advance(const Eigen::VectorXd& x) {
  check_covariate(x, p());
  const double sq = x.squaredNorm();
  const double before = bias_matrix_.squaredNorm();

  Eigen::VectorXd w = bias_matrix_ * x / (lambda_ + sq);
  bias_matrix_.noalias() -= w * x.transpose();
  w_gram_.noalias() += w * w.transpose();

  const double after = bias_matrix_.squaredNorm();
  const double defect = std::abs((before - after) - (2.0 * lambda_ + sq) * w.squaredNorm());
  columns_.push_back(std::move(w));
  return defect;
}

WhiteningState whitening_step(WhiteningState state, const Eigen::VectorXd& x) {
  state.advance(x);
  return state;
}

WhiteningResult whitening_run(const Eigen::MatrixXd& rows, double lambda) {
  WhiteningState state(rows.cols(), lambda);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    worst = std::max(worst, state.advance(rows.row(i).transpose()));
  }

  WhiteningResult out;
  out.lambda = lambda;
  out.columns.resize(rows.cols(), rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out.columns.col(i) = state.columns()[i];
  out.bias_matrix = state.bias_matrix();
  out.w_gram = state.w_gram();
  out.telescoping_residual = worst;
  return out;
}

Eigen::MatrixXd product_form_bias(const Eigen::MatrixXd& rows, double lambda) {
  check_lambda(lambda);
  const auto p = rows.cols();
  if (p < 1) throw Error(ErrorCode::DimensionMismatch, "product form needs p >= 1");
  if (!rows.allFinite()) throw Error(ErrorCode::NonFiniteInput, "covariate contains NaN or Inf");

  Eigen::MatrixXd product = Eigen::MatrixXd::Identity(p, p);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const Eigen::VectorXd x = rows.row(i).transpose();
    const Eigen::MatrixXd factor =
        Eigen::MatrixXd::Identity(p, p) - x * x.transpose() / (lambda + x.squaredNorm());
    product = product * factor;
  }
  return product;
}

Eigen::MatrixXd orthogonal_variance_oracle(const std::vector<Eigen::VectorXd>& arm_vectors,
                                           std::span<const std::size_t> pull_sequence,
                                           double lambda) {
  check_lambda(lambda);
  if (arm_vectors.empty()) throw Error(ErrorCode::DimensionMismatch, "no arm vectors");
  const auto p = arm_vectors.front().size();
  for (const auto& v : arm_vectors) {
    if (v.size() != p) throw Error(ErrorCode::DimensionMismatch, "arm vectors differ in length");
  }
  for (std::size_t a = 0; a < arm_vectors.size(); ++a) {
    for (std::size_t b = a + 1; b < arm_vectors.size(); ++b) {
      const double scale = arm_vectors[a].norm() * arm_vectors[b].norm();
      if (std::abs(arm_vectors[a].dot(arm_vectors[b])) > 1e-12 * std::max(scale, 1e-300)) {
        throw Error(ErrorCode::NotOrthogonal,
                    "arms " + std::to_string(a) + " and " + std::to_string(b));
      }
    }
  }

  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(p, p);
  std::vector<std::size_t> prior_pulls(arm_vectors.size(), 0);
  for (const std::size_t arm : pull_sequence) {
    if (arm >= arm_vectors.size()) {
      throw Error(ErrorCode::DimensionMismatch, "pull index " + std::to_string(arm) + " out of range");
    }
    const Eigen::VectorXd& v = arm_vectors[arm];
    const double denom = lambda + v.squaredNorm();
    const double r = lambda / denom;
    const double weight =
        std::pow(r, 2.0 * static_cast<double>(prior_pulls[arm])) / (denom * denom);
    total += weight * v * v.transpose();
    ++prior_pulls[arm];
  }
  return total;
}

Eigen::VectorXd reverse_sgd_estimate(const AdaptiveDataset& data, const Eigen::VectorXd& beta_ols,
                                     double lambda) {
  check_lambda(lambda);
  if (beta_ols.size() != data.p()) {
    throw Error(ErrorCode::DimensionMismatch, "beta_ols length differs from p");
  }
  const auto& X = data.covariates();
  const auto& y = data.responses();
  Eigen::VectorXd beta = beta_ols;
  for (Eigen::Index i = data.n() - 1; i >= 0; --i) {
    const Eigen::VectorXd x = X.row(i).transpose();
    const double denom = lambda + x.squaredNorm();
    beta = beta - x * (x.dot(beta) / denom) + x * (y(i) / denom);
  }
  return beta;
}

StreamingDecorrelator::StreamingDecorrelator(Eigen::Index p, double lambda)
    : lambda_(lambda),
      bias_matrix_(Eigen::MatrixXd::Identity(p, p)),
      w_gram_(Eigen::MatrixXd::Zero(p, p)),
      w_y_(Eigen::VectorXd::Zero(p)),
      gram_(Eigen::MatrixXd::Zero(p, p)),
      xty_(Eigen::VectorXd::Zero(p)) {
  if (p < 1) throw Error(ErrorCode::DimensionMismatch, "whitening needs p >= 1");
  check_lambda(lambda);
}

void StreamingDecorrelator::push(const Eigen::VectorXd& x, double y) {
  check_covariate(x, bias_matrix_.rows());
  if (!std::isfinite(y)) throw Error(ErrorCode::NonFiniteInput, "response is NaN or Inf");
  const Eigen::VectorXd w = bias_matrix_ * x / (lambda_ + x.squaredNorm());
  bias_matrix_.noalias() -= w * x.transpose();
  w_gram_.noalias() += w * w.transpose();
  w_y_ += w * y;
  gram_.noalias() += x * x.transpose();
  xty_ += x * y;
  yty_ += y * y;
  ++count_;
}

DecorrelatedEstimate StreamingDecorrelator::estimate(const OlsOptions& options) const {
  factor_gram(gram_);  // singularity check
  const Eigen::VectorXd beta_ols = gram_.ldlt().solve(xty_);

  const auto p = static_cast<std::size_t>(bias_matrix_.rows());
  const std::size_t denom = options.dof_correction ? count_ - std::min(count_, p) : count_;
  if (denom == 0) throw Error(ErrorCode::SingularDesign, "no residual degrees of freedom for sigma^2");
  const double rss = std::max(0.0, yty_ - 2.0 * beta_ols.dot(xty_) + beta_ols.dot(gram_ * beta_ols));

  DecorrelatedEstimate est;
  est.beta_ols = beta_ols;
  est.beta_d = bias_matrix_ * beta_ols + w_y_;
  est.w_gram = w_gram_;
  est.bias_matrix = bias_matrix_;
  est.sigma2_hat = rss / static_cast<double>(denom);
  est.lambda = lambda_;
  return est;
}

}  // namespace wdecor
