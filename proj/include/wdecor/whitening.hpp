#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "wdecor/linmodel.hpp"

namespace wdecor {

/// Running state of the online whitening recursion
///
///   w_i = M_{i-1} x_i / (lambda + |x_i|^2),   M_i = M_{i-1} - w_i x_i^T,
///
/// with M_0 = I. Column w_i is computed from x_1..x_i and lambda only, so the
/// resulting W_n is well-adapted by construction: nothing here ever sees a
/// response value.
class WhiteningState {
 public:
  WhiteningState(Eigen::Index p, double lambda);

  /// Appends w_i for covariate x and returns the telescoping defect
  /// |(|M_{i-1}|_F^2 - |M_i|_F^2) - (2 lambda + |x|^2) |w_i|^2| of this step.
  double advance(const Eigen::VectorXd& x);

  double lambda() const noexcept { return lambda_; }
  Eigen::Index p() const noexcept { return bias_matrix_.rows(); }
  std::size_t step() const noexcept { return columns_.size(); }
  const Eigen::MatrixXd& bias_matrix() const noexcept { return bias_matrix_; }
  const Eigen::MatrixXd& w_gram() const noexcept { return w_gram_; }
  const std::vector<Eigen::VectorXd>& columns() const noexcept { return columns_; }

 private:
  double lambda_;
  Eigen::MatrixXd bias_matrix_;
  Eigen::MatrixXd w_gram_;
  std::vector<Eigen::VectorXd> columns_;
};

/// Value-semantics form of WhiteningState::advance. Move the state in to
/// avoid copying the stored columns.
WhiteningState whitening_step(WhiteningState state, const Eigen::VectorXd& x);

struct WhiteningResult {
  double lambda = 0.0;
  Eigen::MatrixXd columns;      // W_n, p x n
  Eigen::MatrixXd bias_matrix;  // M_n = I - W_n X_n
  Eigen::MatrixXd w_gram;       // W_n W_n^T
  double telescoping_residual = 0.0;
};

/// Folds whitening_step over the rows of `rows` (n x p) in time order.
WhiteningResult whitening_run(const Eigen::MatrixXd& rows, double lambda);

/// Ordered product prod_{i=1..n} (I - x_i x_i^T / (lambda + |x_i|^2)).
/// Independent of the recursion; equals M_n in exact arithmetic.
Eigen::MatrixXd product_form_bias(const Eigen::MatrixXd& rows, double lambda);

/// W_n W_n^T for a design whose rows are drawn from mutually orthogonal arm
/// vectors, by direct summation of
///   r_A^{2 N_A(i-1)} / (lambda + |v_A|^2)^2 v_A v_A^T,  r_a = lambda / (lambda + |v_a|^2).
/// Throws NotOrthogonal if some pair of arm vectors is not orthogonal.
Eigen::MatrixXd orthogonal_variance_oracle(const std::vector<Eigen::VectorXd>& arm_vectors,
                                           std::span<const std::size_t> pull_sequence,
                                           double lambda);

/// Implicit SGD on the least-squares loss run backwards from the last
/// observation to the first, starting at beta_ols. Matches the decorrelated
/// estimate of w_decorrelate in exact arithmetic.
Eigen::VectorXd reverse_sgd_estimate(const AdaptiveDataset& data, const Eigen::VectorXd& beta_ols,
                                     double lambda);

/// Single-pass decorrelation for (x_i, y_i) arriving together. Stores no
/// columns: uses beta_d = M_n beta_ols + sum_i w_i y_i, with OLS computed from
/// accumulated X^T X, X^T y and y^T y at the end.
class StreamingDecorrelator {
 public:
  StreamingDecorrelator(Eigen::Index p, double lambda);

  void push(const Eigen::VectorXd& x, double y);

  std::size_t count() const noexcept { return count_; }

  /// Throws SingularDesign if the accumulated Gram is not invertible.
  DecorrelatedEstimate estimate(const OlsOptions& options = {}) const;

 private:
  double lambda_;
  std::size_t count_ = 0;
  Eigen::MatrixXd bias_matrix_;
  Eigen::MatrixXd w_gram_;
  Eigen::VectorXd w_y_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd xty_;
  double yty_ = 0.0;
};

}  // namespace wdecor
