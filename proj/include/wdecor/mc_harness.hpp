#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wdecor/intervals.hpp"
#include "wdecor/policies.hpp"
#include "wdecor/process.hpp"
#include "wdecor/tuning.hpp"

namespace wdecor {

enum class Estimator { Ols, WDecorrelated };
enum class Side { Lower, Upper, TwoSided };

std::string_view to_string(Estimator estimator);
std::optional<Estimator> parse_estimator(std::string_view name);
std::string_view to_string(Side side);
std::optional<Side> parse_side(std::string_view name);

/// Estimator whose point estimate and standard error accompany a method.
Estimator estimator_for(IntervalMethod method);

struct Target {
  std::string label;
  Eigen::VectorXd direction;
};

struct ExperimentConfig {
  Process process;
  std::vector<Estimator> estimators{Estimator::Ols, Estimator::WDecorrelated};
  std::vector<IntervalMethod> methods{IntervalMethod::OlsGaussian, IntervalMethod::OlsConcentration,
                                      IntervalMethod::WDecorrelated};
  ConcentrationParams concentration;
  std::vector<Target> targets;
  std::vector<double> levels;  // nominal coverage levels, each in (0, 1)
  LambdaRule lambda_rule;
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  unsigned workers = 0;

  /// Throws InvalidArgument on a malformed configuration.
  void validate() const;
};

struct PointEstimate {
  Estimator estimator = Estimator::Ols;
  std::size_t target = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  /// (estimate - truth) / std_error; NaN when std_error is zero.
  double standardized_error = 0.0;
};

struct IntervalRecord {
  Estimator estimator = Estimator::Ols;
  IntervalMethod method = IntervalMethod::OlsGaussian;
  std::size_t target = 0;
  double level = 0.0;
  Side side = Side::TwoSided;
  double lower = 0.0;
  double upper = 0.0;
  bool covered = false;
  /// upper - lower two-sided; distance from the center to the finite bound one-sided.
  double width = 0.0;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure;
  double lambda_min = 0.0;
  std::vector<std::size_t> arm_counts;
  Eigen::VectorXd w_gram_diagonal;  // empty unless W_DECORR ran
  std::vector<PointEstimate> estimates;
  std::vector<IntervalRecord> intervals;
};

/// One line of trials.csv.
struct TrialRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string estimator;
  std::string target_label;
  double estimate = 0.0;
  double std_error = 0.0;
  std::string method;
  double level = 0.0;
  std::string side;
  double lower = 0.0;
  double upper = 0.0;
  bool covered = false;
  double width = 0.0;
  double lambda_min = 0.0;
  std::string arm_counts;  // "n1;n2;..." for bandits, empty otherwise
};

/// One line of summary.csv.
struct SummaryRow {
  std::string estimator;
  std::string method;
  std::string target_label;
  double level = 0.0;
  std::string side;
  double coverage = 0.0;
  std::size_t n_trials = 0;
  double mean_width = 0.0;
  double sd_width = 0.0;
  double bias = 0.0;
  double kurtosis = 0.0;
  double ks_stat = 0.0;
};

struct MCResult {
  std::vector<TrialRecord> trials;
  std::vector<SummaryRow> summary;
  double lambda_used = 0.0;
  LambdaSelection lambda_selection;
  std::size_t failed_trials = 0;
  bool bandit = false;
  Eigen::VectorXd truth;
};

using ProgressCallback = std::function<void(std::size_t completed, std::size_t total)>;

/// Trial t draws from make_rng(base_seed ^ t). Trials failing with
/// SingularDesign are kept as failed records and excluded from summaries.
/// Output is identical for any worker count.
MCResult run_experiment(const ExperimentConfig& config, const ProgressCallback& progress = {});

/// Coverage slack: endpoints are widened by this relative amount so that a
/// zero-width interval at an exactly recovered truth counts as covering.
inline constexpr double kCoverageSlack = 1e-12;
bool covers(double lower, double upper, double truth) noexcept;

std::vector<TrialRow> flatten(const MCResult& result, const ExperimentConfig& config);

/// Groups rows by (estimator, method, target, level, side) in order of first
/// appearance. `truth` maps target labels to <v, beta>.
std::vector<SummaryRow> summarize(std::span<const TrialRow> rows,
                                  const std::map<std::string, double>& truth);

/// (Phi(z_(k)), k/n) for the sorted sample. Throws EmptyInput.
std::vector<std::pair<double, double>> pp_data(std::vector<double> standardized_errors);

struct NormalityStats {
  double kurtosis = 0.0;  // m4 / m2^2, equals 3 for a normal
  double ks_statistic = 0.0;
};

/// Throws TooFewSamples below 8 samples, DegenerateSample at zero variance.
NormalityStats normality_stats(std::vector<double> standardized_errors);

/// Counts of N_arm(n)/n over `bins` equal-width bins covering [0, 1].
std::vector<std::size_t> arm_fraction_histogram(std::span<const BanditTrace> traces,
                                                std::size_t arm, std::size_t bins);
/// Same, from harness records. Throws NotABanditProcess for AR experiments.
std::vector<std::size_t> arm_fraction_histogram(const MCResult& result, std::size_t arm,
                                                std::size_t bins);

/// Standardized errors of one estimator/target over the non-failed trials.
std::vector<double> standardized_errors(const MCResult& result, Estimator estimator,
                                        std::size_t target);

}  // namespace wdecor
