#include "wdecor/mc_harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>
#include <tuple>

#include "wdecor/error.hpp"
#include "wdecor/normal.hpp"
#include "wdecor/parallel.hpp"
#include "wdecor/whitening.hpp"

namespace wdecor {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

std::string_view to_string(Estimator estimator) {
  return estimator == Estimator::Ols ? "OLS" : "W_DECORR";
}

std::optional<Estimator> parse_estimator(std::string_view name) {
  if (name == "OLS") return Estimator::Ols;
  if (name == "W_DECORR") return Estimator::WDecorrelated;
  return std::nullopt;
}

std::string_view to_string(Side side) {
  switch (side) {
    case Side::Lower: return "lower";
    case Side::Upper: return "upper";
    case Side::TwoSided: return "two_sided";
  }
  return "?";
}

std::optional<Side> parse_side(std::string_view name) {
  if (name == "lower") return Side::Lower;
  if (name == "upper") return Side::Upper;
  if (name == "two_sided") return Side::TwoSided;
  return std::nullopt;
}

Estimator estimator_for(IntervalMethod method) {
  return method == IntervalMethod::WDecorrelated ? Estimator::WDecorrelated : Estimator::Ols;
}

void ExperimentConfig::validate() const {
  wdecor::validate(process);
  lambda_rule.validate();
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (estimators.empty()) throw Error(ErrorCode::InvalidArgument, "no estimators selected");
  if (targets.empty()) throw Error(ErrorCode::InvalidArgument, "no targets");
  const auto p = dimension(process);
  for (const auto& t : targets) {
    if (t.direction.size() != p) {
      throw Error(ErrorCode::DimensionMismatch, "target '" + t.label + "' has wrong dimension");
    }
    if (t.direction.squaredNorm() == 0.0) {
      throw Error(ErrorCode::ZeroDirection, "target '" + t.label + "' is the zero vector");
    }
  }
  for (const double level : levels) {
    if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "levels must lie in (0, 1)");
  }
  for (const auto method : methods) {
    if (std::find(estimators.begin(), estimators.end(), estimator_for(method)) == estimators.end()) {
      throw Error(ErrorCode::InvalidArgument, std::string(to_string(method)) + " requires estimator " +
                                                  std::string(to_string(estimator_for(method))));
    }
  }
}

bool covers(double lower, double upper, double truth) noexcept {
  const auto slack = [&](double bound) {
    return std::isfinite(bound) ? kCoverageSlack * (1.0 + std::abs(bound) + std::abs(truth)) : 0.0;
  };
  return truth >= lower - slack(lower) && truth <= upper + slack(upper);
}

namespace {

bool wants(const std::vector<Estimator>& list, Estimator e) {
  return std::find(list.begin(), list.end(), e) != list.end();
}

constexpr Side kSides[] = {Side::Lower, Side::Upper, Side::TwoSided};

IntervalRecord make_record(const Interval& two_sided_or_ellipsoid, const Interval* one_sided,
                           Estimator estimator, std::size_t target, double level, Side side,
                           double truth) {
  IntervalRecord rec;
  rec.estimator = estimator;
  rec.method = two_sided_or_ellipsoid.method;
  rec.target = target;
  rec.level = level;
  rec.side = side;
  const Interval& source = one_sided ? *one_sided : two_sided_or_ellipsoid;
  const double center = source.estimate;
  switch (side) {
    case Side::TwoSided:
      rec.lower = source.lower;
      rec.upper = source.upper;
      rec.width = rec.upper - rec.lower;
      break;
    case Side::Lower:
      rec.lower = source.lower;
      rec.upper = kInf;
      rec.width = center - source.lower;
      break;
    case Side::Upper:
      rec.lower = -kInf;
      rec.upper = source.upper;
      rec.width = source.upper - center;
      break;
  }
  rec.covered = covers(rec.lower, rec.upper, truth);
  return rec;
}

TrialRecord run_trial(const ExperimentConfig& config, std::size_t t, double lambda,
                      const Eigen::VectorXd& beta) {
  TrialRecord rec;
  rec.trial = t;
  rec.seed = config.base_seed ^ static_cast<std::uint64_t>(t);
  Rng rng = make_rng(rec.seed);
  ProcessDraw draw = simulate(config.process, rng);
  rec.arm_counts = draw.arm_counts;
  rec.lambda_min = realized_lambda_min(draw);

  OlsFit fit;
  try {
    fit = ols_fit(draw.data);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularDesign) throw;
    rec.failed = true;
    rec.failure = e.what();
    return rec;
  }

  std::optional<DecorrelatedEstimate> decorrelated;
  if (wants(config.estimators, Estimator::WDecorrelated)) {
    const WhiteningResult wh = whitening_run(draw.data.covariates(), lambda);
    decorrelated = w_decorrelate(fit, wh, draw.data);
    rec.w_gram_diagonal = decorrelated->w_gram.diagonal();
  }

  const double sigma = std::sqrt(fit.sigma2_hat);
  for (const Estimator e : config.estimators) {
    for (std::size_t k = 0; k < config.targets.size(); ++k) {
      const Eigen::VectorXd& v = config.targets[k].direction;
      PointEstimate pe;
      pe.estimator = e;
      pe.target = k;
      if (e == Estimator::Ols) {
        pe.estimate = v.dot(fit.beta_ols);
        pe.std_error = sigma * std::sqrt(std::max(0.0, v.dot(fit.gram_inverse * v)));
      } else {
        pe.estimate = v.dot(decorrelated->beta_d);
        pe.std_error = sigma * std::sqrt(std::max(0.0, v.dot(decorrelated->w_gram * v)));
      }
      const double truth = v.dot(beta);
      pe.standardized_error = pe.std_error > 0.0 ? (pe.estimate - truth) / pe.std_error : kNaN;
      rec.estimates.push_back(pe);
    }
  }

  for (const Estimator e : config.estimators) {
    for (const IntervalMethod m : config.methods) {
      if (estimator_for(m) != e) continue;
      for (const double level : config.levels) {
        const double alpha = 1.0 - level;
        for (std::size_t k = 0; k < config.targets.size(); ++k) {
          const Eigen::VectorXd& v = config.targets[k].direction;
          const double truth = v.dot(beta);
          std::optional<Interval> two, one;
          switch (m) {
            case IntervalMethod::OlsGaussian:
              two = ci_gaussian_ols(fit, v, alpha, true);
              one = ci_gaussian_ols(fit, v, alpha, false);
              break;
            case IntervalMethod::WDecorrelated:
              two = ci_w_decorrelated(*decorrelated, v, alpha, true);
              one = ci_w_decorrelated(*decorrelated, v, alpha, false);
              break;
            case IntervalMethod::OlsConcentration:
              two = ci_concentration(fit, draw.data, v, alpha, config.concentration);
              break;
          }
          for (const Side side : kSides) {
            const Interval* one_sided = (side != Side::TwoSided && one) ? &*one : nullptr;
            rec.intervals.push_back(make_record(*two, one_sided, e, k, level, side, truth));
          }
        }
      }
    }
  }
  return rec;
}

std::string join_counts(const std::vector<std::size_t>& counts) {
  std::string out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(counts[i]);
  }
  return out;
}

}  // namespace

MCResult run_experiment(const ExperimentConfig& config, const ProgressCallback& progress) {
  config.validate();

  MCResult result;
  result.bandit = is_bandit(config.process);
  result.truth = true_beta(config.process);
  if (wants(config.estimators, Estimator::WDecorrelated)) {
    result.lambda_selection =
        select_lambda_detailed(config.lambda_rule, config.process, config.base_seed, config.workers);
    result.lambda_used = result.lambda_selection.lambda;
  }

  result.trials.resize(config.trials);
  std::mutex progress_mutex;
  std::size_t completed = 0;
  parallel_for(config.trials, config.workers, [&](std::size_t t) {
    result.trials[t] = run_trial(config, t, result.lambda_used, result.truth);
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(++completed, config.trials);
    }
  });

  for (const auto& rec : result.trials) result.failed_trials += rec.failed ? 1 : 0;

  std::map<std::string, double> truth;
  for (const auto& target : config.targets) truth[target.label] = target.direction.dot(result.truth);
  const std::vector<TrialRow> rows = flatten(result, config);
  result.summary = summarize(rows, truth);
  return result;
}

std::vector<TrialRow> flatten(const MCResult& result, const ExperimentConfig& config) {
  std::vector<TrialRow> rows;
  for (const auto& rec : result.trials) {
    if (rec.failed) continue;
    const std::string counts = join_counts(rec.arm_counts);
    for (const auto& iv : rec.intervals) {
      const auto pe = std::find_if(rec.estimates.begin(), rec.estimates.end(), [&](const PointEstimate& p) {
        return p.estimator == iv.estimator && p.target == iv.target;
      });
      TrialRow row;
      row.trial = rec.trial;
      row.seed = rec.seed;
      row.estimator = std::string(to_string(iv.estimator));
      row.target_label = config.targets[iv.target].label;
      row.estimate = pe->estimate;
      row.std_error = pe->std_error;
      row.method = std::string(to_string(iv.method));
      row.level = iv.level;
      row.side = std::string(to_string(iv.side));
      row.lower = iv.lower;
      row.upper = iv.upper;
      row.covered = iv.covered;
      row.width = iv.width;
      row.lambda_min = rec.lambda_min;
      row.arm_counts = counts;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SummaryRow> summarize(std::span<const TrialRow> rows,
                                  const std::map<std::string, double>& truth) {
  using Key = std::tuple<std::string, std::string, std::string, double, std::string>;
  std::vector<Key> order;
  std::map<Key, std::vector<const TrialRow*>> groups;
  for (const auto& row : rows) {
    Key key{row.estimator, row.method, row.target_label, row.level, row.side};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&row);
  }

  std::vector<SummaryRow> out;
  out.reserve(order.size());
  for (const auto& key : order) {
    const auto& members = groups.at(key);
    SummaryRow s;
    std::tie(s.estimator, s.method, s.target_label, s.level, s.side) = key;
    s.n_trials = members.size();
    const auto truth_it = truth.find(s.target_label);
    const double target_truth = truth_it == truth.end() ? kNaN : truth_it->second;

    double covered = 0.0, width_sum = 0.0, bias_sum = 0.0;
    std::vector<double> standardized;
    for (const TrialRow* r : members) {
      covered += r->covered ? 1.0 : 0.0;
      width_sum += r->width;
      bias_sum += r->estimate - target_truth;
      if (r->std_error > 0.0) standardized.push_back((r->estimate - target_truth) / r->std_error);
    }
    const double m = static_cast<double>(s.n_trials);
    s.coverage = covered / m;
    s.mean_width = width_sum / m;
    double ss = 0.0;
    for (const TrialRow* r : members) ss += (r->width - s.mean_width) * (r->width - s.mean_width);
    s.sd_width = s.n_trials > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
    s.bias = bias_sum / m;
    try {
      const NormalityStats ns = normality_stats(std::move(standardized));
      s.kurtosis = ns.kurtosis;
      s.ks_stat = ns.ks_statistic;
    } catch (const Error&) {
      s.kurtosis = kNaN;
      s.ks_stat = kNaN;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::pair<double, double>> pp_data(std::vector<double> standardized_errors) {
  if (standardized_errors.empty()) throw Error(ErrorCode::EmptyInput, "pp_data needs samples");
  std::sort(standardized_errors.begin(), standardized_errors.end());
  const double n = static_cast<double>(standardized_errors.size());
  std::vector<std::pair<double, double>> out;
  out.reserve(standardized_errors.size());
  for (std::size_t k = 0; k < standardized_errors.size(); ++k) {
    out.emplace_back(normal_cdf(standardized_errors[k]), static_cast<double>(k + 1) / n);
  }
  return out;
}

NormalityStats normality_stats(std::vector<double> standardized_errors) {
  if (standardized_errors.size() < 8) {
    throw Error(ErrorCode::TooFewSamples, "normality_stats needs at least 8 samples");
  }
  const double n = static_cast<double>(standardized_errors.size());
  double mean = 0.0;
  for (const double z : standardized_errors) mean += z;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (const double z : standardized_errors) {
    const double d2 = (z - mean) * (z - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw Error(ErrorCode::DegenerateSample, "zero sample variance");

  std::sort(standardized_errors.begin(), standardized_errors.end());
  double ks = 0.0;
  for (std::size_t k = 0; k < standardized_errors.size(); ++k) {
    const double cdf = normal_cdf(standardized_errors[k]);
    ks = std::max({ks, static_cast<double>(k + 1) / n - cdf, cdf - static_cast<double>(k) / n});
  }
  return NormalityStats{m4 / (m2 * m2), ks};
}

namespace {

std::size_t fraction_bin(std::size_t count, std::size_t total, std::size_t bins) {
  const double fraction = static_cast<double>(count) / static_cast<double>(total);
  const auto bin = static_cast<std::size_t>(fraction * static_cast<double>(bins));
  return std::min(bin, bins - 1);
}

}  // namespace

std::vector<std::size_t> arm_fraction_histogram(std::span<const BanditTrace> traces,
                                                std::size_t arm, std::size_t bins) {
  if (bins == 0) throw Error(ErrorCode::InvalidArgument, "bins must be >= 1");
  std::vector<std::size_t> hist(bins, 0);
  for (const auto& trace : traces) {
    if (arm >= trace.arm_counts.size()) throw Error(ErrorCode::DimensionMismatch, "arm out of range");
    ++hist[fraction_bin(trace.arm_counts[arm], trace.per_step_arms.size(), bins)];
  }
  return hist;
}

std::vector<std::size_t> arm_fraction_histogram(const MCResult& result, std::size_t arm,
                                                std::size_t bins) {
  if (!result.bandit) throw Error(ErrorCode::NotABanditProcess, "arm histogram needs bandit traces");
  if (bins == 0) throw Error(ErrorCode::InvalidArgument, "bins must be >= 1");
  std::vector<std::size_t> hist(bins, 0);
  for (const auto& rec : result.trials) {
    if (arm >= rec.arm_counts.size()) throw Error(ErrorCode::DimensionMismatch, "arm out of range");
    std::size_t total = 0;
    for (const auto c : rec.arm_counts) total += c;
    ++hist[fraction_bin(rec.arm_counts[arm], total, bins)];
  }
  return hist;
}

std::vector<double> standardized_errors(const MCResult& result, Estimator estimator,
                                        std::size_t target) {
  std::vector<double> out;
  for (const auto& rec : result.trials) {
    if (rec.failed) continue;
    for (const auto& pe : rec.estimates) {
      if (pe.estimator == estimator && pe.target == target && std::isfinite(pe.standardized_error)) {
        out.push_back(pe.standardized_error);
      }
    }
  }
  return out;
}

}  // namespace wdecor
