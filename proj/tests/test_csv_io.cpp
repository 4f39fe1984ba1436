#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "gen.hpp"
#include "wdecor/csv_io.hpp"
#include "wdecor/error.hpp"

using namespace wdecor;

namespace {

TrialRow sample_row(gen::Rng& rng, std::size_t trial) {
  TrialRow r;
  r.trial = trial;
  r.seed = rng();
  r.estimator = gen::pick(rng, std::vector<std::string>{"OLS", "W_DECORR"});
  r.target_label = gen::pick(rng, std::vector<std::string>{"avg", "b,1", "say \"hi\"", "plain"});
  r.estimate = gen::uniform(rng, -5, 5);
  r.std_error = gen::uniform(rng, 0, 1);
  r.method = "OLS_GSN";
  r.level = 0.9;
  r.side = gen::pick(rng, std::vector<std::string>{"lower", "upper", "two_sided"});
  r.lower = r.side == "upper" ? -std::numeric_limits<double>::infinity() : r.estimate - 1.0;
  r.upper = r.side == "lower" ? std::numeric_limits<double>::infinity() : r.estimate + 1.0;
  r.covered = gen::index(rng, 2) == 1;
  r.width = gen::uniform(rng, 0, 2);
  r.lambda_min = static_cast<double>(gen::index(rng, 500));
  r.arm_counts = gen::index(rng, 2) ? "12;988" : "";
  return r;
}

bool same_double(double a, double b) {
  if (std::isnan(a)) return std::isnan(b);
  if (std::isinf(a)) return a == b;
  return std::abs(a - b) <= 1e-11 * std::max(1.0, std::abs(a));
}

}  // namespace

TEST_SUITE("csv_io") {

TEST_CASE("format_double") {
  CHECK(format_double(0.9) == "0.9");
  CHECK(format_double(1.0 / 3.0) == "0.333333333333");
  CHECK(format_double(1e-20) == "1e-20");
  CHECK(format_double(12345678) == "12345678");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("headers") {
  std::ostringstream t, s;
  write_trials_csv(t, {});
  write_summary_csv(s, {});
  CHECK(t.str() ==
        "trial,seed,estimator,target_label,estimate,stderr,method,level,side,lower,upper,covered,width,lambda_min,arm_counts\n");
  CHECK(s.str() == "estimator,method,target_label,level,side,coverage,n_trials,mean_width,sd_width,bias,kurtosis,ks_stat\n");
  CHECK(trials_columns().size() == 15);
  CHECK(summary_columns().size() == 12);
}

TEST_CASE("quoting and line endings") {
  TrialRow r;
  r.estimator = "OLS";
  r.target_label = "a,\"b\"";
  r.method = "OLS_GSN";
  r.side = "two_sided";
  r.covered = true;
  std::ostringstream out;
  const std::vector<TrialRow> rows{r};
  write_trials_csv(out, rows);
  const std::string text = out.str();
  CHECK(text.find("\"a,\"\"b\"\"\"") != std::string::npos);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.find(",1,0,0,") != std::string::npos);  // covered, width, lambda_min
}

TEST_CASE("trials round-trip") {
  gen::Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<TrialRow> rows;
    const std::size_t n = gen::index(rng, 30);
    for (std::size_t i = 0; i < n; ++i) rows.push_back(sample_row(rng, i));
    std::stringstream buffer;
    write_trials_csv(buffer, rows);
    const auto back = read_trials_csv(buffer);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(back[i].trial == rows[i].trial);
      CHECK(back[i].seed == rows[i].seed);
      CHECK(back[i].estimator == rows[i].estimator);
      CHECK(back[i].target_label == rows[i].target_label);
      CHECK(same_double(back[i].estimate, rows[i].estimate));
      CHECK(same_double(back[i].std_error, rows[i].std_error));
      CHECK(back[i].side == rows[i].side);
      CHECK(same_double(back[i].lower, rows[i].lower));
      CHECK(same_double(back[i].upper, rows[i].upper));
      CHECK(back[i].covered == rows[i].covered);
      CHECK(same_double(back[i].width, rows[i].width));
      CHECK(back[i].lambda_min == rows[i].lambda_min);
      CHECK(back[i].arm_counts == rows[i].arm_counts);
    }
  }
}

TEST_CASE("reader tolerates CRLF, column order and a missing arm_counts column") {
  std::istringstream in(
      "seed,trial,estimator,target_label,estimate,stderr,method,level,side,lower,upper,covered,width,lambda_min\r\n"
      "7,3,OLS,avg,0.5,0.1,OLS_GSN,0.9,upper,-inf,0.7,1,0.2,45\r\n");
  const auto rows = read_trials_csv(in);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].trial == 3);
  CHECK(rows[0].seed == 7);
  CHECK(rows[0].lower == -std::numeric_limits<double>::infinity());
  CHECK(rows[0].covered);
  CHECK(rows[0].lambda_min == 45.0);
  CHECK(rows[0].arm_counts.empty());
}

TEST_CASE("reader errors") {
  const auto message = [](const std::string& text) -> std::string {
    std::istringstream in(text);
    try {
      read_trials_csv(in);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidArgument);
      return e.what();
    }
    FAIL("expected an error");
    return {};
  };
  CHECK(message("trial,seed\n1,2\n").find("estimator") != std::string::npos);
  const std::string header =
      "trial,seed,estimator,target_label,estimate,stderr,method,level,side,lower,upper,covered,width,lambda_min\n";
  CHECK(message(header + "1,2,OLS\n").find("line 2") != std::string::npos);
  CHECK(message(header + "x,2,OLS,a,1,1,OLS_GSN,0.9,upper,0,1,1,1,1\n").find("line 2") != std::string::npos);
  CHECK(message("").find("empty") != std::string::npos);
}

TEST_CASE("summary rows are written in order") {
  SummaryRow a;
  a.estimator = "W_DECORR";
  a.method = "W_DECORR";
  a.target_label = "avg";
  a.level = 0.9;
  a.side = "two_sided";
  a.coverage = 0.875;
  a.n_trials = 8;
  a.kurtosis = std::nan("");
  std::ostringstream out;
  const std::vector<SummaryRow> rows{a};
  write_summary_csv(out, rows);
  CHECK(out.str().substr(out.str().find('\n') + 1) == "W_DECORR,W_DECORR,avg,0.9,two_sided,0.875,8,0,0,0,nan,0\n");
}

}  // TEST_SUITE
