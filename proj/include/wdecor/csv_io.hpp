#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wdecor/mc_harness.hpp"

namespace wdecor {

/// 12 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double value);

/// Column headers in output order.
const std::vector<std::string>& trials_columns();
const std::vector<std::string>& summary_columns();

/// LF line endings; fields containing commas or quotes are quoted.
void write_trials_csv(std::ostream& out, std::span<const TrialRow> rows);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

/// Reads a trials.csv by header name. Throws InvalidArgument naming a missing
/// column or a malformed line.
std::vector<TrialRow> read_trials_csv(std::istream& in);

}  // namespace wdecor
