#pragma once

namespace wdecor {

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal quantile. Rational approximation (Acklam) refined by one
/// Halley step against erfc; absolute error well below 1e-9 on (1e-8, 1 - 1e-8).
/// Throws InvalidArgument unless 0 < prob < 1.
double normal_quantile(double prob);

}  // namespace wdecor
