#pragma once

namespace sctm {

/// erf/erfc by W. J. Cody's rational Chebyshev approximation (the CALERF
/// coefficient set), |relative error| below 1e-14 in double precision.
/// Self-contained so CDF values are bit-stable across platforms.
double cody_erf(double x);
double cody_erfc(double x);

/// Standard normal CDF, 0.5 * erfc(-z / sqrt(2)).
double std_normal_cdf(double z);

}  // namespace sctm
