#pragma once

#include <cstdint>

namespace crowdsim {

// P[X <= m] for X ~ Poisson(lambda). Exact term-by-term accumulation; switches
// to log space when exp(-lambda) would underflow.
double poisson_cdf(std::int64_t m, double lambda);

// Two-sided and one-sided p-values for a paired t statistic with df degrees of
// freedom, plus the 97.5% quantile used for confidence intervals.
double student_t_two_sided_p(double t, double df);
double student_t_one_sided_p(double t, double df);
double student_t_quantile_975(double df);

} // namespace crowdsim
