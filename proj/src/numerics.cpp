#include "crowdsim/numerics.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

namespace crowdsim {

double poisson_cdf(std::int64_t m, double lambda) {
    if (m < 0)
        return 0.0;
    if (lambda <= 0.0)
        return 1.0;

    // Mass above m is negligible once lambda exceeds m by many standard
    // deviations; saves the long accumulation on hopeless tails.
    const double sd = std::sqrt(lambda);
    if (lambda > m + 40.0 * sd + 50.0)
        return 0.0;

    if (lambda < 700.0) {
        double term = std::exp(-lambda);
        double cum = term;
        for (std::int64_t i = 1; i <= m; ++i) {
            term *= lambda / static_cast<double>(i);
            cum += term;
        }
        return std::min(cum, 1.0);
    }

    // Log-space accumulation for large lambda.
    const double log_lambda = std::log(lambda);
    double log_fact = 0.0;
    double log_sum = -lambda; // i = 0 term
    for (std::int64_t i = 1; i <= m; ++i) {
        log_fact += std::log(static_cast<double>(i));
        const double log_term = -lambda + static_cast<double>(i) * log_lambda - log_fact;
        const double hi = std::max(log_sum, log_term);
        log_sum = hi + std::log1p(std::exp(std::min(log_sum, log_term) - hi));
    }
    return std::min(std::exp(log_sum), 1.0);
}

double student_t_two_sided_p(double t, double df) {
    boost::math::students_t dist(df);
    const double tail = boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
    return std::min(1.0, 2.0 * tail);
}

double student_t_one_sided_p(double t, double df) {
    boost::math::students_t dist(df);
    return boost::math::cdf(boost::math::complement(dist, t));
}

double student_t_quantile_975(double df) {
    boost::math::students_t dist(df);
    return boost::math::quantile(dist, 0.975);
}

} // namespace crowdsim
