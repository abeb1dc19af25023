#include "crowdsim/backer.hpp"

#include <algorithm>
#include <cmath>

#include "crowdsim/numerics.hpp"
#include "crowdsim/rng.hpp"

namespace crowdsim {

double implied_pledge_rate(const StatusReport& report, const CampaignParams& campaign,
                           const EstimatorParams& params) {
    const double implied_pledges =
        report.fraction.value() * static_cast<double>(campaign.goal) /
        static_cast<double>(campaign.price);
    return (implied_pledges + params.prior_pledges) /
           (static_cast<double>(report.time) + params.prior_periods);
}

namespace {

// Pledges still missing: smallest integer j with raised + j*P >= G, exact.
std::int64_t pledges_needed(const StatusReport& report, const CampaignParams& campaign) {
    // need = ceil(G * (1 - fraction) / P) = ceil(G * (den - num), den * P)
    const __int128 numer = static_cast<__int128>(campaign.goal) *
                           (report.fraction.den - report.fraction.num);
    const __int128 denom = static_cast<__int128>(report.fraction.den) * campaign.price;
    if (numer <= 0)
        return 0;
    return static_cast<std::int64_t>((numer + denom - 1) / denom);
}

void check_estimate_args(Period t, const StatusReport& report, const CampaignParams& campaign) {
    if (report.time > t)
        throw std::invalid_argument("estimate_pos: report from the future (k > t)");
    if (t > campaign.deadline)
        throw std::out_of_range("estimate_pos: t beyond deadline");
}

} // namespace

double walk_failure_threshold(const StatusReport& report, Period t,
                              const CampaignParams& campaign, const EstimatorParams& params) {
    const std::int64_t need = pledges_needed(report, campaign);
    if (need <= 0)
        return 0.0;
    const double horizon = static_cast<double>(campaign.deadline - t);
    if (horizon <= 0.0)
        return 1.0;
    const double mean = horizon * implied_pledge_rate(report, campaign, params);
    return poisson_cdf(need - 1, mean);
}

PosEstimator::PosEstimator(std::uint64_t seed, int rollouts) {
    Rng rng(seed);
    sorted_uniforms_.resize(static_cast<std::size_t>(rollouts));
    for (double& u : sorted_uniforms_)
        u = rng.next_double();
    std::sort(sorted_uniforms_.begin(), sorted_uniforms_.end());
}

double PosEstimator::estimate(const BackerProfile& profile, Period t, const StatusReport& report,
                              const CampaignParams& campaign,
                              const EstimatorParams& params) const {
    check_estimate_args(t, report, campaign);
    if (report.fraction >= Ratio(1, 1))
        return 1.0;
    if (t >= campaign.deadline)
        return 0.0; // no periods remain, goal not met
    const double fail = walk_failure_threshold(report, t, campaign, params);
    const auto below = std::upper_bound(sorted_uniforms_.begin(), sorted_uniforms_.end(), fail);
    const double successes =
        static_cast<double>(sorted_uniforms_.end() - below);
    const double raw = successes / static_cast<double>(sorted_uniforms_.size());
    return std::clamp(profile.optimism * raw, 0.0, 1.0);
}

double estimate_pos(const BackerProfile& profile, Period t, const StatusReport& report,
                    const CampaignParams& campaign, const EstimatorParams& params) {
    params.validate();
    PosEstimator estimator(profile.noise_seed, params.rollouts);
    return estimator.estimate(profile, t, report, campaign, params);
}

double aggregate_beliefs(const BackerProfile& profile, Period t,
                         std::span<const StatusReport> reports, const CampaignParams& campaign,
                         const EstimatorParams& params) {
    if (reports.empty())
        throw std::invalid_argument("aggregate_beliefs: empty report set");
    const StatusReport* latest = &reports[0];
    for (const StatusReport& r : reports) {
        if (r.time > latest->time)
            latest = &r;
    }
    return estimate_pos(profile, t, *latest, campaign, params);
}

bool decide(const BackerProfile& profile, Period t, const StatusReport& report,
            const CampaignParams& campaign, const EstimatorParams& params) {
    if (!profile.threshold.has_value())
        return false;
    return estimate_pos(profile, t, report, campaign, params) >= *profile.threshold;
}

double utility(const BackerProfile& profile, Period t, bool pledged, const StatusReport& report,
               const CampaignParams& campaign, const EstimatorParams& params) {
    if (!profile.threshold.has_value())
        return 0.0;
    const double r = estimate_pos(profile, t, report, campaign, params);
    if (r >= *profile.threshold)
        return pledged ? profile.payoff : 0.0;
    return 0.0;
}

std::optional<double> derive_threshold(double valuation, Money price) {
    if (valuation <= 0.0 || price <= 0)
        throw std::invalid_argument("derive_threshold: non-positive input");
    if (valuation < static_cast<double>(price))
        return std::nullopt;
    return static_cast<double>(price) / valuation;
}

ArrivalStream::ArrivalStream(std::uint64_t seed, double rate)
    : seed_(seed), constant_rate_(rate) {
    if (rate < 0.0)
        throw std::invalid_argument("ArrivalStream: negative rate");
}

ArrivalStream::ArrivalStream(std::uint64_t seed, std::vector<double> per_period_rates)
    : seed_(seed), rates_(std::move(per_period_rates)) {
    for (double r : rates_)
        if (r < 0.0)
            throw std::invalid_argument("ArrivalStream: negative rate");
}

double ArrivalStream::rate_at(Period t) const {
    if (rates_.empty())
        return constant_rate_;
    // periods beyond the schedule are quiet
    const std::size_t idx = static_cast<std::size_t>(t - 1);
    return idx < rates_.size() ? rates_[idx] : 0.0;
}

Count ArrivalStream::at(Period t) const {
    if (t < 1)
        throw std::out_of_range("ArrivalStream: period must be >= 1");
    std::uint64_t s = derive_seed(seed_, {static_cast<std::uint64_t>(t)});
    Rng rng(s);
    return poisson_inverse(rate_at(t), rng.next_double());
}

Count spawn_arrivals(const ArrivalStream& stream, Period t) { return stream.at(t); }

} // namespace crowdsim
