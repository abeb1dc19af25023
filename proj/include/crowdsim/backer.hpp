#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "crowdsim/campaign.hpp"
#include "crowdsim/types.hpp"

namespace crowdsim {

// Estimator configuration shared by a backer population. The forward walk
// infers a pledge rate from the disclosed report alone, as a pseudo-count
// posterior: (implied pledges + prior pledges) / (elapsed periods + prior
// periods). A report of little progress late in the campaign therefore reads
// worse than the same progress early on, and fresh campaigns start from the
// prior pace instead of a certain failure.
struct EstimatorParams {
    int rollouts = 200;
    double prior_pledges = 0.8;  // pseudo pledges
    double prior_periods = 8.0;  // pseudo periods

    void validate() const {
        if (rollouts < 1)
            throw std::invalid_argument("EstimatorParams: rollouts must be >= 1");
        if (prior_pledges < 0 || prior_periods < 0)
            throw std::invalid_argument("EstimatorParams: negative prior");
    }
};

// Private backer type. threshold is empty when the valuation cannot justify
// any pledge (v < P), the NeverPledges case.
struct BackerProfile {
    BackerId id = 0;
    Period arrival = 1;
    Period patience = 1;                 // l_i, periods the backer stays
    std::optional<double> threshold;     // phi_i in (0, 1]
    double payoff = 1.0;                 // c_i
    double valuation = 0.0;              // in minor currency units
    double optimism = 1.0;               // private multiplicative tilt on the estimate
    std::uint64_t noise_seed = 0;        // estimator randomness

    Period departure() const { return arrival + patience - 1; }
};

// Pledge rate a backer reads out of a report: implied pledges per elapsed
// period, smoothed by the prior pseudo-counts.
double implied_pledge_rate(const StatusReport& report, const CampaignParams& campaign,
                           const EstimatorParams& params);

// Probability that a single forward walk fails to reach the goal by the
// deadline: P[Poisson((T - t) * rate) <= need - 1], evaluated exactly. A
// rollout with uniform u succeeds iff u > this threshold, which is the
// inverse-CDF sample of the walk's endpoint.
double walk_failure_threshold(const StatusReport& report, Period t,
                              const CampaignParams& campaign, const EstimatorParams& params);

// Monte-Carlo success estimate over a fixed table of seeded rollout uniforms.
// The table is drawn once per backer, so repeated estimates reuse the same
// randomness: estimates are deterministic and monotone in the walk rate.
class PosEstimator {
public:
    PosEstimator(std::uint64_t seed, int rollouts);

    double estimate(const BackerProfile& profile, Period t, const StatusReport& report,
                    const CampaignParams& campaign, const EstimatorParams& params) const;

private:
    std::vector<double> sorted_uniforms_;
};

// One-shot convenience wrappers; the engine keeps a PosEstimator per backer.
double estimate_pos(const BackerProfile& profile, Period t, const StatusReport& report,
                    const CampaignParams& campaign, const EstimatorParams& params);

// Composite disclosure: the estimate of the most recent report in the set.
double aggregate_beliefs(const BackerProfile& profile, Period t,
                         std::span<const StatusReport> reports, const CampaignParams& campaign,
                         const EstimatorParams& params);

// Thresholding rule: pledge iff the estimate meets the cutoff (inclusive).
bool decide(const BackerProfile& profile, Period t, const StatusReport& report,
            const CampaignParams& campaign, const EstimatorParams& params);

double utility(const BackerProfile& profile, Period t, bool pledged, const StatusReport& report,
               const CampaignParams& campaign, const EstimatorParams& params);

// Break-even threshold for a risk-neutral backer: phi = P / v for v >= P,
// empty (never pledges) when the valuation is below the pledge price.
std::optional<double> derive_threshold(double valuation, Money price);

// Seeded Poisson arrival process; a count is a pure function of (seed, t), so
// identical seeds replay identical arrivals in any evaluation order.
class ArrivalStream {
public:
    ArrivalStream(std::uint64_t seed, double rate);
    ArrivalStream(std::uint64_t seed, std::vector<double> per_period_rates);

    Count at(Period t) const;
    double rate_at(Period t) const;

private:
    std::uint64_t seed_;
    double constant_rate_ = 0.0;
    std::vector<double> rates_;
};

Count spawn_arrivals(const ArrivalStream& stream, Period t);

} // namespace crowdsim
