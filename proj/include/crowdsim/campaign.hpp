#pragma once

#include <stdexcept>
#include <vector>

#include "crowdsim/types.hpp"

namespace crowdsim {

// Fixed campaign terms, immutable for the campaign's lifetime.
struct CampaignParams {
    Money goal = 0;        // G
    Period deadline = 0;   // T
    Count rewards = 0;     // N
    Money price = 0;       // P, pledge size per reward

    void validate() const {
        if (goal <= 0)
            throw std::invalid_argument("CampaignParams: goal must be positive");
        if (deadline < 1)
            throw std::invalid_argument("CampaignParams: deadline must be >= 1");
        if (rewards < 1)
            throw std::invalid_argument("CampaignParams: rewards must be >= 1");
        if (price <= 0 || price > goal)
            throw std::invalid_argument("CampaignParams: price must satisfy 0 < P <= G");
    }

    Ratio price_fraction() const { return Ratio::of_money(price, goal); }
};

// Project status s(k): funds raised strictly before period k, as a fraction
// of the goal, together with the period stamp k.
struct StatusReport {
    Ratio fraction;
    Period time = 0;

    friend bool operator==(const StatusReport&, const StatusReport&) = default;
};

// Raised when a pledge would exceed the reward cap N.
class SoldOutError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Per-period pledge counts and the derived cumulative revenue M(t).
class Ledger {
public:
    explicit Ledger(CampaignParams params);

    void record_pledges(Period t, Count count);

    // M(t): revenue through period t inclusive. t <= 0 yields 0.
    Money raised_through(Period t) const;

    // s(k) = (M(k-1)/G, k); s(1) is always (0, 1).
    StatusReport status_at(Period k) const;

    // eta(t) = |s(t)| / t.
    double growth_rate(Period t) const;

    // M(t) >= G.
    bool is_successful(Period t) const;

    Count pledges_at(Period t) const;
    Count total_pledges() const { return total_; }
    const CampaignParams& params() const { return params_; }

    // Periods in [k0, t] carrying pairwise-distinct status values: k0 itself
    // plus every k whose preceding period recorded a pledge. status_at is
    // constant between consecutive entries, so candidate construction can
    // skip the duplicates that SHRINK would drop anyway.
    std::vector<Period> distinct_status_times(Period k0, Period t) const;

private:
    void check_period(Period t) const;

    CampaignParams params_;
    std::vector<Count> counts_;     // index 1..T
    std::vector<Money> cumulative_; // cumulative_[t] = M(t)
    Count total_ = 0;
};

} // namespace crowdsim
