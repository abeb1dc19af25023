#pragma once

#include <memory>
#include <string>
#include <vector>

#include "crowdsim/backer.hpp"
#include "crowdsim/campaign.hpp"
#include "crowdsim/policies.hpp"

namespace crowdsim {

// Backer population generated on arrival.
struct PopulationParams {
    double valuation_std_factor = 0.25; // std as a multiple of the mean (= price)
    Period patience_max = 48;           // L
    double optimism_min = 0.9;
    double optimism_max = 1.1;
    double payoff = 1.0;
    EstimatorParams estimator;

    void validate() const {
        if (valuation_std_factor < 0.05 || valuation_std_factor > 0.5)
            throw std::invalid_argument(
                "PopulationParams: valuation std must lie in [0.05, 0.5] of the mean");
        if (patience_max < 1)
            throw std::invalid_argument("PopulationParams: patience_max must be >= 1");
        if (optimism_min > optimism_max || optimism_min < 0.0)
            throw std::invalid_argument("PopulationParams: bad optimism range");
        estimator.validate();
    }
};

struct SimConfig {
    CampaignParams campaign;
    double arrival_rate = 0.1;          // mean Poisson arrivals per period
    std::vector<double> arrival_rates;  // optional per-period schedule theta(t)
    PopulationParams population;
    std::string policy = "immediate";
    PolicyParams policy_params;
    std::uint64_t master_seed = 0;
    bool collect_events = false; // per-backer event log for diagnostics
    bool measure_time = false;   // wall-clock the policy calls

    void validate() const;
};

struct PeriodTrace {
    Count arrivals = 0;
    Count disclosures = 0;
    Count pledges = 0;
    Money revenue = 0; // M(t)
};

// Per-backer diagnostics, populated when collect_events is set.
struct BackerEvent {
    enum class Kind { Arrive, Disclose, Pledge, Depart };
    Kind kind;
    BackerId backer;
    Period period;
};

struct BackerSummary {
    BackerId id = 0;
    Period arrival = 0;
    Period patience = 0;
    bool pledged = false;
};

struct SimResult {
    Money final_revenue = 0;   // M(T)
    bool success = false;      // M(T) >= G
    Money settled_revenue = 0; // all-or-nothing settlement
    std::vector<PeriodTrace> trace;
    double policy_wall_ms = 0.0;
    std::vector<BackerEvent> events;     // only when collect_events
    std::vector<BackerSummary> backers;  // only when collect_events
};

// One campaign, stepped period by period. Exposed so the step ordering is
// testable in isolation; run_campaign drives it to the deadline.
class CampaignSim {
public:
    explicit CampaignSim(const SimConfig& config);

    void step();                  // advance one period
    Period now() const { return next_period_ - 1; } // last completed period
    bool done() const { return next_period_ > config_.campaign.deadline; }
    const Ledger& ledger() const { return ledger_; }

    SimResult take_result();

private:
    struct LiveBacker {
        BackerProfile profile;
        PosEstimator estimator;
        bool pledged = false;
    };

    void spawn(Period t, Count n);

    SimConfig config_;
    Ledger ledger_;
    ArrivalStream arrivals_;
    std::unique_ptr<DisclosurePolicy> policy_;
    std::vector<LiveBacker> live_;
    BackerId next_id_ = 0;
    Period next_period_ = 1;
    SimResult result_;
};

SimResult run_campaign(const SimConfig& config);

// All-or-nothing settlement of a finished run.
Money settle(const SimResult& result, const CampaignParams& campaign);

} // namespace crowdsim
