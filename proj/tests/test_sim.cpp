#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "crowdsim/rng.hpp"
#include "crowdsim/sim.hpp"

using namespace crowdsim;

namespace {

SimConfig small_config() {
    SimConfig config;
    config.campaign = CampaignParams{1000, 30, 20, 100};
    config.arrival_rate = 0.5;
    config.population.valuation_std_factor = 0.3;
    config.population.patience_max = 6;
    config.population.estimator.rollouts = 64;
    config.policy = "immediate";
    config.master_seed = 17;
    return config;
}

// Forces every pledge-capable backer to pledge on sight: the huge pledge
// prior makes the walk succeed almost surely.
SimConfig eager_config() {
    SimConfig config = small_config();
    config.population.estimator.prior_pledges = 1e6;
    config.population.estimator.prior_periods = 1.0;
    config.population.optimism_min = config.population.optimism_max = 1.0;
    return config;
}

} // namespace

TEST_CASE("config validation rejects bad inputs") {
    SimConfig config = small_config();
    CHECK_NOTHROW(config.validate());
    config.arrival_rate = -1.0;
    CHECK_THROWS(config.validate());
    config = small_config();
    config.policy = "clairvoyant";
    CHECK_THROWS(config.validate());
    config = small_config();
    config.population.valuation_std_factor = 0.9; // outside the supported range
    CHECK_THROWS(config.validate());
}

TEST_CASE("zero arrivals means zero revenue and failure") {
    SimConfig config = small_config();
    config.arrival_rate = 0.0;
    const SimResult result = run_campaign(config);
    CHECK(result.final_revenue == 0);
    CHECK_FALSE(result.success);
    CHECK(result.settled_revenue == 0);
    REQUIRE(result.trace.size() == 30);
    for (const PeriodTrace& row : result.trace) {
        CHECK(row.arrivals == 0);
        CHECK(row.disclosures == 0);
        CHECK(row.pledges == 0);
    }
}

TEST_CASE("a patience-one backer is gone the next period") {
    SimConfig config = small_config();
    config.population.patience_max = 1;
    config.arrival_rates = {3.0}; // arrivals only possible at t = 1
    config.arrival_rate = 0.0;
    // nobody pledges: prior of zero keeps every estimate at zero
    config.population.estimator.prior_pledges = 0.0;
    const SimResult result = run_campaign(config);
    CHECK(result.trace[0].disclosures == result.trace[0].arrivals);
    for (std::size_t t = 1; t < result.trace.size(); ++t)
        CHECK(result.trace[t].disclosures == 0);
    CHECK(result.final_revenue == 0);
}

TEST_CASE("pledging departs the backer and moves the ledger") {
    SimConfig config = eager_config();
    config.arrival_rates = {2.0}; // a burst at t = 1, then silence
    config.arrival_rate = 0.0;
    config.population.patience_max = 30;
    config.collect_events = true;
    const SimResult result = run_campaign(config);

    std::map<BackerId, int> pledge_count;
    std::map<BackerId, Period> pledge_period;
    for (const BackerEvent& e : result.events) {
        if (e.kind == BackerEvent::Kind::Pledge) {
            ++pledge_count[e.backer];
            pledge_period[e.backer] = e.period;
        }
        if (e.kind == BackerEvent::Kind::Disclose && pledge_period.count(e.backer))
            CHECK(e.period <= pledge_period[e.backer]); // no activity after pledging
    }
    for (const auto& [id, n] : pledge_count)
        CHECK(n == 1);
    CHECK(result.final_revenue ==
          static_cast<Money>(result.trace[0].pledges) * config.campaign.price);
}

TEST_CASE("reward cap saturates exactly at N") {
    SimConfig config = eager_config();
    config.campaign = CampaignParams{500, 30, 5, 100};
    config.arrival_rate = 3.0; // many more willing backers than rewards
    const SimResult result = run_campaign(config);
    CHECK(result.final_revenue == 500);
    Count pledges = 0;
    for (const PeriodTrace& row : result.trace)
        pledges += row.pledges;
    CHECK(pledges == 5);
}

TEST_CASE("identical seeds reproduce the run bit for bit") {
    for (const char* policy : {"immediate", "greedy", "meta"}) {
        CAPTURE(policy);
        SimConfig config = small_config();
        config.policy = policy;
        const SimResult a = run_campaign(config);
        const SimResult b = run_campaign(config);
        CHECK(a.final_revenue == b.final_revenue);
        REQUIRE(a.trace.size() == b.trace.size());
        for (std::size_t i = 0; i < a.trace.size(); ++i) {
            CHECK(a.trace[i].arrivals == b.trace[i].arrivals);
            CHECK(a.trace[i].pledges == b.trace[i].pledges);
            CHECK(a.trace[i].revenue == b.trace[i].revenue);
        }
    }
}

TEST_CASE("arrival draws are policy independent") {
    SimConfig config = small_config();
    config.policy = "immediate";
    const SimResult a = run_campaign(config);
    config.policy = "meta";
    const SimResult b = run_campaign(config);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i)
        CHECK(a.trace[i].arrivals == b.trace[i].arrivals);
}

TEST_CASE("settlement is all or nothing") {
    SimResult result;
    const CampaignParams campaign{1000, 10, 12, 100};

    result.final_revenue = 1000;
    CHECK(settle(result, campaign) == 1000);
    result.final_revenue = 900;
    CHECK(settle(result, campaign) == 0);
    result.final_revenue = 1200;
    CHECK(settle(result, campaign) == 1200);
}

TEST_CASE("conservation and presence windows over random configurations") {
    Rng rng(606);
    for (int trial = 0; trial < 40; ++trial) {
        SimConfig config;
        const Money price = 50 + rng.next_int(0, 10) * 10;
        const Count need = static_cast<Count>(rng.next_int(2, 12));
        config.campaign = CampaignParams{price * need,
                                         static_cast<Period>(rng.next_int(10, 60)),
                                         static_cast<Count>(need + rng.next_int(1, 10)), price};
        config.arrival_rate = rng.next_uniform(0.0, 1.0);
        config.population.valuation_std_factor = rng.next_uniform(0.05, 0.5);
        config.population.patience_max = static_cast<Period>(rng.next_int(1, 10));
        config.population.estimator.rollouts = 32;
        config.population.estimator.prior_pledges = rng.next_uniform(0.0, 5.0);
        config.population.estimator.prior_periods = rng.next_uniform(1.0, 50.0);
        config.policy = policy_names()[static_cast<std::size_t>(rng.next_int(0, 5))];
        config.master_seed = rng.next_u64();
        config.collect_events = true;

        const SimResult result = run_campaign(config);

        Count pledges = 0;
        for (const PeriodTrace& row : result.trace)
            pledges += row.pledges;
        REQUIRE(result.final_revenue == static_cast<Money>(pledges) * price); // conservation
        REQUIRE(pledges <= config.campaign.rewards);

        std::map<BackerId, int> per_backer_pledges;
        for (const BackerEvent& e : result.events) {
            const BackerSummary& b = result.backers[static_cast<std::size_t>(e.backer)];
            REQUIRE(e.period >= b.arrival);
            REQUIRE(e.period <= b.arrival + b.patience - 1); // presence window
            if (e.kind == BackerEvent::Kind::Pledge)
                ++per_backer_pledges[e.backer];
        }
        for (const auto& [id, n] : per_backer_pledges)
            REQUIRE(n == 1); // one pledge per backer, ever
    }
}
