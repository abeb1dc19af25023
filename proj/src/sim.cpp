#include "crowdsim/sim.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace crowdsim {

void SimConfig::validate() const {
    campaign.validate();
    population.validate();
    if (arrival_rate < 0.0)
        throw std::invalid_argument("SimConfig: negative arrival rate");
    for (double r : arrival_rates)
        if (r < 0.0)
            throw std::invalid_argument("SimConfig: negative arrival rate");
    make_policy(policy, policy_params, 0); // throws on unknown policy name
}

namespace {

ArrivalStream make_arrivals(const SimConfig& config) {
    const std::uint64_t seed = derive_seed(config.master_seed, {streams::kArrivals});
    if (!config.arrival_rates.empty())
        return ArrivalStream(seed, config.arrival_rates);
    return ArrivalStream(seed, config.arrival_rate);
}

} // namespace

CampaignSim::CampaignSim(const SimConfig& config)
    : config_(config),
      ledger_((config.validate(), config.campaign)),
      arrivals_(make_arrivals(config)),
      policy_(make_policy(config.policy, config.policy_params,
                          derive_seed(config.master_seed, {streams::kSelector}))) {
    result_.trace.reserve(static_cast<std::size_t>(config_.campaign.deadline));
}

void CampaignSim::spawn(Period t, Count n) {
    // Batch arrivals become sequential sub-arrivals: distinct ids, same period.
    for (Count i = 0; i < n; ++i) {
        const BackerId id = next_id_++;
        Rng draw(derive_seed(config_.master_seed,
                             {streams::kValuations, static_cast<std::uint64_t>(id)}));
        const double mean = static_cast<double>(config_.campaign.price);
        const double valuation =
            draw.next_gaussian(mean, config_.population.valuation_std_factor * mean);
        BackerProfile profile;
        profile.id = id;
        profile.arrival = t;
        profile.patience =
            static_cast<Period>(draw.next_int(1, config_.population.patience_max));
        profile.threshold = valuation > 0.0 ? derive_threshold(valuation, config_.campaign.price)
                                            : std::nullopt;
        profile.payoff = config_.population.payoff;
        profile.valuation = valuation;
        profile.optimism =
            draw.next_uniform(config_.population.optimism_min, config_.population.optimism_max);
        profile.noise_seed = derive_seed(config_.master_seed,
                                         {streams::kRollouts, static_cast<std::uint64_t>(id)});
        live_.push_back(LiveBacker{profile,
                                   PosEstimator(profile.noise_seed,
                                                config_.population.estimator.rollouts)});
        if (config_.collect_events) {
            result_.events.push_back(
                BackerEvent{BackerEvent::Kind::Arrive, id, t});
            result_.backers.push_back(BackerSummary{id, t, profile.patience, false});
        }
    }
}

void CampaignSim::step() {
    if (done())
        throw std::logic_error("CampaignSim: campaign already finished");
    const Period t = next_period_++;
    PeriodTrace row;

    row.arrivals = arrivals_.at(t);
    spawn(t, row.arrivals);

    // live_ holds only present backers; ids ascend with arrival order.
    std::vector<BackerView> views;
    views.reserve(live_.size());
    for (const LiveBacker& b : live_)
        views.push_back(BackerView{b.profile.id, b.profile.arrival});

    using Clock = std::chrono::steady_clock;
    Clock::time_point begin{};
    if (config_.measure_time)
        begin = Clock::now();
    const std::vector<DisclosureDecision> decisions = policy_->disclose(t, ledger_, views);
    if (config_.measure_time)
        result_.policy_wall_ms +=
            std::chrono::duration<double, std::milli>(Clock::now() - begin).count();

    if (decisions.size() != views.size())
        throw std::logic_error("CampaignSim: policy must answer every present backer");
    row.disclosures = static_cast<Count>(decisions.size());

    // The platform enforces truthful reports.
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        const DisclosureDecision& d = decisions[i];
        if (d.backer != views[i].id || d.time != t || d.report.time > t ||
            !(d.report == ledger_.status_at(d.report.time)))
            throw std::logic_error("CampaignSim: policy emitted an untruthful disclosure");
    }

    // Decisions in arrival order, capped by the remaining rewards.
    Count remaining = config_.campaign.rewards - ledger_.total_pledges();
    std::vector<ObservedResponse> responses;
    responses.reserve(decisions.size());
    Count pledges = 0;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        LiveBacker& backer = live_[i];
        const DisclosureDecision& d = decisions[i];
        bool alpha = false;
        if (remaining > 0 && backer.profile.threshold.has_value()) {
            const double r = backer.estimator.estimate(backer.profile, t, d.report,
                                                       config_.campaign,
                                                       config_.population.estimator);
            alpha = r >= *backer.profile.threshold;
        }
        if (alpha) {
            --remaining;
            ++pledges;
            backer.pledged = true;
            if (config_.collect_events) {
                result_.events.push_back(
                    BackerEvent{BackerEvent::Kind::Pledge, backer.profile.id, t});
                result_.backers[static_cast<std::size_t>(backer.profile.id)].pledged = true;
            }
        }
        if (config_.collect_events)
            result_.events.push_back(
                BackerEvent{BackerEvent::Kind::Disclose, backer.profile.id, t});
        responses.push_back(ObservedResponse{d.backer, d.report.time, alpha});
    }

    if (pledges > 0)
        ledger_.record_pledges(t, pledges);

    if (config_.measure_time)
        begin = Clock::now();
    policy_->observe(t, ledger_, responses);
    if (config_.measure_time)
        result_.policy_wall_ms +=
            std::chrono::duration<double, std::milli>(Clock::now() - begin).count();

    // Departures: pledged this period (patience zeroed) or patience exhausted.
    std::vector<LiveBacker> still_present;
    still_present.reserve(live_.size());
    for (LiveBacker& b : live_) {
        const bool leaves = b.pledged || t >= b.profile.departure();
        if (leaves) {
            if (config_.collect_events)
                result_.events.push_back(
                    BackerEvent{BackerEvent::Kind::Depart, b.profile.id, t});
        } else {
            still_present.push_back(std::move(b));
        }
    }
    live_ = std::move(still_present);

    row.pledges = pledges;
    row.revenue = ledger_.raised_through(t);
    result_.trace.push_back(row);
}

SimResult CampaignSim::take_result() {
    if (!done())
        throw std::logic_error("CampaignSim: campaign still running");
    result_.final_revenue = ledger_.raised_through(config_.campaign.deadline);
    result_.success = result_.final_revenue >= config_.campaign.goal;
    result_.settled_revenue = result_.success ? result_.final_revenue : 0;
    return std::move(result_);
}

SimResult run_campaign(const SimConfig& config) {
    CampaignSim sim(config);
    while (!sim.done())
        sim.step();
    return sim.take_result();
}

Money settle(const SimResult& result, const CampaignParams& campaign) {
    return result.final_revenue >= campaign.goal ? result.final_revenue : 0;
}

} // namespace crowdsim
