#include "crowdsim/campaign.hpp"

#include <algorithm>

namespace crowdsim {

Ledger::Ledger(CampaignParams params) : params_(params) {
    params_.validate();
    counts_.assign(static_cast<std::size_t>(params_.deadline) + 1, 0);
    cumulative_.assign(static_cast<std::size_t>(params_.deadline) + 1, 0);
}

void Ledger::check_period(Period t) const {
    if (t < 1 || t > params_.deadline)
        throw std::out_of_range("Ledger: period out of range");
}

void Ledger::record_pledges(Period t, Count count) {
    check_period(t);
    if (count < 0)
        throw std::invalid_argument("Ledger: negative pledge count");
    if (count == 0)
        return;
    if (total_ + count > params_.rewards)
        throw SoldOutError("Ledger: pledge would exceed reward cap");
    counts_[static_cast<std::size_t>(t)] += count;
    total_ += count;
    const Money delta = static_cast<Money>(count) * params_.price;
    for (std::size_t i = static_cast<std::size_t>(t); i < cumulative_.size(); ++i)
        cumulative_[i] += delta;
}

Money Ledger::raised_through(Period t) const {
    if (t <= 0)
        return 0;
    if (t > params_.deadline)
        t = params_.deadline;
    return cumulative_[static_cast<std::size_t>(t)];
}

StatusReport Ledger::status_at(Period k) const {
    check_period(k);
    return StatusReport{Ratio::of_money(raised_through(k - 1), params_.goal), k};
}

double Ledger::growth_rate(Period t) const {
    check_period(t);
    return status_at(t).fraction.value() / static_cast<double>(t);
}

bool Ledger::is_successful(Period t) const {
    check_period(t);
    return raised_through(t) >= params_.goal;
}

Count Ledger::pledges_at(Period t) const {
    check_period(t);
    return counts_[static_cast<std::size_t>(t)];
}

std::vector<Period> Ledger::distinct_status_times(Period k0, Period t) const {
    check_period(k0);
    check_period(t);
    if (k0 > t)
        throw std::invalid_argument("Ledger: k0 > t");
    std::vector<Period> times;
    times.push_back(k0);
    for (Period k = k0 + 1; k <= t; ++k) {
        if (counts_[static_cast<std::size_t>(k - 1)] > 0)
            times.push_back(k);
    }
    return times;
}

} // namespace crowdsim
