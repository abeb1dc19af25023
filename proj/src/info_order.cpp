#include "crowdsim/info_order.hpp"

#include <algorithm>

namespace crowdsim {

Dominance dominates(const StatusReport& a, const StatusReport& b, const Ratio& price_fraction) {
    if (a == b)
        throw std::invalid_argument("dominates: identical reports");
    if (a.time == b.time)
        return a.fraction > b.fraction ? Dominance::FirstDominates : Dominance::SecondDominates;
    if (a.fraction == b.fraction)
        return a.time < b.time ? Dominance::FirstDominates : Dominance::SecondDominates;
    // Later report wins if revenue grew at least one pledge per period in
    // between; otherwise the pair is horizontal.
    if (a.time < b.time &&
        gain_at_least(b.fraction, a.fraction, price_fraction, b.time - a.time))
        return Dominance::SecondDominates;
    if (b.time < a.time &&
        gain_at_least(a.fraction, b.fraction, price_fraction, a.time - b.time))
        return Dominance::FirstDominates;
    return Dominance::Incomparable;
}

namespace {

void validate_shrink_input(std::span<const StatusReport> reports) {
    if (reports.empty())
        throw std::invalid_argument("shrink: empty candidate set");
    for (std::size_t i = 1; i < reports.size(); ++i) {
        const auto& prev = reports[i - 1];
        const auto& cur = reports[i];
        if (cur.fraction < prev.fraction ||
            (cur.fraction == prev.fraction && cur.time <= prev.time))
            throw std::invalid_argument("shrink: input not sorted by (fraction, time)");
    }
    for (std::size_t i = 0; i < reports.size(); ++i)
        for (std::size_t j = i + 1; j < reports.size(); ++j)
            if (reports[i].time == reports[j].time)
                throw std::invalid_argument("shrink: duplicate report times");
}

} // namespace

std::vector<StatusReport> shrink(std::span<const StatusReport> sorted_reports,
                                 const Ratio& price_fraction) {
    validate_shrink_input(sorted_reports);

    std::vector<StatusReport> items(sorted_reports.begin(), sorted_reports.end());
    std::vector<bool> alive(items.size(), true);

    bool removed = true;
    while (removed) {
        removed = false;
        for (std::size_t i = 0; i < items.size() && !removed; ++i) {
            if (!alive[i])
                continue;
            for (std::size_t j = i + 1; j < items.size() && !removed; ++j) {
                if (!alive[j])
                    continue;
                const bool i_earlier = items[i].time < items[j].time;
                const StatusReport& earlier = i_earlier ? items[i] : items[j];
                const StatusReport& later = i_earlier ? items[j] : items[i];
                if (earlier.fraction == later.fraction) {
                    // duplicate progress: drop the later stamp
                    alive[i_earlier ? j : i] = false;
                    removed = true;
                } else if (gain_at_least(later.fraction, earlier.fraction, price_fraction,
                                         later.time - earlier.time)) {
                    // fast growth: drop the earlier report
                    alive[i_earlier ? i : j] = false;
                    removed = true;
                }
            }
        }
    }

    std::vector<StatusReport> out;
    for (std::size_t i = 0; i < items.size(); ++i)
        if (alive[i])
            out.push_back(items[i]);
    return out;
}

InfoShape classify(std::span<const StatusReport> sorted_reports, const Ratio& price_fraction) {
    return shrink(sorted_reports, price_fraction).size() == 1 ? InfoShape::Vertical
                                                              : InfoShape::Horizontal;
}

void sort_candidates(std::vector<StatusReport>& reports) {
    std::sort(reports.begin(), reports.end(), [](const StatusReport& a, const StatusReport& b) {
        if (a.fraction != b.fraction)
            return a.fraction < b.fraction;
        return a.time < b.time;
    });
}

} // namespace crowdsim
