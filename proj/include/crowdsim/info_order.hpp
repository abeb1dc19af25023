#pragma once

#include <span>
#include <vector>

#include "crowdsim/campaign.hpp"

namespace crowdsim {

enum class Dominance {
    FirstDominates,
    SecondDominates,
    Incomparable,
};

// Partial order on status reports:
//   same time        -> higher fraction dominates,
//   equal fractions  -> earlier time dominates,
//   later time whose fraction gained at least price_fraction per elapsed
//   period           -> later report dominates,
//   otherwise incomparable.
// Identical reports are rejected.
Dominance dominates(const StatusReport& a, const StatusReport& b, const Ratio& price_fraction);

// Fixpoint removal of dominated reports. Input must be non-empty, pairwise
// distinct in time, and sorted ascending by (fraction, time). The scan order
// is deterministic (lowest index pair first, restart after each removal); the
// result is the unique maximal set and keeps the input order.
std::vector<StatusReport> shrink(std::span<const StatusReport> sorted_reports,
                                 const Ratio& price_fraction);

enum class InfoShape {
    Vertical,   // shrinkage leaves a single report
    Horizontal, // at least two incomparable survivors
};

InfoShape classify(std::span<const StatusReport> sorted_reports, const Ratio& price_fraction);

// Sorts by (fraction, time) ascending, the order shrink expects.
void sort_candidates(std::vector<StatusReport>& reports);

} // namespace crowdsim
