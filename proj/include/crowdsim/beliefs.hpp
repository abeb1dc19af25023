#pragma once

#include <unordered_map>

#include "crowdsim/types.hpp"

namespace crowdsim {

// The entrepreneur's learned revenue prospects per disclosed report.
//
// Historical belief for report s(k) at query time t:
//   (1 / n_k) * sum over past disclosure events of alpha / (eta_event / eta_now),
// i.e. responses are discounted by the ratio of revenue growth rates. Events
// recorded while eta was still zero enter at face value. The temporal belief
// is the pledge fraction among the backers present in the previous period.
// The combined belief mixes the two with learning rate lambda.
class BeliefTable {
public:
    explicit BeliefTable(double learning_rate = 0.1);

    // One disclosure event: report s(k) shown to one backer whose response
    // was alpha, with eta_event = |s(t_event)| / t_event at that moment.
    void record_disclosure(Period k, double eta_event, bool pledged);

    // Close a period: remembers the pledge fraction for the temporal belief.
    void end_period(int present_count, int pledge_count);

    int count(Period k) const; // n_k
    double upsilon_old(Period k, double eta_now) const;
    double upsilon_tmp() const;
    double upsilon(Period k, double eta_now) const;
    double learning_rate() const { return lambda_; }

private:
    struct Cell {
        int n = 0;
        double discounted = 0.0; // sum of alpha / eta_event over events with eta > 0
        double flat = 0.0;       // sum of alpha over events with eta == 0
    };

    std::unordered_map<Period, Cell> cells_;
    double tmp_ = 0.0;
    double lambda_;
};

} // namespace crowdsim
