#include "crowdsim/beliefs.hpp"

#include <stdexcept>

namespace crowdsim {

BeliefTable::BeliefTable(double learning_rate) : lambda_(learning_rate) {
    if (lambda_ < 0.0 || lambda_ > 1.0)
        throw std::invalid_argument("BeliefTable: learning rate outside [0, 1]");
}

void BeliefTable::record_disclosure(Period k, double eta_event, bool pledged) {
    Cell& cell = cells_[k];
    ++cell.n;
    const double alpha = pledged ? 1.0 : 0.0;
    if (eta_event > 0.0)
        cell.discounted += alpha / eta_event;
    else
        cell.flat += alpha;
}

void BeliefTable::end_period(int present_count, int pledge_count) {
    tmp_ = present_count > 0 ? static_cast<double>(pledge_count) / present_count : 0.0;
}

int BeliefTable::count(Period k) const {
    const auto it = cells_.find(k);
    return it == cells_.end() ? 0 : it->second.n;
}

double BeliefTable::upsilon_old(Period k, double eta_now) const {
    const auto it = cells_.find(k);
    if (it == cells_.end() || it->second.n == 0)
        return 0.0;
    const Cell& cell = it->second;
    return (cell.flat + eta_now * cell.discounted) / cell.n;
}

double BeliefTable::upsilon_tmp() const { return tmp_; }

double BeliefTable::upsilon(Period k, double eta_now) const {
    return (1.0 - lambda_) * upsilon_old(k, eta_now) + lambda_ * upsilon_tmp();
}

} // namespace crowdsim
