#include "crowdsim/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crowdsim {

namespace {

std::vector<double> upsilons_for(std::span<const StatusReport> candidates,
                                 const BeliefTable& table, double eta_now) {
    std::vector<double> values(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        values[i] = table.upsilon(candidates[i].time, eta_now);
    return values;
}

} // namespace

std::size_t greedy_index(std::span<const double> upsilons,
                         std::span<const StatusReport> candidates) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < upsilons.size(); ++i) {
        if (upsilons[i] > upsilons[best]) {
            best = i;
        } else if (upsilons[i] == upsilons[best]) {
            const StatusReport& cur = candidates[i];
            const StatusReport& top = candidates[best];
            if (cur.fraction > top.fraction ||
                (cur.fraction == top.fraction && cur.time < top.time))
                best = i;
        }
    }
    return best;
}

SelectionDistribution selector_distribution(SelectorKind kind,
                                            std::span<const StatusReport> candidates,
                                            const SelectorContext& ctx) {
    if (candidates.empty())
        throw std::invalid_argument("selector_distribution: empty candidate set");
    const std::size_t n = candidates.size();
    SelectionDistribution dist;
    dist.prob.assign(n, 0.0);

    switch (kind) {
    case SelectorKind::Random: {
        std::fill(dist.prob.begin(), dist.prob.end(), 1.0 / static_cast<double>(n));
        break;
    }
    case SelectorKind::Greedy: {
        const auto values = upsilons_for(candidates, *ctx.table, ctx.eta_now);
        dist.prob[greedy_index(values, candidates)] = 1.0;
        break;
    }
    case SelectorKind::EpsGreedy: {
        const auto values = upsilons_for(candidates, *ctx.table, ctx.eta_now);
        const std::size_t g = greedy_index(values, candidates);
        const int n_greedy = ctx.table->count(candidates[g].time);
        const double c = ctx.params.eps_c;
        const double eps = n_greedy == 0 ? c : c / static_cast<double>(n_greedy);
        std::fill(dist.prob.begin(), dist.prob.end(), eps / static_cast<double>(n));
        dist.prob[g] += 1.0 - eps;
        break;
    }
    case SelectorKind::Softmax: {
        const auto values = upsilons_for(candidates, *ctx.table, ctx.eta_now);
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        const double spread = *hi - *lo;
        double tau = 1.0;
        if (ctx.selection_count > 1)
            tau = std::max(ctx.params.softmax_mu,
                           spread / std::log(static_cast<double>(ctx.selection_count)));
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dist.prob[i] = std::exp((values[i] - *hi) / tau);
            total += dist.prob[i];
        }
        for (double& p : dist.prob)
            p /= total;
        break;
    }
    }
    return dist;
}

std::size_t sample_index(const SelectionDistribution& dist, double u) {
    double cum = 0.0;
    for (std::size_t i = 0; i < dist.prob.size(); ++i) {
        cum += dist.prob[i];
        if (u < cum)
            return i;
    }
    return dist.prob.size() - 1;
}

MetaSelection select_meta(std::span<const StatusReport> candidates,
                          std::span<const SelectionDistribution> expert_dists, int audience,
                          const BeliefTable& table, double eta_now, MetaState& state, Rng& rng) {
    if (candidates.empty())
        throw std::invalid_argument("select_meta: empty candidate set");
    if (expert_dists.empty())
        throw std::invalid_argument("select_meta: need at least one expert");
    const std::size_t n_experts = expert_dists.size();
    state.expected.assign(n_experts, 0.0);
    state.gain.resize(n_experts, 0.0);

    // z(x) = sum over candidates and present backers of rho_x * upsilon.
    for (std::size_t x = 0; x < n_experts; ++x) {
        double z = 0.0;
        for (std::size_t i = 0; i < candidates.size(); ++i)
            z += expert_dists[x].prob[i] * table.upsilon(candidates[i].time, eta_now);
        state.expected[x] = z * static_cast<double>(audience);
    }

    if (!state.prospects_initialized) {
        const double top = *std::max_element(state.expected.begin(), state.expected.end());
        state.prospect.assign(n_experts, top);
        state.prospects_initialized = true;
    }

    const double floor = *std::min_element(state.prospect.begin(), state.prospect.end());
    std::vector<bool> admitted(n_experts, false);
    std::size_t admitted_count = 0;
    for (std::size_t x = 0; x < n_experts; ++x) {
        admitted[x] = state.expected[x] >= floor;
        if (admitted[x])
            ++admitted_count;
    }

    if (admitted_count == 0) {
        // No expert clears the learned threshold; use the best-z expert alone.
        std::size_t best = 0;
        for (std::size_t x = 1; x < n_experts; ++x)
            if (state.expected[x] > state.expected[best])
                best = x;
        const std::size_t pick = sample_index(expert_dists[best], rng.next_double());
        return MetaSelection{candidates[pick], static_cast<int>(best)};
    }

    std::vector<std::size_t> vote(n_experts, 0);
    std::vector<int> tally(candidates.size(), 0);
    for (std::size_t x = 0; x < n_experts; ++x) {
        if (!admitted[x])
            continue;
        vote[x] = sample_index(expert_dists[x], rng.next_double());
        ++tally[vote[x]];
    }
    const int top_votes = *std::max_element(tally.begin(), tally.end());

    // Ties go to the vote cast by the expert with the highest z.
    int winner = -1;
    for (std::size_t x = 0; x < n_experts; ++x) {
        if (!admitted[x] || tally[vote[x]] != top_votes)
            continue;
        if (winner < 0 ||
            state.expected[x] > state.expected[static_cast<std::size_t>(winner)])
            winner = static_cast<int>(x);
    }
    return MetaSelection{candidates[vote[static_cast<std::size_t>(winner)]], winner};
}

void meta_update(MetaState& state, int expert, std::span<const int> pledges_per_period) {
    if (expert < 0 || static_cast<std::size_t>(expert) >= state.prospect.size())
        throw std::invalid_argument("meta_update: expert out of range");
    if (pledges_per_period.empty())
        throw std::invalid_argument("meta_update: tenure must cover at least one period");
    state.gain.resize(state.prospect.size(), 0.0);
    double total = 0.0;
    for (int p : pledges_per_period)
        total += p;
    const double q = total / static_cast<double>(pledges_per_period.size());
    const std::size_t x = static_cast<std::size_t>(expert);
    state.gain[x] = q;
    state.prospect[x] = (1.0 - state.sigma) * q + state.sigma * state.prospect[x];
}

// ---------------------------------------------------------------------------

std::vector<DisclosureDecision> immediate_policy(Period t, const Ledger& ledger,
                                                 std::span<const BackerView> present) {
    std::vector<DisclosureDecision> out;
    out.reserve(present.size());
    const StatusReport current = ledger.status_at(t);
    for (const BackerView& b : present)
        out.push_back(DisclosureDecision{b.id, current, t});
    return out;
}

std::vector<DisclosureDecision> ImmediatePolicy::disclose(Period t, const Ledger& ledger,
                                                          std::span<const BackerView> present) {
    return immediate_policy(t, ledger, present);
}

std::vector<StatusReport> candidate_set(const Ledger& ledger, Period k0, Period t) {
    if (k0 < 1 || k0 > t)
        throw std::invalid_argument("candidate_set: need 1 <= k0 <= t");
    std::vector<StatusReport> out;
    out.reserve(static_cast<std::size_t>(t - k0) + 1);
    for (Period k = k0; k <= t; ++k)
        out.push_back(ledger.status_at(k));
    sort_candidates(out);
    return out;
}

DshsPolicy::DshsPolicy(SelectorKind kind, PolicyParams params, std::uint64_t seed)
    : is_meta_(false), kind_(kind), params_(params), rng_(seed), table_(params.lambda) {}

DshsPolicy::DshsPolicy(PolicyParams params, std::uint64_t seed)
    : is_meta_(true), params_(params), rng_(seed), table_(params.lambda) {
    meta_.sigma = params.sigma;
}

std::string_view DshsPolicy::name() const {
    if (is_meta_)
        return "meta";
    switch (kind_) {
    case SelectorKind::Random:
        return "random";
    case SelectorKind::Greedy:
        return "greedy";
    case SelectorKind::EpsGreedy:
        return "eps_greedy";
    case SelectorKind::Softmax:
        return "softmax";
    }
    return "dshs";
}

Period DshsPolicy::last_disclosed(BackerId id) const {
    const auto it = last_disclosed_.find(id);
    return it == last_disclosed_.end() ? 1 : it->second;
}

StatusReport DshsPolicy::select_report(std::span<const StatusReport> shrunk, int audience,
                                       double eta_now) {
    ++selection_count_;
    const SelectorContext ctx{&table_, eta_now, selection_count_, params_};
    if (!is_meta_) {
        const SelectionDistribution dist = selector_distribution(kind_, shrunk, ctx);
        return shrunk[sample_index(dist, rng_.next_double())];
    }
    std::array<SelectionDistribution, kExpertCount> dists;
    for (int x = 0; x < kExpertCount; ++x)
        dists[static_cast<std::size_t>(x)] =
            selector_distribution(static_cast<SelectorKind>(x), shrunk, ctx);
    const MetaSelection sel = select_meta(
        shrunk, std::span<const SelectionDistribution>(dists.data(), dists.size()), audience,
        table_, eta_now, meta_, rng_);
    ++period_votes_[static_cast<std::size_t>(sel.expert)];
    return sel.report;
}

std::vector<DisclosureDecision> DshsPolicy::disclose(Period t, const Ledger& ledger,
                                                     std::span<const BackerView> present) {
    std::vector<DisclosureDecision> out;
    out.reserve(present.size());
    const Money raised = ledger.raised_through(t);

    if (raised >= ledger.params().goal) {
        // Funded: no uncertainty left, reveal the current status.
        const StatusReport current = ledger.status_at(t);
        for (const BackerView& b : present) {
            out.push_back(DisclosureDecision{b.id, current, t});
            last_disclosed_[b.id] = t;
        }
        return out;
    }

    const double eta_now = ledger.growth_rate(t);
    const Ratio pf = ledger.params().price_fraction();
    const int audience = static_cast<int>(present.size());
    for (const BackerView& b : present) {
        const Period k0 = last_disclosed(b.id);
        const std::vector<Period> times = ledger.distinct_status_times(k0, t);
        std::vector<StatusReport> window;
        window.reserve(times.size());
        for (Period k : times)
            window.push_back(ledger.status_at(k));
        // Ledger statuses grow with k, so the window is already sorted by
        // (fraction, time).
        const std::vector<StatusReport> survivors = shrink(window, pf);
        const StatusReport chosen =
            survivors.size() == 1 ? survivors.front()
                                  : select_report(survivors, audience, eta_now);
        out.push_back(DisclosureDecision{b.id, chosen, t});
        last_disclosed_[b.id] = chosen.time;
    }
    return out;
}

void DshsPolicy::observe(Period t, const Ledger& ledger,
                         std::span<const ObservedResponse> responses) {
    const double eta = ledger.growth_rate(t);
    int pledges = 0;
    for (const ObservedResponse& r : responses) {
        table_.record_disclosure(r.report_time, eta, r.pledged);
        if (r.pledged)
            ++pledges;
    }
    table_.end_period(static_cast<int>(responses.size()), pledges);

    if (!is_meta_)
        return;

    period_pledges_.resize(static_cast<std::size_t>(t), 0);
    period_pledges_[static_cast<std::size_t>(t - 1)] = pledges;

    int winner = -1;
    for (int x = 0; x < kExpertCount; ++x) {
        if (period_votes_[static_cast<std::size_t>(x)] == 0)
            continue;
        if (winner < 0 ||
            period_votes_[static_cast<std::size_t>(x)] >
                period_votes_[static_cast<std::size_t>(winner)] ||
            (period_votes_[static_cast<std::size_t>(x)] ==
                 period_votes_[static_cast<std::size_t>(winner)] &&
             meta_.expected[static_cast<std::size_t>(x)] >
                 meta_.expected[static_cast<std::size_t>(winner)]))
            winner = x;
    }
    period_votes_.fill(0);
    if (winner < 0)
        return;

    if (meta_.active < 0) {
        meta_.active = winner;
        meta_.activated = t;
        return;
    }
    if (winner == meta_.active)
        return;

    // Expert switch: score the outgoing expert over its tenure.
    const Period tenure = std::max<Period>(1, t - meta_.activated);
    const std::size_t window =
        std::min<std::size_t>(static_cast<std::size_t>(tenure), period_pledges_.size());
    meta_update(meta_, meta_.active,
                std::span<const int>(period_pledges_.data() + period_pledges_.size() - window,
                                     window));
    meta_.active = winner;
    meta_.activated = t;
}

std::unique_ptr<DisclosurePolicy> make_policy(std::string_view name, const PolicyParams& params,
                                              std::uint64_t seed) {
    if (name == "immediate")
        return std::make_unique<ImmediatePolicy>();
    if (name == "random")
        return std::make_unique<DshsPolicy>(SelectorKind::Random, params, seed);
    if (name == "greedy")
        return std::make_unique<DshsPolicy>(SelectorKind::Greedy, params, seed);
    if (name == "eps_greedy")
        return std::make_unique<DshsPolicy>(SelectorKind::EpsGreedy, params, seed);
    if (name == "softmax")
        return std::make_unique<DshsPolicy>(SelectorKind::Softmax, params, seed);
    if (name == "meta")
        return std::make_unique<DshsPolicy>(params, seed);
    throw std::invalid_argument("make_policy: unknown policy '" + std::string(name) + "'");
}

const std::vector<std::string>& policy_names() {
    static const std::vector<std::string> names = {"immediate", "random",  "greedy",
                                                   "eps_greedy", "softmax", "meta"};
    return names;
}

} // namespace crowdsim
