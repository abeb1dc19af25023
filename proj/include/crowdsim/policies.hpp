#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crowdsim/beliefs.hpp"
#include "crowdsim/campaign.hpp"
#include "crowdsim/info_order.hpp"
#include "crowdsim/rng.hpp"

namespace crowdsim {

struct PolicyParams {
    double lambda = 0.1;      // belief learning rate
    double sigma = 0.9;       // meta prospect learning rate
    double eps_c = 0.2;       // epsilon-greedy exploration constant
    double softmax_mu = 1e-4; // softmax temperature floor
};

struct DisclosureDecision {
    BackerId backer = 0;
    StatusReport report;
    Period time = 0;

    friend bool operator==(const DisclosureDecision&, const DisclosureDecision&) = default;
};

struct BackerView {
    BackerId id = 0;
    Period arrival = 1;
};

struct ObservedResponse {
    BackerId id = 0;
    Period report_time = 0; // k of the report this backer was shown
    bool pledged = false;
};

// ---------------------------------------------------------------------------
// Heuristic selectors
// ---------------------------------------------------------------------------

enum class SelectorKind { Random, Greedy, EpsGreedy, Softmax };

constexpr int kExpertCount = 4; // meta ensemble, in SelectorKind order

// Selection probabilities over a shrunk candidate list, aligned with the
// candidate order.
struct SelectionDistribution {
    std::vector<double> prob;
};

struct SelectorContext {
    const BeliefTable* table = nullptr;
    double eta_now = 0.0;
    std::int64_t selection_count = 0; // total selections so far (softmax annealing)
    PolicyParams params;
};

SelectionDistribution selector_distribution(SelectorKind kind,
                                            std::span<const StatusReport> candidates,
                                            const SelectorContext& ctx);

// Greedy argmax with ties broken by higher fraction, then earlier time.
std::size_t greedy_index(std::span<const double> upsilons,
                         std::span<const StatusReport> candidates);

std::size_t sample_index(const SelectionDistribution& dist, double u);

// ---------------------------------------------------------------------------
// META ensemble
// ---------------------------------------------------------------------------

struct MetaState {
    std::vector<double> prospect; // w, one per expert
    std::vector<double> expected; // z from the latest selection
    std::vector<double> gain;     // q from the latest switch
    int active = -1;              // currently used expert
    Period activated = 0;         // period the active expert took over
    bool prospects_initialized = false;
    double sigma = 0.9;
};

struct MetaSelection {
    StatusReport report;
    int expert = 0; // expert whose vote carried the selection
};

// Filters experts by prospect, majority-votes their sampled choices, breaks
// ties with the highest expected revenue. Falls back to the single best-z
// expert when no expert clears the prospect threshold.
MetaSelection select_meta(std::span<const StatusReport> candidates,
                          std::span<const SelectionDistribution> expert_dists, int audience,
                          const BeliefTable& table, double eta_now, MetaState& state, Rng& rng);

// Prospect update on an expert switch: q is the average pledge gain per
// period over the expert's tenure window.
void meta_update(MetaState& state, int expert, std::span<const int> pledges_per_period);

// ---------------------------------------------------------------------------
// Disclosure policies
// ---------------------------------------------------------------------------

class DisclosurePolicy {
public:
    virtual ~DisclosurePolicy() = default;

    virtual std::vector<DisclosureDecision> disclose(Period t, const Ledger& ledger,
                                                     std::span<const BackerView> present) = 0;

    virtual void observe(Period /*t*/, const Ledger& /*ledger*/,
                         std::span<const ObservedResponse> /*responses*/) {}

    virtual std::string_view name() const = 0;
};

// Baseline: every present backer sees the current status.
class ImmediatePolicy final : public DisclosurePolicy {
public:
    std::vector<DisclosureDecision> disclose(Period t, const Ledger& ledger,
                                             std::span<const BackerView> present) override;
    std::string_view name() const override { return "immediate"; }
};

// Free-function form of the baseline, usable without an instance.
std::vector<DisclosureDecision> immediate_policy(Period t, const Ledger& ledger,
                                                 std::span<const BackerView> present);

// All statuses since the given backer's last disclosure, duplicates included,
// sorted ascending by (fraction, time).
std::vector<StatusReport> candidate_set(const Ledger& ledger, Period k0, Period t);

// Dynamic shrinkage with heuristic selection. Before the goal is reached each
// backer's candidate window is pruned to its maximal reports and one survivor
// is chosen by the configured selector (or the META ensemble); afterwards the
// policy falls back to immediate disclosure.
class DshsPolicy final : public DisclosurePolicy {
public:
    DshsPolicy(SelectorKind kind, PolicyParams params, std::uint64_t seed);
    // META ensemble over all four selectors.
    DshsPolicy(PolicyParams params, std::uint64_t seed);

    std::vector<DisclosureDecision> disclose(Period t, const Ledger& ledger,
                                             std::span<const BackerView> present) override;
    void observe(Period t, const Ledger& ledger,
                 std::span<const ObservedResponse> responses) override;
    std::string_view name() const override;

    const BeliefTable& beliefs() const { return table_; }
    const MetaState& meta() const { return meta_; }
    Period last_disclosed(BackerId id) const;

private:
    StatusReport select_report(std::span<const StatusReport> shrunk, int audience,
                               double eta_now);

    bool is_meta_;
    SelectorKind kind_ = SelectorKind::Random;
    PolicyParams params_;
    Rng rng_;
    BeliefTable table_;
    std::unordered_map<BackerId, Period> last_disclosed_;
    std::int64_t selection_count_ = 0;

    MetaState meta_;
    std::vector<int> period_pledges_;                // per-period totals, index t-1
    std::array<int, kExpertCount> period_votes_{};   // winners within the open period
};

// One of: immediate, random, greedy, eps_greedy, softmax, meta.
std::unique_ptr<DisclosurePolicy> make_policy(std::string_view name, const PolicyParams& params,
                                              std::uint64_t seed);

const std::vector<std::string>& policy_names();

} // namespace crowdsim
