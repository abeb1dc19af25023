#pragma once

#include <map>
#include <string>
#include <vector>

#include "crowdsim/data_io.hpp"
#include "crowdsim/sim.hpp"

namespace crowdsim {

// Full experiment grid: campaigns x policy groups x replications. Arrival and
// valuation draws depend only on (campaign, replication), never on the group,
// so group comparisons are paired.
struct ExperimentConfig {
    std::string campaigns_path;   // empty => synthesize
    SyntheticSpec synthetic;
    std::vector<std::string> groups = {"immediate", "random",  "greedy",
                                       "eps_greedy", "softmax", "meta"};
    int replications = 30;
    std::uint64_t master_seed = 0;
    std::string out_path;         // empty => no file output
    FileFormat out_format = FileFormat::Csv;

    double arrival_rate = 0.1;
    double valuation_std_min = 0.05;
    double valuation_std_max = 0.5;
    Period patience_max = 48;
    double optimism_min = 0.9;
    double optimism_max = 1.1;
    EstimatorParams estimator;
    // Per-campaign prior-pace spread: each project's backer population draws
    // its prior pledge pseudo-count uniformly from this range (mirrors the
    // per-project valuation spread). Zero width uses estimator.prior_pledges.
    double prior_pledges_min = 0.0;
    double prior_pledges_max = 0.0;
    PolicyParams policy_params;

    bool timing = false; // wall-clock columns stay 0 unless enabled
    int threads = 0;     // 0 = hardware concurrency

    void validate() const;
};

struct GroupStats {
    std::string policy;
    std::size_t runs = 0;
    double expected_revenue_mean = 0.0;      // M(T), failures included
    double actual_revenue_mean = 0.0;        // settled, failures count as 0
    double actual_success_only_mean = 0.0;   // settled, successes only
    double success_rate = 0.0;
    double wall_ms_mean = 0.0;
    double normalized_expected = 0.0;
    double normalized_actual = 0.0;
};

struct ExperimentReport {
    std::vector<RunRow> rows;                 // campaign-major, then replication, then group
    std::vector<GroupStats> groups;           // in config order
    std::size_t campaign_count = 0;
    int replications = 0;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

// Scale values by the largest entry; all-zero input stays all-zero.
std::vector<double> normalize_revenue(const std::vector<double>& values);

enum class CompareMetric { Settled, Expected };

struct PairwiseComparison {
    std::string group_a;
    std::string group_b;
    double mean_difference = 0.0; // a - b
    double ci_low = 0.0;
    double ci_high = 0.0;
    double p_two_sided = 1.0;
    double p_a_greater = 1.0; // one-sided
    std::size_t pairs = 0;
};

// Paired per-run differences between every pair of groups in the report.
std::vector<PairwiseComparison> compare(const ExperimentReport& report,
                                        CompareMetric metric = CompareMetric::Settled);

// Key-value configuration file ("key = value", '#' comments).
ExperimentConfig parse_experiment_config(const std::string& path);

std::string report_to_text(const ExperimentReport& report);

} // namespace crowdsim
