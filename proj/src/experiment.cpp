#include "crowdsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "crowdsim/numerics.hpp"
#include "crowdsim/rng.hpp"

namespace crowdsim {

void ExperimentConfig::validate() const {
    if (campaigns_path.empty())
        synthetic.validate();
    if (groups.empty())
        throw std::invalid_argument("ExperimentConfig: at least one policy group required");
    std::set<std::string> seen;
    for (const std::string& g : groups) {
        make_policy(g, policy_params, 0);
        if (!seen.insert(g).second)
            throw std::invalid_argument("ExperimentConfig: duplicate group '" + g + "'");
    }
    if (replications < 1)
        throw std::invalid_argument("ExperimentConfig: replications must be >= 1");
    if (arrival_rate < 0.0)
        throw std::invalid_argument("ExperimentConfig: negative arrival rate");
    if (valuation_std_min < 0.05 || valuation_std_max > 0.5 ||
        valuation_std_min > valuation_std_max)
        throw std::invalid_argument(
            "ExperimentConfig: valuation std range must lie within [0.05, 0.5]");
    if (threads < 0)
        throw std::invalid_argument("ExperimentConfig: negative thread count");
    if (prior_pledges_min < 0.0 || prior_pledges_max < prior_pledges_min)
        throw std::invalid_argument("ExperimentConfig: bad prior pledge range");
    estimator.validate();
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();

    std::vector<CampaignRecord> campaigns;
    if (config.campaigns_path.empty()) {
        campaigns = generate_synthetic(derive_seed(config.master_seed, {streams::kSynthetic}),
                                       config.synthetic);
    } else {
        const FileFormat fmt = config.campaigns_path.size() > 5 &&
                                       config.campaigns_path.ends_with(".json")
                                   ? FileFormat::Json
                                   : FileFormat::Csv;
        campaigns = load_campaigns(config.campaigns_path, fmt);
    }

    const std::size_t n_campaigns = campaigns.size();
    const std::size_t n_groups = config.groups.size();
    const std::size_t n_reps = static_cast<std::size_t>(config.replications);

    // Per-campaign population spreads, fixed across replications and groups.
    std::vector<double> val_std(n_campaigns);
    std::vector<double> prior_pledges(n_campaigns, config.estimator.prior_pledges);
    for (std::size_t ci = 0; ci < n_campaigns; ++ci) {
        Rng rng(derive_seed(config.master_seed, {streams::kValuationStd,
                                                 static_cast<std::uint64_t>(ci)}));
        val_std[ci] = rng.next_uniform(config.valuation_std_min, config.valuation_std_max);
        if (config.prior_pledges_max > config.prior_pledges_min)
            prior_pledges[ci] =
                rng.next_uniform(config.prior_pledges_min, config.prior_pledges_max);
    }

    ExperimentReport report;
    report.campaign_count = n_campaigns;
    report.replications = config.replications;
    report.rows.resize(n_campaigns * n_reps * n_groups);

    // Jobs fan out over (campaign, replication); groups inside a job share the
    // run seed, which is what makes the comparison paired.
    const std::size_t n_jobs = n_campaigns * n_reps;
    std::atomic<std::size_t> next_job{0};
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads =
        config.threads > 0 ? static_cast<unsigned>(config.threads) : hw;

    auto worker = [&]() {
        for (;;) {
            const std::size_t job = next_job.fetch_add(1);
            if (job >= n_jobs)
                return;
            const std::size_t ci = job / n_reps;
            const std::size_t rep = job % n_reps;
            const CampaignRecord& record = campaigns[ci];
            const std::uint64_t run_seed =
                derive_seed(config.master_seed,
                            {streams::kRun, static_cast<std::uint64_t>(ci),
                             static_cast<std::uint64_t>(rep)});
            for (std::size_t g = 0; g < n_groups; ++g) {
                SimConfig sim;
                sim.campaign = CampaignParams{record.goal, record.deadline, record.rewards,
                                              record.price};
                sim.arrival_rate = config.arrival_rate;
                sim.population.valuation_std_factor = val_std[ci];
                sim.population.patience_max = config.patience_max;
                sim.population.optimism_min = config.optimism_min;
                sim.population.optimism_max = config.optimism_max;
                sim.population.estimator = config.estimator;
                sim.population.estimator.prior_pledges = prior_pledges[ci];
                sim.policy = config.groups[g];
                sim.policy_params = config.policy_params;
                sim.master_seed = run_seed;
                sim.measure_time = config.timing;
                const SimResult result = run_campaign(sim);

                RunRow row;
                row.project_id = record.project_id;
                row.policy = config.groups[g];
                row.replication = static_cast<int>(rep);
                row.seed = run_seed;
                row.final_revenue = result.final_revenue;
                row.settled_revenue = result.settled_revenue;
                row.success = result.success;
                row.wall_ms = config.timing ? result.policy_wall_ms : 0.0;
                report.rows[(ci * n_reps + rep) * n_groups + g] = std::move(row);
            }
        }
    };

    if (n_threads <= 1 || n_jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i)
            pool.emplace_back(worker);
        for (std::thread& th : pool)
            th.join();
    }

    report.groups.resize(n_groups);
    for (std::size_t g = 0; g < n_groups; ++g) {
        GroupStats& stats = report.groups[g];
        stats.policy = config.groups[g];
        double successes = 0.0, success_revenue = 0.0;
        for (std::size_t job = 0; job < n_jobs; ++job) {
            const RunRow& row = report.rows[job * n_groups + g];
            stats.expected_revenue_mean += static_cast<double>(row.final_revenue);
            stats.actual_revenue_mean += static_cast<double>(row.settled_revenue);
            stats.wall_ms_mean += row.wall_ms;
            if (row.success) {
                successes += 1.0;
                success_revenue += static_cast<double>(row.settled_revenue);
            }
        }
        const double n = static_cast<double>(n_jobs);
        stats.runs = n_jobs;
        stats.expected_revenue_mean /= n;
        stats.actual_revenue_mean /= n;
        stats.wall_ms_mean /= n;
        stats.success_rate = successes / n;
        stats.actual_success_only_mean = successes > 0.0 ? success_revenue / successes : 0.0;
    }

    std::vector<double> expected, actual;
    for (const GroupStats& s : report.groups) {
        expected.push_back(s.expected_revenue_mean);
        actual.push_back(s.actual_revenue_mean);
    }
    const std::vector<double> norm_expected = normalize_revenue(expected);
    const std::vector<double> norm_actual = normalize_revenue(actual);
    for (std::size_t g = 0; g < n_groups; ++g) {
        report.groups[g].normalized_expected = norm_expected[g];
        report.groups[g].normalized_actual = norm_actual[g];
    }

    if (!config.out_path.empty())
        write_results(report.rows, config.out_path, config.out_format);
    return report;
}

std::vector<double> normalize_revenue(const std::vector<double>& values) {
    double top = 0.0;
    for (double v : values)
        top = std::max(top, v);
    std::vector<double> out(values.size(), 0.0);
    if (top <= 0.0)
        return out;
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = values[i] / top;
    return out;
}

namespace {

PairwiseComparison paired_test(const std::string& a, const std::string& b,
                               const std::vector<double>& va, const std::vector<double>& vb) {
    PairwiseComparison cmp;
    cmp.group_a = a;
    cmp.group_b = b;
    cmp.pairs = va.size();
    const std::size_t n = va.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        mean += va[i] - vb[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = va[i] - vb[i] - mean;
        ss += d * d;
    }
    cmp.mean_difference = mean;
    if (n < 2) {
        cmp.ci_low = cmp.ci_high = mean;
        cmp.p_two_sided = 1.0;
        cmp.p_a_greater = mean > 0.0 ? 0.5 : 1.0;
        return cmp;
    }
    const double df = static_cast<double>(n - 1);
    const double sd = std::sqrt(ss / df);
    const double se = sd / std::sqrt(static_cast<double>(n));
    if (se == 0.0) {
        cmp.ci_low = cmp.ci_high = mean;
        cmp.p_two_sided = mean == 0.0 ? 1.0 : 0.0;
        cmp.p_a_greater = mean > 0.0 ? 0.0 : 1.0;
        return cmp;
    }
    const double t = mean / se;
    const double q = student_t_quantile_975(df);
    cmp.ci_low = mean - q * se;
    cmp.ci_high = mean + q * se;
    cmp.p_two_sided = student_t_two_sided_p(t, df);
    cmp.p_a_greater = student_t_one_sided_p(t, df);
    return cmp;
}

} // namespace

std::vector<PairwiseComparison> compare(const ExperimentReport& report, CompareMetric metric) {
    const std::size_t n_groups = report.groups.size();
    if (n_groups < 2)
        throw std::invalid_argument("compare: need at least two groups");
    const std::size_t n_jobs = report.groups.empty() ? 0 : report.groups[0].runs;
    if (report.rows.size() != n_jobs * n_groups)
        throw std::invalid_argument("compare: unpaired rows");

    std::vector<std::vector<double>> per_group(n_groups, std::vector<double>(n_jobs));
    for (std::size_t job = 0; job < n_jobs; ++job) {
        for (std::size_t g = 0; g < n_groups; ++g) {
            const RunRow& row = report.rows[job * n_groups + g];
            if (row.policy != report.groups[g].policy)
                throw std::invalid_argument("compare: rows out of pairing order");
            per_group[g][job] = metric == CompareMetric::Settled
                                    ? static_cast<double>(row.settled_revenue)
                                    : static_cast<double>(row.final_revenue);
        }
    }

    std::vector<PairwiseComparison> out;
    for (std::size_t a = 0; a < n_groups; ++a)
        for (std::size_t b = a + 1; b < n_groups; ++b)
            out.push_back(paired_test(report.groups[a].policy, report.groups[b].policy,
                                      per_group[a], per_group[b]));
    return out;
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config: " + path);
    ExperimentConfig config;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "campaigns")
                config.campaigns_path = value == "synthetic" ? "" : value;
            else if (key == "synthetic_count")
                config.synthetic.count = std::stoi(value);
            else if (key == "synthetic_goal_min")
                config.synthetic.goal_min = std::stoll(value);
            else if (key == "synthetic_goal_max")
                config.synthetic.goal_max = std::stoll(value);
            else if (key == "synthetic_price_fraction_min")
                config.synthetic.price_fraction_min = std::stod(value);
            else if (key == "synthetic_price_fraction_max")
                config.synthetic.price_fraction_max = std::stod(value);
            else if (key == "deadline")
                config.synthetic.deadline = static_cast<Period>(std::stoi(value));
            else if (key == "groups")
                config.groups = split_list(value);
            else if (key == "replications")
                config.replications = std::stoi(value);
            else if (key == "seed")
                config.master_seed = std::stoull(value);
            else if (key == "out")
                config.out_path = value;
            else if (key == "format")
                config.out_format = format_from_name(value);
            else if (key == "arrival_rate")
                config.arrival_rate = std::stod(value);
            else if (key == "valuation_std_min")
                config.valuation_std_min = std::stod(value);
            else if (key == "valuation_std_max")
                config.valuation_std_max = std::stod(value);
            else if (key == "patience_max")
                config.patience_max = static_cast<Period>(std::stoi(value));
            else if (key == "optimism_min")
                config.optimism_min = std::stod(value);
            else if (key == "optimism_max")
                config.optimism_max = std::stod(value);
            else if (key == "rollouts")
                config.estimator.rollouts = std::stoi(value);
            else if (key == "prior_pledges")
                config.estimator.prior_pledges = std::stod(value);
            else if (key == "prior_pledges_min")
                config.prior_pledges_min = std::stod(value);
            else if (key == "prior_pledges_max")
                config.prior_pledges_max = std::stod(value);
            else if (key == "prior_periods")
                config.estimator.prior_periods = std::stod(value);
            else if (key == "lambda")
                config.policy_params.lambda = std::stod(value);
            else if (key == "sigma")
                config.policy_params.sigma = std::stod(value);
            else if (key == "eps_c")
                config.policy_params.eps_c = std::stod(value);
            else if (key == "softmax_mu")
                config.policy_params.softmax_mu = std::stod(value);
            else if (key == "timing")
                config.timing = value == "on" || value == "true" || value == "1";
            else if (key == "threads")
                config.threads = std::stoi(value);
            else
                throw std::runtime_error("unknown key '" + key + "'");
        } catch (const std::runtime_error&) {
            throw;
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": bad value for '" + key + "'");
        }
    }
    return config;
}

std::string report_to_text(const ExperimentReport& report) {
    std::ostringstream out;
    out << "group            runs   expected     actual  succ_only  success  norm_exp  "
           "norm_act  wall_ms\n";
    char buf[256];
    for (const GroupStats& s : report.groups) {
        std::snprintf(buf, sizeof(buf),
                      "%-15s %6zu %10.1f %10.1f %10.1f %8.3f %9.4f %9.4f %8.3f\n",
                      s.policy.c_str(), s.runs, s.expected_revenue_mean, s.actual_revenue_mean,
                      s.actual_success_only_mean, s.success_rate, s.normalized_expected,
                      s.normalized_actual, s.wall_ms_mean);
        out << buf;
    }
    return out.str();
}

} // namespace crowdsim
