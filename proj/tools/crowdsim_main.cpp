#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "crowdsim/experiment.hpp"

namespace {

int cmd_generate(const std::string& out, const std::string& format, std::uint64_t seed,
                 const crowdsim::SyntheticSpec& spec) {
    const auto records = crowdsim::generate_synthetic(seed, spec);
    crowdsim::write_campaigns(records, out, crowdsim::format_from_name(format));
    std::cout << "wrote " << records.size() << " campaigns to " << out << "\n";
    return 0;
}

int cmd_simulate(const std::string& campaigns, const std::string& project,
                 const std::string& policy, std::uint64_t seed, const std::string& config_path) {
    crowdsim::ExperimentConfig config;
    if (!config_path.empty())
        config = crowdsim::parse_experiment_config(config_path);

    crowdsim::CampaignRecord record;
    if (!campaigns.empty()) {
        const auto fmt = campaigns.ends_with(".json") ? crowdsim::FileFormat::Json
                                                      : crowdsim::FileFormat::Csv;
        const auto records = crowdsim::load_campaigns(campaigns, fmt);
        if (records.empty())
            throw std::runtime_error("no campaigns in " + campaigns);
        if (project.empty()) {
            record = records.front();
        } else {
            bool found = false;
            for (const auto& r : records) {
                if (r.project_id == project) {
                    record = r;
                    found = true;
                    break;
                }
            }
            if (!found)
                throw std::runtime_error("project '" + project + "' not found in " + campaigns);
        }
    } else {
        crowdsim::SyntheticSpec spec = config.synthetic;
        spec.count = 1;
        record = crowdsim::generate_synthetic(seed, spec).front();
    }

    crowdsim::SimConfig sim;
    sim.campaign = crowdsim::CampaignParams{record.goal, record.deadline, record.rewards,
                                            record.price};
    sim.arrival_rate = config.arrival_rate;
    sim.population.valuation_std_factor =
        0.5 * (config.valuation_std_min + config.valuation_std_max);
    sim.population.patience_max = config.patience_max;
    sim.population.optimism_min = config.optimism_min;
    sim.population.optimism_max = config.optimism_max;
    sim.population.estimator = config.estimator;
    sim.policy = policy;
    sim.policy_params = config.policy_params;
    sim.master_seed = seed;

    const crowdsim::SimResult result = crowdsim::run_campaign(sim);

    std::cout << "project " << record.project_id << " policy " << policy << " goal "
              << record.goal << " price " << record.price << " deadline " << record.deadline
              << "\n";
    std::cout << "period,arrivals,disclosures,pledges,revenue\n";
    for (std::size_t t = 0; t < result.trace.size(); ++t) {
        const auto& row = result.trace[t];
        if (row.arrivals == 0 && row.disclosures == 0 && row.pledges == 0 &&
            (t + 1 < result.trace.size()))
            continue; // quiet period; always print the final row
        std::cout << (t + 1) << ',' << row.arrivals << ',' << row.disclosures << ','
                  << row.pledges << ',' << row.revenue << "\n";
    }
    std::cout << "final M(T) = " << result.final_revenue << ", settled = "
              << result.settled_revenue << ", success = " << (result.success ? "yes" : "no")
              << "\n";
    return 0;
}

int cmd_experiment(crowdsim::ExperimentConfig config) {
    const crowdsim::ExperimentReport report = crowdsim::run_experiment(config);
    std::cout << report_to_text(report);
    if (report.groups.size() >= 2) {
        std::cout << "\npairwise paired t-tests (settled revenue):\n";
        for (const auto& cmp : crowdsim::compare(report)) {
            std::printf("  %-11s vs %-11s  diff %12.2f  ci [%12.2f, %12.2f]  p %.4g\n",
                        cmp.group_a.c_str(), cmp.group_b.c_str(), cmp.mean_difference,
                        cmp.ci_low, cmp.ci_high, cmp.p_two_sided);
        }
    }
    if (!config.out_path.empty())
        std::cout << "\nper-run rows written to " << config.out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"crowdsim: crowdfunding disclosure-policy simulator"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic campaign file");
    std::string gen_out = "campaigns.csv";
    std::string gen_format = "csv";
    std::uint64_t gen_seed = 1;
    crowdsim::SyntheticSpec spec;
    spec.count = 200;
    gen->add_option("--out", gen_out, "output path");
    gen->add_option("--format", gen_format, "csv|json");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--count", spec.count, "number of campaigns");
    gen->add_option("--goal-min", spec.goal_min, "minimum goal (minor units)");
    gen->add_option("--goal-max", spec.goal_max, "maximum goal (minor units)");
    gen->add_option("--deadline", spec.deadline, "campaign length in periods");
    gen->add_option("--pf-min", spec.price_fraction_min, "minimum price fraction P/G");
    gen->add_option("--pf-max", spec.price_fraction_max, "maximum price fraction P/G");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run one campaign and print its trace");
    std::string sim_campaigns, sim_project, sim_config;
    std::string sim_policy = "immediate";
    std::uint64_t sim_seed = 0;
    sim->add_option("--campaigns", sim_campaigns, "campaign file (first project by default)");
    sim->add_option("--project", sim_project, "project id within the campaign file");
    sim->add_option("--policy", sim_policy, "immediate|random|greedy|eps_greedy|softmax|meta");
    sim->add_option("--seed", sim_seed, "master seed");
    sim->add_option("--config", sim_config, "experiment config supplying population parameters");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run the full policy-comparison grid");
    std::string exp_config, exp_campaigns, exp_out, exp_format;
    int exp_runs = -1;
    bool exp_seed_set = false;
    std::uint64_t exp_seed = 0;
    exp->add_option("--config", exp_config, "config file (key = value)");
    exp->add_option("--campaigns", exp_campaigns, "override campaign source file");
    exp->add_option("--runs", exp_runs, "override replications");
    exp->add_option("--seed", exp_seed, "override master seed")
        ->each([&](const std::string&) { exp_seed_set = true; });
    exp->add_option("--out", exp_out, "override result output path");
    exp->add_option("--format", exp_format, "override output format (csv|json)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_generate(gen_out, gen_format, gen_seed, spec);
        if (sim->parsed())
            return cmd_simulate(sim_campaigns, sim_project, sim_policy, sim_seed, sim_config);
        if (exp->parsed()) {
            crowdsim::ExperimentConfig config;
            if (!exp_config.empty())
                config = crowdsim::parse_experiment_config(exp_config);
            if (!exp_campaigns.empty())
                config.campaigns_path = exp_campaigns;
            if (exp_runs > 0)
                config.replications = exp_runs;
            if (exp_seed_set)
                config.master_seed = exp_seed;
            if (!exp_out.empty())
                config.out_path = exp_out;
            if (!exp_format.empty())
                config.out_format = crowdsim::format_from_name(exp_format);
            return cmd_experiment(std::move(config));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
