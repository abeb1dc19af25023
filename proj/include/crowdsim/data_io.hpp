#pragma once

#include <string>
#include <vector>

#include "crowdsim/types.hpp"

namespace crowdsim {

enum class FileFormat { Csv, Json };

FileFormat format_from_name(const std::string& name); // "csv" | "json"

struct TraceRow {
    Period period = 0;
    double cumulative_fraction = 0.0;

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct CampaignRecord {
    std::string project_id;
    Money goal = 0;
    Period deadline = 0;
    Count rewards = 0;
    Money price = 0;
    std::vector<TraceRow> trace; // optional observed statuses

    void validate() const; // throws with the offending field named

    friend bool operator==(const CampaignRecord&, const CampaignRecord&) = default;
};

// Parse failures carry the file path and 1-based line number.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<CampaignRecord> load_campaigns(const std::string& path, FileFormat format);
void write_campaigns(const std::vector<CampaignRecord>& records, const std::string& path,
                     FileFormat format);

// Merge rows from a traces.csv file (project_id,period,cumulative_fraction)
// into already-loaded records.
void attach_traces(std::vector<CampaignRecord>& records, const std::string& path);

// Early-bird pledges count as a proportional fraction of a regular pledge.
double normalize_early_bird(Money pledge_value, Money regular_price);

struct SyntheticSpec {
    int count = 0;
    Money goal_min = 50'000;
    Money goal_max = 200'000;
    Period deadline = 1'440;
    double price_fraction_min = 0.025;
    double price_fraction_max = 0.05;

    void validate() const;
};

std::vector<CampaignRecord> generate_synthetic(std::uint64_t seed, const SyntheticSpec& spec);

// One simulated run of one campaign under one policy.
struct RunRow {
    std::string project_id;
    std::string policy;
    int replication = 0;
    std::uint64_t seed = 0;
    Money final_revenue = 0;
    Money settled_revenue = 0;
    bool success = false;
    double wall_ms = 0.0;

    friend bool operator==(const RunRow&, const RunRow&) = default;
};

// CSV: one row per run. JSON: the same rows plus per-policy aggregates.
void write_results(const std::vector<RunRow>& rows, const std::string& path, FileFormat format);
std::vector<RunRow> load_results(const std::string& path, FileFormat format);

} // namespace crowdsim
