#include "crowdsim/data_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "crowdsim/rng.hpp"

namespace crowdsim {

namespace {

constexpr const char* kCampaignSchema = "crowdsim.campaigns.v1";
constexpr const char* kResultSchema = "crowdsim.results.v1";
constexpr const char* kTraceSchema = "crowdsim.traces.v1";

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
    throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

std::int64_t parse_int(const std::string& s, const std::string& path, std::size_t line,
                       const char* field) {
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(s, &used);
        if (used != s.size())
            fail(path, line, std::string("trailing characters in ") + field);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        fail(path, line, std::string("cannot parse ") + field + " from '" + s + "'");
    }
}

std::uint64_t parse_uint(const std::string& s, const std::string& path, std::size_t line,
                         const char* field) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(s, &used);
        if (used != s.size())
            fail(path, line, std::string("trailing characters in ") + field);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        fail(path, line, std::string("cannot parse ") + field + " from '" + s + "'");
    }
}

double parse_double(const std::string& s, const std::string& path, std::size_t line,
                    const char* field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            fail(path, line, std::string("trailing characters in ") + field);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        fail(path, line, std::string("cannot parse ") + field + " from '" + s + "'");
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

nlohmann::ordered_json record_to_json(const CampaignRecord& r) {
    nlohmann::ordered_json j;
    j["project_id"] = r.project_id;
    j["goal"] = r.goal;
    j["deadline_periods"] = r.deadline;
    j["reward_count"] = r.rewards;
    j["pledge_price"] = r.price;
    if (!r.trace.empty()) {
        auto& rows = j["trace"] = nlohmann::ordered_json::array();
        for (const TraceRow& t : r.trace)
            rows.push_back({{"period", t.period}, {"cumulative_fraction", t.cumulative_fraction}});
    }
    return j;
}

CampaignRecord record_from_json(const nlohmann::json& j) {
    CampaignRecord r;
    r.project_id = j.at("project_id").get<std::string>();
    r.goal = j.at("goal").get<Money>();
    r.deadline = j.at("deadline_periods").get<Period>();
    r.rewards = j.at("reward_count").get<Count>();
    r.price = j.at("pledge_price").get<Money>();
    if (j.contains("trace")) {
        for (const auto& row : j.at("trace"))
            r.trace.push_back(TraceRow{row.at("period").get<Period>(),
                                       row.at("cumulative_fraction").get<double>()});
    }
    return r;
}

} // namespace

FileFormat format_from_name(const std::string& name) {
    if (name == "csv")
        return FileFormat::Csv;
    if (name == "json")
        return FileFormat::Json;
    throw std::invalid_argument("unknown format '" + name + "' (expected csv or json)");
}

void CampaignRecord::validate() const {
    const std::string who = "campaign '" + project_id + "': ";
    if (project_id.empty() || project_id.find(',') != std::string::npos)
        throw std::invalid_argument(who + "bad project_id");
    if (goal <= 0)
        throw std::invalid_argument(who + "goal must be positive");
    if (deadline <= 0)
        throw std::invalid_argument(who + "deadline must be positive");
    if (rewards < 1)
        throw std::invalid_argument(who + "reward_count must be >= 1");
    if (price <= 0 || price > goal)
        throw std::invalid_argument(who + "pledge_price must satisfy 0 < P <= G");
    double prev = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const TraceRow& row = trace[i];
        const std::string where = who + "trace row " + std::to_string(i + 1) + ": ";
        if (row.period < 1 || row.period > deadline)
            throw std::invalid_argument(where + "period outside [1, deadline]");
        if (row.cumulative_fraction < prev)
            throw std::invalid_argument(where + "cumulative_fraction decreases");
        prev = row.cumulative_fraction;
    }
}

std::vector<CampaignRecord> load_campaigns(const std::string& path, FileFormat format) {
    std::vector<CampaignRecord> records;
    if (format == FileFormat::Json) {
        std::ifstream in = open_in(path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const std::exception& e) {
            throw ParseError(path + ": invalid JSON: " + e.what());
        }
        for (const auto& j : doc.at("campaigns"))
            records.push_back(record_from_json(j));
    } else {
        std::ifstream in = open_in(path);
        std::string line;
        std::size_t lineno = 0;
        bool saw_header = false;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#')
                continue;
            if (!saw_header) {
                if (line != "project_id,goal,deadline_periods,reward_count,pledge_price")
                    fail(path, lineno, "unexpected campaigns header '" + line + "'");
                saw_header = true;
                continue;
            }
            const auto fields = split_csv(line);
            if (fields.size() != 5)
                fail(path, lineno, "expected 5 fields, got " + std::to_string(fields.size()));
            CampaignRecord r;
            r.project_id = fields[0];
            r.goal = parse_int(fields[1], path, lineno, "goal");
            r.deadline = static_cast<Period>(parse_int(fields[2], path, lineno, "deadline_periods"));
            r.rewards = static_cast<Count>(parse_int(fields[3], path, lineno, "reward_count"));
            r.price = parse_int(fields[4], path, lineno, "pledge_price");
            try {
                r.validate();
            } catch (const std::exception& e) {
                fail(path, lineno, e.what());
            }
            records.push_back(std::move(r));
        }
    }
    for (const CampaignRecord& r : records)
        r.validate();
    if (records.empty())
        std::cerr << "warning: no campaigns loaded from " << path << "\n";
    return records;
}

void write_campaigns(const std::vector<CampaignRecord>& records, const std::string& path,
                     FileFormat format) {
    for (const CampaignRecord& r : records)
        r.validate();
    std::ofstream out = open_out(path);
    if (format == FileFormat::Json) {
        nlohmann::ordered_json doc;
        doc["schema"] = kCampaignSchema;
        auto& arr = doc["campaigns"] = nlohmann::ordered_json::array();
        for (const CampaignRecord& r : records)
            arr.push_back(record_to_json(r));
        out << doc.dump(2) << "\n";
    } else {
        out << "# " << kCampaignSchema << "\n";
        out << "project_id,goal,deadline_periods,reward_count,pledge_price\n";
        for (const CampaignRecord& r : records)
            out << r.project_id << ',' << r.goal << ',' << r.deadline << ',' << r.rewards << ','
                << r.price << "\n";
        bool any_trace = false;
        for (const CampaignRecord& r : records)
            any_trace = any_trace || !r.trace.empty();
        if (any_trace)
            std::cerr << "warning: CSV campaign output drops trace rows; "
                         "write traces separately or use JSON\n";
    }
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

void attach_traces(std::vector<CampaignRecord>& records, const std::string& path) {
    std::map<std::string, CampaignRecord*> by_id;
    for (CampaignRecord& r : records)
        by_id[r.project_id] = &r;
    std::ifstream in = open_in(path);
    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        if (!saw_header) {
            if (line != "project_id,period,cumulative_fraction")
                fail(path, lineno, "unexpected traces header '" + line + "'");
            saw_header = true;
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 3)
            fail(path, lineno, "expected 3 fields, got " + std::to_string(fields.size()));
        const auto it = by_id.find(fields[0]);
        if (it == by_id.end())
            fail(path, lineno, "unknown project_id '" + fields[0] + "'");
        it->second->trace.push_back(
            TraceRow{static_cast<Period>(parse_int(fields[1], path, lineno, "period")),
                     parse_double(fields[2], path, lineno, "cumulative_fraction")});
    }
    for (CampaignRecord& r : records) {
        std::stable_sort(r.trace.begin(), r.trace.end(),
                         [](const TraceRow& a, const TraceRow& b) { return a.period < b.period; });
        r.validate();
    }
}

double normalize_early_bird(Money pledge_value, Money regular_price) {
    if (pledge_value <= 0 || regular_price <= 0)
        throw std::invalid_argument("normalize_early_bird: non-positive input");
    return static_cast<double>(pledge_value) / static_cast<double>(regular_price);
}

void SyntheticSpec::validate() const {
    if (count < 0)
        throw std::invalid_argument("SyntheticSpec: negative count");
    if (goal_min <= 0 || goal_max < goal_min)
        throw std::invalid_argument("SyntheticSpec: bad goal range");
    if (deadline < 1)
        throw std::invalid_argument("SyntheticSpec: deadline must be >= 1");
    if (price_fraction_min <= 0.0 || price_fraction_max > 1.0 ||
        price_fraction_max < price_fraction_min)
        throw std::invalid_argument("SyntheticSpec: price fraction range outside (0, 1]");
}

std::vector<CampaignRecord> generate_synthetic(std::uint64_t seed, const SyntheticSpec& spec) {
    spec.validate();
    std::vector<CampaignRecord> out;
    out.reserve(static_cast<std::size_t>(spec.count));
    for (int i = 0; i < spec.count; ++i) {
        Rng rng(derive_seed(seed, {streams::kSynthetic, static_cast<std::uint64_t>(i)}));
        CampaignRecord r;
        char id[32];
        std::snprintf(id, sizeof(id), "synth-%04d", i);
        r.project_id = id;
        r.goal = rng.next_int(spec.goal_min, spec.goal_max);
        const double pf = rng.next_uniform(spec.price_fraction_min, spec.price_fraction_max);
        r.price = std::clamp<Money>(static_cast<Money>(pf * static_cast<double>(r.goal)), 1,
                                    r.goal);
        r.deadline = spec.deadline;
        const Money base = (r.goal + r.price - 1) / r.price; // ceil(G / P)
        r.rewards = static_cast<Count>(base + std::max<Money>(1, base / 4));
        r.validate();
        out.push_back(std::move(r));
    }
    return out;
}

void write_results(const std::vector<RunRow>& rows, const std::string& path, FileFormat format) {
    std::ofstream out = open_out(path);
    if (format == FileFormat::Json) {
        nlohmann::ordered_json doc;
        doc["schema"] = kResultSchema;
        auto& arr = doc["runs"] = nlohmann::ordered_json::array();
        for (const RunRow& r : rows) {
            nlohmann::ordered_json j;
            j["project_id"] = r.project_id;
            j["policy"] = r.policy;
            j["replication"] = r.replication;
            j["seed"] = r.seed;
            j["final_revenue"] = r.final_revenue;
            j["settled_revenue"] = r.settled_revenue;
            j["success"] = r.success;
            j["wall_ms"] = r.wall_ms;
            arr.push_back(std::move(j));
        }
        // Per-policy aggregates.
        std::map<std::string, std::vector<const RunRow*>> groups;
        for (const RunRow& r : rows)
            groups[r.policy].push_back(&r);
        auto& agg = doc["groups"] = nlohmann::ordered_json::object();
        for (const auto& [policy, members] : groups) {
            double expected = 0.0, actual = 0.0, success = 0.0, wall = 0.0;
            for (const RunRow* r : members) {
                expected += static_cast<double>(r->final_revenue);
                actual += static_cast<double>(r->settled_revenue);
                success += r->success ? 1.0 : 0.0;
                wall += r->wall_ms;
            }
            const double n = static_cast<double>(members.size());
            agg[policy] = {{"runs", members.size()},
                           {"expected_revenue_mean", expected / n},
                           {"actual_revenue_mean", actual / n},
                           {"success_rate", success / n},
                           {"wall_ms_mean", wall / n}};
        }
        out << doc.dump(2) << "\n";
    } else {
        out << "# " << kResultSchema << "\n";
        out << "project_id,policy,replication,seed,final_revenue,settled_revenue,success,"
               "wall_ms\n";
        for (const RunRow& r : rows)
            out << r.project_id << ',' << r.policy << ',' << r.replication << ',' << r.seed << ','
                << r.final_revenue << ',' << r.settled_revenue << ',' << (r.success ? 1 : 0) << ','
                << fmt_double(r.wall_ms) << "\n";
    }
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

std::vector<RunRow> load_results(const std::string& path, FileFormat format) {
    std::vector<RunRow> rows;
    if (format == FileFormat::Json) {
        std::ifstream in = open_in(path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const std::exception& e) {
            throw ParseError(path + ": invalid JSON: " + e.what());
        }
        for (const auto& j : doc.at("runs")) {
            RunRow r;
            r.project_id = j.at("project_id").get<std::string>();
            r.policy = j.at("policy").get<std::string>();
            r.replication = j.at("replication").get<int>();
            r.seed = j.at("seed").get<std::uint64_t>();
            r.final_revenue = j.at("final_revenue").get<Money>();
            r.settled_revenue = j.at("settled_revenue").get<Money>();
            r.success = j.at("success").get<bool>();
            r.wall_ms = j.at("wall_ms").get<double>();
            rows.push_back(std::move(r));
        }
        return rows;
    }
    std::ifstream in = open_in(path);
    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        if (!saw_header) {
            saw_header = true; // header row
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 8)
            fail(path, lineno, "expected 8 fields, got " + std::to_string(fields.size()));
        RunRow r;
        r.project_id = fields[0];
        r.policy = fields[1];
        r.replication = static_cast<int>(parse_int(fields[2], path, lineno, "replication"));
        r.seed = parse_uint(fields[3], path, lineno, "seed");
        r.final_revenue = parse_int(fields[4], path, lineno, "final_revenue");
        r.settled_revenue = parse_int(fields[5], path, lineno, "settled_revenue");
        r.success = parse_int(fields[6], path, lineno, "success") != 0;
        r.wall_ms = parse_double(fields[7], path, lineno, "wall_ms");
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace crowdsim
