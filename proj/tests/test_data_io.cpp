#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "crowdsim/data_io.hpp"

using namespace crowdsim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("crowdsim-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

std::vector<CampaignRecord> sample_records() {
    CampaignRecord a{"proj-a", 1000, 48, 12, 100, {}};
    CampaignRecord b{"proj-b", 5000, 96, 60, 125, {{10, 0.1}, {20, 0.35}, {96, 0.35}}};
    return {a, b};
}

} // namespace

TEST_CASE("campaign csv round trip") {
    TempDir dir;
    auto records = sample_records();
    records[1].trace.clear(); // csv carries no traces
    write_campaigns(records, dir.file("campaigns.csv"), FileFormat::Csv);
    const auto loaded = load_campaigns(dir.file("campaigns.csv"), FileFormat::Csv);
    CHECK(loaded == records);
}

TEST_CASE("campaign json round trip keeps traces") {
    TempDir dir;
    const auto records = sample_records();
    write_campaigns(records, dir.file("campaigns.json"), FileFormat::Json);
    const auto loaded = load_campaigns(dir.file("campaigns.json"), FileFormat::Json);
    CHECK(loaded == records);
}

TEST_CASE("traces attach to loaded campaigns") {
    TempDir dir;
    auto records = sample_records();
    records[1].trace.clear();
    write_campaigns(records, dir.file("campaigns.csv"), FileFormat::Csv);
    {
        std::ofstream out(dir.file("traces.csv"));
        out << "project_id,period,cumulative_fraction\n";
        out << "proj-b,10,0.1\nproj-b,20,0.35\n";
    }
    auto loaded = load_campaigns(dir.file("campaigns.csv"), FileFormat::Csv);
    attach_traces(loaded, dir.file("traces.csv"));
    CHECK(loaded[1].trace == std::vector<TraceRow>{{10, 0.1}, {20, 0.35}});

    {
        std::ofstream out(dir.file("bad_traces.csv"));
        out << "project_id,period,cumulative_fraction\n";
        out << "proj-zzz,10,0.1\n";
    }
    CHECK_THROWS_AS(attach_traces(loaded, dir.file("bad_traces.csv")), ParseError);
}

TEST_CASE("malformed campaign rows name the line") {
    TempDir dir;
    {
        std::ofstream out(dir.file("bad.csv"));
        out << "project_id,goal,deadline_periods,reward_count,pledge_price\n";
        out << "ok,1000,48,12,100\n";
        out << "broken,1000,48,twelve,100\n";
    }
    try {
        load_campaigns(dir.file("bad.csv"), FileFormat::Csv);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
        CHECK(std::string(e.what()).find("reward_count") != std::string::npos);
    }
}

TEST_CASE("decreasing trace fractions are rejected with the row named") {
    CampaignRecord r{"p", 1000, 48, 12, 100, {{5, 0.4}, {9, 0.3}}};
    try {
        r.validate();
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("trace row 2") != std::string::npos);
    }
}

TEST_CASE("empty campaign file loads as an empty list") {
    TempDir dir;
    {
        std::ofstream out(dir.file("empty.csv"));
        out << "# crowdsim.campaigns.v1\n";
        out << "project_id,goal,deadline_periods,reward_count,pledge_price\n";
    }
    CHECK(load_campaigns(dir.file("empty.csv"), FileFormat::Csv).empty());
    CHECK_THROWS(load_campaigns(dir.file("missing.csv"), FileFormat::Csv));
}

TEST_CASE("early bird pledges scale proportionally") {
    CHECK(normalize_early_bird(8, 10) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(normalize_early_bird(10, 10) == 1.0);
    CHECK(normalize_early_bird(25, 10) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK_THROWS_AS(normalize_early_bird(0, 10), std::invalid_argument);
    CHECK_THROWS_AS(normalize_early_bird(10, -1), std::invalid_argument);
}

TEST_CASE("synthetic generation is deterministic and valid") {
    SyntheticSpec spec;
    spec.count = 0;
    CHECK(generate_synthetic(5, spec).empty());

    spec.count = 200;
    spec.deadline = 1440;
    const auto a = generate_synthetic(5, spec);
    const auto b = generate_synthetic(5, spec);
    CHECK(a == b);
    REQUIRE(a.size() == 200);
    for (const CampaignRecord& r : a) {
        CHECK(r.deadline == 1440);
        CHECK_NOTHROW(r.validate());
        const double pf = static_cast<double>(r.price) / static_cast<double>(r.goal);
        CHECK(pf <= spec.price_fraction_max + 0.01);
        CHECK(static_cast<Money>(r.rewards) * r.price >= r.goal); // cap above the goal
    }
    const auto c = generate_synthetic(6, spec);
    CHECK(a != c);

    spec.price_fraction_min = 0.0;
    CHECK_THROWS_AS(generate_synthetic(1, spec), std::invalid_argument);
}

TEST_CASE("result rows round trip through csv and json") {
    TempDir dir;
    const std::vector<RunRow> rows = {
        {"proj-a", "immediate", 0, 12345678901234567ULL, 1000, 1000, true, 0.0},
        {"proj-a", "meta", 0, 12345678901234567ULL, 900, 0, false, 1.25},
        {"proj-b", "immediate", 1, 42, 0, 0, false, 0.0},
    };

    write_results(rows, dir.file("runs.csv"), FileFormat::Csv);
    CHECK(load_results(dir.file("runs.csv"), FileFormat::Csv) == rows);

    write_results(rows, dir.file("runs.json"), FileFormat::Json);
    CHECK(load_results(dir.file("runs.json"), FileFormat::Json) == rows);

    // json report carries per-policy aggregates
    std::ifstream in(dir.file("runs.json"));
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("\"groups\"") != std::string::npos);
    CHECK(text.find("\"success_rate\"") != std::string::npos);
}

TEST_CASE("empty results produce a header-only csv") {
    TempDir dir;
    write_results({}, dir.file("empty.csv"), FileFormat::Csv);
    std::ifstream in(dir.file("empty.csv"));
    std::string line;
    int data_rows = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (!saw_header) {
            saw_header = true;
            CHECK(line.find("project_id,") == 0);
            continue;
        }
        ++data_rows;
    }
    CHECK(saw_header);
    CHECK(data_rows == 0);
    CHECK(load_results(dir.file("empty.csv"), FileFormat::Csv).empty());
}

TEST_CASE("format names parse") {
    CHECK(format_from_name("csv") == FileFormat::Csv);
    CHECK(format_from_name("json") == FileFormat::Json);
    CHECK_THROWS_AS(format_from_name("xml"), std::invalid_argument);
}
