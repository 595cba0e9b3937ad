#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hetcov/commands.hpp"
#include "hetcov/errors.hpp"
#include "hetcov/result_table.hpp"
#include "hetcov/scenario.hpp"
#include "hetcov/specfun.hpp"
#include "test_support.hpp"

using namespace hetcov;
using cli::ResultTable;
using cli::Scenario;

namespace {

namespace fs = std::filesystem;

const char* kMiniScenario = R"(# compact single-tier layout
rx_antennas 2
noise_dbm none
grid_db -10 10 5
schemes SISO
rate_loss off

tier {
  density_per_km2 10
  power_dbm 30
  alpha 3.7
  code siso
}

sim {
  iterations 400
  seed 31337
  mean_bs_per_tier 60
  resources_per_frame 80
}
)";

fs::path write_temp(const std::string& name, const std::string& text) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

}  // namespace

TEST_CASE("scenario parsing applies the unit conversions") {
    const Scenario sc = cli::parse_scenario_text(kMiniScenario);
    CHECK(sc.net.rx_antennas == 2);
    CHECK(sc.net.noise_power == 0.0);
    CHECK(sc.net.tiers.size() == 1);
    CHECK(sc.net.tiers[0].density == doctest::Approx(10e-6).epsilon(1e-12));
    CHECK(sc.net.tiers[0].power == doctest::Approx(1.0).epsilon(1e-12));  // 30 dBm
    CHECK(sc.sim_iterations == 400);
    CHECK(sc.sim_seed == 31337);
    const auto grid = sc.threshold_grid_linear();
    REQUIRE(grid.size() == 5);
    CHECK(grid.front() == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(grid.back() == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(cli::dbm_to_watts(46.0) == doctest::Approx(39.8107170553).epsilon(1e-9));
}

TEST_CASE("scenario parsing is strict") {
    auto expect_error = [](const std::string& text, const std::string& needle) {
        try {
            cli::parse_scenario_text(text, "t.scenario");
            FAIL("expected config_error");
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error("rx_antennas 2\nbogus_key 1\n", "unknown key 'bogus_key'");
    expect_error("rx_antennas 2\nbogus_key 1\n", "t.scenario:2");
    std::string no_alpha = kMiniScenario;
    no_alpha.replace(no_alpha.find("alpha 3.7"), 9, "# alpha  ");
    expect_error(no_alpha, "requires");
    std::string bad_code = kMiniScenario;
    bad_code.replace(bad_code.find("code siso"), 9, "code 9x9 ");
    expect_error(bad_code, "unknown OSTBC");
    std::string bad_num = kMiniScenario;
    bad_num.replace(bad_num.find("power_dbm 30"), 12, "power_dbm xx");
    expect_error(bad_num, "expected a number");
    expect_error("", "no tier blocks");
}

TEST_CASE("semantic hash tracks meaning, not formatting") {
    const Scenario base = cli::parse_scenario_text(kMiniScenario);
    std::string reformatted = std::string("# another comment\n\n") + kMiniScenario + "\n# tail\n";
    CHECK(cli::parse_scenario_text(reformatted).semantic_hash() == base.semantic_hash());
    const char* edits[][2] = {
        {"rx_antennas 2", "rx_antennas 4"},   {"noise_dbm none", "noise_dbm -104"},
        {"grid_db -10 10 5", "grid_db -10 10 7"}, {"schemes SISO", "schemes IB_MRC"},
        {"rate_loss off", "rate_loss on"},    {"alpha 3.7", "alpha 3.8"},
        {"power_dbm 30", "power_dbm 31"},     {"density_per_km2 10", "density_per_km2 11"},
        {"code siso", "code alamouti"},       {"seed 31337", "seed 31338"},
        {"iterations 400", "iterations 401"},
    };
    for (const auto& edit : edits) {
        std::string text = kMiniScenario;
        const auto pos = text.find(edit[0]);
        REQUIRE(pos != std::string::npos);
        text.replace(pos, std::string(edit[0]).size(), edit[1]);
        CHECK(cli::parse_scenario_text(text).semantic_hash() != base.semantic_hash());
    }
}

TEST_CASE("result table CSV round-trips bit-exactly") {
    ResultTable table;
    table.scenario_hash = 0xdeadbeefcafe1234ULL;
    table.seed = 42;
    table.tool_version = cli::kToolVersion;
    table.rows = {
        {"IB_MRC", -10.0, 1.0 / 3.0, 1e-17, "analytic"},
        {"IB_MRC", 0.1, 0.1, 2.500000000000001e-3, "analytic"},
        {"SC", 19.999999999999996, 4.9406564584124654e-300, 0.0, "simulated"},
    };
    std::ostringstream out;
    table.write_csv(out);
    std::istringstream in(out.str());
    const ResultTable back = ResultTable::read_csv(in);
    CHECK(back == table);
    // LF-only line endings, 17-significant-digit floats
    CHECK(out.str().find('\r') == std::string::npos);
    CHECK(out.str().find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("cmd_coverage produces the closed-form SISO column") {
    const auto scen = write_temp("hetcov_cli_mini.scenario", kMiniScenario);
    const auto out = fs::temp_directory_path() / "hetcov_cli_out.csv";
    cli::CommandOptions opts;
    opts.scenario_path = scen.string();
    opts.out_path = out.string();
    REQUIRE(cli::cmd_coverage(opts) == 0);
    const ResultTable table = ResultTable::read_csv_file(out.string());
    REQUIRE(table.rows.size() == 5);
    for (const auto& row : table.rows) {
        CHECK(row.scheme == "SISO");
        CHECK(row.method == "analytic");
        const double t = std::pow(10.0, row.threshold_db / 10.0);
        const double want = 1.0 / specfun::hyp2f1(-2.0 / 3.7, 1.0, 1.0 - 2.0 / 3.7, -t);
        CHECK(testq::rel_err(row.p_cov, want) < 1e-7);
    }
    CHECK(table.tool_version == cli::kToolVersion);
    fs::remove(scen);
    fs::remove(out);
}

TEST_CASE("cmd_coverage exit codes") {
    cli::CommandOptions opts;
    opts.scenario_path = "/nonexistent/path.scenario";
    CHECK(cli::cmd_coverage(opts) == 2);
    const auto bad = write_temp("hetcov_cli_bad.scenario", "rx_antennas 2\nwhat 1\n");
    opts.scenario_path = bad.string();
    CHECK(cli::cmd_coverage(opts) == 2);
    fs::remove(bad);
}

TEST_CASE("IA_FC and IB_MRC emit byte-identical coverage columns") {
    std::string text = kMiniScenario;
    text.replace(text.find("schemes SISO"), 12, "schemes IB_MRC IA_FC");
    text.replace(text.find("rx_antennas 2"), 13, "rx_antennas 2");
    const auto scen = write_temp("hetcov_cli_fc.scenario", text);
    const auto out = fs::temp_directory_path() / "hetcov_cli_fc.csv";
    cli::CommandOptions opts;
    opts.scenario_path = scen.string();
    opts.out_path = out.string();
    REQUIRE(cli::cmd_coverage(opts) == 0);
    const ResultTable table = ResultTable::read_csv_file(out.string());
    REQUIRE(table.rows.size() == 10);
    for (size_t i = 0; i < 5; ++i) {
        CHECK(table.rows[i].scheme == "IB_MRC");
        CHECK(table.rows[i + 5].scheme == "IA_FC");
        CHECK(table.rows[i].p_cov == table.rows[i + 5].p_cov);
    }
    fs::remove(scen);
    fs::remove(out);
}

TEST_CASE("cmd_simulate is reproducible and honors --compare") {
    std::string text = kMiniScenario;
    text.replace(text.find("schemes SISO"), 12, "schemes IB_MRC");
    const auto scen = write_temp("hetcov_cli_sim.scenario", text);
    const auto out1 = fs::temp_directory_path() / "hetcov_sim1.csv";
    const auto out2 = fs::temp_directory_path() / "hetcov_sim2.csv";
    cli::CommandOptions opts;
    opts.scenario_path = scen.string();
    opts.out_path = out1.string();
    opts.compare = true;
    REQUIRE(cli::cmd_simulate(opts) == 0);
    opts.out_path = out2.string();
    REQUIRE(cli::cmd_simulate(opts) == 0);
    std::ifstream f1(out1, std::ios::binary), f2(out2, std::ios::binary);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    const ResultTable table = ResultTable::read_csv(s1);
    bool saw_sim = false, saw_analytic = false;
    for (const auto& row : table.rows) {
        saw_sim = saw_sim || row.method == "simulated";
        saw_analytic = saw_analytic || row.method == "analytic";
    }
    CHECK(saw_sim);
    CHECK(saw_analytic);
    fs::remove(scen);
    fs::remove(out1);
    fs::remove(out2);
}

TEST_CASE("cmd_moments emits the analytic reference for uniform layouts") {
    const auto scen = write_temp("hetcov_cli_mom.scenario", kMiniScenario);
    const auto out = fs::temp_directory_path() / "hetcov_mom.csv";
    cli::CommandOptions opts;
    opts.scenario_path = scen.string();
    opts.out_path = out.string();
    REQUIRE(cli::cmd_moments(opts) == 0);
    std::ifstream in(out);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(all.find("var_norm_interference") != std::string::npos);
    CHECK(all.find("analytic_var") != std::string::npos);
    fs::remove(scen);
    fs::remove(out);
}

TEST_CASE("cmd_reproduce writes checked CSV sets and rejects unknown ids") {
    const auto dir = fs::temp_directory_path() / "hetcov_figs";
    fs::remove_all(dir);
    REQUIRE(cli::cmd_reproduce("fig5a", dir.string()) == 0);
    CHECK(fs::exists(dir / "fig5a_gain_grid.csv"));
    std::ifstream notes(dir / "fig5a_notes.txt");
    std::string all((std::istreambuf_iterator<char>(notes)), std::istreambuf_iterator<char>());
    CHECK(all.find("checked:") != std::string::npos);
    CHECK(cli::cmd_reproduce("fig99", dir.string()) == 2);
    fs::remove_all(dir);
}
