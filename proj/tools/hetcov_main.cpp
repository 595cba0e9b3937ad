#include <CLI11.hpp>

#include "hetcov/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Coverage analysis for multi-tier cellular networks with MIMO diversity"};
    app.require_subcommand(1);

    hetcov::cli::CommandOptions opts;
    std::string scheme_list;
    std::string figure_id;
    std::string out_dir = "figures";

    auto add_common = [&](CLI::App* cmd, bool sim) {
        cmd->add_option("--scenario", opts.scenario_path, "Scenario file path")->required();
        cmd->add_option("--out", opts.out_path, "Output CSV path (default: stdout)");
        cmd->add_option("--scheme", scheme_list, "Comma-separated scheme override");
        cmd->add_option("--grid", opts.grid, "Threshold grid START:STOP:COUNT in dB");
        cmd->add_flag("--rate-loss", opts.rate_loss, "Apply per-tier rate-loss thresholds");
        if (sim) {
            cmd->add_option("--seed", opts.seed, "Simulation seed override");
            cmd->add_option("--iterations", opts.iterations, "Iteration count override");
            cmd->add_option("--threads", opts.threads, "Worker threads (0 = auto)");
        }
    };

    auto* coverage = app.add_subcommand("coverage", "Evaluate analytic coverage curves");
    add_common(coverage, false);
    auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo simulator");
    add_common(simulate, true);
    simulate->add_flag("--compare", opts.compare, "Join analytic and simulated tables");
    auto* moments = app.add_subcommand("moments", "Empirical interference moment report");
    add_common(moments, true);
    auto* reproduce = app.add_subcommand("reproduce", "Emit figure-reproduction CSV sets");
    reproduce->add_option("figure", figure_id, "Figure id (e.g. fig2a)")->required();
    reproduce->add_option("--out", out_dir, "Output directory (default: figures/)");

    CLI11_PARSE(app, argc, argv);

    if (!scheme_list.empty()) {
        std::string cur;
        for (char c : scheme_list + ",") {
            if (c == ',') {
                if (!cur.empty()) opts.schemes.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
    }

    if (coverage->parsed()) return hetcov::cli::cmd_coverage(opts);
    if (simulate->parsed()) return hetcov::cli::cmd_simulate(opts);
    if (moments->parsed()) return hetcov::cli::cmd_moments(opts);
    if (reproduce->parsed()) return hetcov::cli::cmd_reproduce(figure_id, out_dir);
    return 2;
}
