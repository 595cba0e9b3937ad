#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hetcov::cli {

inline constexpr const char* kToolVersion = "hetcov 1.0.0";

struct CommandOptions {
    std::string scenario_path;
    std::string out_path;                 // empty: stdout
    std::vector<std::string> schemes;     // override scenario schemes
    std::string grid;                     // "START:STOP:COUNT" in dB
    std::optional<std::uint64_t> seed;
    std::optional<long> iterations;
    bool compare = false;
    bool rate_loss = false;
    int threads = 0;
};

/// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
int cmd_coverage(const CommandOptions& opts);
int cmd_simulate(const CommandOptions& opts);
int cmd_moments(const CommandOptions& opts);
int cmd_reproduce(const std::string& figure_id, const std::string& out_dir);

std::vector<std::string> known_figure_ids();

}  // namespace hetcov::cli
