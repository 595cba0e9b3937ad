#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hetcov/analytic.hpp"
#include "hetcov/hetnet.hpp"
#include "hetcov/montecarlo.hpp"

namespace hetcov::cli {

/// Parsed scenario file: network plus sweep and simulation settings.
/// Field units follow the file format (dBm, BS/km^2, dB); conversion to the
/// internal SI units (watts, BS/m^2, linear ratios) happens at parse time.
struct Scenario {
    hetnet::NetworkConfig net;           // converted to W / m^-2
    double grid_start_db = -10.0;
    double grid_stop_db = 20.0;
    int grid_count = 41;
    std::vector<analytic::Scheme> schemes = {analytic::Scheme::IB_MRC};
    bool rate_loss = false;
    long sim_iterations = 2000;
    std::uint64_t sim_seed = 1;
    int sim_mean_bs_per_tier = 100;
    int sim_resources_per_frame = 80;

    std::vector<double> threshold_grid_linear() const;
    /// FNV-1a hash of the canonical semantic serialization; stable against
    /// reformatting, sensitive to any semantic field change.
    std::uint64_t semantic_hash() const;
    std::string canonical_serialization() const;
};

double dbm_to_watts(double dbm);
double db_to_linear(double db);
double linear_to_db(double linear);

/// Strict parser: unknown keys, missing fields, and malformed values are
/// config errors carrying the offending line number.
Scenario parse_scenario_file(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<memory>");

}  // namespace hetcov::cli
