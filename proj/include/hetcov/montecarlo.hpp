#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hetcov/hetnet.hpp"
#include "hetcov/rng.hpp"

namespace hetcov::mc {

enum class SimScheme { IB_MRC, IA_MRC_EXACT, IA_MRC_SIMPLIFIED, SC, IA_NC, IA_FC };

std::string sim_scheme_name(SimScheme s);
SimScheme sim_scheme_by_name(const std::string& name);

struct SimConfig {
    hetnet::NetworkConfig net;
    long iterations = 2000;
    int mean_bs_per_tier = 100;
    int resources_per_frame = 80;
    std::uint64_t rng_seed = 1;
    std::vector<SimScheme> combining = {SimScheme::IB_MRC};
    std::vector<double> thresholds;  // linear
    double disc_radius_scale = 1.0;  // >1 enlarges the drop disc (edge-effect studies)
    bool noisy_interference_estimate = false;  // frame-averaged I_n instead of genie
    bool collect_samples = false;
    int threads = 0;  // 0: hardware concurrency

    void validate() const;
};

struct IterationSample {
    int serving_tier = 0;
    double serving_distance = 0.0;
    std::vector<double> per_antenna_interference;          // I_n, watts
    std::vector<std::complex<double>> desired_channel;     // H_o, row-major N x M_l
    std::map<SimScheme, double> sinr_by_scheme;
};

struct MomentReport {
    long samples = 0;
    double mean_norm_interference = 0.0;  // E[I'_n]
    double var_norm_interference = 0.0;   // Var[I'_n]
    double corr_across_antennas = 0.0;    // Pearson rho(I'_1, I'_2); NaN if N < 2
};

struct EmpiricalPoint {
    double threshold = 0.0;
    double probability = 0.0;
    double wilson_se = 0.0;  // half-width of the z=1 Wilson interval
};

struct SimResult {
    SimConfig config;
    std::map<SimScheme, std::vector<EmpiricalPoint>> curves;
    MomentReport moments;
    long resample_events = 0;
    std::vector<IterationSample> samples;  // filled when collect_samples
};

/// Wilson score interval half-width at z standard normal quantiles.
double wilson_halfwidth(double p_hat, long n, double z = 1.0);

/// One base-station drop: positions, serving identity, serving distance.
struct Geometry {
    struct Interferer {
        int tier = 0;
        double dist = 0.0;
    };
    std::vector<Interferer> interferers;
    int serving_tier = 0;
    double serving_dist = 0.0;
};

/// Draws per-tier Poisson(mean_bs_per_tier) stations uniformly on discs of
/// radius sqrt(mean/(lambda pi)) * radius_scale and selects the serving
/// station by maximum average received power. Returns false when every tier
/// came up empty (caller resamples).
bool sample_geometry(const hetnet::NetworkConfig& net, int mean_bs_per_tier,
                     double radius_scale, Rng& rng, Geometry& geom);

/// Runs the full simulation; deterministic for a fixed (config, seed) and
/// independent of the thread count.
SimResult run(const SimConfig& cfg);

/// Writes collected samples as CSV (iteration, serving_tier, y, I_1..I_N,
/// scheme, sinr).
void write_samples_csv(const SimResult& result, const std::string& path);

}  // namespace hetcov::mc
