#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace hetcov::hetnet {

/// Balanced orthogonal space-time block code descriptor (M, L, r) with
/// S = L*r symbols (equivalently, active Tx antennas) per slot.
struct OstbcCode {
    int m_tx = 1;          // Tx antennas M
    int codeword_len = 1;  // slots L
    double rate = 1.0;     // code rate r
    int s_active = 1;      // S = L*r, active antennas per slot
    std::vector<std::vector<std::uint8_t>> activation_pattern;  // [slot][antenna]
    std::string name = "siso";

    /// Supported instances: (1,1,1), (2,2,1), (4,4,1/2), (4,4,3/4).
    static OstbcCode siso();
    static OstbcCode alamouti();
    static OstbcCode rate_half_4tx();
    static OstbcCode rate_three_quarter_4tx();
    static OstbcCode by_name(const std::string& name);

    void validate() const;
};

/// One tier of base stations.
struct TierConfig {
    double density = 0.0;        // lambda, BS per m^2
    double power = 0.0;          // P, watts
    double path_loss_exp = 0.0;  // alpha > 2
    OstbcCode code;

    void validate() const;
};

struct NetworkConfig {
    std::vector<TierConfig> tiers;
    int rx_antennas = 1;       // N
    double noise_power = 0.0;  // sigma^2 in watts; 0 = interference-limited

    void validate() const;
    int tier_count() const { return static_cast<int>(tiers.size()); }
    bool interference_limited() const { return noise_power == 0.0; }
    bool equal_alpha() const;
    int max_m_tx() const;
};

/// Geometry-conditioned quantities for a user served by tier `tier_index`
/// at distance y: relative powers/exponents, per-tier exclusion radii, and
/// the mean SNR (infinite when sigma^2 = 0).
struct ServingContext {
    int tier_index = 0;
    double distance = 0.0;
    std::vector<double> rel_power;    // P_k / P_l
    std::vector<double> rel_alpha;    // alpha_k / alpha_l
    std::vector<double> excl_radius;  // d_k
    double mean_snr = std::numeric_limits<double>::infinity();

    static ServingContext make(const NetworkConfig& net, int tier, double y);
};

/// Lemma-level association probability of the given tier.
double association_probability(const NetworkConfig& net, int tier);

/// PDF of the serving distance conditioned on association with `tier`.
double serving_distance_pdf(const NetworkConfig& net, int tier, double y);

/// Conditional variance of the normalized per-antenna interference given
/// the serving context (tier, distance).
double interference_variance_conditional(const NetworkConfig& net, const ServingContext& ctx);

/// De-conditioned variance (1 + 1/S)/(alpha - 1) under equal path loss
/// exponents and equal active-antenna counts.
double interference_variance(double alpha, int s_active);

/// Cross-antenna correlation coefficient S/(1+S).
double interference_correlation(int s_active);

/// Rate-loss adjusted threshold (1+t)^{1/r} - 1.
double rate_adjusted_threshold(double t, const OstbcCode& code);

}  // namespace hetcov::hetnet
