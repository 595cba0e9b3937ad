#pragma once

#include <string>
#include <vector>

#include "hetcov/hetnet.hpp"

namespace hetcov::analytic {

enum class Scheme { IB_MRC, IA_MRC, SC, IA_NC, IA_FC, SISO };

std::string scheme_name(Scheme s);
Scheme scheme_by_name(const std::string& name);

struct CoverageQuery {
    hetnet::NetworkConfig net;
    std::vector<double> thresholds;  // linear, ascending, positive
    Scheme scheme = Scheme::IB_MRC;
    bool apply_rate_loss = false;

    void validate() const;
};

struct CurvePoint {
    double threshold = 0.0;    // linear
    double probability = 0.0;  // coverage
    double est_abs_error = 0.0;
};

struct CoverageCurve {
    CoverageQuery query;
    std::vector<CurvePoint> points;
    std::string method = "analytic";
    /// Largest |term|/|sum| ratio seen in the alternating derivative sums;
    /// values above 1e6 signal a cancellation-limited evaluation.
    double max_term_ratio = 0.0;
};

/// General coverage probability for interference-blind MRC (all K, N, M,
/// noise). `per_tier_t` overrides the threshold per serving tier (rate-loss
/// adjustment); empty means `t` everywhere.
double coverage_ib_mrc(const hetnet::NetworkConfig& net, double t,
                       const std::vector<double>& per_tier_t = {},
                       double* max_term_ratio = nullptr);

/// Interference-limited equal-parameter form: depends only on (alpha, N, M, S).
double coverage_ib_mrc_simplified(double alpha, int n_rx, int s_active, int m_tx, double t);

/// General coverage probability for interference-aware MRC (N = 2, M_k <= 2).
double coverage_ia_mrc(const hetnet::NetworkConfig& net, double t,
                       const std::vector<double>& per_tier_t = {});

/// Interference-limited equal-parameter IA-MRC with N = 2, M <= 2.
double coverage_ia_simplified(double alpha, int m_tx, double t);

/// IA-MRC under the no-correlation interference model.
double coverage_ia_nocorr(const hetnet::NetworkConfig& net, double t,
                          const std::vector<double>& per_tier_t = {});

/// IA-MRC under the full-correlation model; provably identical to IB-MRC.
double coverage_ia_fullcorr(const hetnet::NetworkConfig& net, double t,
                            const std::vector<double>& per_tier_t = {});

/// Selection combining, all tiers single-Tx-antenna.
double coverage_sc(const hetnet::NetworkConfig& net, double t,
                   const std::vector<double>& per_tier_t = {});

/// Absolute coverage gain of dual-antenna IB-MRC over SISO.
double gain_ib(double alpha, double t);

/// Absolute coverage gain of dual-antenna IA-MRC over SISO.
double gain_ia(double alpha, double t);

/// Outage probability 1 - P_c for single-tier, interference-limited IA-MRC
/// with N = 2 and M <= 2, computed through a cancellation-free rearrangement
/// that remains accurate for outages far below machine-epsilon-of-coverage.
double outage_ia_simplified(double alpha, int m_tx, double t);

/// Batch driver: dispatches per threshold, applying the per-tier rate-loss
/// thresholds when requested.
CoverageCurve evaluate_curve(const CoverageQuery& query);

}  // namespace hetcov::analytic
