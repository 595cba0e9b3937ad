#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "hetcov/analytic.hpp"
#include "hetcov/errors.hpp"
#include "hetcov/montecarlo.hpp"
#include "test_support.hpp"

using namespace hetcov;
using hetnet::NetworkConfig;
using hetnet::OstbcCode;
using mc::SimConfig;
using mc::SimScheme;

namespace {

NetworkConfig single_tier(double alpha, const OstbcCode& code, int n_rx, double noise = 0.0) {
    NetworkConfig net;
    net.rx_antennas = n_rx;
    net.noise_power = noise;
    net.tiers = {{1e-5, 1.0, alpha, code}};
    return net;
}

NetworkConfig table2(int n_rx) {
    NetworkConfig net;
    net.rx_antennas = n_rx;
    net.noise_power = std::pow(10.0, (-104.0 - 30.0) / 10.0);
    net.tiers = {{4e-6, std::pow(10.0, 1.6), 3.76, OstbcCode::rate_three_quarter_4tx()},
                 {16e-6, 1.0, 3.67, OstbcCode::alamouti()},
                 {40e-6, std::pow(10.0, -0.6), 3.5, OstbcCode::siso()}};
    return net;
}

}  // namespace

TEST_CASE("determinism across repeats and thread counts") {
    SimConfig cfg;
    cfg.net = table2(2);
    cfg.iterations = 300;
    cfg.rng_seed = 99;
    cfg.combining = {SimScheme::IB_MRC, SimScheme::IA_MRC_SIMPLIFIED, SimScheme::IA_FC};
    cfg.thresholds = {0.25, 1.0, 4.0};
    cfg.collect_samples = true;
    cfg.threads = 1;
    const auto a = mc::run(cfg);
    cfg.threads = 4;
    const auto b = mc::run(cfg);
    const auto c = mc::run(cfg);
    for (const auto& [scheme, curve] : a.curves) {
        for (size_t i = 0; i < curve.size(); ++i) {
            CHECK(curve[i].probability == b.curves.at(scheme)[i].probability);
            CHECK(curve[i].probability == c.curves.at(scheme)[i].probability);
        }
    }
    CHECK(a.moments.var_norm_interference == b.moments.var_norm_interference);
    CHECK(a.moments.corr_across_antennas == b.moments.corr_across_antennas);
    REQUIRE(a.samples.size() == b.samples.size());
    for (size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].serving_distance == b.samples[i].serving_distance);
        CHECK(a.samples[i].per_antenna_interference == b.samples[i].per_antenna_interference);
        CHECK(a.samples[i].sinr_by_scheme == b.samples[i].sinr_by_scheme);
    }
}

TEST_CASE("geometry: association frequencies and serving-distance law") {
    const auto net = table2(2);
    mc::Geometry geom;
    const long draws = 100000;
    long tier_hits[3] = {};
    std::vector<double> y_tier3;
    mc::Rng dummy(0, 0);
    for (long i = 0; i < draws; ++i) {
        mc::Rng rng(4242, i);
        REQUIRE(mc::sample_geometry(net, 100, 1.0, rng, geom));
        ++tier_hits[geom.serving_tier];
        if (geom.serving_tier == 2) y_tier3.push_back(geom.serving_dist);
    }
    for (int l = 0; l < 3; ++l) {
        const double a_l = hetnet::association_probability(net, l);
        CHECK(std::fabs(double(tier_hits[l]) / draws - a_l) < 0.005);
    }
    // Kolmogorov-Smirnov distance between the empirical serving distance in
    // tier 3 and the analytic law.
    std::sort(y_tier3.begin(), y_tier3.end());
    double ks = 0.0;
    const size_t n = y_tier3.size();
    // cumulative trapezoid of the pdf on the sample grid
    double cdf = 0.0, prev_y = 0.0, prev_pdf = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double y = y_tier3[i];
        const double pdf = hetnet::serving_distance_pdf(net, 2, y);
        cdf += 0.5 * (pdf + prev_pdf) * (y - prev_y);
        prev_y = y;
        prev_pdf = pdf;
        ks = std::max(ks, std::fabs(cdf - double(i + 1) / n));
    }
    CHECK(ks < 0.02);
}

TEST_CASE("single tier always associates and zero-interferer samples are noise-only") {
    auto net = single_tier(3.7, OstbcCode::alamouti(), 2, 1e-3);
    SimConfig cfg;
    cfg.net = net;
    cfg.iterations = 4000;
    cfg.mean_bs_per_tier = 1;  // frequent empty drops force resampling
    cfg.rng_seed = 7;
    cfg.combining = {SimScheme::IB_MRC, SimScheme::IA_MRC_SIMPLIFIED};
    cfg.thresholds = {1.0};
    cfg.collect_samples = true;
    const auto res = mc::run(cfg);
    CHECK(res.resample_events > 0);
    long lonely = 0;
    for (const auto& s : res.samples) {
        CHECK(s.serving_tier == 0);
        const double i1 = s.per_antenna_interference[0];
        if (i1 != 0.0 || s.per_antenna_interference[1] != 0.0) continue;
        ++lonely;
        // noise-only: SINR_IB = SNR * |H|_F^2 / S, SINR_IA = SNR/M * sum_n |h_n|^2
        double h2 = 0.0;
        for (const auto& h : s.desired_channel) h2 += std::norm(h);
        const double snr =
            1.0 * std::pow(s.serving_distance, -3.7) / cfg.net.noise_power;
        CHECK(testq::rel_err(s.sinr_by_scheme.at(SimScheme::IB_MRC), snr * h2 / 2.0) < 1e-10);
        CHECK(testq::rel_err(s.sinr_by_scheme.at(SimScheme::IA_MRC_SIMPLIFIED),
                             snr * h2 / 2.0) < 1e-10);
    }
    CHECK(lonely > 100);
}

TEST_CASE("empirical interference moments approach the closed forms") {
    SimConfig cfg;
    cfg.net = single_tier(3.7, OstbcCode::siso(), 2);
    cfg.iterations = 150000;
    cfg.rng_seed = 11;
    cfg.combining = {SimScheme::IA_MRC_SIMPLIFIED};
    cfg.thresholds = {1.0};
    const auto res = mc::run(cfg);
    CHECK(std::fabs(res.moments.var_norm_interference -
                    hetnet::interference_variance(3.7, 1)) < 0.03);
    CHECK(std::fabs(res.moments.corr_across_antennas -
                    hetnet::interference_correlation(1)) < 0.02);

    cfg.net = single_tier(3.7, OstbcCode::alamouti(), 2);
    cfg.rng_seed = 12;
    const auto res2 = mc::run(cfg);
    CHECK(std::fabs(res2.moments.corr_across_antennas - 2.0 / 3.0) < 0.02);
    CHECK(std::fabs(res2.moments.var_norm_interference -
                    hetnet::interference_variance(3.7, 2)) < 0.03);
}

TEST_CASE("blind combining against the coverage theorem (single tier, M = 1)") {
    SimConfig cfg;
    cfg.net = single_tier(3.7, OstbcCode::siso(), 2);
    cfg.iterations = 20000;
    cfg.rng_seed = 21;
    cfg.combining = {SimScheme::IB_MRC, SimScheme::SC};
    cfg.thresholds = {1.0, std::pow(10.0, 0.5)};
    const auto res = mc::run(cfg);
    for (size_t i = 0; i < cfg.thresholds.size(); ++i) {
        const double t = cfg.thresholds[i];
        const auto& ib = res.curves.at(SimScheme::IB_MRC)[i];
        CHECK(std::fabs(ib.probability - analytic::coverage_ib_mrc(cfg.net, t)) <
              3.0 * ib.wilson_se);
        const auto& sc = res.curves.at(SimScheme::SC)[i];
        CHECK(std::fabs(sc.probability - analytic::coverage_sc(cfg.net, t)) <
              3.0 * sc.wilson_se);
    }
}

TEST_CASE("interference-aware combining: exact vs simplified vs theorem") {
    SimConfig cfg;
    cfg.net = single_tier(3.7, OstbcCode::alamouti(), 2);
    cfg.iterations = 20000;
    cfg.rng_seed = 33;
    cfg.combining = {SimScheme::IA_MRC_EXACT, SimScheme::IA_MRC_SIMPLIFIED, SimScheme::IA_FC};
    cfg.thresholds = {0.25, 1.0, 4.0};
    const auto res = mc::run(cfg);
    for (size_t i = 0; i < cfg.thresholds.size(); ++i) {
        const double t = cfg.thresholds[i];
        const auto& simp = res.curves.at(SimScheme::IA_MRC_SIMPLIFIED)[i];
        const auto& exact = res.curves.at(SimScheme::IA_MRC_EXACT)[i];
        const double theorem = analytic::coverage_ia_simplified(3.7, 2, t);
        CHECK(std::fabs(simp.probability - theorem) < 3.0 * simp.wilson_se);
        CHECK(std::fabs(exact.probability - simp.probability) <= 0.01);
        // shared fading rows collapse to the blind-combining distribution
        const auto& fc = res.curves.at(SimScheme::IA_FC)[i];
        CHECK(std::fabs(fc.probability - analytic::coverage_ib_mrc(cfg.net, t)) <
              3.0 * fc.wilson_se);
    }
}

TEST_CASE("independent per-antenna geometry reproduces the no-correlation model") {
    SimConfig cfg;
    cfg.net = single_tier(3.7, OstbcCode::siso(), 2);
    cfg.iterations = 20000;
    cfg.rng_seed = 44;
    cfg.combining = {SimScheme::IA_NC};
    cfg.thresholds = {1.0, 10.0};
    const auto res = mc::run(cfg);
    for (size_t i = 0; i < cfg.thresholds.size(); ++i) {
        const auto& p = res.curves.at(SimScheme::IA_NC)[i];
        const double want = analytic::coverage_ia_nocorr(cfg.net, cfg.thresholds[i]);
        CHECK(std::fabs(p.probability - want) < 3.0 * p.wilson_se);
    }
}

TEST_CASE("noisy frame-averaged interference estimation stays close to genie") {
    SimConfig cfg;
    cfg.net = single_tier(3.7, OstbcCode::alamouti(), 2);
    cfg.iterations = 3000;
    cfg.rng_seed = 55;
    cfg.combining = {SimScheme::IA_MRC_SIMPLIFIED};
    cfg.thresholds = {1.0};
    const auto genie = mc::run(cfg);
    cfg.noisy_interference_estimate = true;
    const auto noisy = mc::run(cfg);
    const double diff = std::fabs(genie.curves.at(SimScheme::IA_MRC_SIMPLIFIED)[0].probability -
                                  noisy.curves.at(SimScheme::IA_MRC_SIMPLIFIED)[0].probability);
    CHECK(diff < 0.03);
}

TEST_CASE("doubling the iteration count shrinks the Wilson interval by about sqrt(2)") {
    SimConfig cfg;
    cfg.net = single_tier(3.7, OstbcCode::siso(), 2);
    cfg.iterations = 4000;
    cfg.rng_seed = 66;
    cfg.combining = {SimScheme::IB_MRC};
    cfg.thresholds = {1.0};
    const auto small = mc::run(cfg);
    cfg.iterations = 8000;
    const auto big = mc::run(cfg);
    const double ratio = big.curves.at(SimScheme::IB_MRC)[0].wilson_se /
                         small.curves.at(SimScheme::IB_MRC)[0].wilson_se;
    CHECK(ratio > 0.60);
    CHECK(ratio < 0.82);
}

TEST_CASE("doubling the drop-disc radius does not move the coverage estimate") {
    SimConfig cfg;
    cfg.net = single_tier(3.7, OstbcCode::siso(), 2);
    cfg.iterations = 20000;
    cfg.rng_seed = 77;
    cfg.combining = {SimScheme::IB_MRC};
    cfg.thresholds = {std::pow(10.0, -1.0), 1.0};
    const auto base = mc::run(cfg);
    cfg.disc_radius_scale = 2.0;
    const auto wide = mc::run(cfg);
    for (size_t i = 0; i < cfg.thresholds.size(); ++i) {
        const auto& a = base.curves.at(SimScheme::IB_MRC)[i];
        const auto& b = wide.curves.at(SimScheme::IB_MRC)[i];
        CHECK(std::fabs(a.probability - b.probability) < a.wilson_se);
    }
}

TEST_CASE("wilson halfwidth sanity") {
    CHECK(mc::wilson_halfwidth(0.5, 10000) == doctest::Approx(0.005).epsilon(0.01));
    CHECK(mc::wilson_halfwidth(0.0, 100) > 0.0);
    CHECK(mc::wilson_halfwidth(0.5, 100, 2.0) >
          1.9 * mc::wilson_halfwidth(0.5, 100, 1.0));
}

TEST_CASE("sample CSV dump") {
    SimConfig cfg;
    cfg.net = single_tier(3.7, OstbcCode::siso(), 2);
    cfg.iterations = 50;
    cfg.rng_seed = 88;
    cfg.combining = {SimScheme::IB_MRC, SimScheme::SC};
    cfg.thresholds = {1.0};
    cfg.collect_samples = true;
    const auto res = mc::run(cfg);
    const auto path = std::filesystem::temp_directory_path() / "hetcov_samples_test.csv";
    mc::write_samples_csv(res, path.string());
    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "iteration,serving_tier,y,I_1,I_2,scheme,sinr");
    long rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 100);  // iterations x schemes
    std::filesystem::remove(path);
}

TEST_CASE("simulation config validation") {
    SimConfig cfg;
    cfg.net = single_tier(3.7, OstbcCode::alamouti(), 2);
    cfg.thresholds = {1.0};
    cfg.combining = {SimScheme::SC};
    CHECK_THROWS_AS(cfg.validate(), config_error);  // SC needs M = 1
    cfg.combining = {SimScheme::IB_MRC};
    cfg.iterations = 0;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg.iterations = 10;
    cfg.thresholds = {0.0};
    CHECK_THROWS_AS(cfg.validate(), config_error);
}
