#include <doctest.h>

#include <cmath>
#include <random>

#include "hetcov/errors.hpp"
#include "hetcov/hetnet.hpp"
#include "test_support.hpp"

using namespace hetcov;
using hetnet::NetworkConfig;
using hetnet::OstbcCode;
using hetnet::TierConfig;

namespace {

constexpr double kPi = 3.14159265358979323846;

NetworkConfig random_net(std::mt19937& gen, bool equal_alpha) {
    std::uniform_int_distribution<int> tiers(1, 5);
    std::uniform_real_distribution<double> log_density(std::log(0.1e-6), std::log(100e-6));
    std::uniform_real_distribution<double> power_dbm(10.0, 50.0);
    std::uniform_real_distribution<double> alpha(2.5, 5.0);
    NetworkConfig net;
    net.rx_antennas = 2;
    net.noise_power = 0.0;
    const double shared_alpha = alpha(gen);
    const int k = tiers(gen);
    for (int i = 0; i < k; ++i) {
        TierConfig t;
        t.density = std::exp(log_density(gen));
        t.power = std::pow(10.0, (power_dbm(gen) - 30.0) / 10.0);
        t.path_loss_exp = equal_alpha ? shared_alpha : alpha(gen);
        t.code = OstbcCode::siso();
        net.tiers.push_back(t);
    }
    return net;
}

}  // namespace

TEST_CASE("OstbcCode instances are balanced") {
    for (const auto& code : {OstbcCode::siso(), OstbcCode::alamouti(), OstbcCode::rate_half_4tx(),
                             OstbcCode::rate_three_quarter_4tx()}) {
        code.validate();
        CHECK(code.s_active == int(std::lround(code.codeword_len * code.rate)));
        for (const auto& slot : code.activation_pattern) {
            int active = 0;
            for (auto v : slot) active += v;
            CHECK(active == code.s_active);
        }
    }
    CHECK(OstbcCode::by_name("4x4r34").s_active == 3);
    CHECK_THROWS_AS(OstbcCode::by_name("8x8"), config_error);
    OstbcCode bad = OstbcCode::alamouti();
    bad.activation_pattern[0] = {1, 0};
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad = OstbcCode::alamouti();
    bad.rate = 0.9;
    CHECK_THROWS_AS(bad.validate(), config_error);
}

TEST_CASE("config validation rejects broken parameters") {
    NetworkConfig net;
    CHECK_THROWS_AS(net.validate(), config_error);
    net.tiers.push_back({1e-6, 1.0, 3.5, OstbcCode::siso()});
    net.validate();
    net.tiers[0].path_loss_exp = 2.0;
    CHECK_THROWS_AS(net.validate(), config_error);
    net.tiers[0].path_loss_exp = 3.5;
    net.rx_antennas = 0;
    CHECK_THROWS_AS(net.validate(), config_error);
}

TEST_CASE("serving context fields") {
    NetworkConfig net;
    net.rx_antennas = 2;
    net.tiers = {{4e-6, 40.0, 3.8, OstbcCode::alamouti()}, {20e-6, 1.0, 3.4, OstbcCode::siso()}};
    const auto ctx = hetnet::ServingContext::make(net, 0, 120.0);
    CHECK(ctx.rel_power[0] == 1.0);
    CHECK(ctx.rel_alpha[0] == 1.0);
    CHECK(ctx.excl_radius[0] == doctest::Approx(120.0).epsilon(1e-14));
    CHECK(ctx.excl_radius[1] ==
          doctest::Approx(std::pow(1.0 / 40.0, 1.0 / 3.4) * std::pow(120.0, 3.8 / 3.4))
              .epsilon(1e-12));
    net.noise_power = 0.0;
    CHECK(std::isinf(hetnet::ServingContext::make(net, 0, 120.0).mean_snr));
    net.noise_power = 1e-13;
    CHECK(hetnet::ServingContext::make(net, 0, 120.0).mean_snr ==
          doctest::Approx(40.0 * std::pow(120.0, -3.8) / 1e-13));
}

TEST_CASE("association probability: single tier, closed form, and unit sum") {
    NetworkConfig single;
    single.rx_antennas = 1;
    single.tiers = {{5e-6, 2.0, 3.7, OstbcCode::siso()}};
    CHECK(testq::rel_err(hetnet::association_probability(single, 0), 1.0) < 1e-9);

    std::mt19937 gen(2024);
    for (int rep = 0; rep < 12; ++rep) {
        const auto net = random_net(gen, true);
        const double alpha = net.tiers[0].path_loss_exp;
        double denom = 0.0;
        for (const auto& t : net.tiers) denom += t.density * std::pow(t.power, 2.0 / alpha);
        for (int l = 0; l < net.tier_count(); ++l) {
            const double closed =
                net.tiers[l].density * std::pow(net.tiers[l].power, 2.0 / alpha) / denom;
            CHECK(testq::rel_err(hetnet::association_probability(net, l), closed) < 1e-8);
        }
    }
    for (int rep = 0; rep < 12; ++rep) {
        const auto net = random_net(gen, false);
        double sum = 0.0;
        for (int l = 0; l < net.tier_count(); ++l) sum += hetnet::association_probability(net, l);
        CHECK(std::fabs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("serving distance pdf: Rayleigh form and normalization") {
    NetworkConfig single;
    single.rx_antennas = 1;
    single.tiers = {{8e-6, 1.0, 4.0, OstbcCode::siso()}};
    CHECK(hetnet::serving_distance_pdf(single, 0, 0.0) == 0.0);
    const double lam = single.tiers[0].density;
    for (double y : {10.0, 80.0, 300.0}) {
        const double want = 2.0 * kPi * lam * y * std::exp(-kPi * lam * y * y);
        CHECK(testq::rel_err(hetnet::serving_distance_pdf(single, 0, y), want) < 1e-8);
    }

    std::mt19937 gen(5);
    for (int rep = 0; rep < 6; ++rep) {
        const auto net = random_net(gen, false);
        for (int l = 0; l < net.tier_count(); ++l) {
            // locate the peak first; the density can concentrate far below
            // the total-density scale when power ratios are extreme
            double lam_tot = 0.0;
            for (const auto& t : net.tiers) lam_tot += t.density;
            const double y0 = 1.0 / std::sqrt(kPi * lam_tot);
            double peak = 0.0, y_peak = y0;
            for (int k = -40; k <= 20; ++k) {
                const double y = y0 * std::pow(2.0, 0.5 * k);
                const double v = hetnet::serving_distance_pdf(net, l, y);
                if (v > peak) {
                    peak = v;
                    y_peak = y;
                }
            }
            double y_hi = y_peak;
            while (hetnet::serving_distance_pdf(net, l, y_hi) > 1e-13 * peak) y_hi *= 1.4;
            const int n = 20000;  // composite Simpson
            double mass = 0.0;
            for (int i = 0; i < n; ++i) {
                const double a = y_hi * i / n, b = y_hi * (i + 1) / n;
                mass += (b - a) / 6.0 *
                        (hetnet::serving_distance_pdf(net, l, a) +
                         4.0 * hetnet::serving_distance_pdf(net, l, 0.5 * (a + b)) +
                         hetnet::serving_distance_pdf(net, l, b));
            }
            CHECK(std::fabs(mass - 1.0) < 1e-6);
        }
    }
}

TEST_CASE("conditional interference variance: plug-in value and density linearity") {
    NetworkConfig single;
    single.rx_antennas = 2;
    single.tiers = {{3e-6, 1.5, 4.0, OstbcCode::siso()}};
    const auto ctx0 = hetnet::ServingContext::make(single, 0, 0.0);
    CHECK(hetnet::interference_variance_conditional(single, ctx0) == 0.0);
    for (double y : {30.0, 150.0}) {
        const auto ctx = hetnet::ServingContext::make(single, 0, y);
        const double want = kPi * single.tiers[0].density * (2.0 / 3.0) * y * y;
        CHECK(testq::rel_err(hetnet::interference_variance_conditional(single, ctx), want) <
              1e-13);
    }
    // Campbell additivity: the K-tier variance is the sum over tiers, i.e.
    // linear in each density.
    NetworkConfig net;
    net.rx_antennas = 2;
    net.tiers = {{4e-6, 39.8, 3.76, OstbcCode::rate_three_quarter_4tx()},
                 {16e-6, 1.0, 3.67, OstbcCode::alamouti()},
                 {40e-6, 0.25, 3.5, OstbcCode::siso()}};
    const auto ctx = hetnet::ServingContext::make(net, 1, 90.0);
    const double full = hetnet::interference_variance_conditional(net, ctx);
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
        auto one = net;
        for (int j = 0; j < 3; ++j)
            if (j != k) one.tiers[j].density = 1e-300;
        acc += hetnet::interference_variance_conditional(
            one, hetnet::ServingContext::make(one, 1, 90.0));
    }
    CHECK(testq::rel_err(full, acc) < 1e-12);
}

TEST_CASE("de-conditioned variance and correlation") {
    CHECK(testq::rel_err(hetnet::interference_variance(3.7, 1), 2.0 / 2.7) < 1e-15);
    CHECK(std::fabs(hetnet::interference_variance(3.7, 1) - 0.74) < 1e-2);
    CHECK(hetnet::interference_variance(4.0, 2) == 0.5);
    CHECK(testq::rel_err(hetnet::interference_variance(3.7, 1000000),
                         1.0 / 2.7) < 2e-6);
    CHECK_THROWS_AS(hetnet::interference_variance(2.0, 1), config_error);
    CHECK(hetnet::interference_correlation(1) == 0.5);
    CHECK(testq::rel_err(hetnet::interference_correlation(2), 2.0 / 3.0) < 1e-15);
    CHECK(hetnet::interference_correlation(1000000) > 0.999999);
}

TEST_CASE("de-conditioning the conditional variance reproduces the closed form") {
    // Equal exponents and active-antenna counts across tiers: averaging the
    // conditional variance over the serving-distance law must collapse to
    // (1 + 1/S)/(alpha - 1) independently of densities and powers.
    std::mt19937 gen(77);
    std::uniform_real_distribution<double> alpha_u(2.6, 4.8);
    for (int rep = 0; rep < 5; ++rep) {
        auto net = random_net(gen, true);
        const double alpha = alpha_u(gen);
        const int s = 1 + rep % 3;
        for (auto& t : net.tiers) {
            t.path_loss_exp = alpha;
            t.code = s == 1 ? OstbcCode::siso()
                            : (s == 2 ? OstbcCode::alamouti()
                                      : OstbcCode::rate_three_quarter_4tx());
        }
        double lam_eff = 0.0;  // sum_k lambda_k Phat^{2/alpha} is tier-relative; do per tier
        double total = 0.0;
        for (int l = 0; l < net.tier_count(); ++l) {
            lam_eff = 0.0;
            for (const auto& t : net.tiers)
                lam_eff +=
                    t.density * std::pow(t.power / net.tiers[l].power, 2.0 / alpha);
            const double y_hi = 14.0 / std::sqrt(kPi * lam_eff);
            total += testq::adaptive_simpson(
                [&](long double yld) -> long double {
                    const double y = double(yld);
                    const auto ctx = hetnet::ServingContext::make(net, l, y);
                    return 2.0 * kPi * net.tiers[l].density * y *
                           hetnet::interference_variance_conditional(net, ctx) *
                           std::exp(-kPi * lam_eff * y * y);
                },
                0.0, y_hi, 1e-12);
        }
        const int s_eff = net.tiers[0].code.s_active;
        CHECK(testq::rel_err(total, hetnet::interference_variance(alpha, s_eff)) < 1e-6);
    }
}

TEST_CASE("rate adjusted threshold") {
    CHECK(hetnet::rate_adjusted_threshold(5.0, OstbcCode::siso()) == 5.0);
    CHECK(testq::rel_err(hetnet::rate_adjusted_threshold(1.0, OstbcCode::rate_three_quarter_4tx()),
                         std::pow(2.0, 4.0 / 3.0) - 1.0) < 1e-15);
    CHECK(testq::rel_err(hetnet::rate_adjusted_threshold(3.0, OstbcCode::rate_half_4tx()), 15.0) <
          1e-15);
    CHECK_THROWS_AS(hetnet::rate_adjusted_threshold(0.0, OstbcCode::siso()), config_error);
}
