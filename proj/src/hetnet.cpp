#include "hetcov/hetnet.hpp"

#include <cmath>
#include <sstream>

#include "hetcov/errors.hpp"
#include "hetcov/quadrature.hpp"

namespace hetcov::hetnet {
namespace {

OstbcCode make_code(int m, int l, double r, int s,
                    std::vector<std::vector<std::uint8_t>> pattern, std::string name) {
    OstbcCode code{m, l, r, s, std::move(pattern), std::move(name)};
    code.validate();
    return code;
}

/// Exponent of the association-controlled void probability,
/// Q(y) = pi * sum_k lambda_k Phat_k^{2/alpha_k} y^{2/alphahat_k}.
double association_exponent(const NetworkConfig& net, const ServingContext& ctx, double y) {
    double q = 0.0;
    for (int k = 0; k < net.tier_count(); ++k) {
        const double ak = net.tiers[k].path_loss_exp;
        q += net.tiers[k].density * std::pow(ctx.rel_power[k], 2.0 / ak) *
             std::pow(y, 2.0 / ctx.rel_alpha[k]);
    }
    return 3.14159265358979323846 * q;
}

double density_scale(const NetworkConfig& net) {
    double lam = 0.0;
    for (const auto& t : net.tiers) lam += t.density;
    return 1.0 / std::sqrt(3.14159265358979323846 * lam);
}

}  // namespace

OstbcCode OstbcCode::siso() { return make_code(1, 1, 1.0, 1, {{1}}, "siso"); }

OstbcCode OstbcCode::alamouti() {
    return make_code(2, 2, 1.0, 2, {{1, 1}, {1, 1}}, "alamouti");
}

OstbcCode OstbcCode::rate_half_4tx() {
    return make_code(4, 4, 0.5, 2,
                     {{1, 1, 0, 0}, {0, 1, 1, 0}, {0, 0, 1, 1}, {1, 0, 0, 1}}, "4x4r12");
}

OstbcCode OstbcCode::rate_three_quarter_4tx() {
    // Each antenna rests in exactly one slot, as in the standard rate-3/4
    // four-antenna construction; only S = 3 enters the statistics.
    return make_code(4, 4, 0.75, 3,
                     {{1, 1, 1, 0}, {1, 1, 0, 1}, {1, 0, 1, 1}, {0, 1, 1, 1}}, "4x4r34");
}

OstbcCode OstbcCode::by_name(const std::string& name) {
    if (name == "siso") return siso();
    if (name == "alamouti") return alamouti();
    if (name == "4x4r12") return rate_half_4tx();
    if (name == "4x4r34") return rate_three_quarter_4tx();
    throw config_error("unknown OSTBC code name: '" + name +
                       "' (expected siso, alamouti, 4x4r12, 4x4r34)");
}

void OstbcCode::validate() const {
    if (m_tx < 1 || codeword_len < 1 || rate <= 0.0 || rate > 1.0)
        throw config_error("OstbcCode: invalid (M, L, r)");
    const double s_exact = codeword_len * rate;
    if (std::fabs(s_exact - s_active) > 1e-12 || s_active < 1)
        throw config_error("OstbcCode: S = L*r must be a positive integer (balanced code)");
    if (static_cast<int>(activation_pattern.size()) != codeword_len)
        throw config_error("OstbcCode: pattern must have one row per slot");
    for (const auto& slot : activation_pattern) {
        if (static_cast<int>(slot.size()) != m_tx)
            throw config_error("OstbcCode: pattern row length must equal M");
        int active = 0;
        for (auto v : slot) active += v ? 1 : 0;
        if (active != s_active)
            throw config_error("OstbcCode: every slot must activate exactly S antennas");
    }
}

void TierConfig::validate() const {
    if (!(density > 0.0)) throw config_error("TierConfig: density must be positive");
    if (!(power > 0.0)) throw config_error("TierConfig: power must be positive");
    if (!(path_loss_exp > 2.0))
        throw config_error("TierConfig: path loss exponent must exceed 2");
    code.validate();
}

void NetworkConfig::validate() const {
    if (tiers.empty()) throw config_error("NetworkConfig: at least one tier required");
    if (rx_antennas < 1) throw config_error("NetworkConfig: rx_antennas must be >= 1");
    if (noise_power < 0.0) throw config_error("NetworkConfig: negative noise power");
    for (const auto& t : tiers) t.validate();
}

bool NetworkConfig::equal_alpha() const {
    for (const auto& t : tiers)
        if (t.path_loss_exp != tiers.front().path_loss_exp) return false;
    return true;
}

int NetworkConfig::max_m_tx() const {
    int m = 1;
    for (const auto& t : tiers) m = std::max(m, t.code.m_tx);
    return m;
}

ServingContext ServingContext::make(const NetworkConfig& net, int tier, double y) {
    net.validate();
    if (tier < 0 || tier >= net.tier_count())
        throw config_error("ServingContext: tier index out of range");
    if (y < 0.0) throw config_error("ServingContext: negative distance");
    ServingContext ctx;
    ctx.tier_index = tier;
    ctx.distance = y;
    const auto& serving = net.tiers[tier];
    for (const auto& t : net.tiers) {
        const double phat = t.power / serving.power;
        const double ahat = t.path_loss_exp / serving.path_loss_exp;
        ctx.rel_power.push_back(phat);
        ctx.rel_alpha.push_back(ahat);
        ctx.excl_radius.push_back(std::pow(phat, 1.0 / t.path_loss_exp) *
                                  std::pow(y, 1.0 / ahat));
    }
    ctx.mean_snr = net.noise_power > 0.0
                       ? serving.power * std::pow(y, -serving.path_loss_exp) / net.noise_power
                       : std::numeric_limits<double>::infinity();
    return ctx;
}

double association_probability(const NetworkConfig& net, int tier) {
    net.validate();
    if (tier < 0 || tier >= net.tier_count())
        throw config_error("association_probability: tier index out of range");
    const auto ctx0 = ServingContext::make(net, tier, 1.0);
    const double lam = net.tiers[tier].density;
    auto integrand = [&](double y) {
        return 2.0 * 3.14159265358979323846 * lam * y *
               std::exp(-association_exponent(net, ctx0, y));
    };
    return quad::integrate_halfline(integrand, density_scale(net), 1e-10).value;
}

double serving_distance_pdf(const NetworkConfig& net, int tier, double y) {
    if (y < 0.0) throw config_error("serving_distance_pdf: negative distance");
    if (y == 0.0) return 0.0;
    const auto ctx = ServingContext::make(net, tier, y);
    const double a = association_probability(net, tier);
    return 2.0 * 3.14159265358979323846 * net.tiers[tier].density * y / a *
           std::exp(-association_exponent(net, ctx, y));
}

double interference_variance_conditional(const NetworkConfig& net, const ServingContext& ctx) {
    net.validate();
    double sum = 0.0;
    for (int k = 0; k < net.tier_count(); ++k) {
        const auto& t = net.tiers[k];
        sum += t.density * std::pow(ctx.rel_power[k], 2.0 / t.path_loss_exp) /
               (t.path_loss_exp - 1.0) * (1.0 + 1.0 / t.code.s_active) *
               std::pow(ctx.distance, 2.0 / ctx.rel_alpha[k]);
    }
    return 3.14159265358979323846 * sum;
}

double interference_variance(double alpha, int s_active) {
    if (alpha <= 2.0) {
        std::ostringstream msg;
        msg << "interference_variance: alpha = " << alpha << " <= 2";
        throw config_error(msg.str());
    }
    if (s_active < 1) throw config_error("interference_variance: S must be >= 1");
    return (1.0 + 1.0 / s_active) / (alpha - 1.0);
}

double interference_correlation(int s_active) {
    if (s_active < 1) throw config_error("interference_correlation: S must be >= 1");
    return static_cast<double>(s_active) / (1.0 + s_active);
}

double rate_adjusted_threshold(double t, const OstbcCode& code) {
    if (!(t > 0.0)) throw config_error("rate_adjusted_threshold: threshold must be positive");
    if (code.rate == 1.0) return t;
    return std::pow(1.0 + t, 1.0 / code.rate) - 1.0;
}

}  // namespace hetcov::hetnet
