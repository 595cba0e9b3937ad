#include "hetcov/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include "hetcov/errors.hpp"

namespace hetcov::mc {
namespace {

constexpr double kPi = 3.14159265358979323846;

using cplx = std::complex<double>;

struct TierDerived {
    double radius = 0.0;        // drop disc radius
    double amp2_per_dist = 0.0; // P_k / S_k (multiply by dist^-alpha)
    double alpha = 0.0;
    int m = 1, l = 1, s = 1;
};

/// Channel of one interfering BS: row-major N x M block plus its codeword
/// slot offset relative to the serving frame.
struct InterfererChannel {
    int tier = 0;
    double dist = 0.0;
    int offset = 0;
    std::vector<cplx> g;  // N x M_k
};

struct WorkerScratch {
    Geometry geom;
    std::vector<cplx> h_o;
    std::vector<InterfererChannel> channels;
    std::vector<double> i_n;        // genie per-antenna interference
    std::vector<double> i_n_est;    // estimate used by IA/SC weights
    std::vector<cplx> w1, w2;
    std::vector<cplx> frame_acc;
};

const std::vector<std::uint8_t>& active_set(const hetnet::OstbcCode& code, int slot) {
    return code.activation_pattern[slot % code.codeword_len];
}

/// Post-combining interference power contributed by one BS, for a combiner
/// described by per-antenna weight vectors (w1 for slot 1, w2 for the
/// conjugated slot 2 when the desired code is Alamouti). Exact variance over
/// the interferer's code symbols given the channel realizations.
double interferer_variance(const InterfererChannel& ch, const TierDerived& tier,
                           const hetnet::OstbcCode& code, int desired_len,
                           const std::vector<cplx>& w1, const std::vector<cplx>& w2) {
    const int n_rx = static_cast<int>(w1.size());
    const int m = tier.m;
    const double amp2 = tier.amp2_per_dist * std::pow(ch.dist, -tier.alpha);
    auto col_dot = [&](const std::vector<cplx>& w, int col, bool conj_g) {
        cplx acc{0.0, 0.0};
        for (int n = 0; n < n_rx; ++n) {
            const cplx g = ch.g[n * m + col];
            acc += w[n] * (conj_g ? std::conj(g) : g);
        }
        return acc;
    };
    if (desired_len == 1) {
        const auto& act = active_set(code, ch.offset);
        double var = 0.0;
        for (int col = 0; col < m; ++col)
            if (act[col]) var += std::norm(col_dot(w1, col, false));
        return amp2 * var;
    }
    // Desired codeword spans two slots.
    if (m == 1) {
        return amp2 * (std::norm(col_dot(w1, 0, false)) + std::norm(col_dot(w2, 0, true)));
    }
    if (m == 2) {
        if (ch.offset == 0) {
            // Aligned Alamouti interferer: symbol pairs couple across slots.
            const cplx v1 = col_dot(w1, 0, false) + col_dot(w2, 1, true);
            const cplx v2 = col_dot(w1, 1, false) - col_dot(w2, 0, true);
            return amp2 * (std::norm(v1) + std::norm(v2));
        }
        // Offset by one slot: the two desired slots see halves of two
        // independent interfering codewords.
        return amp2 * (std::norm(col_dot(w1, 0, false)) + std::norm(col_dot(w1, 1, false)) +
                       std::norm(col_dot(w2, 0, true)) + std::norm(col_dot(w2, 1, true)));
    }
    // Four-antenna interferer, activation-averaged: fresh symbols per slot.
    const auto& act1 = active_set(code, ch.offset);
    const auto& act2 = active_set(code, ch.offset + 1);
    double var = 0.0;
    for (int col = 0; col < m; ++col) {
        if (act1[col]) var += std::norm(col_dot(w1, col, false));
        if (act2[col]) var += std::norm(col_dot(w2, col, true));
    }
    return amp2 * var;
}

double sq(double v) { return v * v; }

}  // namespace

std::string sim_scheme_name(SimScheme s) {
    switch (s) {
        case SimScheme::IB_MRC: return "IB_MRC";
        case SimScheme::IA_MRC_EXACT: return "IA_MRC_EXACT";
        case SimScheme::IA_MRC_SIMPLIFIED: return "IA_MRC_SIMPLIFIED";
        case SimScheme::SC: return "SC";
        case SimScheme::IA_NC: return "IA_NC";
        case SimScheme::IA_FC: return "IA_FC";
    }
    return "?";
}

SimScheme sim_scheme_by_name(const std::string& name) {
    if (name == "IB_MRC") return SimScheme::IB_MRC;
    if (name == "IA_MRC_EXACT") return SimScheme::IA_MRC_EXACT;
    if (name == "IA_MRC_SIMPLIFIED") return SimScheme::IA_MRC_SIMPLIFIED;
    if (name == "SC") return SimScheme::SC;
    if (name == "IA_NC") return SimScheme::IA_NC;
    if (name == "IA_FC") return SimScheme::IA_FC;
    throw config_error("unknown simulation scheme: '" + name + "'");
}

void SimConfig::validate() const {
    net.validate();
    if (iterations < 1) throw config_error("SimConfig: iterations must be >= 1");
    if (mean_bs_per_tier < 1) throw config_error("SimConfig: mean_bs_per_tier must be >= 1");
    if (resources_per_frame < 1) throw config_error("SimConfig: resources_per_frame must be >= 1");
    if (disc_radius_scale <= 0.0) throw config_error("SimConfig: disc_radius_scale must be > 0");
    if (combining.empty()) throw config_error("SimConfig: no combining schemes requested");
    for (auto s : combining)
        if (s == SimScheme::SC && net.max_m_tx() != 1)
            throw config_error("SimConfig: SC requires M_k = 1 in every tier");
    for (double t : thresholds)
        if (!(t > 0.0)) throw config_error("SimConfig: thresholds must be positive");
}

double wilson_halfwidth(double p_hat, long n, double z) {
    if (n < 1) return 1.0;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    return z * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * sq(double(n)))) / denom;
}

bool sample_geometry(const hetnet::NetworkConfig& net, int mean_bs_per_tier,
                     double radius_scale, Rng& rng, Geometry& geom) {
    geom.interferers.clear();
    int best = -1;
    double best_power = -1.0;
    double best_dist = 0.0;
    int best_tier = 0;
    for (int k = 0; k < net.tier_count(); ++k) {
        const auto& tier = net.tiers[k];
        const double radius =
            std::sqrt(mean_bs_per_tier / (tier.density * kPi)) * radius_scale;
        const std::uint32_t count = rng.poisson(mean_bs_per_tier * sq(radius_scale));
        for (std::uint32_t i = 0; i < count; ++i) {
            const double dist = radius * std::sqrt(rng.uniform());
            geom.interferers.push_back({k, dist});
            const double pr = tier.power * std::pow(dist, -tier.path_loss_exp);
            if (pr > best_power) {
                best_power = pr;
                best = static_cast<int>(geom.interferers.size()) - 1;
                best_dist = dist;
                best_tier = k;
            }
        }
    }
    if (best < 0) return false;
    geom.serving_tier = best_tier;
    geom.serving_dist = best_dist;
    geom.interferers.erase(geom.interferers.begin() + best);
    return true;
}

SimResult run(const SimConfig& cfg) {
    cfg.validate();
    const auto& net = cfg.net;
    const int N = net.rx_antennas;
    const int K = net.tier_count();
    const int n_schemes = static_cast<int>(cfg.combining.size());
    const long iters = cfg.iterations;

    std::vector<TierDerived> tiers(K);
    for (int k = 0; k < K; ++k) {
        const auto& t = net.tiers[k];
        tiers[k] = {std::sqrt(cfg.mean_bs_per_tier / (t.density * kPi)) * cfg.disc_radius_scale,
                    t.power / t.code.s_active, t.path_loss_exp, t.code.m_tx,
                    t.code.codeword_len, t.code.s_active};
    }

    // Per-iteration output slots: deterministic reduction regardless of the
    // worker schedule.
    std::vector<double> sinr_store(static_cast<size_t>(iters) * n_schemes, 0.0);
    std::vector<double> norm_i1(iters, 0.0), norm_i2(iters, 0.0);
    std::vector<std::uint32_t> resamples(iters, 0);
    std::vector<IterationSample> samples;
    if (cfg.collect_samples) samples.resize(iters);

    const bool want_nc = std::find(cfg.combining.begin(), cfg.combining.end(),
                                   SimScheme::IA_NC) != cfg.combining.end();

    auto run_iteration = [&](long it, WorkerScratch& ws) {
        Rng rng(cfg.rng_seed, static_cast<std::uint64_t>(it));
        while (!sample_geometry(net, cfg.mean_bs_per_tier, cfg.disc_radius_scale, rng,
                                ws.geom))
            ++resamples[it];
        const Geometry& geom = ws.geom;
        const int l = geom.serving_tier;
        const double y = geom.serving_dist;
        const auto& serving = net.tiers[l];
        const int ml = serving.code.m_tx;
        const int sl = serving.code.s_active;
        const double alpha_l = serving.path_loss_exp;
        const double sigma2 = net.noise_power;

        // Desired channel H_o: N x M_l.
        ws.h_o.resize(static_cast<size_t>(N) * ml);
        for (auto& h : ws.h_o) h = rng.cnormal();

        // Interferer channels and codeword offsets.
        ws.channels.resize(geom.interferers.size());
        for (size_t i = 0; i < geom.interferers.size(); ++i) {
            auto& ch = ws.channels[i];
            const auto& bs = geom.interferers[i];
            ch.tier = bs.tier;
            ch.dist = bs.dist;
            ch.offset = static_cast<int>(rng.below(tiers[bs.tier].l));
            ch.g.resize(static_cast<size_t>(N) * tiers[bs.tier].m);
            for (auto& g : ch.g) g = rng.cnormal();
        }

        // Genie per-antenna interference, Eq.-(5) style: the slot identified
        // by each interferer's offset selects its active antenna set.
        ws.i_n.assign(N, 0.0);
        for (const auto& ch : ws.channels) {
            const auto& td = tiers[ch.tier];
            const auto& act = active_set(net.tiers[ch.tier].code, ch.offset);
            const double amp2 = td.amp2_per_dist * std::pow(ch.dist, -td.alpha);
            for (int n = 0; n < N; ++n) {
                double e = 0.0;
                for (int col = 0; col < td.m; ++col)
                    if (act[col]) e += std::norm(ch.g[n * td.m + col]);
                ws.i_n[n] += amp2 * e;
            }
        }

        // Optional frame-averaged interference estimate: mean squared sum
        // envelope over resources_per_frame resources and L_l slots, with
        // fresh symbols per resource and the per-interferer slot offsets.
        ws.i_n_est = ws.i_n;
        if (cfg.noisy_interference_estimate) {
            const int ll = serving.code.codeword_len;
            std::vector<double>& est = ws.i_n_est;
            est.assign(N, 0.0);
            long samples_per_antenna = 0;
            for (int res = 0; res < cfg.resources_per_frame; ++res) {
                for (int slot = 0; slot < ll; ++slot) {
                    ws.frame_acc.assign(N, cplx{0.0, 0.0});
                    for (const auto& ch : ws.channels) {
                        const auto& td = tiers[ch.tier];
                        const auto& act = active_set(net.tiers[ch.tier].code, ch.offset + slot);
                        const double amp =
                            std::sqrt(td.amp2_per_dist) * std::pow(ch.dist, -td.alpha / 2.0);
                        for (int col = 0; col < td.m; ++col) {
                            if (!act[col]) continue;
                            const cplx sym = rng.cnormal();
                            for (int n = 0; n < N; ++n)
                                ws.frame_acc[n] += amp * ch.g[n * td.m + col] * sym;
                        }
                    }
                    for (int n = 0; n < N; ++n) est[n] += std::norm(ws.frame_acc[n]);
                    ++samples_per_antenna;
                }
            }
            for (int n = 0; n < N; ++n) est[n] /= samples_per_antenna;
        }

        // Normalized interference for the moment report.
        const double long_term = serving.power * std::pow(y, -alpha_l);
        norm_i1[it] = (ws.i_n[0] + sigma2) / long_term;
        norm_i2[it] = N > 1 ? (ws.i_n[1] + sigma2) / long_term : 0.0;

        auto desired_row_norm = [&](int n) {
            double e = 0.0;
            for (int col = 0; col < ml; ++col) e += std::norm(ws.h_o[n * ml + col]);
            return e;
        };

        // Weighted combining shared by IB (unit weights) and IA (weights
        // 1/(I_n + sigma^2)); exact per-interferer variance quadratic forms.
        auto weighted_sinr = [&](const std::vector<double>& omega) {
            const int desired_len = ml;  // L = M for the codeword-level codes
            ws.w1.resize(N);
            ws.w2.resize(N);
            double gain = 0.0, noise = 0.0;
            for (int n = 0; n < N; ++n) {
                ws.w1[n] = std::conj(ws.h_o[n * ml + 0]) * omega[n];
                if (ml == 2) ws.w2[n] = ws.h_o[n * ml + 1] * omega[n];
                const double row = desired_row_norm(n);
                gain += omega[n] * row;
                noise += sigma2 * omega[n] * omega[n] * row;
            }
            double interf = 0.0;
            for (const auto& ch : ws.channels)
                interf += interferer_variance(ch, tiers[ch.tier], net.tiers[ch.tier].code,
                                              desired_len, ws.w1, ws.w2);
            const double amp_s2 = serving.power / (sl * std::pow(y, alpha_l));
            return amp_s2 * gain * gain / (interf + noise);
        };

        std::vector<double> ones(N, 1.0);
        std::vector<double> ia_w(N, 0.0);
        for (int n = 0; n < N; ++n) ia_w[n] = 1.0 / (ws.i_n_est[n] + sigma2);

        for (int si = 0; si < n_schemes; ++si) {
            const SimScheme sch = cfg.combining[si];
            double sinr = 0.0;
            switch (sch) {
                case SimScheme::IB_MRC: {
                    if (ml <= 2) {
                        sinr = weighted_sinr(ones);
                    } else {
                        // Equivalent-channel route for the four-antenna codes:
                        // per-BS Gamma(S_k) interference from the first-row
                        // active-set fading.
                        double interf = 0.0;
                        for (const auto& ch : ws.channels) {
                            const auto& td = tiers[ch.tier];
                            const auto& act = active_set(net.tiers[ch.tier].code, ch.offset);
                            double e = 0.0;
                            for (int col = 0; col < td.m; ++col)
                                if (act[col]) e += std::norm(ch.g[0 * td.m + col]);
                            interf += td.amp2_per_dist * std::pow(ch.dist, -td.alpha) * e;
                        }
                        double h2 = 0.0;
                        for (const auto& h : ws.h_o) h2 += std::norm(h);
                        sinr = serving.power / (sl * std::pow(y, alpha_l)) * h2 /
                               (interf + sigma2);
                    }
                    break;
                }
                case SimScheme::IA_MRC_EXACT: {
                    if (ml <= 2) {
                        sinr = weighted_sinr(ia_w);
                    } else {
                        double acc = 0.0;
                        for (int n = 0; n < N; ++n) acc += desired_row_norm(n) * ia_w[n];
                        sinr = serving.power / (ml * std::pow(y, alpha_l)) * acc;
                    }
                    break;
                }
                case SimScheme::IA_MRC_SIMPLIFIED: {
                    double acc = 0.0;
                    for (int n = 0; n < N; ++n) acc += desired_row_norm(n) * ia_w[n];
                    sinr = serving.power / (ml * std::pow(y, alpha_l)) * acc;
                    break;
                }
                case SimScheme::SC: {
                    double best = 0.0;
                    for (int n = 0; n < N; ++n)
                        best = std::max(best, std::norm(ws.h_o[n * ml]) /
                                                  (ws.i_n_est[n] + sigma2));
                    sinr = serving.power * std::pow(y, -alpha_l) * best;
                    break;
                }
                case SimScheme::IA_NC: {
                    // Independent interferer geometry and fading per antenna,
                    // with the association exclusion radii kept intact.
                    const auto ctx = hetnet::ServingContext::make(net, l, y);
                    double acc = 0.0;
                    for (int n = 0; n < N; ++n) {
                        double in_nc = 0.0;
                        for (int k = 0; k < K; ++k) {
                            const auto& td = tiers[k];
                            const double r2lo = sq(std::max(ctx.excl_radius[k], 0.0));
                            const double r2hi = sq(td.radius);
                            if (r2hi <= r2lo) continue;
                            const double mean = net.tiers[k].density * kPi * (r2hi - r2lo);
                            const std::uint32_t count = rng.poisson(mean);
                            for (std::uint32_t i = 0; i < count; ++i) {
                                const double dist =
                                    std::sqrt(r2lo + rng.uniform() * (r2hi - r2lo));
                                double e = 0.0;
                                for (int j = 0; j < td.s; ++j)
                                    e += -std::log(rng.uniform());
                                in_nc += td.amp2_per_dist * std::pow(dist, -td.alpha) * e;
                            }
                        }
                        acc += desired_row_norm(n) / (in_nc + sigma2);
                    }
                    sinr = serving.power / (ml * std::pow(y, alpha_l)) * acc;
                    break;
                }
                case SimScheme::IA_FC: {
                    // Fading rows shared across Rx antennas: every antenna sees
                    // the first row's interference.
                    double i_fc = 0.0;
                    for (const auto& ch : ws.channels) {
                        const auto& td = tiers[ch.tier];
                        const auto& act = active_set(net.tiers[ch.tier].code, ch.offset);
                        double e = 0.0;
                        for (int col = 0; col < td.m; ++col)
                            if (act[col]) e += std::norm(ch.g[0 * td.m + col]);
                        i_fc += td.amp2_per_dist * std::pow(ch.dist, -td.alpha) * e;
                    }
                    double h2 = 0.0;
                    for (const auto& h : ws.h_o) h2 += std::norm(h);
                    sinr = serving.power / (ml * std::pow(y, alpha_l)) * h2 / (i_fc + sigma2);
                    break;
                }
            }
            sinr_store[static_cast<size_t>(it) * n_schemes + si] = sinr;
        }

        if (cfg.collect_samples) {
            auto& s = samples[it];
            s.serving_tier = l;
            s.serving_distance = y;
            s.per_antenna_interference = ws.i_n;
            s.desired_channel = ws.h_o;
            for (int si = 0; si < n_schemes; ++si)
                s.sinr_by_scheme[cfg.combining[si]] =
                    sinr_store[static_cast<size_t>(it) * n_schemes + si];
        }
        (void)want_nc;
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                               : std::min<unsigned>(hw, 8);
    std::atomic<long> next{0};
    auto worker = [&]() {
        WorkerScratch ws;
        for (;;) {
            const long it = next.fetch_add(1);
            if (it >= iters) return;
            run_iteration(it, ws);
        }
    };
    if (n_threads <= 1 || iters < 4) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Sequential reduction in iteration order.
    SimResult result;
    result.config = cfg;
    for (long it = 0; it < iters; ++it) result.resample_events += resamples[it];
    for (int si = 0; si < n_schemes; ++si) {
        auto& curve = result.curves[cfg.combining[si]];
        curve.resize(cfg.thresholds.size());
        for (size_t ti = 0; ti < cfg.thresholds.size(); ++ti) {
            long hits = 0;
            for (long it = 0; it < iters; ++it)
                if (sinr_store[static_cast<size_t>(it) * n_schemes + si] >=
                    cfg.thresholds[ti])
                    ++hits;
            const double p = static_cast<double>(hits) / iters;
            curve[ti] = {cfg.thresholds[ti], p, wilson_halfwidth(p, iters)};
        }
    }
    MomentReport& mom = result.moments;
    mom.samples = iters;
    double mean1 = 0.0, mean2 = 0.0;
    for (long it = 0; it < iters; ++it) {
        mean1 += norm_i1[it];
        mean2 += norm_i2[it];
    }
    mean1 /= iters;
    mean2 /= iters;
    double v1 = 0.0, v2 = 0.0, cov = 0.0;
    for (long it = 0; it < iters; ++it) {
        const double d1 = norm_i1[it] - mean1;
        const double d2 = norm_i2[it] - mean2;
        v1 += d1 * d1;
        v2 += d2 * d2;
        cov += d1 * d2;
    }
    v1 /= iters;
    v2 /= iters;
    cov /= iters;
    mom.mean_norm_interference = mean1;
    mom.var_norm_interference = v1;
    mom.corr_across_antennas =
        N > 1 ? cov / std::sqrt(v1 * v2) : std::numeric_limits<double>::quiet_NaN();
    if (cfg.collect_samples) result.samples = std::move(samples);
    return result;
}

void write_samples_csv(const SimResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open sample dump file: " + path);
    const int N = result.config.net.rx_antennas;
    out << "iteration,serving_tier,y";
    for (int n = 1; n <= N; ++n) out << ",I_" << n;
    out << ",scheme,sinr\n";
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (size_t it = 0; it < result.samples.size(); ++it) {
        const auto& s = result.samples[it];
        for (const auto& [scheme, sinr] : s.sinr_by_scheme) {
            out << it << ',' << s.serving_tier + 1 << ',' << fmt(s.serving_distance);
            for (int n = 0; n < N; ++n) out << ',' << fmt(s.per_antenna_interference[n]);
            out << ',' << sim_scheme_name(scheme) << ',' << fmt(sinr) << '\n';
        }
    }
}

}  // namespace hetcov::mc
