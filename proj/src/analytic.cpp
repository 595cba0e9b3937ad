#include "hetcov/analytic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "hetcov/errors.hpp"
#include "hetcov/quadrature.hpp"
#include "hetcov/specfun.hpp"

namespace hetcov::analytic {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kOuterTol = 1e-8;   // outer (y or z) integrals
constexpr double kInnerTol = 3e-11;  // nested y integrals inside the z sweep

double binom(int n, int k) {
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r *= static_cast<double>(n - k + j) / j;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int j = 2; j <= n; ++j) r *= j;
    return r;
}

struct Kahan {
    double sum = 0.0, c = 0.0, max_abs_term = 0.0;
    void add(double v) {
        max_abs_term = std::max(max_abs_term, std::fabs(v));
        const double t = sum + v;
        c += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + c; }
};

/// Derivatives of exp(W) from derivatives of W:
/// h_n = sum_{j<n} C(n-1,j) W^{(n-j)} h_j, h_0 = exp(W^{(0)}).
void exp_derivs(const std::vector<double>& w, std::vector<double>& h) {
    const int n = static_cast<int>(w.size());
    h.assign(n, 0.0);
    h[0] = std::exp(w[0]);
    for (int m = 1; m < n; ++m) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j) acc += binom(m - 1, j) * w[m - j] * h[j];
        h[m] = acc;
    }
}

/// Derivatives of 1/F from derivatives of F.
std::vector<double> reciprocal_derivs(const std::vector<double>& f) {
    const int n = static_cast<int>(f.size());
    std::vector<double> r(n, 0.0);
    r[0] = 1.0 / f[0];
    for (int m = 1; m < n; ++m) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j) acc += binom(m, j) * r[j] * f[m - j];
        r[m] = -acc / f[0];
    }
    return r;
}

double tier_threshold(double t, const std::vector<double>& per_tier_t, int tier) {
    if (per_tier_t.empty()) return t;
    return per_tier_t[tier];
}

void check_positive_threshold(double t) {
    if (!(t > 0.0)) throw config_error("coverage: threshold must be positive");
}

/// d^m/da^m 2F1(-2/q, b; 1-2/q; -a) with respect to the (negated) argument.
double hyp_arg_deriv(double q, double b, double a, int m) {
    const double a0 = -2.0 / q, c0 = 1.0 - 2.0 / q;
    if (m == 0) return specfun::hyp2f1(a0, b, c0, -a);
    double coef = (m % 2 == 0) ? 1.0 : -1.0;
    for (int j = 0; j < m; ++j) coef *= (a0 + j) * (b + j) / (c0 + j);
    return coef * specfun::hyp2f1(a0 + m, b + m, c0 + m, -a);
}

double density_scale(const hetnet::NetworkConfig& net) {
    double lam = 0.0;
    for (const auto& t : net.tiers) lam += t.density;
    return 1.0 / std::sqrt(kPi * lam);
}

// ---------------------------------------------------------------------------
// Theorem 1: interference-blind MRC.
// ---------------------------------------------------------------------------

struct Eval {
    double value = 0.0;
    double error = 0.0;
    double max_term_ratio = 0.0;
};

Eval coverage_ib_eval(const hetnet::NetworkConfig& net, double t,
                      const std::vector<double>& per_tier_t) {
    net.validate();
    check_positive_threshold(t);
    const int K = net.tier_count();
    const int N = net.rx_antennas;
    Eval out;
    for (int l = 0; l < K; ++l) {
        const auto& serving = net.tiers[l];
        const double tl = tier_threshold(t, per_tier_t, l);
        const int nm = N * serving.code.m_tx;
        const double s_l = serving.code.s_active;
        // Per-interfering-tier hypergeometric derivative tables (y-independent).
        std::vector<std::vector<double>> fd(K);
        std::vector<double> coef_pow(K);  // lambda_k Phat^{2/alpha_k}
        std::vector<double> exp_y(K);     // 2/alphahat_k
        for (int k = 0; k < K; ++k) {
            const auto& tk = net.tiers[k];
            const double shat = tk.code.s_active / s_l;
            const specfun::HyperGeomArgs args{-2.0 / tk.path_loss_exp, double(tk.code.s_active),
                                              1.0 - 2.0 / tk.path_loss_exp, -tl / shat};
            fd[k].resize(nm);
            for (int m = 0; m < nm; ++m)
                fd[k][m] = specfun::hyp2f1_deriv(args, m, tl / shat);
            coef_pow[k] = tk.density * std::pow(tk.power / serving.power, 2.0 / tk.path_loss_exp);
            exp_y[k] = 2.0 / (tk.path_loss_exp / serving.path_loss_exp);
        }
        const double noise_coef =
            net.noise_power > 0.0 ? s_l * tl * net.noise_power / serving.power : 0.0;
        std::vector<double> w(nm), h;
        double worst_ratio = 0.0;
        auto integrand = [&](double y) {
            double w0 = 0.0;
            for (int m = 0; m < nm; ++m) w[m] = 0.0;
            for (int k = 0; k < K; ++k) {
                const double ck = kPi * coef_pow[k] * std::pow(y, exp_y[k]);
                for (int m = 0; m < nm; ++m) w[m] -= ck * fd[k][m];
            }
            w0 = w[0];
            if (noise_coef > 0.0) {
                const double nz = noise_coef * std::pow(y, serving.path_loss_exp);
                w0 -= nz;
                if (nm > 1) w[1] -= nz;
            }
            w[0] = w0;
            exp_derivs(w, h);
            Kahan acc;
            double fact = 1.0;
            for (int m = 0; m < nm; ++m) {
                if (m > 0) fact *= m;
                acc.add((m % 2 == 0 ? 1.0 : -1.0) / fact * h[m]);
            }
            const double val = acc.value();
            if (val != 0.0)
                worst_ratio = std::max(worst_ratio, acc.max_abs_term / std::fabs(val));
            return 2.0 * kPi * serving.density * y * val;
        };
        const auto res = quad::integrate_halfline(integrand, density_scale(net), kOuterTol);
        out.value += res.value;
        out.error += res.error;
        out.max_term_ratio = std::max(out.max_term_ratio, worst_ratio);
    }
    out.value = std::clamp(out.value, 0.0, 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Theorem 2 and Proposition 1: interference-aware MRC, N = 2.
// ---------------------------------------------------------------------------

enum class Coupling { Exact, NoCorrelation };

/// Partial derivatives (in the two interference weights) of the per-tier
/// coupling term: 1 + Psi(s u_k, t v_k, M_k, alpha_k) for the exact model,
/// or F(s u_k) + F(t v_k) - 1 for the no-correlation model.
void coupling_table(Coupling mode, double uk, double vk, int mk, double alpha,
                    int imax, int jmax, std::vector<std::vector<double>>& c) {
    c.assign(imax + 1, std::vector<double>(jmax + 1, 0.0));
    if (mode == Coupling::Exact) {
        c[0][0] = 1.0 + specfun::psi_integral(uk, vk, mk, alpha);
        for (int i = 0; i <= imax; ++i)
            for (int j = 0; j <= jmax; ++j) {
                if (i == 0 && j == 0) continue;
                if (i > 0 && uk == 0.0) continue;  // derivative weight vanishes
                c[i][j] = std::pow(uk, i) * std::pow(vk, j) *
                          specfun::psi_deriv(uk, vk, mk, alpha, i, j);
            }
    } else {
        const specfun::HyperGeomArgs args{-2.0 / alpha, double(mk), 1.0 - 2.0 / alpha, -uk};
        c[0][0] = specfun::hyp2f1(-2.0 / alpha, mk, 1.0 - 2.0 / alpha, -uk) +
                  specfun::hyp2f1(-2.0 / alpha, mk, 1.0 - 2.0 / alpha, -vk) - 1.0;
        for (int i = 1; i <= imax; ++i)
            c[i][0] = uk == 0.0 ? 0.0 : specfun::hyp2f1_deriv(args, i, uk);
        for (int j = 1; j <= jmax; ++j) c[0][j] = specfun::hyp2f1_deriv(args, j, vk);
    }
}

/// Bivariate analogue of exp_derivs: derivatives of exp(W(s,t)) at (1,1).
void exp_derivs_2d(const std::vector<std::vector<double>>& w,
                   std::vector<std::vector<double>>& e) {
    const int ni = static_cast<int>(w.size());
    const int nj = static_cast<int>(w[0].size());
    e.assign(ni, std::vector<double>(nj, 0.0));
    e[0][0] = std::exp(w[0][0]);
    for (int i = 0; i < ni; ++i)
        for (int j = 0; j < nj; ++j) {
            if (i == 0 && j == 0) continue;
            double acc = 0.0;
            if (i > 0) {
                for (int a = 0; a < i; ++a)
                    for (int b = 0; b <= j; ++b)
                        acc += binom(i - 1, a) * binom(j, b) * w[i - a][j - b] * e[a][b];
            } else {
                for (int b = 0; b < j; ++b)
                    acc += binom(j - 1, b) * w[0][j - b] * e[0][b];
            }
            e[i][j] = acc;
        }
}

void check_ia_supported(const hetnet::NetworkConfig& net) {
    if (net.rx_antennas != 2)
        throw unsupported_error("IA-MRC coverage is derived for N = 2 receive antennas only");
    if (net.max_m_tx() > 2)
        throw unsupported_error("IA-MRC coverage requires M_k <= 2 in every tier");
}

Eval coverage_ia_eval(const hetnet::NetworkConfig& net, double t,
                      const std::vector<double>& per_tier_t, Coupling mode) {
    net.validate();
    check_positive_threshold(t);
    check_ia_supported(net);
    const int K = net.tier_count();
    double alpha_min = net.tiers[0].path_loss_exp;
    for (const auto& tk : net.tiers) alpha_min = std::min(alpha_min, tk.path_loss_exp);
    Eval out;
    for (int l = 0; l < K; ++l) {
        const auto& serving = net.tiers[l];
        const double tl = tier_threshold(t, per_tier_t, l);
        const int ml = serving.code.m_tx;
        const int imax = ml - 1, jmax = ml;
        std::vector<double> coef_pow(K), exp_y(K), mhat(K);
        for (int k = 0; k < K; ++k) {
            const auto& tk = net.tiers[k];
            coef_pow[k] = tk.density * std::pow(tk.power / serving.power, 2.0 / tk.path_loss_exp);
            exp_y[k] = 2.0 / (tk.path_loss_exp / serving.path_loss_exp);
            mhat[k] = static_cast<double>(tk.code.m_tx) / ml;
        }
        const double noise_coef =
            net.noise_power > 0.0 ? ml * net.noise_power / serving.power : 0.0;
        const double gpref = 1.0 / std::tgamma(static_cast<double>(ml));
        const double yscale = density_scale(net);

        std::vector<std::vector<std::vector<double>>> ck(K);
        std::vector<std::vector<double>> w(imax + 1, std::vector<double>(jmax + 1, 0.0));
        std::vector<std::vector<double>> e;

        // D(z): the inner y-integral of the mixed (s,t)-derivative sum.
        auto dval = [&](double z) {
            const double u = std::max(tl - z, 0.0);
            for (int k = 0; k < K; ++k)
                coupling_table(mode, u / mhat[k], z / mhat[k], net.tiers[k].code.m_tx,
                               net.tiers[k].path_loss_exp, imax, jmax, ck[k]);
            auto integrand = [&](double y) {
                for (auto& row : w) std::fill(row.begin(), row.end(), 0.0);
                for (int k = 0; k < K; ++k) {
                    const double beta = kPi * coef_pow[k] * std::pow(y, exp_y[k]);
                    for (int i = 0; i <= imax; ++i)
                        for (int j = 0; j <= jmax; ++j) w[i][j] -= beta * ck[k][i][j];
                }
                if (noise_coef > 0.0) {
                    const double nz = noise_coef * std::pow(y, serving.path_loss_exp);
                    w[0][0] -= nz * (u + z);
                    if (imax >= 1) w[1][0] -= nz * u;
                    w[0][1] -= nz * z;
                }
                exp_derivs_2d(w, e);
                Kahan acc;
                double fact = 1.0;
                for (int m = 0; m <= imax; ++m) {
                    if (m > 0) fact *= m;
                    if (m > 0 && u == 0.0) continue;
                    const double sign = ((m + ml) % 2 == 0) ? 1.0 : -1.0;
                    acc.add(sign / fact * gpref * e[m][ml]);
                }
                return 2.0 * kPi * serving.density * y * acc.value();
            };
            return quad::integrate_halfline(integrand, yscale, kInnerTol).value;
        };

        // z in (0, T]: log substitution, integrand D(e^v).
        const double z_min = tl * 1e-10;
        const auto seg1 = quad::integrate([&](double v) { return dval(std::exp(v)); },
                                          std::log(z_min), std::log(tl), kOuterTol);
        // z in [T, inf): power substitution z = T x^{-alpha_min/2}.
        const auto seg2 = quad::integrate(
            [&](double x) {
                const double z = tl * std::pow(x, -alpha_min / 2.0);
                return dval(z) * (alpha_min / 2.0) / x;
            },
            0.0, 1.0, kOuterTol);
        out.value += seg1.value + seg2.value;
        out.error += seg1.error + seg2.error;
    }
    out.value = std::clamp(out.value, 0.0, 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Corollary 2 machinery (equal parameters, sigma^2 = 0): everything reduces
// to partial derivatives of R(a1,a2) = 1 / (1 + Psi(a1,a2,M,alpha)).
// ---------------------------------------------------------------------------

/// R^{(i,j)} for i <= imax, j <= jmax via the reciprocal recurrence driven by
/// the exact Psi partial-derivative integrals.
void recip_psi_table(double a1, double a2, int mk, double alpha, int imax, int jmax,
                     std::vector<std::vector<double>>& r) {
    std::vector<std::vector<double>> phi(imax + 1, std::vector<double>(jmax + 1, 0.0));
    phi[0][0] = 1.0 + specfun::psi_integral(a1, a2, mk, alpha);
    for (int i = 0; i <= imax; ++i)
        for (int j = 0; j <= jmax; ++j) {
            if (i == 0 && j == 0) continue;
            phi[i][j] = specfun::psi_deriv(a1, a2, mk, alpha, i, j);
        }
    r.assign(imax + 1, std::vector<double>(jmax + 1, 0.0));
    r[0][0] = 1.0 / phi[0][0];
    for (int i = 0; i <= imax; ++i)
        for (int j = 0; j <= jmax; ++j) {
            if (i == 0 && j == 0) continue;
            double acc = 0.0;
            for (int a = 0; a <= i; ++a)
                for (int b = 0; b <= j; ++b) {
                    if (a == i && b == j) continue;
                    acc += binom(i, a) * binom(j, b) * r[a][b] * phi[i - a][j - b];
                }
            r[i][j] = -acc / phi[0][0];
        }
}

void check_ia_simpl_args(double alpha, int m_tx) {
    if (alpha <= 2.0) throw config_error("coverage_ia_simplified: alpha must exceed 2");
    if (m_tx < 1 || m_tx > 2)
        throw unsupported_error("coverage_ia_simplified: M must be 1 or 2");
}

double ia_simplified_eval(double alpha, int m_tx, double t) {
    check_ia_simpl_args(alpha, m_tx);
    check_positive_threshold(t);
    const int M = m_tx;
    const double gpref = 1.0 / std::tgamma(static_cast<double>(M));
    std::vector<std::vector<double>> r;
    auto head_integrand = [&](double z) {
        const double u = t - z;
        recip_psi_table(u, z, M, alpha, M - 1, M, r);
        Kahan acc;
        double fact = 1.0, upow = 1.0;
        for (int m = 0; m < M; ++m) {
            if (m > 0) {
                fact *= m;
                upow *= u;
            }
            const double sign = ((m + M) % 2 == 0) ? 1.0 : -1.0;
            acc.add(sign / fact * gpref * upow * r[m][M]);
        }
        return std::pow(z, M - 1) * acc.value();
    };
    const auto head = quad::integrate(head_integrand, 0.0, t, kOuterTol);
    const double sign_m = (M % 2 == 0) ? 1.0 : -1.0;
    auto tail_integrand = [&](double x) {
        const double z = t * std::pow(x, -alpha / 2.0);
        recip_psi_table(0.0, z, M, alpha, 0, M, r);
        const double f = std::pow(z, M - 1) * sign_m * gpref * r[0][M];
        return f * (alpha / 2.0) * z / x;
    };
    const auto tail = quad::integrate(tail_integrand, 0.0, 1.0, kOuterTol);
    return std::clamp(head.value + tail.value, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Theorem 3: selection combining.
// ---------------------------------------------------------------------------

Eval coverage_sc_eval(const hetnet::NetworkConfig& net, double t,
                      const std::vector<double>& per_tier_t) {
    net.validate();
    check_positive_threshold(t);
    if (net.max_m_tx() != 1)
        throw unsupported_error("coverage_sc requires M_k = 1 in every tier");
    const int K = net.tier_count();
    const int N = net.rx_antennas;
    Eval out;
    for (int l = 0; l < K; ++l) {
        const auto& serving = net.tiers[l];
        const double tl = tier_threshold(t, per_tier_t, l);
        std::vector<std::vector<double>> fk(K, std::vector<double>(N + 1, 0.0));
        std::vector<double> coef_pow(K), exp_y(K);
        for (int k = 0; k < K; ++k) {
            const auto& tk = net.tiers[k];
            for (int n = 1; n <= N; ++n)
                fk[k][n] = specfun::hyp2f1(-2.0 / tk.path_loss_exp, n,
                                           1.0 - 2.0 / tk.path_loss_exp, -tl);
            coef_pow[k] = tk.density * std::pow(tk.power / serving.power, 2.0 / tk.path_loss_exp);
            exp_y[k] = 2.0 / (tk.path_loss_exp / serving.path_loss_exp);
        }
        const double noise_coef =
            net.noise_power > 0.0 ? tl * net.noise_power / serving.power : 0.0;
        auto integrand = [&](double y) {
            Kahan acc;
            for (int n = 1; n <= N; ++n) {
                double expo = -noise_coef * n * std::pow(y, serving.path_loss_exp);
                for (int k = 0; k < K; ++k)
                    expo -= kPi * coef_pow[k] * std::pow(y, exp_y[k]) * fk[k][n];
                acc.add((n % 2 == 1 ? 1.0 : -1.0) * binom(N, n) * std::exp(expo));
            }
            return 2.0 * kPi * serving.density * y * acc.value();
        };
        const auto res = quad::integrate_halfline(integrand, density_scale(net), kOuterTol);
        out.value += res.value;
        out.error += res.error;
    }
    out.value = std::clamp(out.value, 0.0, 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Dual-antenna gain functionals over SISO.
// ---------------------------------------------------------------------------

/// dA/da2 of the closed-form A(a1,a2,q) = 1 + Psi(a1,a2,1,q), with the
/// analytic limit branch near a1 = a2.
double psi_closed_p1_d2(double a1, double a2, double q) {
    auto F = [&](double v) { return specfun::hyp2f1(-2.0 / q, 1.0, 1.0 - 2.0 / q, -v); };
    if (std::fabs(a1 - a2) < 1e-6 * std::max({a1, a2, 1.0})) {
        const double mid = 0.5 * (a1 + a2);
        const double fp = hyp_arg_deriv(q, 1.0, mid, 1);
        const double fpp = hyp_arg_deriv(q, 1.0, mid, 2);
        return fp + 0.5 * mid * fpp;
    }
    const double f2 = F(a2);
    const double fp2 = hyp_arg_deriv(q, 1.0, a2, 1);
    const double num = -(f2 + a2 * fp2) * (a1 - a2) + (a1 * F(a1) - a2 * f2);
    return num / ((a1 - a2) * (a1 - a2));
}

}  // namespace

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::IB_MRC: return "IB_MRC";
        case Scheme::IA_MRC: return "IA_MRC";
        case Scheme::SC: return "SC";
        case Scheme::IA_NC: return "IA_NC";
        case Scheme::IA_FC: return "IA_FC";
        case Scheme::SISO: return "SISO";
    }
    return "?";
}

Scheme scheme_by_name(const std::string& name) {
    if (name == "IB_MRC") return Scheme::IB_MRC;
    if (name == "IA_MRC") return Scheme::IA_MRC;
    if (name == "SC") return Scheme::SC;
    if (name == "IA_NC") return Scheme::IA_NC;
    if (name == "IA_FC") return Scheme::IA_FC;
    if (name == "SISO") return Scheme::SISO;
    throw config_error("unknown scheme name: '" + name + "'");
}

void CoverageQuery::validate() const {
    net.validate();
    if (thresholds.empty()) throw config_error("CoverageQuery: empty threshold grid");
    double prev = 0.0;
    for (double t : thresholds) {
        if (!(t > prev))
            throw config_error("CoverageQuery: thresholds must be positive and ascending");
        prev = t;
    }
    if (scheme == Scheme::IA_MRC || scheme == Scheme::IA_NC) check_ia_supported(net);
    if (scheme == Scheme::SC && net.max_m_tx() != 1)
        throw unsupported_error("SC scheme requires M_k = 1 in every tier");
}

double coverage_ib_mrc(const hetnet::NetworkConfig& net, double t,
                       const std::vector<double>& per_tier_t, double* max_term_ratio) {
    const Eval e = coverage_ib_eval(net, t, per_tier_t);
    if (max_term_ratio) *max_term_ratio = e.max_term_ratio;
    return e.value;
}

double coverage_ib_mrc_simplified(double alpha, int n_rx, int s_active, int m_tx, double t) {
    if (alpha <= 2.0) throw config_error("coverage_ib_mrc_simplified: alpha must exceed 2");
    if (n_rx < 1 || m_tx < 1 || s_active < 1)
        throw config_error("coverage_ib_mrc_simplified: antenna counts must be positive");
    check_positive_threshold(t);
    const int nm = n_rx * m_tx;
    const specfun::HyperGeomArgs args{-2.0 / alpha, double(s_active), 1.0 - 2.0 / alpha, -t};
    std::vector<double> f(nm);
    for (int m = 0; m < nm; ++m) f[m] = specfun::hyp2f1_deriv(args, m, t);
    const auto r = reciprocal_derivs(f);
    Kahan acc;
    double fact = 1.0;
    for (int m = 0; m < nm; ++m) {
        if (m > 0) fact *= m;
        acc.add((m % 2 == 0 ? 1.0 : -1.0) / fact * r[m]);
    }
    return std::clamp(acc.value(), 0.0, 1.0);
}

double coverage_ia_mrc(const hetnet::NetworkConfig& net, double t,
                       const std::vector<double>& per_tier_t) {
    return coverage_ia_eval(net, t, per_tier_t, Coupling::Exact).value;
}

double coverage_ia_simplified(double alpha, int m_tx, double t) {
    return ia_simplified_eval(alpha, m_tx, t);
}

double coverage_ia_nocorr(const hetnet::NetworkConfig& net, double t,
                          const std::vector<double>& per_tier_t) {
    return coverage_ia_eval(net, t, per_tier_t, Coupling::NoCorrelation).value;
}

double coverage_ia_fullcorr(const hetnet::NetworkConfig& net, double t,
                            const std::vector<double>& per_tier_t) {
    // Proposition-level equality with IB-MRC; delegation keeps it bitwise.
    return coverage_ib_mrc(net, t, per_tier_t);
}

double coverage_sc(const hetnet::NetworkConfig& net, double t,
                   const std::vector<double>& per_tier_t) {
    return coverage_sc_eval(net, t, per_tier_t).value;
}

double gain_ib(double alpha, double t) {
    if (alpha <= 2.0) throw config_error("gain_ib: alpha must exceed 2");
    check_positive_threshold(t);
    const specfun::HyperGeomArgs args{-2.0 / alpha, 1.0, 1.0 - 2.0 / alpha, -t};
    const double f = specfun::hyp2f1(args);
    return specfun::hyp2f1_deriv(args, 1, t) / (f * f);
}

double gain_ia(double alpha, double t) {
    if (alpha <= 2.0) throw config_error("gain_ia: alpha must exceed 2");
    check_positive_threshold(t);
    // d/dt[A(T-z, tz)]_{t=1} = z * dA/da2, so the 1/z of the gain integrand cancels.
    auto integrand = [&](double z) {
        const double a1 = t - z;
        const double a = specfun::psi_closed_p1(a1, z, alpha);
        return psi_closed_p1_d2(a1, z, alpha) / (a * a);
    };
    return quad::integrate(integrand, 0.0, t, 1e-11).value;
}

double outage_ia_simplified(double alpha, int m_tx, double t) {
    check_ia_simpl_args(alpha, m_tx);
    check_positive_threshold(t);
    const int M = m_tx;
    // Outage = T^{2M} / ((M-1)!)^2 * int_0^1 int_0^{1-zeta} zeta^{M-1} xi^{M-1}
    //          R^{(M,M)}(T xi, T zeta) dxi dzeta; cancellation-free at small T.
    std::vector<std::vector<double>> r;
    auto inner = [&](double zeta) {
        auto f = [&](double xi) {
            recip_psi_table(t * xi, t * zeta, M, alpha, M, M, r);
            return std::pow(xi, M - 1) * r[M][M];
        };
        if (zeta >= 1.0) return 0.0;
        return quad::integrate(f, 0.0, 1.0 - zeta, 1e-9).value * std::pow(zeta, M - 1);
    };
    const double tri = quad::integrate(inner, 0.0, 1.0, 1e-8).value;
    const double fm1 = factorial(M - 1);
    return std::pow(t, 2 * M) * tri / (fm1 * fm1);
}

CoverageCurve evaluate_curve(const CoverageQuery& query) {
    query.validate();
    CoverageCurve curve;
    curve.query = query;
    curve.points.resize(query.thresholds.size());

    // SISO baseline strips the antenna configuration down to one antenna
    // everywhere; the m = 0 term of the blind-combining theorem.
    hetnet::NetworkConfig net = query.net;
    if (query.scheme == Scheme::SISO) {
        net.rx_antennas = 1;
        for (auto& tier : net.tiers) tier.code = hetnet::OstbcCode::siso();
    }

    std::atomic<size_t> next{0};
    std::atomic<double> worst_ratio{0.0};
    auto work = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= query.thresholds.size()) return;
            const double t = query.thresholds[i];
            std::vector<double> per_tier;
            if (query.apply_rate_loss) {
                for (const auto& tier : net.tiers)
                    per_tier.push_back(hetnet::rate_adjusted_threshold(t, tier.code));
            }
            Eval e;
            switch (query.scheme) {
                case Scheme::SISO:
                case Scheme::IB_MRC:
                case Scheme::IA_FC:
                    e = coverage_ib_eval(net, t, per_tier);
                    break;
                case Scheme::IA_MRC:
                    e = coverage_ia_eval(net, t, per_tier, Coupling::Exact);
                    break;
                case Scheme::IA_NC:
                    e = coverage_ia_eval(net, t, per_tier, Coupling::NoCorrelation);
                    break;
                case Scheme::SC:
                    e = coverage_sc_eval(net, t, per_tier);
                    break;
            }
            curve.points[i] = {t, e.value, e.error};
            double seen = worst_ratio.load();
            while (seen < e.max_term_ratio &&
                   !worst_ratio.compare_exchange_weak(seen, e.max_term_ratio)) {}
        }
    };
    const bool heavy = query.scheme == Scheme::IA_MRC || query.scheme == Scheme::IA_NC;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads =
        heavy && query.thresholds.size() > 2
            ? std::min<unsigned>(hw, static_cast<unsigned>(query.thresholds.size()))
            : 1;
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    curve.max_term_ratio = worst_ratio.load();
    return curve;
}

}  // namespace hetcov::analytic
