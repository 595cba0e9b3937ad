#include "hetcov/specfun.hpp"

#include <cmath>
#include <sstream>

#include "hetcov/errors.hpp"
#include "hetcov/quadrature.hpp"

namespace hetcov::specfun {
namespace {

constexpr int kMaxSeriesTerms = 2'000'000;

bool is_nonpositive_integer(double v) {
    return v <= 0.0 && std::fabs(v - std::round(v)) < 1e-12;
}

[[noreturn]] void fail(const char* where, double a, double b, double c, double x,
                       const char* why) {
    std::ostringstream msg;
    msg << where << "(a=" << a << ", b=" << b << ", c=" << c << ", x=" << x
        << "): " << why;
    throw numerical_error(msg.str());
}

/// Gauss series sum_{n>=0} (a)_n (b)_n / ((c)_n n!) x^n minus the leading 1.
/// Converges for |x| < 1; used here with x in (-0.5, 0] (direct branch) or
/// x in (0,1) after the Pfaff map, where all terms are positive.
double gauss_series_m1(double a, double b, double c, double x) {
    double term = 1.0;
    double sum = 0.0;
    for (int n = 0; n < kMaxSeriesTerms; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        sum += term;
        if (std::fabs(term) <= 1e-17 * (std::fabs(sum) + 1.0)) return sum;
    }
    fail("hyp2f1", a, b, c, x, "series did not converge within iteration budget");
}

/// Large-|x| branch for the family c = a + 1 via the x -> 1/x connection
/// formula. The first series terminates (its b-parameter a-c+1 vanishes),
/// leaving a Gamma prefactor plus a rapidly converging series in 1/x.
double hyp2f1_large_negative(double a, double b, double c, double x) {
    const double t1 = std::tgamma(c) * std::tgamma(b - a) /
                      (std::tgamma(b) * std::tgamma(c - a)) * std::pow(-x, -a);
    const double coef = std::tgamma(c) * std::tgamma(a - b) /
                        (std::tgamma(a) * std::tgamma(c - b)) * std::pow(-x, -b);
    const double inner = 1.0 + gauss_series_m1(b, b - c + 1.0, b - a + 1.0, 1.0 / x);
    return t1 + coef * inner;
}

double hyp2f1_impl(double a, double b, double c, double x) {
    if (x > 0.0) fail("hyp2f1", a, b, c, x, "positive argument not supported");
    if (is_nonpositive_integer(c)) fail("hyp2f1", a, b, c, x, "c is a non-positive integer");
    if (x == 0.0 || a == 0.0 || b == 0.0) return 1.0;
    if (x > -0.5) return 1.0 + gauss_series_m1(a, b, c, x);
    if (x < -32.0 && std::fabs(c - a - 1.0) < 1e-10 && a != 0.0)
        return hyp2f1_large_negative(a, b, c, x);
    // Pfaff: 2F1(a,b;c;x) = (1-x)^{-b} 2F1(c-a, b; c; x/(x-1)); the mapped
    // argument lies in (0,1) and every series term is positive.
    const double z = x / (x - 1.0);
    return std::pow(1.0 - x, -b) * (1.0 + gauss_series_m1(c - a, b, c, z));
}

double rising_factorial(double v, int m) {
    double r = 1.0;
    for (int j = 0; j < m; ++j) r *= v + j;
    return r;
}

/// Maps [1,inf) to t in [0,1) via u = (1-t)^{-2/(q-2)}, which keeps the
/// transformed integrand bounded: u^{-q/2} = (1-t)^{q/(q-2)} and
/// du = 2/(q-2) (1-t)^{-q/(q-2)} dt.
struct PsiTransform {
    double q;
    double jac_exp;   // q/(q-2)
    double jac_coef;  // 2/(q-2)
    explicit PsiTransform(double q_) : q(q_), jac_exp(q_ / (q_ - 2.0)), jac_coef(2.0 / (q_ - 2.0)) {}
    double w(double t) const { return std::pow(1.0 - t, jac_exp); }          // u^{-q/2}
    double du(double t) const { return jac_coef * std::pow(1.0 - t, -jac_exp); }
};

void check_psi_args(const char* where, double a1, double a2, int p, double q) {
    if (q <= 2.0) {
        std::ostringstream msg;
        msg << where << ": q = " << q << " <= 2, integral diverges";
        throw config_error(msg.str());
    }
    if (a1 < 0.0 || a2 < 0.0 || p < 1) {
        std::ostringstream msg;
        msg << where << "(a1=" << a1 << ", a2=" << a2 << ", p=" << p << ", q=" << q
            << "): arguments outside domain";
        throw config_error(msg.str());
    }
}

/// Chebyshev coefficients of the degree n-1 interpolant of f on first-kind
/// points of [lo,hi]; f(x) = coef[0] + sum_j coef[j] T_j(xi(x)).
std::vector<double> cheb_coefficients(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size());
    std::vector<double> coef(n, 0.0);
    const double pi_n = 3.14159265358979323846 / n;
    for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            acc += values[i] * std::cos(j * (i + 0.5) * pi_n);
        coef[j] = 2.0 * acc / n;
    }
    coef[0] *= 0.5;
    return coef;
}

/// Coefficients of the derivative series, including the interval scaling.
std::vector<double> cheb_differentiate(const std::vector<double>& coef, double half_width) {
    const int n = static_cast<int>(coef.size());
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    for (int j = n - 1; j >= 1; --j) {
        d[j - 1] = (j + 1 < n ? d[j + 1] : 0.0) + 2.0 * j * coef[j];
    }
    d[0] *= 0.5;
    for (auto& v : d) v /= half_width;
    d.pop_back();
    return d;
}

double cheb_eval(const std::vector<double>& coef, double xi) {
    double b1 = 0.0, b2 = 0.0;
    for (int j = static_cast<int>(coef.size()) - 1; j >= 1; --j) {
        const double b0 = 2.0 * xi * b1 - b2 + coef[j];
        b2 = b1;
        b1 = b0;
    }
    return xi * b1 - b2 + coef[0];
}

void check_plan(const ChebyshevDiffPlan& plan) {
    const auto [lo, hi] = plan.interval;
    if (plan.order < 0 || plan.node_count < plan.order + 1 ||
        !(lo < 1.0 && 1.0 < hi) ||
        static_cast<int>(plan.nodes.size()) != plan.node_count)
        throw config_error("invalid ChebyshevDiffPlan");
}

}  // namespace

double hyp2f1(const HyperGeomArgs& args) { return hyp2f1_impl(args.a, args.b, args.c, args.x); }

double hyp2f1(double a, double b, double c, double x) { return hyp2f1_impl(a, b, c, x); }

double hyp2f1m1(double a, double b, double c, double x) {
    if (x > 0.0) fail("hyp2f1m1", a, b, c, x, "positive argument not supported");
    if (is_nonpositive_integer(c)) fail("hyp2f1m1", a, b, c, x, "c is a non-positive integer");
    if (x == 0.0 || a == 0.0 || b == 0.0) return 0.0;
    if (x > -0.5) return gauss_series_m1(a, b, c, x);
    return hyp2f1_impl(a, b, c, x) - 1.0;
}

double hyp2f1_deriv(const HyperGeomArgs& args, int m, double scale) {
    if (m < 0) throw config_error("hyp2f1_deriv: negative order");
    if (m == 0) return hyp2f1(args);
    const double a = args.a, b = args.b, c = args.c;
    const double prefactor = std::pow(-scale, m) * a * rising_factorial(b, m) / (m + a);
    return prefactor * hyp2f1_impl(a + m, b + m, c + m, -scale);
}

double erlang_ccdf(int shape, double theta) {
    if (shape < 1 || theta < 0.0) throw config_error("erlang_ccdf: invalid arguments");
    double term = std::exp(-theta);
    double sum = term;
    for (int j = 1; j < shape; ++j) {
        term *= theta / j;
        sum += term;
    }
    return sum < 1.0 ? sum : 1.0;
}

double erlang_moment(int shape, double p) {
    if (shape < 1) throw config_error("erlang_moment: shape must be positive");
    if (p <= -static_cast<double>(shape))
        throw config_error("erlang_moment: p <= -shape, moment diverges");
    const double p_round = std::round(p);
    if (p >= 0.0 && std::fabs(p - p_round) < 1e-12)
        return rising_factorial(shape, static_cast<int>(p_round));
    return std::exp(std::lgamma(shape + p) - std::lgamma(static_cast<double>(shape)));
}

double psi_integral(double a1, double a2, int p, double q) {
    check_psi_args("psi_integral", a1, a2, p, q);
    if (a1 == 0.0 && a2 == 0.0) return 0.0;
    const PsiTransform tr(q);
    auto integrand = [&](double t) {
        const double w = tr.w(t);
        // 1 - [(1+a1 w)(1+a2 w)]^{-p} without cancellation near w -> 0.
        const double lg = std::log1p(a1 * w) + std::log1p(a2 * w);
        return -std::expm1(-p * lg) * tr.du(t);
    };
    return quad::integrate(integrand, 0.0, 1.0, 1e-12).value;
}

double psi_deriv(double a1, double a2, int p, double q, int i, int j) {
    check_psi_args("psi_deriv", a1, a2, p, q);
    if (i < 0 || j < 0) throw config_error("psi_deriv: negative derivative order");
    if (i == 0 && j == 0) return psi_integral(a1, a2, p, q);
    const double sign = -((i + j) % 2 == 0 ? 1.0 : -1.0);
    const double coef = sign * rising_factorial(p, i) * rising_factorial(p, j);
    const PsiTransform tr(q);
    auto integrand = [&](double t) {
        const double w = tr.w(t);
        const double lg = (p + i) * std::log1p(a1 * w) + (p + j) * std::log1p(a2 * w);
        return std::pow(w, i + j) * std::exp(-lg) * tr.du(t);
    };
    return coef * quad::integrate(integrand, 0.0, 1.0, 1e-12).value;
}

double psi_closed_p1(double a1, double a2, double q) {
    check_psi_args("psi_closed_p1", a1, a2, 1, q);
    const double a = -2.0 / q;
    const double c = 1.0 - 2.0 / q;
    auto F = [&](double v) { return hyp2f1_impl(a, 1.0, c, -v); };
    if (std::fabs(a1 - a2) < 1e-6 * std::max({a1, a2, 1.0})) {
        // Limit branch: d/dx [x F(x)] at the midpoint, F'(x) = -a/c * 2F1(a+1,2;c+1;-x).
        const double mid = 0.5 * (a1 + a2);
        const double fp = -a / c * hyp2f1_impl(a + 1.0, 2.0, c + 1.0, -mid);
        return F(mid) + mid * fp;
    }
    return (a1 * F(a1) - a2 * F(a2)) / (a1 - a2);
}

ChebyshevDiffPlan make_cheb_plan(int order) {
    return make_cheb_plan(order, std::max(16, 4 * order), 0.5, 1.5);
}

ChebyshevDiffPlan make_cheb_plan(int order, int node_count, double lo, double hi) {
    if (order < 0 || node_count < order + 1 || !(lo < 1.0 && 1.0 < hi))
        throw config_error("make_cheb_plan: invalid plan parameters");
    ChebyshevDiffPlan plan{order, node_count, {lo, hi}, {}};
    plan.nodes.resize(node_count);
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double pi_n = 3.14159265358979323846 / node_count;
    for (int i = 0; i < node_count; ++i) {
        // cos over (i+1/2)pi/n decreases with i; store increasing.
        plan.nodes[i] = mid + half * std::cos((node_count - 1 - i + 0.5) * pi_n);
    }
    return plan;
}

std::vector<double> cheb_derivatives(const std::function<double(double)>& f,
                                     const ChebyshevDiffPlan& plan) {
    check_plan(plan);
    const auto [lo, hi] = plan.interval;
    const double half = 0.5 * (hi - lo);
    const int n = plan.node_count;
    std::vector<double> values(n);
    for (int i = 0; i < n; ++i) values[i] = f(plan.nodes[n - 1 - i]);  // decreasing xi order
    std::vector<double> coef = cheb_coefficients(values);
    const double xi1 = (2.0 - lo - hi) / (hi - lo);  // image of s = 1
    std::vector<double> out;
    out.reserve(plan.order + 1);
    out.push_back(cheb_eval(coef, xi1));
    for (int m = 1; m <= plan.order; ++m) {
        coef = cheb_differentiate(coef, half);
        out.push_back(coef.empty() ? 0.0 : cheb_eval(coef, xi1));
    }
    return out;
}

std::vector<std::vector<double>> mixed_cheb_derivatives(
    const std::function<double(double, double)>& f,
    const ChebyshevDiffPlan& plan_s, const ChebyshevDiffPlan& plan_t) {
    check_plan(plan_s);
    check_plan(plan_t);
    const int nt = plan_t.node_count;
    // For every t-node, differentiate in s; then differentiate each s-order
    // row across the t-nodes.
    std::vector<std::vector<double>> s_derivs(nt);
    for (int jt = 0; jt < nt; ++jt) {
        const double t = plan_t.nodes[jt];
        s_derivs[jt] = cheb_derivatives([&](double s) { return f(s, t); }, plan_s);
    }
    std::vector<std::vector<double>> out(plan_s.order + 1,
                                         std::vector<double>(plan_t.order + 1, 0.0));
    for (int i = 0; i <= plan_s.order; ++i) {
        auto row = cheb_derivatives(
            [&](double t) {
                // t is one of plan_t's nodes up to rounding; reuse the samples.
                int best = 0;
                double dist = std::fabs(plan_t.nodes[0] - t);
                for (int jt = 1; jt < nt; ++jt) {
                    const double d = std::fabs(plan_t.nodes[jt] - t);
                    if (d < dist) {
                        dist = d;
                        best = jt;
                    }
                }
                return s_derivs[best][i];
            },
            plan_t);
        out[i] = std::move(row);
    }
    return out;
}

}  // namespace hetcov::specfun
