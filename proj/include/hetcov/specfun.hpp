#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace hetcov::specfun {

/// Arguments of the Gauss hypergeometric function 2F1(a,b;c;x) for the
/// parameter family used throughout the coverage formulas: a = -2/alpha
/// (possibly shifted by a nonnegative integer), b a positive count,
/// c = a + 1, and x <= 0.
struct HyperGeomArgs {
    double a;
    double b;
    double c;
    double x;
};

/// 2F1(a,b;c;x) for x <= 0. Relative accuracy target 1e-12 for |x| <= 1e4.
double hyp2f1(const HyperGeomArgs& args);
double hyp2f1(double a, double b, double c, double x);

/// 2F1(a,b;c;x) - 1, computed without the leading-term cancellation; exact
/// for small |x| where the function is 1 + O(x).
double hyp2f1m1(double a, double b, double c, double x);

/// Closed-form m-th derivative d^m/ds^m 2F1(a, b; c; -s*scale) at s = 1 for
/// the family c = a + 1:
///   (-scale)^m * a*Gamma(b+m) / ((m+a)*Gamma(b)) * 2F1(a+m, b+m; c+m; -scale).
/// m = 0 falls through to hyp2f1 on the same code path.
double hyp2f1_deriv(const HyperGeomArgs& args, int m, double scale);

/// Erlang(shape, rate 1) complementary CDF: exp(-theta) * sum θ^j/j!.
double erlang_ccdf(int shape, double theta);

/// Raw moment E[X^p] of Erlang(shape, 1): Gamma(shape+p)/Gamma(shape),
/// valid for p > -shape.
double erlang_moment(int shape, double p);

/// The joint-interference integral
///   Psi(a1,a2,p,q) = int_1^inf 1 - [(1+a1 u^{-q/2})(1+a2 u^{-q/2})]^{-p} du
/// for a1,a2 >= 0, integer p >= 1, q > 2.
double psi_integral(double a1, double a2, int p, double q);

/// Partial derivative d^{i+j} Psi / d a1^i d a2^j, evaluated exactly as a
/// one-dimensional integral (no numerical differentiation). (i,j) = (0,0)
/// returns psi_integral itself.
double psi_deriv(double a1, double a2, int p, double q, int i, int j);

/// Closed form of 1 + Psi(a1,a2,1,q):
///   [a1 F(a1) - a2 F(a2)] / (a1 - a2),  F(a) = 2F1(-2/q,1;1-2/q;-a),
/// with the analytic limit branch when a1 and a2 nearly coincide.
double psi_closed_p1(double a1, double a2, double q);

/// Plan for differentiating a smooth function at s = 1 from samples on
/// Chebyshev nodes of an interval containing 1.
struct ChebyshevDiffPlan {
    int order;                        // highest derivative produced
    int node_count;                   // >= order + 1
    std::pair<double, double> interval;
    std::vector<double> nodes;        // strictly increasing
};

/// Default plan: interval [0.5, 1.5], node_count = max(16, 4*order).
ChebyshevDiffPlan make_cheb_plan(int order);
ChebyshevDiffPlan make_cheb_plan(int order, int node_count, double lo, double hi);

/// Returns [f(1), f'(1), ..., f^(order)(1)] by interpolating f on the
/// plan's Chebyshev nodes and differentiating the interpolant analytically.
/// Exact (up to rounding) for polynomials of degree < node_count.
std::vector<double> cheb_derivatives(const std::function<double(double)>& f,
                                     const ChebyshevDiffPlan& plan);

/// Tensor-product version: D[i][j] = d^{i+j} f / ds^i dt^j at (1,1) for
/// i <= plan_s.order, j <= plan_t.order.
std::vector<std::vector<double>> mixed_cheb_derivatives(
    const std::function<double(double, double)>& f,
    const ChebyshevDiffPlan& plan_s, const ChebyshevDiffPlan& plan_t);

}  // namespace hetcov::specfun
