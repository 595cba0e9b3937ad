#include "hetcov/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "hetcov/errors.hpp"

namespace hetcov::quad {
namespace {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK dqk15).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Segment {
    double lo, hi, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk15(const std::function<double(double)>& f, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(mid);
    double kron = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        kron += kWgk[i] * fsum;
        if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
    }
    kron *= half;
    gauss *= half;
    const double diff = std::fabs(kron - gauss);
    // QUADPACK-style sharpened error estimate.
    double err = diff;
    if (diff > 0.0) err = diff * std::min(1.0, std::pow(200.0 * diff / std::max(std::fabs(kron), 1e-300), 1.5));
    return {lo, hi, kron, std::max(err, std::fabs(kron) * 5e-16)};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol, int max_segments) {
    Result out;
    if (lo == hi) return out;
    std::priority_queue<Segment> segs;
    Segment first = gk15(f, lo, hi);
    out.evaluations = 15;
    double total = first.value;
    double total_err = first.error;
    segs.push(first);
    int n = 1;
    while (total_err > abs_tol && n < max_segments) {
        Segment worst = segs.top();
        if (worst.error <= std::fabs(total) * 1e-15) break;  // roundoff floor
        segs.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) {  // interval exhausted
            segs.push({worst.lo, worst.hi, worst.value, 0.0});
            continue;
        }
        Segment a = gk15(f, worst.lo, mid);
        Segment b = gk15(f, mid, worst.hi);
        out.evaluations += 30;
        total += a.value + b.value - worst.value;
        total_err += a.error + b.error - worst.error;
        segs.push(a);
        segs.push(b);
        ++n;
    }
    if (total_err > abs_tol && total_err > std::fabs(total) * 1e-10) {
        std::ostringstream msg;
        msg << "quadrature failed to converge on [" << lo << ", " << hi
            << "]: error " << total_err << " > tol " << abs_tol
            << " after " << n << " segments";
        throw numerical_error(msg.str());
    }
    out.value = total;
    out.error = total_err;
    return out;
}

Result integrate_halfline(const std::function<double(double)>& f, double scale_hint,
                          double abs_tol, double cutoff_rel) {
    if (scale_hint <= 0.0 || !std::isfinite(scale_hint))
        throw numerical_error("integrate_halfline: bad scale hint");
    // Probe a geometric grid to find the peak of |f|.
    double peak = 0.0;
    double y_peak = scale_hint;
    for (int k = -24; k <= 40; ++k) {
        const double y = scale_hint * std::pow(2.0, 0.5 * k);
        const double v = std::fabs(f(y));
        if (v > peak) {
            peak = v;
            y_peak = y;
        }
    }
    if (peak == 0.0) return {};
    // Expand right until the integrand is negligible.
    double hi = y_peak;
    for (int k = 0; k < 200 && std::fabs(f(hi)) > cutoff_rel * peak; ++k) hi *= 1.5;
    return integrate(f, 0.0, hi, abs_tol);
}

}  // namespace hetcov::quad
