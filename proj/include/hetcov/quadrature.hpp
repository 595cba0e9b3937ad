#pragma once

#include <functional>

namespace hetcov::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    long evaluations = 0;
};

/// Adaptive Gauss-Kronrod 15(7) on a finite interval to the requested
/// absolute tolerance. Throws hetcov::numerical_error when the segment
/// budget is exhausted before the tolerance is met.
Result integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol, int max_segments = 4000);

/// Integrates f over [0, inf) where f is a unimodal-ish density-like
/// integrand that vanishes at both ends (e.g. y * exp(-Q(y))). The tail is
/// truncated where |f| drops below cutoff_rel of the observed peak.
/// `scale_hint` sets the initial probe scale.
Result integrate_halfline(const std::function<double(double)>& f, double scale_hint,
                          double abs_tol, double cutoff_rel = 1e-16);

}  // namespace hetcov::quad
