// SPDX-License-Identifier: Apache-2.0
#ifndef EFFCAP_QUADRATURE_HPP
#define EFFCAP_QUADRATURE_HPP

#include <functional>

namespace effcap::quad {

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    long evals = 0;
    bool converged = false;
};

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_intervals = 4000;
};

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod (G7,K15) on a finite interval.
Result integrate(const Integrand& f, double a, double b, const Options& opt = {});

// Same, but throws effcap::numerical_error when the tolerance is not met.
double integrate_or_throw(const Integrand& f, double a, double b, const Options& opt = {},
                          const char* what = "integrate");

// Semi-infinite tail [a, inf): successive panels of doubling width, each
// integrated adaptively, until two consecutive panels are negligible
// against the accumulated value.
Result integrate_tail(const Integrand& f, double a, double first_width, const Options& opt = {});

}  // namespace effcap::quad

#endif
