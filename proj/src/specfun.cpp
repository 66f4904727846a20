// SPDX-License-Identifier: Apache-2.0
#include "effcap/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "effcap/error.hpp"
#include "effcap/quadrature.hpp"

namespace effcap::specfun {
namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void domain_fail(const std::string& msg) { throw std::domain_error(msg); }

long double ln_gamma_signed_l(long double x, int& sign) {
    return ::lgammal_r(x, &sign);
}

// ---------------------------------------------------------------------------
// Modified Bessel I

// Ascending series summed outward from its largest term, entirely in log
// space, so the scaled value survives z far beyond the overflow threshold
// of I_nu itself. All terms are positive: no cancellation.
double bessel_series_ln_scaled(double nu, double z) {
    const double lh = std::log(0.5 * z);
    // argmax_k of (2k+nu)ln(z/2) - lnGamma(k+1) - lnGamma(nu+k+1); the
    // continuous solution is k ~ (-nu + sqrt(nu^2 + z^2)) / 2.
    long k0 = std::lround(std::max(0.0, 0.5 * (-nu + std::sqrt(nu * nu + z * z))));
    auto ln_term = [&](long k) {
        return (2.0 * k + nu) * lh - std::lgamma(double(k) + 1.0) - std::lgamma(nu + k + 1.0);
    };
    const double lt0 = ln_term(k0);

    const double q = 0.25 * z * z;
    double sum = 1.0;  // relative to term k0
    double t = 1.0;
    for (long k = k0;; ++k) {  // upward
        t *= q / (double(k + 1) * (nu + k + 1));
        sum += t;
        if (t < 1e-18 * sum) break;
    }
    t = 1.0;
    for (long k = k0; k > 0; --k) {  // downward
        t *= (double(k) * (nu + k)) / q;
        sum += t;
        if (t < 1e-18 * sum) break;
    }
    return lt0 + std::log(sum) - z;
}

// Hankel asymptotic expansion of e^{-z} I_nu(z); valid once the terms fall
// fast. Returns false if 1e-13 relative accuracy is not reached.
bool bessel_asymptotic_ln_scaled(double nu, double z, double& out) {
    const double mu4 = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (int k = 1; k <= 30; ++k) {
        term *= (mu4 - double(2 * k - 1) * double(2 * k - 1)) / (8.0 * k * z);
        term = -term;
        if (std::fabs(term) >= prev) return false;  // diverging tail
        sum += term;
        prev = std::fabs(term);
        if (std::fabs(term) < 1e-15 * std::fabs(sum)) {
            out = std::log(sum) - 0.5 * std::log(2.0 * kPi * z);
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Tricomi U

// Integral representation, x >= 1:
//   U = exp(-a ln x - lnGamma(a)) * J,  J = Int_0^inf e^{-s} s^{a-1} (1+s/x)^{b-a-1} ds.
// The integrand is positive, so J carries no cancellation.
double tricomi_integral(double a, double b, double x) {
    const double p = b - a - 1.0;
    quad::Options opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 0.0;

    double head;
    double cut;
    if (a < 1.0) {
        // s = tau^{1/a} regularizes the s^{a-1} endpoint.
        cut = 1.0;
        auto g = [&](double tau) {
            if (tau <= 0.0) return 1.0 / a;
            const double s = std::pow(tau, 1.0 / a);
            return std::exp(-s) * std::pow(1.0 + s / x, p) / a;
        };
        head = quad::integrate_or_throw(g, 0.0, 1.0, opt, "tricomi_u head");
    } else {
        cut = a + 1.0;
        auto g = [&](double s) {
            if (s <= 0.0) return a == 1.0 ? 1.0 : 0.0;
            return std::exp((a - 1.0) * std::log(s) - s + p * std::log1p(s / x));
        };
        head = quad::integrate_or_throw(g, 0.0, cut, opt, "tricomi_u head");
    }

    auto g = [&](double s) {
        return std::exp((a - 1.0) * std::log(s) - s + p * std::log1p(s / x));
    };
    quad::Result tail = quad::integrate_tail(g, cut, std::max(2.0, 0.5 * a), opt);
    if (!tail.converged) throw numerical_error("tricomi_u: tail quadrature failed");

    const double j = head + tail.value;
    return std::exp(std::log(j) - a * std::log(x) - std::lgamma(a));
}

// Kummer M(a;b;x) by its ascending series, long double. For x < 1 the series
// converges in a few dozen terms; terms may alternate in sign when b has
// passed through negative values, hence the two-consecutive-small stop.
long double kummer_m(long double a, long double b, long double x) {
    long double sum = 1.0L;
    long double term = 1.0L;
    int quiet = 0;
    for (int k = 0; k < 500; ++k) {
        term *= (a + k) / (b + k) * x / (k + 1);
        sum += term;
        if (std::fabs((double)term) < 1e-19 * std::fabs((double)sum)) {
            if (++quiet >= 2) return sum;
        } else {
            quiet = 0;
        }
    }
    return sum;
}

// U via the connection formula
//   U = Gamma(1-b)/Gamma(a+1-b) M(a,b,x) + Gamma(b-1)/Gamma(a) x^{1-b} M(a-b+1,2-b,x),
// long double throughout; b must not be an integer here.
long double tricomi_kummer_raw(long double a, long double b, long double x) {
    int s1n, s1d, s2n, s2d;
    const long double ln1n = ln_gamma_signed_l(1.0L - b, s1n);
    const long double ln1d = ln_gamma_signed_l(a + 1.0L - b, s1d);
    const long double ln2n = ln_gamma_signed_l(b - 1.0L, s2n);
    const long double ln2d = ln_gamma_signed_l(a, s2d);

    long double t1 = 0.0L;
    if (std::isfinite((double)ln1d)) {  // pole in the denominator kills the term
        t1 = s1n * s1d * std::exp(ln1n - ln1d) * kummer_m(a, b, x);
    }
    long double t2 = s2n * s2d *
                     std::exp(ln2n - ln2d + (1.0L - b) * std::log(x)) *
                     kummer_m(a - b + 1.0L, 2.0L - b, x);
    return t1 + t2;
}

double tricomi_kummer(double a, double b, double x) {
    const double bn = std::round(b);
    const double delta = b - bn;
    if (std::fabs(delta) < 1e-6) {
        // Integer b: logarithmic case. Evaluate at b +/- eps and average;
        // the 1/eps pole parts cancel, leaving an O(eps^2) bias, and the
        // long double arithmetic keeps the cancellation error ~1e-13.
        const long double eps = 1e-6L;
        const long double up = tricomi_kummer_raw(a, (long double)bn + eps, x);
        const long double dn = tricomi_kummer_raw(a, (long double)bn - eps, x);
        return (double)(0.5L * (up + dn));
    }
    return (double)tricomi_kummer_raw(a, b, x);
}

// ---------------------------------------------------------------------------
// Gauss-Laguerre

// L_n(x) and L_{n+1}(x) by the three-term recurrence.
void laguerre_pair(int n, long double x, long double& ln, long double& lnp1) {
    long double p0 = 1.0L;
    long double p1 = 1.0L - x;
    for (int k = 1; k <= n; ++k) {
        const long double p2 = ((2 * k + 1 - x) * p1 - k * p0) / (k + 1);
        p0 = p1;
        p1 = p2;
    }
    ln = p0;
    lnp1 = p1;
}

}  // namespace

double ln_gamma(double x) {
    if (!(x > 0.0)) domain_fail("ln_gamma: requires x > 0");
    int sign;
    return ::lgamma_r(x, &sign);
}

double ln_gamma_signed(double x, int& sign) { return ::lgamma_r(x, &sign); }

double bessel_i_ln_scaled(double nu, double z) {
    if (nu < -0.5) domain_fail("bessel_i: requires nu >= -0.5");
    if (!(z > 0.0)) domain_fail("bessel_i_ln_scaled: requires z > 0");
    if (z >= std::max(35.0, 2.0 * nu * nu + 20.0)) {
        double out;
        if (bessel_asymptotic_ln_scaled(nu, z, out)) return out;
    }
    return bessel_series_ln_scaled(nu, z);
}

double bessel_i(double nu, double z, bool scaled) {
    if (nu < -0.5) domain_fail("bessel_i: requires nu >= -0.5");
    if (z < 0.0) domain_fail("bessel_i: requires z >= 0");
    if (z == 0.0) {
        if (nu == 0.0) return 1.0;
        return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    const double ln_scaled = bessel_i_ln_scaled(nu, z);
    return std::exp(scaled ? ln_scaled : ln_scaled + z);
}

double tricomi_u(double a, double b, double x) {
    if (!(a > 0.0)) domain_fail("tricomi_u: requires a > 0");
    if (!(x > 0.0)) domain_fail("tricomi_u: requires x > 0");
    const double u = (x >= 1.0) ? tricomi_integral(a, b, x) : tricomi_kummer(a, b, x);
    if (!std::isfinite(u)) {
        throw numerical_error("tricomi_u(" + std::to_string(a) + "," + std::to_string(b) + "," +
                              std::to_string(x) + ") is not finite");
    }
    return u;
}

QuadratureRule gauss_laguerre(int n) {
    if (n < 1 || n > 256) {
        throw std::invalid_argument("gauss_laguerre: order must be in [1, 256]");
    }
    QuadratureRule rule;
    rule.order = n;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    long double z = 0.0L, z2 = 0.0L, z3 = 0.0L;
    for (int i = 1; i <= n; ++i) {
        // Stroud-Secrest style initial guesses (alpha = 0).
        if (i == 1) {
            z = 3.0L / (1.0L + 2.4L * n);
        } else if (i == 2) {
            z3 = z;
            z += 15.0L / (1.0L + 2.5L * n);
        } else {
            const long double ai = i - 2;
            z2 = z3;
            z3 = z;
            z += (1.0L + 2.55L * ai) / (1.9L * ai) * (z3 - z2);
        }
        long double ln = 0.0L, lnp1 = 0.0L;
        for (int it = 0; it < 100; ++it) {
            laguerre_pair(n, z, ln, lnp1);
            // L_n'(x) = n (L_n(x) - L_{n-1}(x)) / x via L_{n+1} recurrence:
            const long double deriv = ((n + 1) * lnp1 - (n + 1 - z) * ln) / z;
            const long double step = ln / deriv;
            z -= step;
            if (std::fabs((double)step) <= 1e-14 * std::fabs((double)z)) break;
        }
        laguerre_pair(n, z, ln, lnp1);
        rule.nodes[i - 1] = (double)z;
        // Christoffel weight: x_i / ((n+1)^2 L_{n+1}(x_i)^2), long double to
        // survive the e^{x} growth of L_{n+1} at the largest nodes.
        const long double np1 = n + 1;
        rule.weights[i - 1] = (double)(z / (np1 * np1 * lnp1 * lnp1));
    }
    return rule;
}

}  // namespace effcap::specfun
