// SPDX-License-Identifier: Apache-2.0
#ifndef EFFCAP_SPECFUN_HPP
#define EFFCAP_SPECFUN_HPP

#include <vector>

namespace effcap::specfun {

/// ln Gamma(x) for x > 0. Relative error a few ulp (glibc lgamma_r).
double ln_gamma(double x);

/// ln |Gamma(x)| with the sign of Gamma(x) in `sign`; valid for any non-pole x.
double ln_gamma_signed(double x, int& sign);

/// Modified Bessel I_nu(z) for nu >= -0.5, z >= 0.
/// `scaled` returns e^{-z} I_nu(z), finite for arbitrarily large z.
double bessel_i(double nu, double z, bool scaled = false);

/// ln(e^{-z} I_nu(z)), evaluated without intermediate under/overflow.
/// Preferred form for log-space density assembly. z > 0 required.
double bessel_i_ln_scaled(double nu, double z);

/// Tricomi confluent hypergeometric U(a; b; x) for a > 0, x > 0.
///
/// x >= 1: adaptive quadrature of the integral representation
///   U = x^{-a}/Gamma(a) * Int_0^inf e^{-s} s^{a-1} (1+s/x)^{b-a-1} ds.
/// x < 1: Kummer connection formula in extended precision; b within 1e-6
/// of an integer is evaluated at b +/- 1e-6 and averaged (the pole terms of
/// the two Gamma factors cancel to second order).
double tricomi_u(double a, double b, double x);

struct QuadratureRule {
    int order = 0;
    std::vector<double> nodes;    // ascending, all > 0
    std::vector<double> weights;  // all > 0, sum to 1
};

/// Gauss-Laguerre rule for Int_0^inf e^{-x} g(x) dx, 1 <= n <= 256.
/// Newton iteration on the Laguerre recurrence in long double.
QuadratureRule gauss_laguerre(int n);

}  // namespace effcap::specfun

#endif
