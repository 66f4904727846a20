#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "effcap/mixfit.hpp"

namespace effcap::capacity {

// Delay-QoS configuration; A = theta*T*B/ln2 is the exponent that enters the
// effective-capacity moment E[(1+g)^{-A}].
struct QoSConfig {
    double theta = 0.0;  // delay exponent, 1/bit
    double T = 1.0;      // block duration, s
    double B = 1.0;      // bandwidth, Hz
    double A = 0.0;
};

QoSConfig a_from_qos(double theta, double T, double B);

enum class Method { mg, mog, numeric_exact, monte_carlo };

struct ECEstimate {
    double value = 0.0;  // bits/s/Hz
    Method method = Method::numeric_exact;
    std::optional<double> std_error;  // monte_carlo only
};

// Closed form for a gamma mixture: R = -(1/A) log2(sum phi_l Gamma(vartheta_l)
// U(vartheta_l; vartheta_l+1-A; xi_l)).
ECEstimate ec_mg(const mixfit::MGModel& model, double A);

// Gaussian-mixture path: per-component quadrature of the substituted moment
// integral over t = sqrt(g/gamma_bar) >= 0.
ECEstimate ec_mog(const mixfit::MoGModel& model, double A);

// Direct quadrature of R = -(1/A) log2(Int (1+g)^{-A} pdf dg) against any
// density; the exact-channel oracle. Rejects densities whose integral is not
// 1 within 1e-4.
ECEstimate ec_numeric(const std::function<double(double)>& pdf, double A);

// Sample-mean estimator with a delta-method standard error.
ECEstimate ec_monte_carlo(const std::vector<double>& snr_samples, double A);

// E[log2(1+g)], the theta -> 0 limit of the effective capacity.
double ergodic_capacity(const std::function<double(double)>& pdf);
double ergodic_capacity(const std::vector<double>& snr_samples);

}  // namespace effcap::capacity
