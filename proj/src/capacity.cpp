#include "effcap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "effcap/error.hpp"
#include "effcap/quadrature.hpp"
#include "effcap/specfun.hpp"

namespace effcap::capacity {
namespace {

constexpr double kLn2 = 0.69314718055994530942;

// Integrate a nonnegative integrand g(gamma) d gamma in u = ln gamma over a
// wide window: scan for the peak, keep the region within 46 nats, refine
// adaptively. Robust to densities whose support spans many decades.
double integrate_over_density(const std::function<double(double)>& g, const char* what) {
    constexpr double u_lo = -70.0, u_hi = 40.0;
    constexpr int n_scan = 640;
    constexpr double drop = 46.0;
    const double step = (u_hi - u_lo) / (n_scan - 1);
    std::vector<double> ln_vals(n_scan);
    double peak = -std::numeric_limits<double>::infinity();
    int ipeak = 0;
    for (int i = 0; i < n_scan; ++i) {
        const double u = u_lo + step * i;
        const double gamma = std::exp(u);
        const double v = g(gamma) * gamma;  // Jacobian of u = ln gamma
        ln_vals[i] = v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
        if (ln_vals[i] > peak) {
            peak = ln_vals[i];
            ipeak = i;
        }
    }
    if (!std::isfinite(peak)) return 0.0;
    int lo = ipeak, hi = ipeak;
    while (lo > 0 && ln_vals[lo - 1] > peak - drop) --lo;
    while (hi < n_scan - 1 && ln_vals[hi + 1] > peak - drop) ++hi;
    lo = std::max(0, lo - 2);
    hi = std::min(n_scan - 1, hi + 2);
    const double a = u_lo + step * lo, b = u_lo + step * hi;
    const double scale = std::exp(peak);
    const auto r = quad::integrate_or_throw(
        [&](double u) {
            const double gamma = std::exp(u);
            return g(gamma) * gamma / scale;
        },
        a, b, quad::Options{1e-10, 0.0, 4000}, what);
    return r * scale;
}

ECEstimate finish(double moment, double A, Method method, const char* what) {
    if (!(moment > 0.0) || !(moment <= 1.0 + 1e-9) || !std::isfinite(moment)) {
        throw numerical_error(std::string(what) + ": moment " + std::to_string(moment) +
                              " outside (0, 1]");
    }
    moment = std::min(moment, 1.0);
    ECEstimate e;
    e.value = std::max(0.0, -std::log2(moment) / A);
    e.method = method;
    return e;
}

}  // namespace

QoSConfig a_from_qos(double theta, double T, double B) {
    if (!(theta >= 0.0)) throw std::domain_error("a_from_qos: requires theta >= 0");
    if (!(T > 0.0)) throw std::domain_error("a_from_qos: requires T > 0");
    if (!(B > 0.0)) throw std::domain_error("a_from_qos: requires B > 0");
    return {theta, T, B, theta * T * B / kLn2};
}

ECEstimate ec_mg(const mixfit::MGModel& model, double A) {
    if (!(A > 0.0)) throw std::domain_error("ec_mg: requires A > 0");
    if (model.terms.empty()) throw std::invalid_argument("ec_mg: empty model");
    double moment = 0.0;
    for (const auto& t : model.terms) {
        const double u = specfun::tricomi_u(t.vartheta, t.vartheta + 1.0 - A, t.xi);
        moment += t.phi * std::exp(specfun::ln_gamma(t.vartheta) + std::log(u));
    }
    return finish(moment, A, Method::mg, "ec_mg");
}

ECEstimate ec_mog(const mixfit::MoGModel& model, double A) {
    if (!(A > 0.0)) throw std::domain_error("ec_mog: requires A > 0");
    if (model.comps.empty()) throw std::invalid_argument("ec_mog: empty model");
    const double gb = model.gamma_bar;
    double moment = 0.0;
    for (const auto& c : model.comps) {
        const double inv = 1.0 / (c.psi * std::sqrt(2.0 * 3.14159265358979323846));
        auto f = [&](double t) {
            const double z = (t - c.upsilon) / c.psi;
            return std::exp(-A * std::log1p(gb * t * t) - 0.5 * z * z) * inv;
        };
        const double lo = std::max(0.0, c.upsilon - 12.0 * c.psi);
        const double hi = c.upsilon + 12.0 * c.psi;
        double part = quad::integrate_or_throw(f, lo, hi, quad::Options{1e-10, 0.0, 2000},
                                               "ec_mog: component integral");
        // The Gaussian mass beyond 12 sigma is ~1e-32; one extra panel guards
        // against components so wide that the algebraic factor still matters.
        part += quad::integrate(f, hi, hi + 4.0 * c.psi, quad::Options{1e-8, 0.0, 200}).value;
        moment += c.rho * part;
    }
    return finish(moment, A, Method::mog, "ec_mog");
}

ECEstimate ec_numeric(const std::function<double(double)>& pdf, double A) {
    if (!(A > 0.0)) throw std::domain_error("ec_numeric: requires A > 0");
    const double norm = integrate_over_density(pdf, "ec_numeric: normalization");
    if (std::fabs(norm - 1.0) > 1e-4) {
        throw std::invalid_argument("ec_numeric: density integrates to " + std::to_string(norm) +
                                    ", not 1");
    }
    const double moment = integrate_over_density(
        [&](double g) { return pdf(g) * std::exp(-A * std::log1p(g)); }, "ec_numeric: moment");
    return finish(moment, A, Method::numeric_exact, "ec_numeric");
}

ECEstimate ec_monte_carlo(const std::vector<double>& snr_samples, double A) {
    if (!(A > 0.0)) throw std::domain_error("ec_monte_carlo: requires A > 0");
    if (snr_samples.size() < 1000)
        throw std::invalid_argument("ec_monte_carlo: requires at least 1e3 samples");
    const std::size_t n = snr_samples.size();
    long double s1 = 0.0L, s2 = 0.0L;
    for (double g : snr_samples) {
        if (!(g >= 0.0)) throw std::invalid_argument("ec_monte_carlo: negative SNR sample");
        const long double v = std::exp(-A * std::log1p(g));
        s1 += v;
        s2 += v * v;
    }
    const double m = static_cast<double>(s1 / n);
    const double var = std::max(0.0, static_cast<double>(s2 / n) - m * m);
    ECEstimate e = finish(m, A, Method::monte_carlo, "ec_monte_carlo");
    e.std_error = std::sqrt(var / n) / (A * m * kLn2);
    return e;
}

double ergodic_capacity(const std::function<double(double)>& pdf) {
    return integrate_over_density(
               [&](double g) { return pdf(g) * std::log1p(g); }, "ergodic_capacity") /
           kLn2;
}

double ergodic_capacity(const std::vector<double>& snr_samples) {
    if (snr_samples.empty()) throw std::invalid_argument("ergodic_capacity: no samples");
    long double acc = 0.0L;
    for (double g : snr_samples) acc += std::log1p(g);
    return static_cast<double>(acc / snr_samples.size()) / kLn2;
}

}  // namespace effcap::capacity
