// SPDX-License-Identifier: Apache-2.0
#include "effcap/channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "effcap/error.hpp"
#include "effcap/quadrature.hpp"
#include "effcap/specfun.hpp"

namespace effcap::channels {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Precomputed pieces of ln f_W for one parameter set.
struct AemKernel {
    double alpha, mu, h, cap_h;
    double nu;        // mu - 1/2
    double ln_front;  // ln(sqrt(pi) alpha h^mu mu^{mu+1/2} / Gamma(mu))
    double w_power;   // (alpha/2)(mu+1/2) - 1

    AemKernel(double alpha_, double eta, double mu_, Format format) : alpha(alpha_), mu(mu_) {
        ChannelParams p;
        p.alpha = alpha_;
        p.eta = eta;
        p.mu = mu_;
        p.format = format;
        validate(p);
        const FormatConstants fc = format_constants(p);
        h = fc.h;
        cap_h = fc.cap_h;
        nu = mu - 0.5;
        ln_front = 0.5 * std::log(kPi) + std::log(alpha) + mu * std::log(h) +
                   (mu + 0.5) * std::log(mu) - specfun::ln_gamma(mu);
        w_power = 0.5 * alpha * (mu + 0.5) - 1.0;
    }

    // ln f_W at w = e^{ln_w}; works from ln w so deep-tail scan points can
    // not underflow inside pow().
    double ln_pdf_from_ln(double ln_w) const {
        const double ln_v = 0.5 * alpha * ln_w;
        const double v = std::exp(ln_v);
        const double s = 2.0 * mu * cap_h * v;  // Bessel argument
        // Combined H^{-nu} I_nu(s): series limit once s is tiny (covers H = 0).
        double bess;
        if (s < 1e-6) {
            bess = nu * (std::log(mu) + ln_v) - specfun::ln_gamma(nu + 1.0) +
                   std::log1p(s * s / (4.0 * (nu + 1.0)));
        } else {
            bess = s + specfun::bessel_i_ln_scaled(nu, s) - nu * std::log(cap_h);
        }
        return ln_front + w_power * ln_w - 2.0 * mu * h * v + bess;
    }
};

// Scan ln g over [lo, hi], locate the region within `drop` nats of the max,
// then integrate exp(ln g - peak) adaptively over it. Returns the integral
// and the extracted scale so callers can reassemble g's true magnitude.
struct ScaledIntegral {
    double value;  // integral of exp(ln g - peak)
    double peak;
};

template <typename LnG>
ScaledIntegral integrate_ln(const LnG& ln_g, double lo, double hi, int scan_points, double drop,
                            double rel_tol, const char* what) {
    const double step = (hi - lo) / (scan_points - 1);
    double peak = kNegInf;
    int ipeak = 0;
    std::vector<double> vals(scan_points);
    for (int i = 0; i < scan_points; ++i) {
        vals[i] = ln_g(lo + i * step);
        if (vals[i] > peak) {
            peak = vals[i];
            ipeak = i;
        }
    }
    if (!std::isfinite(peak)) return {0.0, kNegInf};

    int il = ipeak, ir = ipeak;
    while (il > 0 && vals[il - 1] > peak - drop) --il;
    while (ir < scan_points - 1 && vals[ir + 1] > peak - drop) ++ir;
    const double a = lo + std::max(0, il - 2) * step;
    const double b = lo + std::min(scan_points - 1, ir + 2) * step;

    quad::Options opt;
    opt.rel_tol = rel_tol;
    auto g = [&](double u) {
        const double lg = ln_g(u);
        return std::isfinite(lg) ? std::exp(lg - peak) : 0.0;
    };
    return {quad::integrate_or_throw(g, a, b, opt, what), peak};
}

// ln of the gamma-shadowing density at x = e^u (without the du Jacobian).
double ln_gamma_pdf(double x, double b, double omega, double ln_norm) {
    return (b - 1.0) * std::log(x) - x / omega - ln_norm;
}

std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

void validate(const ChannelParams& p) {
    if (!(p.alpha > 0.0)) throw std::domain_error("channel: alpha must be > 0");
    if (!(p.mu > 0.0)) throw std::domain_error("channel: mu must be > 0");
    if (!(p.b > 0.0)) throw std::domain_error("channel: b must be > 0");
    if (!(p.omega > 0.0)) throw std::domain_error("channel: omega must be > 0");
    if (p.format == Format::format1) {
        if (!(p.eta > 0.0)) throw std::domain_error("channel: format 1 requires eta > 0");
    } else {
        if (!(p.eta > -1.0 && p.eta < 1.0))
            throw std::domain_error("channel: format 2 requires eta in (-1, 1)");
    }
}

FormatConstants format_constants(const ChannelParams& p) {
    validate(p);
    FormatConstants fc;
    if (p.format == Format::format1) {
        // The density depends on eta only through (h, |H|); eta > 1 maps to
        // 1/eta so H stays nonnegative.
        const double eta = p.eta > 1.0 ? 1.0 / p.eta : p.eta;
        fc.cap_h = (1.0 / eta - eta) / 4.0;
        fc.h = (2.0 + 1.0 / eta + eta) / 4.0;
    } else {
        // The density is even in H (H^{-nu} I_nu pairs), so negative
        // correlation folds onto |eta|.
        fc.cap_h = std::fabs(p.eta) / (1.0 - p.eta * p.eta);
        fc.h = 1.0 / (1.0 - p.eta * p.eta);
    }
    return fc;
}

double ln_unit_aem_pdf(double w, double alpha, double eta, double mu, Format format) {
    if (!(w > 0.0)) throw std::domain_error("unit_aem_pdf: requires w > 0");
    return AemKernel(alpha, eta, mu, format).ln_pdf_from_ln(std::log(w));
}

double unit_aem_pdf(double w, double alpha, double eta, double mu, Format format) {
    return std::exp(ln_unit_aem_pdf(w, alpha, eta, mu, format));
}

double composite_pdf(double gamma, const ChannelParams& p) {
    if (!(gamma > 0.0)) throw std::domain_error("composite_pdf: requires gamma > 0");
    validate(p);
    const AemKernel kern(p.alpha, p.eta, p.mu, p.format);
    const double ln_norm = specfun::ln_gamma(p.b) + p.b * std::log(p.omega);

    // f(gamma) = Int f_X(e^u) f_W(gamma e^{-u}) du. Scan window: the gamma
    // factor bounds u above, the superexponential f_W cutoff bounds it below.
    const double x_hi = p.omega * (770.0 + 7.0 * p.b + 12.0 * std::sqrt(p.b));
    const double rate = 2.0 * p.mu * (kern.h - kern.cap_h);
    const double ln_gam = std::log(gamma);
    const double u_lo = ln_gam + (2.0 / p.alpha) * std::log(rate / 900.0);
    const double u_hi = std::log(x_hi);
    if (!(u_lo < u_hi)) return 0.0;

    auto ln_g = [&](double u) {
        const double x = std::exp(u);
        return ln_gamma_pdf(x, p.b, p.omega, ln_norm) + kern.ln_pdf_from_ln(ln_gam - u);
    };
    const ScaledIntegral r =
        integrate_ln(ln_g, u_lo, u_hi, 384, 42.0, 1e-10, "composite_pdf");
    return r.value > 0.0 ? std::exp(std::log(r.value) + r.peak) : 0.0;
}

double unit_aem_mean(const ChannelParams& p) {
    validate(p);
    const AemKernel kern(p.alpha, p.eta, p.mu, p.format);
    // E[W] = Int e^{2v} f_W(e^v) dv. Right cutoff where the superexponential
    // decay rate*e^{alpha v/2} reaches ~900 nats; left where the integrand
    // power (alpha*mu + 1) has dropped far below the peak.
    const double rate = 2.0 * p.mu * (kern.h - kern.cap_h);
    const double v_hi = (2.0 / p.alpha) * std::log(900.0 / rate) + 5.0;
    const double v_lo = -(50.0 / (p.alpha * p.mu) + 10.0);
    auto ln_g = [&](double v) { return 2.0 * v + kern.ln_pdf_from_ln(v); };
    const ScaledIntegral r =
        integrate_ln(ln_g, v_lo, v_hi, 768, 46.0, 1e-9, "unit_aem_mean");
    if (!(r.value > 0.0)) throw numerical_error("unit_aem_mean: vanishing integral");
    return std::exp(std::log(r.value) + r.peak);
}

double mean_snr(const ChannelParams& p) { return p.b * p.omega * unit_aem_mean(p); }

ChannelParams scale_to_mean(const ChannelParams& p, double target_mean_snr) {
    if (!(target_mean_snr > 0.0)) {
        throw std::domain_error("scale_to_mean: target mean SNR must be > 0");
    }
    ChannelParams out = p;
    out.omega = target_mean_snr / (p.b * unit_aem_mean(p));
    return out;
}

std::vector<double> sample_composite(const ChannelParams& p, std::size_t n, std::uint64_t seed) {
    validate(p);
    if (n < 1) throw std::invalid_argument("sample_composite: n must be >= 1");
    const FormatConstants fc = format_constants(p);
    // Unit-mean eta-mu power P = Gamma(mu, sa) + Gamma(mu, sb); see header.
    const double sa = 1.0 / (2.0 * p.mu * (fc.h + fc.cap_h));
    const double sb = 1.0 / (2.0 * p.mu * (fc.h - fc.cap_h));

    std::uint64_t s = seed;
    std::mt19937_64 rng(splitmix64(s));
    std::gamma_distribution<double> shadow(p.b, p.omega);
    std::gamma_distribution<double> ga(p.mu, sa);
    std::gamma_distribution<double> gb(p.mu, sb);

    const double e = 2.0 / p.alpha;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double power = ga(rng) + gb(rng);
        const double w = (p.alpha == 2.0) ? power : std::pow(power, e);
        out[i] = shadow(rng) * w;
    }
    return out;
}

}  // namespace effcap::channels
