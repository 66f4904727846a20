// SPDX-License-Identifier: Apache-2.0
#ifndef EFFCAP_CHANNELS_HPP
#define EFFCAP_CHANNELS_HPP

#include <cstdint>
#include <vector>

namespace effcap::channels {

enum class Format { format1, format2 };

// Composite alpha-eta-mu/gamma channel.
//   alpha  non-linearity parameter, > 0
//   eta    format 1: in-phase/quadrature power ratio, (0, inf)
//          format 2: in-phase/quadrature correlation, (-1, 1)
//   mu     multipath cluster parameter, > 0
//   b      gamma shadowing shape, > 0
//   omega  gamma shadowing scale (power units), > 0
struct ChannelParams {
    double alpha = 2.0;
    double eta = 0.5;
    double mu = 1.0;
    double b = 2.0;
    double omega = 1.0;
    Format format = Format::format1;
};

/// Throws std::domain_error when params violate their ranges.
void validate(const ChannelParams& params);

struct FormatConstants {
    double h = 0.0;
    double cap_h = 0.0;  // the model's H, >= 0 after format-1 reciprocal mapping
};

/// (h, H) for the channel's eta format. Format-1 eta > 1 is mapped through
/// the reciprocal symmetry eta -> 1/eta so H >= 0 always holds.
FormatConstants format_constants(const ChannelParams& params);

/// Unit-scale alpha-eta-mu SNR density f_W(w):
///   sqrt(pi) alpha h^mu mu^{mu+1/2} w^{(alpha/2)(mu+1/2)-1}
///   / (Gamma(mu) H^{mu-1/2}) * e^{-2 mu h w^{alpha/2}} * I_{mu-1/2}(2 mu H w^{alpha/2})
/// H = 0 (eta -> 1 in format 1, eta = 0 in format 2) is handled by the
/// small-argument limit of H^{-(mu-1/2)} I_{mu-1/2}.
double unit_aem_pdf(double w, double alpha, double eta, double mu, Format format);

/// ln f_W(w); never under/overflows for w in the representable range.
double ln_unit_aem_pdf(double w, double alpha, double eta, double mu, Format format);

/// Composite SNR density: f(gamma) = Int f_X(x) f_W(gamma/x) / x dx with
/// X ~ Gamma(shape b, scale omega). Adaptive quadrature in u = ln x.
double composite_pdf(double gamma, const ChannelParams& params);

/// E[W] of the unit-scale alpha-eta-mu density (adaptive quadrature).
double unit_aem_mean(const ChannelParams& params);

/// Mean SNR: E[gamma] = b * omega * E[W].
double mean_snr(const ChannelParams& params);

/// Same channel with omega rescaled so mean_snr(result) == target.
ChannelParams scale_to_mean(const ChannelParams& params, double target_mean_snr);

/// n Monte Carlo draws of gamma = X * W. W is sampled exactly for any mu > 0
/// as W = P^{2/alpha} with P the sum of two independent gamma variates of
/// shape mu and scales 1/(2 mu (h+H)), 1/(2 mu (h-H)) (unit-mean eta-mu power).
std::vector<double> sample_composite(const ChannelParams& params, std::size_t n,
                                     std::uint64_t seed);

}  // namespace effcap::channels

#endif
