#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "effcap/channels.hpp"

namespace effcap::mixfit {

// Gamma-mixture SNR density: f(g) = sum_l phi_l g^{vartheta_l - 1} e^{-xi_l g}.
struct MGTerm {
    double phi;
    double vartheta;
    double xi;
};

struct MGModel {
    std::vector<MGTerm> terms;
};

// Gaussian-mixture model of the normalized envelope r = sqrt(g / gamma_bar):
// f(g) = sum_i rho_i / (sqrt(8 pi gamma_bar g) psi_i)
//        * exp(-(sqrt(g/gamma_bar) - upsilon_i)^2 / (2 psi_i^2)).
struct MoGComp {
    double rho;
    double upsilon;
    double psi;
};

struct MoGModel {
    double gamma_bar = 1.0;
    std::vector<MoGComp> comps;
};

// Deterministic Gauss-Laguerre construction of an `order`-term gamma mixture
// for the composite channel. Normalized so the mixture integrates to 1.
MGModel fit_mg(const channels::ChannelParams& params, int order);

double mg_pdf(const MGModel& model, double gamma);

struct FitOptions {
    std::uint64_t seed = 1;
    int restarts = 8;
    int max_iter = 2000;
    double tol = 1e-10;  // mean log-likelihood change per sample
    int bins = 8192;     // histogram resolution used by the binned EM
};

// EM fit of an `order`-component Gaussian mixture to r = sqrt(g / mean(g)).
// gamma_bar is taken as the sample mean. Deterministic for a fixed seed and
// restart count. Throws fit_error if every restart collapses.
MoGModel fit_mog(const std::vector<double>& snr_samples, int order,
                 const FitOptions& opt = {});

double mog_pdf(const MoGModel& model, double gamma);

using Density = std::function<double(double)>;

// Mean squared error between two densities over a fixed evaluation grid.
double pdf_mse(const Density& approx, const Density& exact, const std::vector<double>& grid);

// 200 log-spaced points spanning g/gamma_bar in [1e-3, 1e2]; the fixed grid
// all MSE figures refer to.
std::vector<double> canonical_grid(double gamma_bar = 1.0);

struct MGSelection {
    MGModel model;
    int order = 0;
    double mse = 0.0;
    bool met = false;  // mse <= target reached within max_order
};

// Smallest order in {1..max_order} whose MG fit reaches mse_target on the
// canonical grid; if none does, the best order found (met = false).
MGSelection select_mg_order(const channels::ChannelParams& params, double mse_target = 1e-8,
                            int max_order = 50);

struct MoGSelection {
    MoGModel model;
    int order = 0;
    double mse = 0.0;
    bool met = false;
};

// Same search for the MoG family, fitting EM to n_samples fresh channel draws.
MoGSelection select_mog_order(const channels::ChannelParams& params, double mse_target = 1e-8,
                              int max_order = 20, std::uint64_t seed = 1,
                              std::size_t n_samples = 1000000);

}  // namespace effcap::mixfit
