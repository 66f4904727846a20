#include "effcap/mixfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "effcap/error.hpp"
#include "effcap/specfun.hpp"

namespace effcap::mixfit {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp(const std::vector<double>& v) {
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace

MGModel fit_mg(const channels::ChannelParams& p, int order) {
    if (order < 1) throw std::invalid_argument("fit_mg: requires order >= 1");
    channels::validate(p);
    const auto fc = channels::format_constants(p);
    const double h = fc.h;
    const double H = fc.cap_h;
    const double ib = (2.0 / p.alpha) * p.b;
    const double nu = p.mu - 0.5;

    const auto rule = specfun::gauss_laguerre(order);

    // Node-independent front factor, with the 1/H^nu piece folded into the
    // Bessel evaluation so the H -> 0 limit stays finite.
    const double ln_front = 0.5 * std::log(kPi) + (ib - p.mu + 0.5) * std::log(2.0) +
                            ib * std::log(p.mu) + (ib - 0.5) * std::log(h) -
                            specfun::ln_gamma(p.mu) - specfun::ln_gamma(p.b) -
                            p.b * std::log(p.omega);

    std::vector<double> ln_theta(order), ln_mass(order), xi(order);
    const double ln_gamma_b = specfun::ln_gamma(p.b);
    for (int l = 0; l < order; ++l) {
        const double z = rule.nodes[l];
        const double s = (H / h) * z;
        double ln_bess;  // ln of H^{-nu} I_nu((H/h) z)
        if (s < 1e-6) {
            ln_bess = nu * std::log(z / (2.0 * h)) - specfun::ln_gamma(nu + 1.0) +
                      std::log1p(s * s / (4.0 * (nu + 1.0)));
        } else {
            ln_bess = s + specfun::bessel_i_ln_scaled(nu, s) - nu * std::log(H);
        }
        ln_theta[l] = ln_front + std::log(rule.weights[l]) + (p.mu - ib - 0.5) * std::log(z) +
                      ln_bess;
        xi[l] = std::exp((2.0 / p.alpha) * (std::log(2.0 * p.mu * h) - std::log(z)) -
                         std::log(p.omega));
        ln_mass[l] = ln_theta[l] + ln_gamma_b - p.b * std::log(xi[l]);
    }
    const double ln_total = logsumexp(ln_mass);
    if (!std::isfinite(ln_total)) throw numerical_error("fit_mg: weight normalization overflow");

    MGModel model;
    model.terms.resize(order);
    for (int l = 0; l < order; ++l) {
        const double phi = std::exp(ln_theta[l] - ln_total);
        if (!(phi > 0.0) || !std::isfinite(phi) || !std::isfinite(xi[l])) {
            throw numerical_error("fit_mg: term " + std::to_string(l) +
                                  " under/overflowed at order " + std::to_string(order));
        }
        model.terms[l] = {phi, p.b, xi[l]};
    }
    return model;
}

double mg_pdf(const MGModel& model, double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("mg_pdf: requires gamma > 0");
    const double lg = std::log(gamma);
    std::vector<double> lt(model.terms.size());
    for (std::size_t l = 0; l < model.terms.size(); ++l) {
        const auto& t = model.terms[l];
        lt[l] = std::log(t.phi) + (t.vartheta - 1.0) * lg - t.xi * gamma;
    }
    const double ls = logsumexp(lt);
    return std::isfinite(ls) ? std::exp(ls) : 0.0;
}

namespace {

// Histogram of the envelope samples; EM iterates over occupied bins only.
struct Binned {
    std::vector<double> x;  // bin centers
    std::vector<double> n;  // counts
    double total = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
};

Binned bin_samples(const std::vector<double>& r, int bins) {
    double rmax = 0.0;
    for (double v : r) rmax = std::max(rmax, v);
    const double width = rmax / bins * (1.0 + 1e-12);
    std::vector<double> counts(bins, 0.0);
    for (double v : r) {
        int j = static_cast<int>(v / width);
        if (j >= bins) j = bins - 1;
        counts[j] += 1.0;
    }
    Binned b;
    double s1 = 0.0, s2 = 0.0;
    for (int j = 0; j < bins; ++j) {
        if (counts[j] == 0.0) continue;
        const double c = (j + 0.5) * width;
        b.x.push_back(c);
        b.n.push_back(counts[j]);
        b.total += counts[j];
        s1 += counts[j] * c;
        s2 += counts[j] * c * c;
    }
    b.mean = s1 / b.total;
    b.stddev = std::sqrt(std::max(s2 / b.total - b.mean * b.mean, 0.0));
    return b;
}

// k-means++ style seeding over bin centers, counts as masses. Manual CDF
// inversion keeps the draw sequence identical across library versions.
std::vector<double> seed_centers(const Binned& b, int k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t m = b.x.size();
    std::vector<double> centers;
    std::vector<double> d2(m, std::numeric_limits<double>::max());
    std::vector<double> w = b.n;
    for (int c = 0; c < k; ++c) {
        double tot = 0.0;
        for (std::size_t j = 0; j < m; ++j) tot += w[j];
        double u = unif(rng) * tot;
        std::size_t pick = m - 1;
        for (std::size_t j = 0; j < m; ++j) {
            u -= w[j];
            if (u <= 0.0) {
                pick = j;
                break;
            }
        }
        centers.push_back(b.x[pick]);
        for (std::size_t j = 0; j < m; ++j) {
            const double d = b.x[j] - b.x[pick];
            d2[j] = std::min(d2[j], d * d);
            w[j] = b.n[j] * d2[j];
        }
    }
    std::sort(centers.begin(), centers.end());
    return centers;
}

struct EmState {
    std::vector<MoGComp> comps;
    double ll = kNegInf;  // mean log-likelihood per sample
    bool collapsed = false;
};

// Iterate EM on the binned data, mutating `st` in place. Stops on the mean
// log-likelihood tolerance, the iteration cap, or component collapse.
void em_iterate(const Binned& b, EmState& st, int max_iter, double tol) {
    const std::size_t m = b.x.size();
    const int k = static_cast<int>(st.comps.size());
    std::vector<double> li(k), w(k), sx(k), sxx(k);
    double prev_ll = st.ll;
    for (int iter = 0; iter < max_iter; ++iter) {
        std::fill(w.begin(), w.end(), 0.0);
        std::fill(sx.begin(), sx.end(), 0.0);
        std::fill(sxx.begin(), sxx.end(), 0.0);
        double ll = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double lmax = kNegInf;
            for (int i = 0; i < k; ++i) {
                const auto& c = st.comps[i];
                const double z = (b.x[j] - c.upsilon) / c.psi;
                li[i] = std::log(c.rho) - std::log(c.psi) - 0.5 * z * z;
                lmax = std::max(lmax, li[i]);
            }
            double se = 0.0;
            for (int i = 0; i < k; ++i) {
                li[i] = std::exp(li[i] - lmax);
                se += li[i];
            }
            ll += b.n[j] * (lmax + std::log(se));
            for (int i = 0; i < k; ++i) {
                const double tau = b.n[j] * li[i] / se;
                const double dx = b.x[j] - st.comps[i].upsilon;  // shifted origin
                w[i] += tau;
                sx[i] += tau * dx;
                sxx[i] += tau * dx * dx;
            }
        }
        ll = ll / b.total - 0.5 * std::log(2.0 * kPi);
        for (int i = 0; i < k; ++i) {
            if (!(w[i] > 1e-10)) {
                st.collapsed = true;
                return;
            }
            const double d = sx[i] / w[i];
            const double var = sxx[i] / w[i] - d * d;
            st.comps[i].rho = w[i] / b.total;
            st.comps[i].upsilon += d;
            st.comps[i].psi = std::sqrt(std::max(var, 0.0));
            if (!(st.comps[i].psi >= 1e-8)) {
                st.collapsed = true;
                return;
            }
        }
        st.ll = ll;
        if (std::fabs(ll - prev_ll) < tol) return;
        prev_ll = ll;
    }
}

}  // namespace

MoGModel fit_mog(const std::vector<double>& snr_samples, int order, const FitOptions& opt) {
    if (order < 1) throw std::invalid_argument("fit_mog: requires order >= 1");
    if (snr_samples.size() < 10000)
        throw std::invalid_argument("fit_mog: requires at least 1e4 samples");
    long double acc = 0.0L;
    for (double g : snr_samples) {
        if (!(g >= 0.0) || !std::isfinite(g))
            throw std::invalid_argument("fit_mog: samples must be finite and nonnegative");
        acc += g;
    }
    const double gamma_bar = static_cast<double>(acc / snr_samples.size());
    if (!(gamma_bar > 0.0)) throw std::invalid_argument("fit_mog: samples have zero mean");

    std::vector<double> r(snr_samples.size());
    for (std::size_t i = 0; i < snr_samples.size(); ++i)
        r[i] = std::sqrt(snr_samples[i] / gamma_bar);
    const Binned b = bin_samples(r, opt.bins);

    // Two-phase restart scheme: a short burn-in ranks the restarts, then only
    // the most promising ones run to full tolerance.
    const int burn_iter = std::min(120, opt.max_iter);
    std::vector<EmState> cand;
    for (int t = 0; t < opt.restarts; ++t) {
        std::mt19937_64 rng(splitmix64(opt.seed + 0x9e37ull * t));
        EmState st;
        st.comps.resize(order);
        const auto centers = seed_centers(b, order, rng);
        const double psi0 = std::max(b.stddev / order, 1e-4 * b.stddev + 1e-12);
        for (int i = 0; i < order; ++i) st.comps[i] = {1.0 / order, centers[i], psi0};
        em_iterate(b, st, burn_iter, opt.tol);
        if (!st.collapsed) cand.push_back(std::move(st));
    }
    std::stable_sort(cand.begin(), cand.end(),
                     [](const EmState& a, const EmState& c) { return a.ll > c.ll; });
    for (auto& st : cand) {
        em_iterate(b, st, opt.max_iter, opt.tol);
        if (st.collapsed) continue;
        std::sort(st.comps.begin(), st.comps.end(),
                  [](const MoGComp& a, const MoGComp& c) { return a.upsilon < c.upsilon; });
        double wsum = 0.0;
        for (const auto& c : st.comps) wsum += c.rho;
        for (auto& c : st.comps) c.rho /= wsum;
        MoGModel model;
        model.gamma_bar = gamma_bar;
        model.comps = std::move(st.comps);
        return model;
    }
    throw fit_error("fit_mog: all restarts collapsed at order " + std::to_string(order));
}

double mog_pdf(const MoGModel& model, double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("mog_pdf: requires gamma > 0");
    const double r = std::sqrt(gamma / model.gamma_bar);
    const double front = 1.0 / std::sqrt(8.0 * kPi * model.gamma_bar * gamma);
    double f = 0.0;
    for (const auto& c : model.comps) {
        const double z = (r - c.upsilon) / c.psi;
        f += c.rho / c.psi * std::exp(-0.5 * z * z);
    }
    return front * f;
}

double pdf_mse(const Density& approx, const Density& exact, const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("pdf_mse: empty grid");
    double acc = 0.0;
    for (double g : grid) {
        const double d = approx(g) - exact(g);
        acc += d * d;
    }
    return acc / static_cast<double>(grid.size());
}

std::vector<double> canonical_grid(double gamma_bar) {
    if (!(gamma_bar > 0.0)) throw std::invalid_argument("canonical_grid: requires gamma_bar > 0");
    const int n = 200;
    const double lo = std::log(1e-3 * gamma_bar);
    const double hi = std::log(1e2 * gamma_bar);
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = std::exp(lo + (hi - lo) * i / (n - 1));
    return grid;
}

namespace {

std::vector<double> exact_on_grid(const channels::ChannelParams& p,
                                  const std::vector<double>& grid) {
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) f[i] = channels::composite_pdf(grid[i], p);
    return f;
}

double grid_mse(const std::vector<double>& approx, const std::vector<double>& exact) {
    double acc = 0.0;
    for (std::size_t i = 0; i < approx.size(); ++i) {
        const double d = approx[i] - exact[i];
        acc += d * d;
    }
    return acc / static_cast<double>(approx.size());
}

}  // namespace

// Both searches score candidates on the unit-mean channel so the MSE gate is
// scale-invariant (the fits themselves are exactly scale-equivariant); the
// returned model is expressed at the caller's scale.

MGSelection select_mg_order(const channels::ChannelParams& p, double mse_target, int max_order) {
    if (!(mse_target > 0.0)) throw std::invalid_argument("select_mg_order: target must be > 0");
    const channels::ChannelParams q = channels::scale_to_mean(p, 1.0);
    const auto grid = canonical_grid(1.0);
    const auto exact = exact_on_grid(q, grid);
    int best_order = 0;
    double best_mse = std::numeric_limits<double>::infinity();
    bool met = false;
    std::vector<double> approx(grid.size());
    for (int s = 1; s <= max_order; ++s) {
        const MGModel m = fit_mg(q, s);
        for (std::size_t i = 0; i < grid.size(); ++i) approx[i] = mg_pdf(m, grid[i]);
        const double mse = grid_mse(approx, exact);
        if (mse < best_mse) {
            best_mse = mse;
            best_order = s;
        }
        if (best_mse <= mse_target) {
            met = true;
            break;
        }
    }
    return {fit_mg(p, best_order), best_order, best_mse, met};
}

MoGSelection select_mog_order(const channels::ChannelParams& p, double mse_target, int max_order,
                              std::uint64_t seed, std::size_t n_samples) {
    if (!(mse_target > 0.0)) throw std::invalid_argument("select_mog_order: target must be > 0");
    const channels::ChannelParams q = channels::scale_to_mean(p, 1.0);
    const auto samples = channels::sample_composite(q, n_samples, seed);
    const auto grid = canonical_grid(1.0);
    const auto exact = exact_on_grid(q, grid);
    FitOptions opt;
    opt.seed = seed;
    MoGSelection best;
    best.mse = std::numeric_limits<double>::infinity();
    std::vector<double> approx(grid.size());
    for (int k = 1; k <= max_order; ++k) {
        MoGModel m;
        try {
            m = fit_mog(samples, k, opt);
        } catch (const fit_error&) {
            continue;  // every restart collapsed at this order; try the next
        }
        for (std::size_t i = 0; i < grid.size(); ++i) approx[i] = mog_pdf(m, grid[i]);
        const double mse = grid_mse(approx, exact);
        if (mse < best.mse) best = {std::move(m), k, mse, false};
        if (best.mse <= mse_target) {
            best.met = true;
            break;
        }
    }
    // Rescale the unit-mean fit back to the caller's channel; r = sqrt(g/mean)
    // is scale-free so the components transfer exactly.
    best.model.gamma_bar *= p.omega / q.omega;
    return best;
}

}  // namespace effcap::mixfit
