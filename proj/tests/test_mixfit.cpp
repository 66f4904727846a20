// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "effcap/error.hpp"
#include "effcap/mixfit.hpp"
#include "effcap/quadrature.hpp"
#include "effcap/specfun.hpp"
#include "grid_cases.hpp"

using namespace effcap;
using namespace effcap::mixfit;

namespace {

double mg_total_mass(const MGModel& m) {
    double s = 0.0;
    for (const auto& t : m.terms)
        s += t.phi * std::exp(specfun::ln_gamma(t.vartheta) - t.vartheta * std::log(t.xi));
    return s;
}

channels::ChannelParams grid_params(int i) { return testgrid::params(testgrid::kCases[i]); }

}  // namespace

TEST_CASE("canonical grid shape") {
    const auto g = canonical_grid();
    REQUIRE(g.size() == 200);
    CHECK(g.front() == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(g.back() == doctest::Approx(1e2).epsilon(1e-12));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    const auto g5 = canonical_grid(5.0);
    CHECK(g5.front() == doctest::Approx(5e-3).epsilon(1e-12));
    CHECK(g5.back() == doctest::Approx(5e2).epsilon(1e-12));
}

TEST_CASE("gamma mixture integrates to exactly one") {
    for (int i : {0, 1, 2, 6, 13}) {
        const auto p = grid_params(i);
        for (int order : {1, 7, 25, 50}) {
            const auto m = fit_mg(p, order);
            REQUIRE(m.terms.size() == static_cast<std::size_t>(order));
            CHECK(std::fabs(mg_total_mass(m) - 1.0) <= 1e-12);
        }
        // and by direct quadrature of the assembled density
        const auto m = fit_mg(p, 20);
        const auto r = quad::integrate_tail([&](double g) { return mg_pdf(m, g); }, 0.0, 1.0);
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("gamma-mixture order selection meets the gate on smooth cases") {
    // integrand smoothness in the quadrature variable depends on
    // lambda = 2 mu - 1 - 2 b / alpha; these cases converge fast
    for (int i : {6, 14, 16, 18}) {
        const auto sel = select_mg_order(grid_params(i), 1e-8, 50);
        CHECK(sel.met);
        CHECK(sel.order <= 50);
        CHECK(sel.mse <= 1e-8);
    }
    // a trivially loose target selects the smallest order
    const auto sel1 = select_mg_order(grid_params(1), 1e30, 50);
    CHECK(sel1.order == 1);
    CHECK(sel1.met);
}

TEST_CASE("gamma-mixture fits are scale-equivariant") {
    const auto p = grid_params(1);
    const auto unit = channels::scale_to_mean(p, 1.0);
    const auto scal = channels::scale_to_mean(p, 37.0);
    const auto m1 = fit_mg(unit, 14);
    const auto m37 = fit_mg(scal, 14);
    // carrying the unit fit to mean 37: phi -> phi c^{-vartheta}, xi -> xi/c
    for (double g : {0.05, 1.0, 10.0, 200.0}) {
        double carried = 0.0;
        for (const auto& t : m1.terms)
            carried += t.phi * std::pow(37.0, -t.vartheta) *
                       std::pow(g, t.vartheta - 1.0) * std::exp(-t.xi / 37.0 * g);
        CHECK(mg_pdf(m37, g) == doctest::Approx(carried).epsilon(1e-10));
    }
}

TEST_CASE("pdf_mse is a grid-mean squared gap") {
    const auto grid = canonical_grid();
    const Density a = [](double) { return 0.3; };
    const Density b = [](double) { return 0.1; };
    CHECK(pdf_mse(a, a, grid) == doctest::Approx(0.0));
    CHECK(pdf_mse(a, b, grid) == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("EM recovers a single-component synthetic envelope") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> nd(1.0, 0.1);
    std::vector<double> snr(100000);
    for (auto& s : snr) {
        const double r = nd(rng);
        s = r * r;  // r = sqrt(snr) ~ N(1, 0.1^2), no sign flips at 10 sigma
    }
    const double gbar = 1.0 + 0.1 * 0.1;  // E[r^2]
    const auto m = fit_mog(snr, 1);
    REQUIRE(m.comps.size() == 1);
    CHECK(m.gamma_bar == doctest::Approx(gbar).epsilon(5e-3));
    // the fitted envelope is r / sqrt(gamma_bar)
    CHECK(m.comps[0].rho == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.comps[0].upsilon == doctest::Approx(1.0 / std::sqrt(gbar)).epsilon(0.02));
    CHECK(m.comps[0].psi == doctest::Approx(0.1 / std::sqrt(gbar)).epsilon(0.02));
}

TEST_CASE("EM fit is deterministic per seed and weights sum to one") {
    const auto p = grid_params(1);
    const auto snr = channels::sample_composite(p, 20000, 5);
    FitOptions opt;
    opt.seed = 11;
    const auto m1 = fit_mog(snr, 4, opt);
    const auto m2 = fit_mog(snr, 4, opt);
    REQUIRE(m1.comps.size() == m2.comps.size());
    double rho_sum = 0.0;
    for (std::size_t i = 0; i < m1.comps.size(); ++i) {
        CHECK(m1.comps[i].rho == m2.comps[i].rho);
        CHECK(m1.comps[i].upsilon == m2.comps[i].upsilon);
        CHECK(m1.comps[i].psi == m2.comps[i].psi);
        CHECK(m1.comps[i].psi > 0.0);
        rho_sum += m1.comps[i].rho;
        if (i) CHECK(m1.comps[i].upsilon >= m1.comps[i - 1].upsilon);
    }
    CHECK(rho_sum == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("fitted Gaussian mixture is a near-unit-mass density") {
    const auto p = grid_params(1);
    const auto snr = channels::sample_composite(p, 100000, 9);
    const auto m = fit_mog(snr, 6);
    const auto r = quad::integrate_tail([&](double g) { return mog_pdf(m, g); }, 0.0, 0.5);
    // sub-zero envelope mass is truncated, not renormalized; the deficit
    // stays far below the fit error scale
    CHECK(r.value > 0.995);
    CHECK(r.value < 1.0 + 1e-9);
}

TEST_CASE("fit_mog input validation") {
    std::vector<double> tiny(100, 1.0);
    CHECK_THROWS_AS(fit_mog(tiny, 2), std::invalid_argument);
    std::vector<double> ok(20000, 1.0);
    CHECK_THROWS_AS(fit_mog(ok, 0), std::invalid_argument);
    std::vector<double> neg(20000, 1.0);
    neg[7] = -2.0;
    CHECK_THROWS_AS(fit_mog(neg, 2), std::invalid_argument);
}

TEST_CASE("mog order selection is scale-consistent") {
    const auto p = grid_params(1);
    const auto at_unit = select_mog_order(channels::scale_to_mean(p, 1.0), 1e-3, 20, 3, 100000);
    const auto at_20db = select_mog_order(channels::scale_to_mean(p, 100.0), 1e-3, 20, 3, 100000);
    CHECK(at_unit.met);
    CHECK(at_20db.met);
    CHECK(at_unit.order == at_20db.order);
    // same normalized-envelope fit, gamma_bar carries the scale
    CHECK(at_20db.model.gamma_bar ==
          doctest::Approx(100.0 * at_unit.model.gamma_bar).epsilon(1e-9));
    for (std::size_t i = 0; i < at_unit.model.comps.size(); ++i) {
        CHECK(at_20db.model.comps[i].upsilon ==
              doctest::Approx(at_unit.model.comps[i].upsilon).epsilon(1e-12));
    }
}
