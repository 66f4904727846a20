// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "effcap/capacity.hpp"
#include "effcap/channels.hpp"
#include "effcap/quadrature.hpp"
#include "grid_cases.hpp"

using namespace effcap;
using namespace effcap::capacity;

namespace {

// unit-mean exponential SNR: a one-term gamma mixture and a closed density
const mixfit::MGModel kExpModel{{{1.0, 1.0, 1.0}}};
double exp_pdf(double g) { return std::exp(-g); }

// R(A=1) for exponential SNR: -log2(e * E1(1)), E1 via the standard library
const double kExpE1 = -std::expint(-1.0);
const double kExpEc1 = -std::log2(std::exp(1.0) * kExpE1);

}  // namespace

TEST_CASE("a_from_qos") {
    const auto q = a_from_qos(std::log(2.0), 1.0, 1.0);
    CHECK(q.A == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a_from_qos(0.0, 1.0, 2.0).A == 0.0);
    CHECK(a_from_qos(2.0, 0.5, 3.0).A == doctest::Approx(3.0 / std::log(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(a_from_qos(-1.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(a_from_qos(1.0, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(a_from_qos(1.0, 1.0, -2.0), std::domain_error);
}

TEST_CASE("exponential SNR: closed form and quadrature agree on -log2(e E1(1))") {
    // frozen: E1(1) = 0.21938393439552026, R(A=1) = 0.7457751737
    CHECK(kExpE1 == doctest::Approx(0.21938393439552026).epsilon(1e-12));
    CHECK(kExpEc1 == doctest::Approx(0.7457751737).epsilon(1e-9));

    const auto via_mg = ec_mg(kExpModel, 1.0);
    const auto via_num = ec_numeric(exp_pdf, 1.0);
    CHECK(via_mg.value == doctest::Approx(kExpEc1).epsilon(1e-10));
    CHECK(via_num.value == doctest::Approx(kExpEc1).epsilon(1e-10));
    CHECK(via_mg.method == Method::mg);
    CHECK(via_num.method == Method::numeric_exact);
    CHECK(!via_mg.std_error.has_value());
}

TEST_CASE("effective capacity decreases in the delay exponent") {
    double prev_mg = 1e300, prev_num = 1e300;
    for (double a : {0.25, 0.5, 1.0, 2.0, 5.0, 12.0}) {
        const double v_mg = ec_mg(kExpModel, a).value;
        const double v_num = ec_numeric(exp_pdf, a).value;
        CHECK(v_mg < prev_mg);
        CHECK(v_num < prev_num);
        CHECK(v_mg == doctest::Approx(v_num).epsilon(1e-8));
        prev_mg = v_mg;
        prev_num = v_num;
    }
}

TEST_CASE("small-A limit matches the ergodic capacity") {
    const double erg = ergodic_capacity(exp_pdf);
    CHECK(erg == doctest::Approx(std::exp(1.0) * kExpE1 / std::log(2.0)).epsilon(1e-10));
    CHECK(std::fabs(ec_numeric(exp_pdf, 1e-4).value - erg) <= 1e-3);
    CHECK(std::fabs(ec_mg(kExpModel, 1e-4).value - erg) <= 1e-3);
}

TEST_CASE("near-degenerate channels give near-zero capacity") {
    // all SNR mass within ~1e-9 of zero
    mixfit::MGModel tiny{{{1e9, 1.0, 1e9}}};
    CHECK(ec_mg(tiny, 1.0).value <= 1e-3);
    CHECK(ec_mg(tiny, 5.0).value >= 0.0);
    const double rate = 1e9;
    CHECK(ec_numeric([&](double g) { return rate * std::exp(-rate * g); }, 1.0).value <= 1e-3);
}

TEST_CASE("a point-mass envelope reproduces log2(1 + snr)") {
    mixfit::MoGModel point;
    point.gamma_bar = 1.0;
    point.comps = {{1.0, 1.0, 1e-6}};
    // gamma = 1 a.s.: R = log2(2) = 1 bit for every A
    CHECK(ec_mog(point, 2.0).value == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(ec_mog(point, 0.5).value == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("Gaussian-mixture route agrees with direct quadrature of its own density") {
    const auto p = testgrid::params(testgrid::kCases[1]);
    const auto snr = channels::sample_composite(p, 100000, 21);
    const auto model = mixfit::fit_mog(snr, 6);
    // The truncated envelope keeps mass slightly below 1 and ec_numeric insists on
    // a normalized density, so feed it f/mass and undo the shift in closed form:
    // using f = mass * g shifts the rate by exactly -log2(mass)/A.
    const double mass =
        quad::integrate_tail([&](double g) { return mixfit::mog_pdf(model, g); }, 0.0, 0.5)
            .value;
    REQUIRE(mass == doctest::Approx(1.0).epsilon(5e-3));
    for (double a : {0.5, 1.0, 3.0}) {
        const double direct =
            ec_numeric([&](double g) { return mixfit::mog_pdf(model, g) / mass; }, a).value -
            std::log2(mass) / a;
        CHECK(ec_mog(model, a).value == doctest::Approx(direct).epsilon(1e-8));
    }
}

TEST_CASE("Monte Carlo estimator: consistency and standard error") {
    std::mt19937_64 rng(7);
    std::exponential_distribution<double> ed(1.0);
    std::vector<double> snr(1000000);
    for (auto& s : snr) s = ed(rng);

    const auto est = ec_monte_carlo(snr, 1.0);
    REQUIRE(est.std_error.has_value());
    CHECK(*est.std_error > 0.0);
    CHECK(std::fabs(est.value - kExpEc1) <= 3.0 * *est.std_error);

    // the error shrinks like 1/sqrt(n)
    std::vector<double> quarter(snr.begin(), snr.begin() + 250000);
    const auto est_q = ec_monte_carlo(quarter, 1.0);
    CHECK(*est_q.std_error > 1.5 * *est.std_error);

    // ergodic sample path against the density path
    const double erg_mc = ergodic_capacity(snr);
    const double erg = ergodic_capacity(exp_pdf);
    CHECK(std::fabs(erg_mc - erg) <= 3.0 * *est.std_error * 2.0);
}

TEST_CASE("ec_numeric rejects densities that do not integrate to one") {
    CHECK_THROWS_AS(ec_numeric([](double g) { return 0.5 * std::exp(-g); }, 1.0),
                    std::invalid_argument);
}

TEST_CASE("input domain checks") {
    CHECK_THROWS_AS(ec_mg(kExpModel, 0.0), std::domain_error);
    CHECK_THROWS_AS(ec_mg(kExpModel, -1.0), std::domain_error);
    CHECK_THROWS_AS(ec_mog(mixfit::MoGModel{}, 1.0), std::invalid_argument);
    std::vector<double> few(10, 1.0);
    CHECK_THROWS_AS(ec_monte_carlo(few, 1.0), std::invalid_argument);
}
