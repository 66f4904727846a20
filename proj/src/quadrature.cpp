// SPDX-License-Identifier: Apache-2.0
#include "effcap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "effcap/error.hpp"

namespace effcap::quad {
namespace {

// QUADPACK dqk15 abscissae/weights (positive half; node 7 is the midpoint).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

// One G7/K15 evaluation; error estimate follows QUADPACK's rescaling.
Panel gk15(const Integrand& f, double a, double b, long& evals, bool& bad) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    evals += 15;

    double resk = kWgk[7] * fv[7];
    double resg = kWg[3] * fv[7];
    double resabs = kWgk[7] * std::fabs(fv[7]);
    for (int i = 0; i < 7; ++i) {
        resk += kWgk[i] * (fv[i] + fv[14 - i]);
        resabs += kWgk[i] * (std::fabs(fv[i]) + std::fabs(fv[14 - i]));
    }
    for (int i = 0; i < 3; ++i) {
        resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    }

    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::fabs(fv[7] - mean);
    for (int i = 0; i < 7; ++i) {
        resasc += kWgk[i] * (std::fabs(fv[i] - mean) + std::fabs(fv[14 - i] - mean));
    }

    double err = std::fabs((resk - resg) * h);
    resasc *= std::fabs(h);
    resabs *= std::fabs(h);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(err, 50.0 * eps * resabs);
    }

    if (!std::isfinite(resk)) bad = true;
    return Panel{a, b, resk * h, err};
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, const Options& opt) {
    Result res;
    if (a == b) {
        res.converged = true;
        return res;
    }

    bool bad = false;
    std::priority_queue<Panel> heap;
    Panel p0 = gk15(f, a, b, res.evals, bad);
    double total = p0.value;
    double toterr = p0.error;
    heap.push(p0);

    const double eps = std::numeric_limits<double>::epsilon();
    int n = 1;
    while (!bad && n < opt.max_intervals) {
        const double tol = std::max(opt.abs_tol, opt.rel_tol * std::fabs(total));
        if (toterr <= tol) break;

        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        // Interval too narrow to split further: keep its error on the books.
        if (!(worst.a < mid && mid < worst.b) ||
            (worst.b - worst.a) <= 4.0 * eps * (std::fabs(worst.a) + std::fabs(worst.b))) {
            heap.push(Panel{worst.a, worst.b, worst.value, 0.0});
            toterr -= worst.error;
            continue;
        }
        Panel l = gk15(f, worst.a, mid, res.evals, bad);
        Panel r = gk15(f, mid, worst.b, res.evals, bad);
        total += l.value + r.value - worst.value;
        toterr += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        ++n;
    }

    res.value = total;
    res.abs_error = toterr;
    res.converged = !bad && std::isfinite(total) &&
                    toterr <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(total));
    return res;
}

double integrate_or_throw(const Integrand& f, double a, double b, const Options& opt,
                          const char* what) {
    Result r = integrate(f, a, b, opt);
    if (!r.converged) {
        throw numerical_error(std::string(what) + ": adaptive quadrature did not converge (value=" +
                              std::to_string(r.value) + ", err=" + std::to_string(r.abs_error) +
                              ", evals=" + std::to_string(r.evals) + ")");
    }
    return r.value;
}

Result integrate_tail(const Integrand& f, double a, double first_width, const Options& opt) {
    Result acc;
    acc.converged = true;
    double lo = a;
    double w = first_width;
    int quiet = 0;
    for (int piece = 0; piece < 64; ++piece) {
        Result r = integrate(f, lo, lo + w, opt);
        acc.value += r.value;
        acc.abs_error += r.abs_error;
        acc.evals += r.evals;
        acc.converged = acc.converged && r.converged;
        const double tol = std::max(opt.abs_tol, opt.rel_tol * std::fabs(acc.value));
        if (std::fabs(r.value) <= tol) {
            if (++quiet >= 2) return acc;
        } else {
            quiet = 0;
        }
        lo += w;
        w *= 2.0;
    }
    acc.converged = false;
    return acc;
}

}  // namespace effcap::quad
