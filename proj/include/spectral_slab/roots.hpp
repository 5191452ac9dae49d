#pragma once

// Small numerical kernels shared by the solvers.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace spectral_slab::roots {

/// Root of f on [lo, hi], which must bracket a sign change. Returns nullopt
/// otherwise. Converges to full double precision.
template <class F>
std::optional<double> bracketed_root(F&& f, double lo, double hi, std::uintmax_t max_iter = 200) {
    const double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) == std::signbit(fhi)) return std::nullopt;
    boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 2);
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
    return 0.5 * (a + b);
}

struct Extremum {
    double x;
    double value;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
template <class F>
Extremum golden_section_max(F&& f, double lo, double hi, double x_tolerance) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > x_tolerance) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

using Vec2 = std::array<double, 2>;

struct NewtonOptions {
    int max_iterations = 50;
    double relative_step = 1e-7;  ///< central-difference step, relative to |x_i| (or scale_i)
    Vec2 scale{1.0, 1.0};         ///< typical magnitude of each unknown
    double residual_tolerance = 1e-12;
    double step_tolerance = 1e-15;  ///< relative to scale
};

struct NewtonResult {
    Vec2 x;
    Vec2 f;
    int iterations = 0;
    bool converged = false;
};

inline double norm(const Vec2& v) { return std::hypot(v[0], v[1]); }

/// Damped Newton for F: R^2 -> R^2 with a central-difference Jacobian.
/// `accept` may reject trial points (e.g. outside the physical domain);
/// rejected points are treated like a residual increase and the step halved.
template <class F, class Accept>
NewtonResult newton2d(F&& fn, Vec2 x, const NewtonOptions& opt, Accept&& accept) {
    NewtonResult res;
    Vec2 f = fn(x);
    for (int it = 0; it < opt.max_iterations; ++it) {
        res.iterations = it;
        if (norm(f) < opt.residual_tolerance) {
            res.converged = true;
            break;
        }
        std::array<Vec2, 2> J{};  // J[i][j] = dF_i / dx_j
        for (int j = 0; j < 2; ++j) {
            const double h = opt.relative_step * std::max(std::abs(x[j]), opt.scale[j]);
            Vec2 xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const Vec2 fp = fn(xp), fm = fn(xm);
            J[0][j] = (fp[0] - fm[0]) / (xp[j] - xm[j]);
            J[1][j] = (fp[1] - fm[1]) / (xp[j] - xm[j]);
        }
        const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (det == 0.0 || !std::isfinite(det)) break;
        const Vec2 dx{-(J[1][1] * f[0] - J[0][1] * f[1]) / det, -(-J[1][0] * f[0] + J[0][0] * f[1]) / det};

        double t = 1.0;
        Vec2 xn{}, fn_val{};
        bool improved = false;
        for (int k = 0; k < 30; ++k, t *= 0.5) {
            xn = {x[0] + t * dx[0], x[1] + t * dx[1]};
            if (!accept(xn)) continue;
            fn_val = fn(xn);
            if (std::isfinite(fn_val[0]) && std::isfinite(fn_val[1]) && norm(fn_val) < norm(f)) {
                improved = true;
                break;
            }
        }
        const double rel_step = std::max(std::abs(dx[0]) / opt.scale[0], std::abs(dx[1]) / opt.scale[1]);
        if (!improved) {
            // Stalled at the rounding floor of the residual.
            res.converged = rel_step < 1e3 * opt.step_tolerance;
            break;
        }
        x = xn;
        f = fn_val;
        if (t * rel_step < opt.step_tolerance) {
            res.converged = true;
            res.iterations = it + 1;
            break;
        }
        res.iterations = it + 1;
    }
    if (norm(f) < opt.residual_tolerance) res.converged = true;
    res.x = x;
    res.f = f;
    return res;
}

template <class F>
NewtonResult newton2d(F&& fn, Vec2 x, const NewtonOptions& opt) {
    return newton2d(std::forward<F>(fn), x, opt, [](const Vec2&) { return true; });
}

}  // namespace spectral_slab::roots
