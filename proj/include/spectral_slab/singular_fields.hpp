#pragma once

// Purely outgoing (spectrally singular) TE/TM fields of the slab, their
// time-averaged Poynting vector and energy density.
//
// Inside the slab the z-dependence is carried by
//   U_pm(u, s) = [(u-1)^(1-s) (u+1)^s  +-  (u-1)^s (u+1)^(1-s)] / 2,  s = z/L,
// with principal complex powers. Under z -> L - z, U_pm -> +-U_pm, which
// makes <S> and <u> parity invariant.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "optics_core.hpp"
#include "singularity_solver.hpp"
#include "transfer_matrix.hpp"

namespace spectral_slab {

struct SingularFieldContext {
    SlabScenario scenario;
    SingularityPoint point;
    complex b0{1.0, 0.0};

    static SingularFieldContext from_point(const SingularityPoint& point, complex b0 = {1.0, 0.0},
                                           double max_residual = 1e-8) {
        if (!(point.residual < max_residual))
            throw ValidationError("point does not satisfy the singularity condition");
        return {point.scenario(), point, b0};
    }

    const GainMedium& medium() const { return scenario.medium; }
    double L() const { return scenario.thickness; }
    double theta() const { return point.theta; }
    double k() const { return 2.0 * constants::pi / point.lambda; }
    double kx() const { return k() * std::sin(theta()); }
    double kz() const { return k() * std::cos(theta()); }
    complex n_tilde() const { return spectral_slab::n_tilde(medium(), theta()); }
    /// n~ for TE, n~/n^2 for TM
    complex u(Polarization pol) const { return u_parameter(medium(), theta(), pol); }
};

namespace detail {

inline complex principal_pow(complex base, double s) {
    if (s == 0.0) return {1.0, 0.0};
    if (s == 1.0) return base;
    return std::exp(s * std::log(base));
}

}  // namespace detail

enum class Branch { Plus, Minus };

inline complex u_pm(complex u, double s, Branch sign) {
    if (u == complex{1.0, 0.0} || u == complex{-1.0, 0.0}) throw ValidationError("U+- undefined at u = +-1");
    if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("normalized depth must lie in [0, 1]");
    const complex a = detail::principal_pow(u - 1.0, 1.0 - s) * detail::principal_pow(u + 1.0, s);
    const complex b = detail::principal_pow(u - 1.0, s) * detail::principal_pow(u + 1.0, 1.0 - s);
    return 0.5 * (sign == Branch::Plus ? a + b : a - b);
}

struct Envelope {
    complex f_plus, f_minus, g_plus;
};

/// F+, F-, G+ of the singular fields. Outside the slab all three are the
/// bare outgoing phase, e^{-i kz z} on the left and e^{i kz (z-L)} on the
/// right; in particular F- jumps from 1 to U-(u,0) = -1 at z = 0.
inline Envelope envelope_functions(complex u, complex n_tilde, double z, double kz, double L) {
    const complex i{0.0, 1.0};
    if (z < 0.0) {
        const complex w = std::exp(-i * (kz * z));
        return {w, w, w};
    }
    if (z > L) {
        const complex w = std::exp(i * (kz * (z - L)));
        return {w, w, w};
    }
    const double s = z / L;
    const complex up = u_pm(u, s, Branch::Plus);
    return {up / u, u_pm(u, s, Branch::Minus), up / n_tilde};
}

struct FieldSample {
    double x = 0.0, z = 0.0;
    std::array<complex, 3> E{};
    std::array<complex, 3> H{};
    std::array<double, 3> S{};
    double u = 0.0;
};

/// E and H of the spectrally singular wave at (x, z). S and u are left zero;
/// see poynting() and energy_density().
///
/// On z > L the field is b0 e^{i kz (z-L)}; the exact solution carries an
/// extra (-1)^m there, which drops out of every quadratic quantity.
inline FieldSample singular_fields(const SingularFieldContext& ctx, Polarization pol, double x, double z) {
    const complex i{0.0, 1.0};
    const double s = std::sin(ctx.theta()), c = std::cos(ctx.theta());
    const double Z0 = constants::Z0;
    const complex phase_x = std::exp(i * (ctx.kx() * x));
    Envelope env = envelope_functions(ctx.u(pol), ctx.n_tilde(), z, ctx.kz(), ctx.L());
    // Left of the slab the tangential H (TE) / E (TM) envelope is -e^{-i kz z},
    // matching U-(u, 0) = -1 so the tangential fields stay continuous.
    if (z < 0.0) env.f_minus = -env.f_minus;

    FieldSample out;
    out.x = x;
    out.z = z;
    const complex b = ctx.b0 * phase_x;
    if (pol == Polarization::TE) {
        out.E[1] = b * env.f_plus;
        out.H[0] = -b * c / Z0 * env.f_minus;
        out.H[2] = b * s / Z0 * env.f_plus;
    } else {
        out.E[0] = b * Z0 * c * env.f_minus;
        out.E[2] = -b * Z0 * s * env.g_plus;
        out.H[1] = b * env.f_plus;
    }
    return out;
}

/// Interior coefficient functions X, Z, U of the Poynting vector and energy
/// density (all equal to their outside normalization 1 at the walls except
/// the TM X, which jumps).
struct CoefficientFunctions {
    double X = 0.0;
    double Z = 0.0;
    double U = 0.0;
};

inline CoefficientFunctions coefficient_functions(const SingularFieldContext& ctx, Polarization pol, double z) {
    const double s = z / ctx.L();
    const complex nt = ctx.n_tilde();
    const complex n2 = ctx.medium().index_squared();
    const complex u = ctx.u(pol);
    const complex up = u_pm(u, s, Branch::Plus);
    const complex um = u_pm(u, s, Branch::Minus);
    const double sin2 = std::pow(std::sin(ctx.theta()), 2);
    const double cos2 = std::pow(std::cos(ctx.theta()), 2);
    const double nt_abs2 = std::norm(nt);

    CoefficientFunctions f;
    if (pol == Polarization::TE) {
        f.X = std::norm(up / nt);
        f.Z = (up * std::conj(um) / nt).real();
        f.U = ((n2.real() + sin2) * std::norm(up) + cos2 * std::norm(nt * um)) / (2.0 * nt_abs2);
    } else {
        const double n4 = std::norm(n2);
        f.X = std::norm(up / nt) * n2.real();
        f.Z = (n2 * up * std::conj(um) / nt).real();
        f.U = ((n4 + sin2 * n2.real()) * std::norm(up) + cos2 * n2.real() * std::norm(nt * um)) / (2.0 * nt_abs2);
    }
    return f;
}

/// |<S_out>|: |b0|^2 / (2 Z0) for TE, Z0 |b0|^2 / 2 for TM.
inline double outside_poynting_magnitude(const SingularFieldContext& ctx, Polarization pol) {
    const double b2 = std::norm(ctx.b0);
    return pol == Polarization::TE ? b2 / (2.0 * constants::Z0) : constants::Z0 * b2 / 2.0;
}

/// <u_out>: eps0 |b0|^2 / 2 for TE, mu0 |b0|^2 / 2 for TM.
inline double outside_energy_density(const SingularFieldContext& ctx, Polarization pol) {
    const double b2 = std::norm(ctx.b0);
    return (pol == Polarization::TE ? constants::eps0 : constants::mu0) * b2 / 2.0;
}

/// Time-averaged Poynting vector at depth z from the closed forms.
inline std::array<double, 3> poynting(const SingularFieldContext& ctx, Polarization pol, double z) {
    const double s = std::sin(ctx.theta()), c = std::cos(ctx.theta());
    const double mag = outside_poynting_magnitude(ctx, pol);
    if (z < 0.0) return {mag * s, 0.0, -mag * c};
    if (z > ctx.L()) return {mag * s, 0.0, mag * c};
    const auto f = coefficient_functions(ctx, pol, z);
    return {mag * f.X * s, 0.0, mag * f.Z * c};
}

/// Time-averaged energy density at depth z from the closed forms.
inline double energy_density(const SingularFieldContext& ctx, Polarization pol, double z) {
    const double out = outside_energy_density(ctx, pol);
    if (!ctx.scenario.inside(z)) return out;
    return out * coefficient_functions(ctx, pol, z).U;
}

/// (1/2) Re(E x H*) straight from the field sample.
inline std::array<double, 3> poynting_from_fields(const FieldSample& f) {
    const auto& E = f.E;
    const auto& H = f.H;
    auto cross = [&](int a, int b) { return E[a] * std::conj(H[b]) - E[b] * std::conj(H[a]); };
    return {0.5 * cross(1, 2).real(), 0.5 * cross(2, 0).real(), 0.5 * cross(0, 1).real()};
}

/// (1/4)(eps0 Re(eps_r) |E|^2 + mu0 |H|^2) straight from the field sample.
inline double energy_density_from_fields(const FieldSample& f, complex eps_r) {
    double e2 = 0.0, h2 = 0.0;
    for (int a = 0; a < 3; ++a) {
        e2 += std::norm(f.E[a]);
        h2 += std::norm(f.H[a]);
    }
    return 0.25 * (constants::eps0 * eps_r.real() * e2 + constants::mu0 * h2);
}

/// Angle between <S> and +z, in (-pi, pi].
inline double poynting_angle(const std::array<double, 3>& S) { return std::atan2(S[0], S[2]); }

/// Angle of <S> just inside z = L for TM: arctan(tan(theta) Re(n^2) / |n|^4).
inline double tm_boundary_angle(const GainMedium& medium, double theta) {
    const complex n2 = medium.index_squared();
    return std::atan(std::tan(theta) * n2.real() / std::norm(n2));
}

/// Full field sample (E, H, closed-form S and u) at (x, z).
inline FieldSample sample_fields(const SingularFieldContext& ctx, Polarization pol, double x, double z) {
    FieldSample f = singular_fields(ctx, pol, x, z);
    f.S = poynting(ctx, pol, z);
    f.u = energy_density(ctx, pol, z);
    return f;
}

struct ParityReport {
    double x_asymmetry = 0.0;  ///< max |X(z) - X(L-z)|
    double z_asymmetry = 0.0;  ///< max |Z(z) + Z(L-z)|
    double u_asymmetry = 0.0;  ///< max |U(z) - U(L-z)|
    double x_scale = 0.0, z_scale = 0.0, u_scale = 0.0;  ///< max |X|, |Z|, |U| on the grid

    double max_relative() const {
        auto rel = [](double d, double s) { return s > 0.0 ? d / s : d; };
        return std::max({rel(x_asymmetry, x_scale), rel(z_asymmetry, z_scale), rel(u_asymmetry, u_scale)});
    }
};

inline ParityReport parity_report(const SingularFieldContext& ctx, Polarization pol, const std::vector<double>& z_grid) {
    ParityReport rep;
    const double L = ctx.L();
    for (double z : z_grid) {
        if (!(z >= 0.0 && z <= L)) throw ValidationError("parity grid must lie within [0, L]");
        const auto a = coefficient_functions(ctx, pol, z);
        const auto b = coefficient_functions(ctx, pol, std::clamp(L - z, 0.0, L));
        rep.x_asymmetry = std::max(rep.x_asymmetry, std::abs(a.X - b.X));
        rep.z_asymmetry = std::max(rep.z_asymmetry, std::abs(a.Z + b.Z));
        rep.u_asymmetry = std::max(rep.u_asymmetry, std::abs(a.U - b.U));
        rep.x_scale = std::max(rep.x_scale, std::abs(a.X));
        rep.z_scale = std::max(rep.z_scale, std::abs(a.Z));
        rep.u_scale = std::max(rep.u_scale, std::abs(a.U));
    }
    return rep;
}

/// n evenly spaced points on [a, b], endpoints included.
inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

/// 2001 points over [-L/2, 3L/2]. Built from z/L so that 0 and L are hit exactly.
inline std::vector<double> default_field_grid(double L) {
    std::vector<double> z = linspace(-0.5, 1.5, 2001);
    for (double& v : z) v *= L;
    return z;
}

}  // namespace spectral_slab
