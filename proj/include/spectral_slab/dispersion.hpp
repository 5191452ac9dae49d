#pragma once

// Two-level (Lorentzian) gain medium and spectral-singularity loci in the
// (lambda, g0) plane, where g0 is the gain coefficient at the line centre.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "optics_core.hpp"
#include "roots.hpp"
#include "singularity_solver.hpp"
#include "transfer_matrix.hpp"

namespace spectral_slab {

struct TwoLevelMedium {
    double n0 = 1.0;
    double lambda0 = 0.0;   ///< resonance wavelength, m
    double gamma_hat = 0.0; ///< damping / resonance frequency
    double g0_max = 0.0;    ///< attainable gain bound, 1/m (metadata)

    void validate() const {
        if (!(n0 >= 1.0)) throw ValidationError("n0 must be >= 1");
        if (!(lambda0 > 0.0)) throw ValidationError("lambda0 must be positive");
        if (!(gamma_hat > 0.0 && gamma_hat < 1.0)) throw ValidationError("gamma_hat must lie in (0, 1)");
    }

    double omega_hat(double lambda) const { return lambda0 / lambda; }
};

/// n^2 = n0^2 - wp^2 / (w^2 - 1 + i gamma w), frequencies in units of the resonance.
inline complex index_squared(double omega_hat, const TwoLevelMedium& medium, double omega_p_hat_sq) {
    if (!(omega_hat > 0.0)) throw ValidationError("omega_hat must be positive");
    const complex denom{omega_hat * omega_hat - 1.0, medium.gamma_hat * omega_hat};
    return medium.n0 * medium.n0 - omega_p_hat_sq / denom;
}

struct PlasmaTerm {
    double omega_p_hat_sq = 0.0;
    bool linearization_dubious = false;  ///< |kappa0| > 1e-2 n0
};

/// Leading-order plasma term for a given line-centre kappa0.
inline PlasmaTerm omega_p_hat_sq_from_kappa0(const TwoLevelMedium& medium, double kappa0) {
    return {2.0 * medium.n0 * medium.gamma_hat * kappa0, std::abs(kappa0) > 1e-2 * medium.n0};
}

struct LineShape {
    double f1 = 0.0;
    double f2 = 0.0;
};

inline LineShape line_shape(double omega_hat, double gamma_hat) {
    const double w2 = omega_hat * omega_hat;
    const double D = (1.0 - w2) * (1.0 - w2) + gamma_hat * gamma_hat * w2;
    return {gamma_hat * (1.0 - w2) / D, gamma_hat * gamma_hat * omega_hat / D};
}

/// (eta, kappa) to first order in kappa0.
inline GainMedium linearized_index(double omega_hat, const TwoLevelMedium& medium, double kappa0) {
    if (!(omega_hat > 0.0)) throw ValidationError("omega_hat must be positive");
    const LineShape f = line_shape(omega_hat, medium.gamma_hat);
    return {medium.n0 + kappa0 * f.f1, kappa0 * f.f2};
}

inline double kappa0_from_g0(const TwoLevelMedium& medium, double g0) {
    return -medium.lambda0 * g0 / (4.0 * constants::pi);
}

inline double g0_from_kappa0(const TwoLevelMedium& medium, double kappa0) {
    return -4.0 * constants::pi * kappa0 / medium.lambda0;
}

enum class IndexModel {
    Linearized,  ///< first order in kappa0
    Full,        ///< principal sqrt of the Lorentzian n^2
};

/// Complex refractive index at wavelength lambda for pump level g0.
inline GainMedium dispersive_index(const TwoLevelMedium& medium, double lambda, double g0,
                                   IndexModel model = IndexModel::Linearized) {
    const double w = medium.omega_hat(lambda);
    const double kappa0 = kappa0_from_g0(medium, g0);
    if (model == IndexModel::Linearized) return linearized_index(w, medium, kappa0);
    const complex n = std::sqrt(index_squared(w, medium, omega_p_hat_sq_from_kappa0(medium, kappa0).omega_p_hat_sq));
    return {n.real(), n.imag()};
}

struct LocusPoint {
    double lambda = 0.0;  ///< m
    double g0 = 0.0;      ///< 1/m
    int m = 0;
    double residual = 0.0;
    double eta = 0.0;
    double kappa = 0.0;
};

struct LocusFailure {
    int m = 0;
    std::string reason;
};

struct Locus {
    std::vector<LocusPoint> points;  ///< sorted by m
    std::vector<LocusFailure> failures;
    std::vector<int> capped;  ///< converged modes dropped by the g0 cap
};

struct LocusOptions {
    std::optional<double> g0_cap;  ///< keep only points with g0 <= cap (1/m)
    IndexModel model = IndexModel::Linearized;
    SolveOptions solve;
};

/// Spectral singularity of mode m with dispersion, unknowns (lambda, g0).
inline LocusPoint solve_locus_point(const TwoLevelMedium& medium, double L, double theta, Polarization pol, int m,
                                    const LocusOptions& opt = {}) {
    medium.validate();
    // Dispersion-free seed at eta = n0, then map the required kappa back to
    // a line-centre g0 through the line shape.
    const SingularityPoint seed = solve_singularity(medium.n0, theta, L, pol, m, opt.solve);
    const double f2 = line_shape(medium.omega_hat(seed.lambda), medium.gamma_hat).f2;
    const double g0_seed = g0_from_kappa0(medium, seed.kappa / f2);

    const complex r_ref = reflection_ratio(seed.medium(), theta, pol);
    const double phi_ref = std::arg(r_ref);
    const double pi = constants::pi;

    auto conditions = [&](const roots::Vec2& x) -> roots::Vec2 {
        const double lambda = x[0];
        const GainMedium med = dispersive_index(medium, lambda, x[1], opt.model);
        const double k = 2.0 * pi / lambda;
        const complex np = n_prime(med, theta);
        const complex r = reflection_ratio(med, theta, pol);
        const double phi = phi_ref + std::arg(r / r_ref);
        return {k * L * np.imag() - std::log(std::abs(r)), k * L * np.real() + phi - pi * m};
    };

    roots::NewtonOptions nopt;
    nopt.max_iterations = opt.solve.max_iterations;
    nopt.scale = {seed.lambda, std::max(std::abs(g0_seed), 1.0)};
    nopt.residual_tolerance = 1e-15 * (1.0 + pi * m);
    const auto sol = roots::newton2d(conditions, {seed.lambda, g0_seed}, nopt,
                                     [](const roots::Vec2& x) { return x[0] > 0.0; });

    LocusPoint p;
    p.lambda = sol.x[0];
    p.g0 = sol.x[1];
    p.m = m;
    const GainMedium med = dispersive_index(medium, p.lambda, p.g0, opt.model);
    p.eta = med.eta;
    p.kappa = med.kappa;
    p.residual = std::abs(singularity_residual(med, WaveSpec::from_wavelength(p.lambda, theta, pol), L));
    if (!(p.residual < opt.solve.residual_tolerance) && !(sol.converged && p.residual < opt.solve.accept_residual))
        throw SolverError(SolverFailure::NoConvergence, "locus residual " + std::to_string(p.residual));
    if (!(p.g0 > 0.0)) throw SolverError(SolverFailure::UnphysicalBranch, "locus point needs g0 <= 0");
    return p;
}

/// Singularity locus over a range of mode numbers. Modes that fail are
/// reported, never interpolated.
inline Locus trace_locus(const TwoLevelMedium& medium, double L, double theta, Polarization pol,
                         const std::vector<int>& modes, const LocusOptions& opt = {}) {
    if (modes.empty()) throw ValidationError("mode range must be nonempty");
    medium.validate();
    Locus locus;
    std::vector<int> sorted = modes;
    std::sort(sorted.begin(), sorted.end());
    for (int m : sorted) {
        try {
            LocusPoint p = solve_locus_point(medium, L, theta, pol, m, opt);
            if (opt.g0_cap && p.g0 > *opt.g0_cap) {
                locus.capped.push_back(m);
                continue;
            }
            locus.points.push_back(p);
        } catch (const std::exception& e) {
            locus.failures.push_back({m, e.what()});
        }
    }
    return locus;
}

/// `count` consecutive modes centred on the mode nearest lambda0.
inline std::vector<int> modes_around_resonance(const TwoLevelMedium& medium, double L, double theta,
                                               Polarization pol, int count) {
    if (count < 1) throw ValidationError("mode count must be positive");
    const int centre = select_mode(medium.n0, theta, L, pol, medium.lambda0, ModeSelection::Nearest);
    std::vector<int> modes;
    const int first = std::max(1, centre - count / 2);
    for (int i = 0; i < count; ++i) modes.push_back(first + i);
    return modes;
}

}  // namespace spectral_slab
