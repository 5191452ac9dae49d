#pragma once

// Spectral singularities of the slab (real k with M22 = 0) and the lasing
// threshold quantities derived from them.
//
// The singularity condition is exp(-2i k~ L) = r^2 with r = (u-1)/(u+1).
// Taking logarithms splits it into
//   modulus:  k L Im(n') = ln|r|
//   phase:    k L Re(n') = pi m - phi,   phi = arg r in (-pi, pi]
// so for a given wavelength the modulus condition fixes kappa (and hence
// g = -2 k kappa), and the phase condition picks the discrete wavelengths.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "optics_core.hpp"
#include "roots.hpp"
#include "transfer_matrix.hpp"

namespace spectral_slab {

struct SingularityPoint {
    double eta = 0.0;
    double lambda = 0.0;  ///< m
    double kappa = 0.0;
    double g = 0.0;  ///< 1/m, equals -4 pi kappa / lambda
    int m = 0;
    double theta = 0.0;  ///< rad
    Polarization pol = Polarization::TE;
    double thickness = 0.0;
    double residual = 0.0;  ///< |exp(-2i k~ L) - r^2|
    double m22_abs = 0.0;   ///< |M22| from the transfer matrix
    double m22_scale = 1.0; ///< max(|M11|, |M12|, |M21|, 1)
    int iterations = 0;

    GainMedium medium() const { return {eta, kappa}; }
    WaveSpec wave() const { return WaveSpec::from_wavelength(lambda, theta, pol); }
    SlabScenario scenario() const { return {thickness, medium()}; }
};

inline double gain_from_kappa(double kappa, double lambda) { return -4.0 * constants::pi * kappa / lambda; }
inline double kappa_from_gain(double g, double lambda) { return -g * lambda / (4.0 * constants::pi); }

/// exp(-2i k~ L) - ((u-1)/(u+1))^2
inline complex singularity_residual(const GainMedium& medium, const WaveSpec& wave, double L) {
    const complex i{0.0, 1.0};
    const complex u = u_parameter(medium, wave.theta, wave.pol);
    const complex r = (u - 1.0) / (u + 1.0);
    return std::exp(-2.0 * i * k_tilde(medium, wave) * L) - r * r;
}

namespace detail {

inline void require_eta_above_one(double eta) {
    if (!(eta > 1.0) || !std::isfinite(eta)) throw ValidationError("eta must exceed 1");
}

inline void require_thickness(double L) {
    if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("slab thickness must be positive");
}

/// k L Im(n') - ln|r| as a function of kappa at fixed k.
inline double modulus_condition(double eta, double kappa, double theta, double L, double k, Polarization pol) {
    const GainMedium med{eta, kappa};
    return k * L * n_prime(med, theta).imag() - std::log(std::abs(reflection_ratio(med, theta, pol)));
}

}  // namespace detail

struct ThresholdGain {
    double kappa = 0.0;
    double g = 0.0;  ///< 1/m
    bool bracket_widened = false;
};

/// Gain needed for a singularity at `target_lambda` (modulus condition only).
inline ThresholdGain threshold_gain_exact(double eta, double theta, double L, double target_lambda,
                                          Polarization pol) {
    detail::require_eta_above_one(eta);
    detail::require_thickness(L);
    validate_angle(theta);
    if (!(target_lambda > 0.0)) throw ValidationError("wavelength must be positive");

    const double k = 2.0 * constants::pi / target_lambda;
    auto f = [&](double kappa) { return detail::modulus_condition(eta, kappa, theta, L, k, pol); };

    constexpr double hi = -1e-12;
    ThresholdGain out;
    for (double lo : {-0.1, -1.0, -10.0}) {
        if (auto root = roots::bracketed_root(f, lo, hi)) {
            out.kappa = *root;
            out.g = gain_from_kappa(out.kappa, target_lambda);
            return out;
        }
        out.bracket_widened = true;
    }
    throw SolverError(SolverFailure::NoGainSolution, "no sign change of the modulus condition for kappa in [-10, 0)");
}

/// Closed-form threshold gain at a given kappa: -2 kappa ln|r| / (L Im n').
inline double threshold_gain_closed_form(const GainMedium& medium, double theta, double L, Polarization pol) {
    detail::require_thickness(L);
    validate_angle(theta);
    if (medium.kappa == 0.0) throw ValidationError("closed-form threshold needs kappa != 0");
    const double im_np = n_prime(medium, theta).imag();
    return -2.0 * medium.kappa * std::log(std::abs(reflection_ratio(medium, theta, pol))) / (L * im_np);
}

inline double brewster_angle(double eta) {
    if (!(eta > 0.0)) throw ValidationError("eta must be positive");
    return std::atan(eta);
}

/// Leading order in kappa of the threshold gain; kappa-independent.
inline double threshold_gain_approx(double eta, double theta, double L, Polarization pol,
                                    double brewster_guard = deg_to_rad(0.1)) {
    detail::require_eta_above_one(eta);
    detail::require_thickness(L);
    validate_angle(theta);
    const double s = std::sin(theta), c = std::cos(theta);
    const double eta_p = std::sqrt(eta * eta - s * s);
    if (pol == Polarization::TE)
        return 4.0 * eta_p / (L * eta) * std::log(std::abs(eta_p + c) / std::sqrt(eta * eta - 1.0));

    if (std::abs(std::abs(theta) - brewster_angle(eta)) < brewster_guard)
        throw SolverError(SolverFailure::ApproximationSingular, "TM leading-order gain diverges at Brewster's angle");
    const double e2c = eta * eta * c;
    return 2.0 * eta_p / (L * eta) * std::log(std::abs((eta_p + e2c) / (eta_p - e2c)));
}

/// Wavelength of mode m from the phase condition, phi the principal argument of r.
inline double ss_wavelength(double eta, double kappa, double theta, double L, int m, Polarization pol) {
    detail::require_thickness(L);
    validate_angle(theta);
    if (m < 1) throw SolverError(SolverFailure::InvalidMode, "mode number must be >= 1");
    const GainMedium med{eta, kappa};
    const double phi = std::arg(reflection_ratio(med, theta, pol));
    const double denom = constants::pi * m - phi;
    if (!(denom > 0.0)) throw SolverError(SolverFailure::InvalidMode, "pi m - phi must be positive");
    return 2.0 * constants::pi * L * n_prime(med, theta).real() / denom;
}

/// First order in kappa of the mode wavelength.
inline double ss_wavelength_approx(double eta, double kappa, double theta, double L, int m, Polarization pol) {
    detail::require_eta_above_one(eta);
    detail::require_thickness(L);
    validate_angle(theta);
    if (m < 1) throw SolverError(SolverFailure::InvalidMode, "mode number must be >= 1");
    const double pi = constants::pi;
    const double s = std::sin(theta), c = std::cos(theta);
    const double lead = std::sqrt(1.0 - s * s / (eta * eta));
    const double e2m1 = eta * eta - 1.0;
    double correction;
    if (pol == Polarization::TE) {
        correction = 2.0 * kappa * c / (pi * m * e2m1);
    } else {
        const double c2 = std::cos(2.0 * theta);
        correction = 4.0 * kappa * c * (e2m1 + c2) / (pi * m * e2m1 * (e2m1 + (eta * eta + 1.0) * c2));
    }
    return 2.0 * L * eta / m * (lead + correction);
}

enum class ModeSelection {
    AtOrAbove,  ///< largest m whose wavelength is >= target (shortest such wavelength)
    Nearest,    ///< m minimizing |lambda(m) - target|
};

/// Mode number for a target wavelength, predicted by the phase condition at
/// the threshold kappa of the target.
inline int select_mode(double eta, double theta, double L, Polarization pol, double target_lambda,
                       ModeSelection rule = ModeSelection::AtOrAbove) {
    const ThresholdGain th = threshold_gain_exact(eta, theta, L, target_lambda, pol);
    const GainMedium med{eta, th.kappa};
    const double phi = std::arg(reflection_ratio(med, theta, pol));
    const double m_cont = 2.0 * L * n_prime(med, theta).real() / target_lambda + phi / constants::pi;
    int m = static_cast<int>(std::floor(m_cont));
    if (rule == ModeSelection::Nearest) {
        auto lam = [&](int mm) { return ss_wavelength(eta, th.kappa, theta, L, mm, pol); };
        if (m < 1 || (std::abs(lam(m + 1) - target_lambda) < std::abs(lam(m) - target_lambda))) ++m;
    }
    if (m < 1 || constants::pi * m - phi <= 0.0)
        throw SolverError(SolverFailure::InvalidMode, "target wavelength too long for any mode of this slab");
    return m;
}

struct SolveOptions {
    int max_iterations = 50;
    double residual_tolerance = 1e-12;
    double accept_residual = 1e-10;  ///< stalled iterations below this still count as converged
};

namespace detail {

/// Damped Newton on (modulus, phase) conditions in unknowns (lambda, kappa)
/// with m held fixed. phi is unwrapped relative to the seed.
inline SingularityPoint polish_singularity(double eta, double theta, double L, Polarization pol, int m,
                                           double lambda_seed, double kappa_seed, const SolveOptions& opt) {
    const complex r_ref = reflection_ratio({eta, kappa_seed}, theta, pol);
    const double phi_ref = std::arg(r_ref);
    const double pi = constants::pi;

    auto conditions = [&](const roots::Vec2& x) -> roots::Vec2 {
        const double lambda = x[0], kappa = x[1];
        const GainMedium med{eta, kappa};
        const double k = 2.0 * pi / lambda;
        const complex np = n_prime(med, theta);
        const complex r = reflection_ratio(med, theta, pol);
        const double phi = phi_ref + std::arg(r / r_ref);
        return {k * L * np.imag() - std::log(std::abs(r)), k * L * np.real() + phi - pi * m};
    };

    roots::NewtonOptions nopt;
    nopt.max_iterations = opt.max_iterations;
    nopt.scale = {lambda_seed, std::max(std::abs(kappa_seed), 1e-12)};
    nopt.residual_tolerance = 1e-15 * (1.0 + pi * m);
    const auto sol = roots::newton2d(conditions, {lambda_seed, kappa_seed}, nopt,
                                     [](const roots::Vec2& x) { return x[0] > 0.0; });

    SingularityPoint p;
    p.eta = eta;
    p.lambda = sol.x[0];
    p.kappa = sol.x[1];
    p.g = gain_from_kappa(p.kappa, p.lambda);
    p.m = m;
    p.theta = theta;
    p.pol = pol;
    p.thickness = L;
    p.iterations = sol.iterations;

    const WaveSpec wave = WaveSpec::from_wavelength(p.lambda, theta, pol);
    p.residual = std::abs(singularity_residual(p.medium(), wave, L));
    const TransferMatrix M = build_transfer_matrix(p.scenario(), wave);
    p.m22_abs = std::abs(M.m22);
    p.m22_scale = M.scale();

    if (!(p.residual < opt.residual_tolerance) && !(sol.converged && p.residual < opt.accept_residual))
        throw SolverError(SolverFailure::NoConvergence,
                          "residual " + std::to_string(p.residual) + " after " + std::to_string(sol.iterations) +
                              " iterations (m = " + std::to_string(m) + ")");
    return p;
}

}  // namespace detail

/// Spectral singularity of mode m: the real wavelength and kappa at which
/// M22 vanishes.
inline SingularityPoint solve_singularity(double eta, double theta, double L, Polarization pol, int m,
                                          const SolveOptions& opt = {}) {
    detail::require_eta_above_one(eta);
    detail::require_thickness(L);
    validate_angle(theta);
    if (m < 1) throw SolverError(SolverFailure::InvalidMode, "mode number must be >= 1");

    // Seed: kappa = 0 mode wavelength, then alternate the two closed-form
    // conditions; they are only weakly coupled.
    const double eta_p = std::sqrt(eta * eta - std::sin(theta) * std::sin(theta));
    double lambda = 2.0 * L * eta_p / m;
    double kappa = threshold_gain_exact(eta, theta, L, lambda, pol).kappa;
    for (int pass = 0; pass < 3; ++pass) {
        lambda = ss_wavelength(eta, kappa, theta, L, m, pol);
        kappa = threshold_gain_exact(eta, theta, L, lambda, pol).kappa;
    }

    SingularityPoint p = detail::polish_singularity(eta, theta, L, pol, m, lambda, kappa, opt);
    if (p.kappa > 0.0) throw SolverError(SolverFailure::UnphysicalBranch, "solved kappa is positive (loss)");
    return p;
}

inline SingularityPoint solve_singularity_near(double eta, double theta, double L, Polarization pol,
                                               double target_lambda, ModeSelection rule = ModeSelection::AtOrAbove,
                                               const SolveOptions& opt = {}) {
    return solve_singularity(eta, theta, L, pol, select_mode(eta, theta, L, pol, target_lambda, rule), opt);
}

struct CriticalAngle {
    double theta_c = 0.0;  ///< rad
    double g_max = 0.0;    ///< 1/m
};

/// Angle maximizing the TM threshold gain at a fixed wavelength.
inline CriticalAngle critical_angle(double eta, double L, double target_lambda, double scan_step = deg_to_rad(0.1),
                                    double tolerance = deg_to_rad(1e-6)) {
    detail::require_eta_above_one(eta);
    auto g_tm = [&](double th) { return threshold_gain_exact(eta, th, L, target_lambda, Polarization::TM).g; };

    const double limit = constants::pi / 2;
    std::vector<double> thetas, gains;
    for (int i = 1; i * scan_step < limit; ++i) {
        thetas.push_back(i * scan_step);
        gains.push_back(g_tm(thetas.back()));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < gains.size(); ++i)
        if (gains[i] > gains[best]) best = i;
    if (best == 0 || best + 1 >= gains.size())
        throw SolverError(SolverFailure::NoInteriorMaximum, "TM threshold gain has no interior maximum on the scan");

    const auto peak = roots::golden_section_max(g_tm, thetas[best - 1], thetas[best + 1], tolerance);
    return {peak.x, peak.value};
}

struct ThresholdSample {
    double theta = 0.0;
    double g = std::nan("");
    double lambda = 0.0;
    double kappa = std::nan("");
    bool valid = false;
    std::string error;
};

struct ThresholdCurve {
    Polarization pol = Polarization::TE;
    double eta = 0.0, thickness = 0.0, lambda = 0.0;
    std::vector<ThresholdSample> samples;
    double theta_b = 0.0;
    std::optional<CriticalAngle> critical;
};

/// Fixed-wavelength threshold gain over an angle grid. Failed points are
/// kept as invalid samples.
inline ThresholdCurve threshold_curve(double eta, double L, double target_lambda, Polarization pol,
                                      const std::vector<double>& theta_grid, bool annotate_critical = true) {
    detail::require_eta_above_one(eta);
    detail::require_thickness(L);
    ThresholdCurve curve;
    curve.pol = pol;
    curve.eta = eta;
    curve.thickness = L;
    curve.lambda = target_lambda;
    curve.theta_b = brewster_angle(eta);
    curve.samples.reserve(theta_grid.size());
    for (double th : theta_grid) {
        ThresholdSample s;
        s.theta = th;
        s.lambda = target_lambda;
        try {
            const auto t = threshold_gain_exact(eta, th, L, target_lambda, pol);
            s.g = t.g;
            s.kappa = t.kappa;
            s.valid = true;
        } catch (const std::exception& e) {
            s.error = e.what();
        }
        curve.samples.push_back(std::move(s));
    }
    if (annotate_critical) {
        try {
            curve.critical = critical_angle(eta, L, target_lambda);
        } catch (const SolverError&) {
        }
    }
    return curve;
}

inline bool is_strictly_decreasing(const ThresholdCurve& curve) {
    for (std::size_t i = 1; i < curve.samples.size(); ++i) {
        const auto& a = curve.samples[i - 1];
        const auto& b = curve.samples[i];
        if (!a.valid || !b.valid || !(b.g < a.g)) return false;
    }
    return true;
}

inline int count_interior_local_maxima(const ThresholdCurve& curve) {
    int count = 0;
    for (std::size_t i = 1; i + 1 < curve.samples.size(); ++i) {
        const auto& s = curve.samples;
        if (s[i - 1].valid && s[i].valid && s[i + 1].valid && s[i].g > s[i - 1].g && s[i].g > s[i + 1].g) ++count;
    }
    return count;
}

}  // namespace spectral_slab
