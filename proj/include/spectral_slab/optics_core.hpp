#pragma once

// Physical constants, the slab/medium/wave value types, and the derived
// quantities n' = sqrt(n^2 - sin^2 theta), u and k~ used by every solver.
//
// Conventions: SI units internally (metres, rad/m, 1/m), angles in radians.
// kappa = Im(n) < 0 is gain, kappa > 0 is loss. Square roots and logs are
// principal-branch.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace spectral_slab {

using complex = std::complex<double>;

namespace constants {
inline constexpr double c = 299792458.0;              // m/s
inline constexpr double mu0 = 1.25663706212e-6;       // N/A^2 (CODATA 2018)
inline constexpr double eps0 = 8.8541878128e-12;      // F/m  (CODATA 2018)
inline const double Z0 = std::sqrt(mu0 / eps0);       // ohm
inline constexpr double pi = std::numbers::pi;
}  // namespace constants

inline constexpr double deg_to_rad(double deg) { return deg * constants::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / constants::pi; }

enum class Polarization { TE, TM };

inline std::string_view to_string(Polarization pol) { return pol == Polarization::TE ? "TE" : "TM"; }

inline Polarization parse_polarization(std::string_view text) {
    if (text == "TE" || text == "te") return Polarization::TE;
    if (text == "TM" || text == "tm") return Polarization::TM;
    throw ValidationError("polarization must be TE or TM, got '" + std::string(text) + "'");
}

/// Exponent of n in the singularity condition: 0 for TE, 2 for TM.
inline int ell(Polarization pol) { return pol == Polarization::TE ? 0 : 2; }

struct GainMedium {
    double eta = 1.0;    ///< Re(n)
    double kappa = 0.0;  ///< Im(n); negative means gain

    complex index() const { return {eta, kappa}; }
    complex index_squared() const { return index() * index(); }

    void validate() const {
        if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("eta must be positive and finite");
        if (!std::isfinite(kappa)) throw ValidationError("kappa must be finite");
    }
};

struct SlabScenario {
    double thickness = 0.0;  ///< L in metres
    GainMedium medium;

    void validate() const {
        if (!(thickness > 0.0) || !std::isfinite(thickness))
            throw ValidationError("slab thickness must be positive and finite");
        medium.validate();
    }

    /// Relative permittivity profile: n^2 on [0, L], 1 elsewhere.
    complex index_profile(double z) const {
        return (z >= 0.0 && z <= thickness) ? medium.index_squared() : complex{1.0, 0.0};
    }

    bool inside(double z) const { return z >= 0.0 && z <= thickness; }
};

inline void validate_angle(double theta) {
    if (!std::isfinite(theta) || !(std::abs(theta) < constants::pi / 2))
        throw ValidationError("incidence angle must satisfy |theta| < 90 deg");
}

struct WaveSpec {
    double k = 0.0;      ///< vacuum wavenumber, rad/m
    double theta = 0.0;  ///< incidence angle, rad
    Polarization pol = Polarization::TE;

    static WaveSpec from_wavelength(double lambda, double theta, Polarization pol) {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("wavelength must be positive");
        return {2.0 * constants::pi / lambda, theta, pol};
    }

    double wavelength() const { return 2.0 * constants::pi / k; }
    double kx() const { return k * std::sin(theta); }
    double kz() const { return k * std::cos(theta); }

    void validate() const {
        if (!(k > 0.0) || !std::isfinite(k)) throw ValidationError("wavenumber must be positive and finite");
        validate_angle(theta);
    }
};

/// Principal square root of n^2 - sin^2(theta); Re >= 0.
inline complex n_prime(const GainMedium& medium, double theta) {
    const double s = std::sin(theta);
    return std::sqrt(medium.index_squared() - s * s);
}

/// n~ = n' / cos(theta).
inline complex n_tilde(const GainMedium& medium, double theta) {
    validate_angle(theta);
    return n_prime(medium, theta) / std::cos(theta);
}

/// u = n~ for TE and n~ / n^2 for TM; the only place polarization enters
/// the transfer matrix.
inline complex u_parameter(const GainMedium& medium, double theta, Polarization pol) {
    const complex nt = n_tilde(medium, theta);
    return pol == Polarization::TE ? nt : nt / medium.index_squared();
}

/// Interior wavenumber k~ = k n'.
inline complex k_tilde(const GainMedium& medium, const WaveSpec& wave) { return wave.k * n_prime(medium, wave.theta); }

/// (n' - n^l cos) / (n' + n^l cos), equal to (u - 1)/(u + 1).
inline complex reflection_ratio(const GainMedium& medium, double theta, Polarization pol) {
    const complex np = n_prime(medium, theta);
    const complex nl = pol == Polarization::TE ? complex{1.0, 0.0} : medium.index_squared();
    const double c = std::cos(theta);
    return (np - nl * c) / (np + nl * c);
}

}  // namespace spectral_slab
