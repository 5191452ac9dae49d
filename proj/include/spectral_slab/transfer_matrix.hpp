#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "optics_core.hpp"

namespace spectral_slab {

/// Maps the left amplitudes (a0, b0) to the right ones (a2, b2).
struct TransferMatrix {
    complex m11, m12, m21, m22;

    complex det() const { return m11 * m22 - m12 * m21; }

    /// max(|m11|, |m12|, |m21|, 1)
    double scale() const { return std::max({std::abs(m11), std::abs(m12), std::abs(m21), 1.0}); }

    /// |det M - 1| relative to the rounding scale of the products, (max |M_ij|)^2.
    /// Each entry carries rounding of order eps times its largest term, so near a
    /// zero of M22 the product M11*M22 alone understates the attainable accuracy.
    double det_relative_error() const {
        const double s = std::max(scale(), std::abs(m22));
        return std::abs(det() - 1.0) / (s * s);
    }
};

struct ScatteringAmplitudes {
    complex r_left, r_right, t_left, t_right;
};

/// a_i, b_i of the piecewise plane-wave solution (0: z < 0, 1: slab, 2: z > L).
struct CoefficientSet {
    complex a0, b0, a1, b1, a2, b2;
};

struct FieldVector {
    std::array<complex, 3> E;  ///< V/m, (x, y, z)
    std::array<complex, 3> H;  ///< A/m, (x, y, z)
};

inline constexpr double kDefaultSingularTolerance = 1e-12;
// cos/sin of k~L grow like e^|Im k~L|/2; products of two entries (det, |M22|^2
// checks) must stay finite, so the bound is well under half of ln(DBL_MAX).
inline constexpr double kMaxGrowthExponent = 300.0;

inline void guard_growth(complex kt_L) {
    if (std::abs(kt_L.imag()) > kMaxGrowthExponent)
        throw ValidationError("|Im(k~ L)| exceeds 300; products of transfer-matrix entries overflow double precision");
}

inline TransferMatrix build_transfer_matrix(const SlabScenario& scenario, const WaveSpec& wave) {
    scenario.validate();
    wave.validate();
    const double L = scenario.thickness;
    const complex u = u_parameter(scenario.medium, wave.theta, wave.pol);
    const complex ktL = k_tilde(scenario.medium, wave) * L;
    guard_growth(ktL);

    const complex i{0.0, 1.0};
    const complex cos_kt = std::cos(ktL);
    const complex sin_kt = std::sin(ktL);
    const complex sum = 0.5 * (u + 1.0 / u);
    const complex diff = 0.5 * (u - 1.0 / u);
    const complex ph_minus = std::exp(-i * (wave.kz() * L));
    const complex ph_plus = std::exp(i * (wave.kz() * L));

    return {
        (cos_kt + i * sum * sin_kt) * ph_minus,
        i * diff * sin_kt * ph_minus,
        -i * diff * sin_kt * ph_plus,
        (cos_kt - i * sum * sin_kt) * ph_plus,
    };
}

inline bool is_near_singular(const TransferMatrix& M, double tolerance = kDefaultSingularTolerance) {
    return std::abs(M.m22) < tolerance * M.scale();
}

inline ScatteringAmplitudes scattering_amplitudes(const TransferMatrix& M,
                                                  double tolerance = kDefaultSingularTolerance) {
    if (is_near_singular(M, tolerance))
        throw SpectralSingularityError("at spectral singularity: |M22| below tolerance");
    return {-M.m21 / M.m22, M.m12 / M.m22, M.det() / M.m22, 1.0 / M.m22};
}

/// Solves the boundary conditions for the incoming amplitudes (a0 from the
/// left, b2 from the right) and returns all six coefficients.
inline CoefficientSet propagate_coefficients(const SlabScenario& scenario, const WaveSpec& wave, complex a0,
                                             complex b2, double tolerance = kDefaultSingularTolerance) {
    const TransferMatrix M = build_transfer_matrix(scenario, wave);
    if (is_near_singular(M, tolerance))
        throw SpectralSingularityError("at spectral singularity: boundary-value system is singular");

    CoefficientSet c{};
    c.a0 = a0;
    c.b2 = b2;
    c.b0 = (b2 - M.m21 * a0) / M.m22;
    c.a2 = M.m11 * a0 + M.m12 * c.b0;

    // z = 0: a0 + b0 = a1 + b1 and b0 - a0 = u (b1 - a1)
    const complex u = u_parameter(scenario.medium, wave.theta, wave.pol);
    const complex sum = c.a0 + c.b0;
    const complex diff = (c.b0 - c.a0) / u;
    c.b1 = 0.5 * (sum + diff);
    c.a1 = 0.5 * (sum - diff);
    return c;
}

/// Residuals of the four interface conditions, each relative to the size of
/// the terms it balances.
inline std::array<double, 4> boundary_residuals(const SlabScenario& scenario, const WaveSpec& wave,
                                                const CoefficientSet& c) {
    const complex i{0.0, 1.0};
    const double L = scenario.thickness;
    const complex u = u_parameter(scenario.medium, wave.theta, wave.pol);
    const complex ktL = k_tilde(scenario.medium, wave) * L;
    const complex ep = std::exp(i * ktL), em = std::exp(-i * ktL);
    const complex zp = std::exp(i * (wave.kz() * L)), zm = std::exp(-i * (wave.kz() * L));

    auto rel = [](complex lhs, complex rhs, double ref) {
        return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), ref, 1e-300});
    };
    const double ref0 = std::max({std::abs(c.a0), std::abs(c.b0), std::abs(c.a1), std::abs(c.b1)});
    const double refL = std::max({std::abs(c.a1 * ep), std::abs(c.b1 * em), std::abs(c.a2), std::abs(c.b2)});
    return {
        rel(c.a0 + c.b0, c.a1 + c.b1, ref0),
        rel(c.b0 - c.a0, u * (c.b1 - c.a1), ref0),
        rel(c.a1 * ep + c.b1 * em, c.a2 * zp + c.b2 * zm, refL),
        rel(u * (c.a1 * ep - c.b1 * em), c.a2 * zp - c.b2 * zm, refL),
    };
}

/// Full complex E and H at (x, z) for a field built from the coefficients.
inline FieldVector general_fields(const SlabScenario& scenario, const WaveSpec& wave, const CoefficientSet& c,
                                  double x, double z) {
    const complex i{0.0, 1.0};
    const GainMedium& medium = scenario.medium;
    const double s = std::sin(wave.theta), co = std::cos(wave.theta);
    const double kz = wave.kz();
    const complex phase_x = std::exp(i * (wave.kx() * x));
    const double Z0 = constants::Z0;

    complex psi, F, T;
    if (z < 0.0) {
        psi = c.a0 * std::exp(i * (kz * z)) + c.b0 * std::exp(-i * (kz * z));
        F = c.a0 * std::exp(i * (kz * z)) - c.b0 * std::exp(-i * (kz * z));
        T = co * phase_x;
    } else if (z <= scenario.thickness) {
        const complex kt = k_tilde(medium, wave);
        psi = c.a1 * std::exp(i * kt * z) + c.b1 * std::exp(-i * kt * z);
        F = c.a1 * std::exp(i * kt * z) - c.b1 * std::exp(-i * kt * z);
        T = n_prime(medium, wave.theta) * phase_x;
    } else {
        psi = c.a2 * std::exp(i * (kz * z)) + c.b2 * std::exp(-i * (kz * z));
        F = c.a2 * std::exp(i * (kz * z)) - c.b2 * std::exp(-i * (kz * z));
        T = co * phase_x;
    }

    FieldVector out{};
    if (wave.pol == Polarization::TE) {
        out.E[1] = psi * phase_x;
        out.H[0] = -F * T / Z0;
        out.H[2] = s * phase_x * psi / Z0;
    } else {
        const complex eps_r = scenario.index_profile(z);
        out.H[1] = psi * phase_x;
        out.E[0] = Z0 * F * T / eps_r;
        out.E[2] = -Z0 * s * phase_x * psi / eps_r;
    }
    return out;
}

}  // namespace spectral_slab
