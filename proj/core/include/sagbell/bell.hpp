#pragma once

#include <array>
#include <complex>
#include <vector>

#include "sagbell/elements.hpp"
#include "sagbell/fock.hpp"

namespace sagbell {

using Vec3 = std::array<double, 3>;

/// Post-selected two-photon polarization state in the basis |xy> with
/// x = Alice's polarization, y = Bob's, and H mapped to qubit basis state 0
/// on both sides. For states produced by this protocol amp_hh = amp_vv = 0.
struct TwoQubitState {
    Complex amp_hv{0.0, 0.0};
    Complex amp_vh{0.0, 0.0};
    Complex amp_hh{0.0, 0.0};
    Complex amp_vv{0.0, 0.0};

    double squared_norm() const;
    /// Fails (PreconditionError) unless the norm is 1 within 1e-9.
    void check_normalized() const;
};

/// |<s1|s2>|^2.
double fidelity(const TwoQubitState& s1, const TwoQubitState& s2);

/// 2 * |amp_hv * amp_vh - amp_hh * amp_vv|; for the protocol's states this
/// is sin^2(phi) / (1 + cos^2(phi)), zero exactly at phi in pi*Z.
double concurrence(const TwoQubitState& s);

/// Bloch measurement directions for the four CHSH correlators. Each vector
/// must be unit norm within 1e-12.
struct MeasurementSetting {
    Vec3 a{};
    Vec3 a_prime{};
    Vec3 b{};
    Vec3 b_prime{};

    /// The directions that maximize the violation for this protocol:
    /// a=(1,0,0), a'=(0,1,0), b=(1,1,0)/sqrt2, b'=(-1,1,0)/sqrt2.
    static MeasurementSetting max_violation();
    void validate() const;
};

/// Closed-form post-selected state:
///   amp_hv = (cos phi + 1) / sqrt(2 (cos^2 phi + 1))
///   amp_vh = (cos phi - 1) / sqrt(2 (cos^2 phi + 1))
/// At phi = 0 this is |HV>; at phi = pi/2 + k*pi the singlet
/// (|HV> - |VH>)/sqrt2; at odd multiples of pi the flipped |VH> (up to
/// global phase). Mutually validating with the simulated core4 pipeline.
TwoQubitState postselected_state(double phi);

/// Extracts the polarization qubit pair from a coincidence Fock state
/// (exactly one photon in Alice's modes and one in Bob's, per term). The
/// global phase is fixed by making the first nonzero amplitude (in order
/// hv, vh, hh, vv) real positive.
TwoQubitState two_qubit_from_state(const FockState& coincidence_state);

/// <psi| (u.sigma) x (v.sigma) |psi> by explicit 4x4 contraction. The
/// imaginary residue must vanish within 1e-12 (asserted, then discarded).
double correlator(const TwoQubitState& state, const Vec3& u, const Vec3& v);

/// CHSH combination E(a,b) - E(a,b') + E(a',b) + E(a',b').
/// With the default settings and postselected_state(phi) the signed value is
/// -4*sqrt2*sin^2(phi)/(3+cos(2*phi)); the H->0 basis convention fixes the
/// sign, so published comparisons use |S|.
double chsh_S(const TwoQubitState& state, const MeasurementSetting& settings);

/// |S|(phi) = 4*sqrt2*sin^2(phi)/(3+cos(2*phi)), pi-periodic, even.
double closed_form_S(double phi);

/// Coincidence probability of the full routed circuit:
/// P(phi) = (1+cos^2 phi)/32, oscillating between 1/32 and 1/16.
double closed_form_P(double phi);

struct OmegaBell {
    double omega_rad_s = 0.0;
    double freq_hz = 0.0;
};

/// Platform angular frequencies that generate the singlet:
///   Omega_Bell = (2k+1) * pi * c^2 / (8 * A * omega)
/// reported both as rad/s and Hz to keep the two units explicit. Negative k
/// flips the sense of rotation.
OmegaBell omega_bell(const SagnacConfig& cfg, long k);

struct SweepRow {
    double f_hz = 0.0;
    double omega_rad_s = 0.0;
    double phi_rad = 0.0;
    double S_abs = 0.0;
    double S_signed = 0.0;
    double P_coincidence = 0.0;
    bool violation = false;
};

/// Uniform frequency grid, endpoints inclusive. Every row runs the full
/// routed simulation (not the closed forms); the closed-form values are
/// asserted against each row within 1e-10 so a regression anywhere in the
/// state pipeline surfaces here. violation = (|S| > 2), strict.
std::vector<SweepRow> sweep(const SagnacConfig& cfg_template, double f_min_hz,
                            double f_max_hz, int n_points,
                            const MeasurementSetting& settings);

/// CSV of a sweep table; header
/// f_hz,omega_rad_s,phi_rad,S_abs,S_signed,P_coincidence,violation
/// (stable contract; violation encoded as 1/0).
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace sagbell
