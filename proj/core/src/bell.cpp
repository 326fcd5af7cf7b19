#include "sagbell/bell.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "sagbell/errors.hpp"

namespace sagbell {

namespace {

constexpr double kPi = std::numbers::pi;

double dot(const Vec3& u, const Vec3& v) {
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

void check_unit(const Vec3& v, const char* name) {
    if (std::abs(dot(v, v) - 1.0) > 1e-12)
        throw PreconditionError(std::string("measurement direction ") + name +
                                " is not unit norm");
}

// n.sigma as a 2x2 Hermitian matrix.
std::array<std::array<Complex, 2>, 2> bloch_observable(const Vec3& n) {
    return {{{Complex{n[2], 0.0}, Complex{n[0], -n[1]}},
             {Complex{n[0], n[1]}, Complex{-n[2], 0.0}}}};
}

std::array<Complex, 4> as_vector(const TwoQubitState& s) {
    // basis order |HH>, |HV>, |VH>, |VV>  (H = 0)
    return {s.amp_hh, s.amp_hv, s.amp_vh, s.amp_vv};
}

// <psi| A (x) B |psi> for 2x2 A, B.
Complex contract(const TwoQubitState& s, const std::array<std::array<Complex, 2>, 2>& A,
                 const std::array<std::array<Complex, 2>, 2>& B) {
    auto psi = as_vector(s);
    Complex acc{0.0, 0.0};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    acc += std::conj(psi[static_cast<size_t>(2 * i + j)]) * A[static_cast<size_t>(i)][static_cast<size_t>(k)] *
                           B[static_cast<size_t>(j)][static_cast<size_t>(l)] * psi[static_cast<size_t>(2 * k + l)];
    return acc;
}

}  // namespace

double TwoQubitState::squared_norm() const {
    return std::norm(amp_hv) + std::norm(amp_vh) + std::norm(amp_hh) + std::norm(amp_vv);
}

void TwoQubitState::check_normalized() const {
    if (std::abs(squared_norm() - 1.0) > 1e-9)
        throw PreconditionError("two-qubit state is not normalized");
}

double fidelity(const TwoQubitState& s1, const TwoQubitState& s2) {
    Complex ov = std::conj(s1.amp_hv) * s2.amp_hv + std::conj(s1.amp_vh) * s2.amp_vh +
                 std::conj(s1.amp_hh) * s2.amp_hh + std::conj(s1.amp_vv) * s2.amp_vv;
    return std::norm(ov);
}

double concurrence(const TwoQubitState& s) {
    return 2.0 * std::abs(s.amp_hv * s.amp_vh - s.amp_hh * s.amp_vv);
}

MeasurementSetting MeasurementSetting::max_violation() {
    const double r = 1.0 / std::sqrt(2.0);
    MeasurementSetting m;
    m.a = {1.0, 0.0, 0.0};
    m.a_prime = {0.0, 1.0, 0.0};
    m.b = {r, r, 0.0};
    m.b_prime = {-r, r, 0.0};
    return m;
}

void MeasurementSetting::validate() const {
    check_unit(a, "a");
    check_unit(a_prime, "a'");
    check_unit(b, "b");
    check_unit(b_prime, "b'");
}

TwoQubitState postselected_state(double phi) {
    const double c = std::cos(phi);
    const double norm = std::sqrt(2.0 * (c * c + 1.0));
    TwoQubitState s;
    s.amp_hv = Complex{(c + 1.0) / norm, 0.0};
    s.amp_vh = Complex{(c - 1.0) / norm, 0.0};
    return s;
}

TwoQubitState two_qubit_from_state(const FockState& state) {
    const auto& reg = state.registry();
    auto alice = reg.detection_modes(Party::Alice);
    auto bob = reg.detection_modes(Party::Bob);
    auto pol_of = [&](const std::vector<int>& modes, const OccupationVector& occ,
                      const char* who) -> Polarization {
        std::optional<Polarization> found;
        int photons = 0;
        for (int m : modes) {
            int n = occ[static_cast<size_t>(m)];
            if (n == 0) continue;
            photons += n;
            auto p = reg.polarization(m);
            if (!p) throw RegistryError(std::string(who) + " detection mode lacks an H/V label");
            found = *p;
        }
        if (photons != 1 || !found)
            throw PreconditionError(std::string("state is not a coincidence state: ") + who +
                                    " photon count != 1");
        return *found;
    };

    TwoQubitState s;
    for (const auto& [occ, amp] : state.terms()) {
        Polarization pa = pol_of(alice, occ, "alice");
        Polarization pb = pol_of(bob, occ, "bob");
        if (pa == Polarization::H && pb == Polarization::V)
            s.amp_hv += amp;
        else if (pa == Polarization::V && pb == Polarization::H)
            s.amp_vh += amp;
        else if (pa == Polarization::H && pb == Polarization::H)
            s.amp_hh += amp;
        else
            s.amp_vv += amp;
    }

    double n = std::sqrt(s.squared_norm());
    if (n <= 0.0) throw PreconditionError("coincidence state has zero norm");
    // Fix the global phase: first nonzero amplitude real positive.
    Complex anchor{0.0, 0.0};
    for (Complex c : {s.amp_hv, s.amp_vh, s.amp_hh, s.amp_vv}) {
        if (std::abs(c) > 1e-12 * n) {
            anchor = c;
            break;
        }
    }
    Complex scale = (anchor == Complex{0.0, 0.0})
                        ? Complex{1.0 / n, 0.0}
                        : std::conj(anchor) / (std::abs(anchor) * n);
    s.amp_hv *= scale;
    s.amp_vh *= scale;
    s.amp_hh *= scale;
    s.amp_vv *= scale;
    return s;
}

double correlator(const TwoQubitState& state, const Vec3& u, const Vec3& v) {
    check_unit(u, "u");
    check_unit(v, "v");
    Complex e = contract(state, bloch_observable(u), bloch_observable(v));
    if (std::abs(e.imag()) > 1e-12)
        throw PreconditionError("correlator has a non-negligible imaginary residue");
    return e.real();
}

double chsh_S(const TwoQubitState& state, const MeasurementSetting& settings) {
    settings.validate();
    return correlator(state, settings.a, settings.b) -
           correlator(state, settings.a, settings.b_prime) +
           correlator(state, settings.a_prime, settings.b) +
           correlator(state, settings.a_prime, settings.b_prime);
}

double closed_form_S(double phi) {
    double s = std::sin(phi);
    return 4.0 * std::sqrt(2.0) * s * s / (3.0 + std::cos(2.0 * phi));
}

double closed_form_P(double phi) {
    double c = std::cos(phi);
    return (1.0 + c * c) / 32.0;
}

OmegaBell omega_bell(const SagnacConfig& cfg, long k) {
    if (!(cfg.area_m2 > 0.0) || !(cfg.wavelength_m > 0.0))
        throw PreconditionError("omega_bell requires positive area and wavelength");
    const double c = SagnacConfig::kSpeedOfLight;
    double omega = static_cast<double>(2 * k + 1) * kPi * c * c /
                   (8.0 * cfg.area_m2 * cfg.optical_omega());
    return OmegaBell{omega, omega / (2.0 * kPi)};
}

std::vector<SweepRow> sweep(const SagnacConfig& cfg_template, double f_min_hz,
                            double f_max_hz, int n_points,
                            const MeasurementSetting& settings) {
    if (n_points < 2) throw PreconditionError("sweep needs at least 2 points");
    if (!(f_min_hz < f_max_hz)) throw PreconditionError("sweep needs f_min < f_max");
    settings.validate();

    Circuit circuit = circuit_preset("full12");
    std::vector<SweepRow> rows(static_cast<size_t>(n_points));
    const double step = (f_max_hz - f_min_hz) / static_cast<double>(n_points - 1);
    for (int i = 0; i < n_points; ++i) {
        double f = (i == n_points - 1) ? f_max_hz : f_min_hz + step * i;
        SagnacConfig cfg = cfg_template.with_rotation_hz(f);
        double phi = sagnac_phase(cfg);
        auto projected = coincidence_projection(circuit.run(phi));
        if (projected.null_result)
            throw ConfigError("sweep row produced a null coincidence projection");
        double S = chsh_S(two_qubit_from_state(projected.state), settings);
        SweepRow row;
        row.f_hz = f;
        row.omega_rad_s = cfg.omega_rot;
        row.phi_rad = phi;
        row.S_signed = S;
        row.S_abs = std::abs(S);
        row.P_coincidence = projected.probability;
        row.violation = row.S_abs > 2.0;
        // Per-row cross check against the closed forms; a failure here means
        // the state pipeline and the analytic curve have diverged.
        if (std::abs(row.S_abs - closed_form_S(phi)) > 1e-10 ||
            std::abs(row.P_coincidence - closed_form_P(phi)) > 1e-10)
            throw ConfigError("sweep row disagrees with the closed-form curves");
        rows[static_cast<size_t>(i)] = row;
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "f_hz,omega_rad_s,phi_rad,S_abs,S_signed,P_coincidence,violation\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d\n", r.f_hz,
                      r.omega_rad_s, r.phi_rad, r.S_abs, r.S_signed, r.P_coincidence,
                      r.violation ? 1 : 0);
        out += buf;
    }
    return out;
}

}  // namespace sagbell
