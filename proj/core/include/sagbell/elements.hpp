#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sagbell/fock.hpp"
#include "sagbell/modes.hpp"

namespace sagbell {

/// Physical parameters of the rotating interferometer.
///
/// The rotation-induced phase between the counter-propagating loop arms is
///   phi = 4 * A * omega * Omega / c^2,   omega = 2*pi*c / lambda,
/// with A the enclosed area, Omega the platform angular frequency (sign =
/// sense of rotation) and c the vacuum speed of light. c is a fixed constant
/// on purpose: the phase depends on the vacuum value, not on the propagation
/// speed in the fiber.
struct SagnacConfig {
    double area_m2 = 0.0;
    double wavelength_m = 0.0;
    double omega_rot = 0.0;  ///< platform angular frequency Omega [rad/s]

    static constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

    /// Optical angular frequency omega = 2*pi*c/lambda [rad/s].
    double optical_omega() const;

    SagnacConfig with_omega(double omega_rad_s) const;
    SagnacConfig with_rotation_hz(double f_hz) const;
};

/// phi = 4*A*omega*Omega/c^2, exact double arithmetic, left unwrapped on the
/// real line (wrapping happens only inside trigonometric evaluation).
/// Throws PreconditionError when area or wavelength is not positive.
double sagnac_phase(const SagnacConfig& cfg);

/// Parses {"area_m2":..,"wavelength_m":..,"omega_rot_rad_s":..} or the same
/// with "rotation_hz" instead (exactly one of the two).
SagnacConfig sagnac_config_from_json(const std::string& text);

/// Canonical 50:50 beam-splitter convention used throughout:
///   (1/sqrt(2)) [[1, i], [i, 1]]
/// so a photon entering the first port splits as a+ -> (a+ + i b+)/sqrt(2).
/// The exit pass through the same splitter is its inverse (the conjugate
/// transpose), which makes entry followed by exit the identity.
Mat2 beamsplitter_matrix();
Mat2 beamsplitter_matrix_inverse();

// -- circuit elements ---------------------------------------------------

struct BeamSplitterElem {
    int m1 = 0;
    int m2 = 0;
    bool inverse = false;  ///< apply the conjugate-transpose convention
};

struct PhaseShiftElem {
    int mode = 0;
    double theta = 0.0;
};

/// Rotation phase pair: e^{+i phi/2} per photon in every co-rotating mode,
/// e^{-i phi/2} per photon in every counter-rotating one. phi may be left
/// unbound (symbolic) and supplied at simulation time, so a compiled circuit
/// can be swept without rebuilding.
struct SagnacPhaseElem {
    std::vector<int> co_modes;
    std::vector<int> counter_modes;
    std::optional<double> phi;  ///< nullopt = bind at simulation time
};

/// 50:50 routing splitter with an explicit reject port. Semantically:
/// move the occupancy of `in` to `through` (when they differ), then split
/// `through` against `discard`. The photon continues in `through` with
/// amplitude 1/sqrt(2) and is rejected into `discard` with amplitude
/// i/sqrt(2). The element is unitary; the loss happens only at final
/// projection. `discard` may name the vacated in-mode (reject light heads
/// back out the port it arrived on) or a dedicated discard-role mode.
struct RouteElem {
    int in = 0;
    int through = 0;
    int discard = 0;
};

using OpticalElement =
    std::variant<BeamSplitterElem, PhaseShiftElem, SagnacPhaseElem, RouteElem>;

/// Applies one element. Symbolic sagnac phases take their value from
/// phi_binding; an unbound symbolic phase with no binding is a ConfigError.
FockState apply_element(const FockState& state, const OpticalElement& elem,
                        std::optional<double> phi_binding = std::nullopt,
                        double prune_threshold = kDefaultPruneThreshold);

/// Entry/exit pass through the central loop splitter: one BeamSplitterElem
/// per polarization, pairing the co- and counter-rotating modes of equal
/// polarization.
std::vector<OpticalElement> entry_beamsplitter(const ModeRegistry& registry);
std::vector<OpticalElement> exit_beamsplitter(const ModeRegistry& registry);

/// SagnacPhaseElem over the registry's loop-role modes.
/// Throws RegistryError when either loop role is absent.
OpticalElement sagnac_loop_element(const ModeRegistry& registry,
                                   std::optional<double> phi);

/// An ordered, compiled element pipeline bound to a registry, together with
/// the creation list of its input state.
struct Circuit {
    std::shared_ptr<const ModeRegistry> registry;
    std::vector<OpticalElement> elements;
    std::vector<int> input_modes;

    bool has_symbolic_phi() const;

    /// Builds the input state and runs the pipeline.
    FockState run(std::optional<double> phi_binding = std::nullopt,
                  double prune_threshold = kDefaultPruneThreshold) const;

    /// Runs the pipeline on a caller-supplied state.
    FockState apply(const FockState& input,
                    std::optional<double> phi_binding = std::nullopt,
                    double prune_threshold = kDefaultPruneThreshold) const;
};

/// Minimal loop-only layout: modes a.H a.V (co-rotating), b.H b.V
/// (counter-rotating). Input = one H photon on a, one V photon on b.
std::shared_ptr<const ModeRegistry> make_core_registry();

/// Full routed layout, 12 modes: 2 source, 4 loop, 2 alice, 2 bob,
/// 2 discard.
std::shared_ptr<const ModeRegistry> make_full_registry();

/// Loop-only pipeline (entry splitter, rotation phases, exit splitter) on
/// the 4-mode registry. Post-selecting {alice:1, bob:1} on its output gives
/// coincidence mass (1 + cos^2 phi) / 2.
Circuit build_core_circuit(std::shared_ptr<const ModeRegistry> registry,
                           std::optional<double> phi);

/// Full pipeline with the routing splitters: inbound routes at the two
/// injection splitters, the loop (entry, phases, exit), outbound routes
/// toward the detection stages. Each photon crosses a 50:50 router twice,
/// so the coincidence probability is (1 + cos^2 phi) / 32.
/// Requires the make_full_registry layout.
Circuit build_full_circuit(std::shared_ptr<const ModeRegistry> registry,
                           std::optional<double> phi);

/// Preset circuits by public name: "core4" or "full12" (the names exposed
/// by the circuit language and the CLI).
Circuit circuit_preset(const std::string& name, std::optional<double> phi = std::nullopt);

/// Coincidence projection {alice:1, bob:1} of a circuit output.
Projection coincidence_projection(const FockState& output);

}  // namespace sagbell
