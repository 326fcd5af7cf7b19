#pragma once

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sagbell/modes.hpp"

namespace sagbell {

using Complex = std::complex<double>;

/// Photon count per mode, always full registry length (no implicit vacuum
/// truncation).
using OccupationVector = std::vector<int>;

/// 2x2 complex matrix acting on a pair of creation operators.
struct Mat2 {
    std::array<std::array<Complex, 2>, 2> m{};

    static Mat2 identity();
    Mat2 dagger() const;
    bool is_unitary(double tol = 1e-12) const;
};

/// Amplitudes smaller than this are dropped after each element application,
/// so numerical dust cannot accumulate across long pipelines. Overridable
/// per call.
inline constexpr double kDefaultPruneThreshold = 1e-15;

/// Few-photon state over a fixed mode registry: a sparse map from occupation
/// vectors to complex amplitudes. Immutable value type; every operation
/// returns a new state.
class FockState {
public:
    using TermMap = std::map<OccupationVector, Complex>;

    FockState(std::shared_ptr<const ModeRegistry> registry, TermMap terms);

    static FockState vacuum(std::shared_ptr<const ModeRegistry> registry);

    const ModeRegistry& registry() const { return *registry_; }
    const std::shared_ptr<const ModeRegistry>& registry_ptr() const { return registry_; }
    const TermMap& terms() const { return terms_; }
    size_t term_count() const { return terms_.size(); }

    /// Amplitude on one occupation vector (0 if absent).
    Complex amplitude(const OccupationVector& occ) const;

    double squared_norm() const;
    double norm() const;

    /// Total photon number of the lexicographically first term
    /// (all terms share it by construction).
    int total_photons() const;

    FockState normalized() const;
    FockState scaled(Complex factor) const;
    FockState pruned(double threshold = kDefaultPruneThreshold) const;

    friend FockState operator+(const FockState& a, const FockState& b);

private:
    std::shared_ptr<const ModeRegistry> registry_;
    TermMap terms_;
};

/// Applies the listed creation operators to vacuum and normalizes; repeated
/// modes pick up the multi-photon sqrt(n!) factors before normalization, so
/// the result is always unit norm.
/// Throws PreconditionError on an empty list, RegistryError on unknown modes.
FockState make_state(std::shared_ptr<const ModeRegistry> registry,
                     const std::vector<int>& creation_modes);
FockState make_state(std::shared_ptr<const ModeRegistry> registry,
                     const std::vector<std::string>& creation_labels);

/// Linear transform of the creation operators on modes (m1, m2):
///   a1+ -> u00 a1+ + u01 a2+,   a2+ -> u10 a1+ + u11 a2+
/// re-expanded into occupation terms with exact combinatorial factors.
/// u must be unitary within 1e-12 and m1 != m2.
FockState apply_mode_transform(const FockState& state, const Mat2& u, int m1, int m2,
                               double prune_threshold = kDefaultPruneThreshold);

/// Multiplies each term by exp(i * theta * n_mode).
FockState apply_phase(const FockState& state, int mode, double theta);

/// Exchanges two mode slots (a relabeling, amplitudes untouched).
FockState apply_mode_swap(const FockState& state, int m1, int m2);

struct Projection {
    FockState state;       ///< normalized post-projection state (empty when null_result)
    double probability;    ///< pre-normalization mass of the kept terms
    bool null_result;      ///< true when no term satisfied the constraint
};

/// Keeps the terms whose photon count, summed over all modes of each
/// constrained role, matches the required count. Roles alice/bob resolve
/// through ModeRegistry::detection_modes, so the constraint {alice:1, bob:1}
/// works on both the minimal loop-only layout and the full routed one.
/// Zero surviving mass is a flagged outcome, not an error.
Projection project_onto_counts(const FockState& state,
                               const std::map<ModeRole, int>& constraint);

/// <s1|s2> with conjugation on s1. Both states must share the registry layout.
Complex inner_product(const FockState& s1, const FockState& s2);

/// JSON text of the dump format
/// {"modes":[labels...],"terms":[{"occ":[...],"re":..,"im":..},...]}
/// with terms in lexicographic occupation order.
std::string state_to_json(const FockState& state);

}  // namespace sagbell
