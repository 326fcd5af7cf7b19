#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sagbell {

/// Function of a mode in the interferometer layout.
enum class ModeRole {
    LoopCo,       ///< co-rotating arm of the fiber loop
    LoopCounter,  ///< counter-rotating arm
    Alice,        ///< Alice's detection stage
    Bob,          ///< Bob's detection stage
    Discard,      ///< routing reject port, excluded by post-selection
    Source,       ///< photon injection port ahead of the routing splitters
};

const char* to_string(ModeRole role);
std::optional<ModeRole> mode_role_from_string(std::string_view text);

enum class Polarization { H, V };

/// One optical mode: a path/polarization slot with a stable index into
/// occupation vectors. Labels use a trailing ".H"/".V" to mark polarization
/// (e.g. "a.H", "alice.V"); other labels ("discard.1") carry none.
struct ModeId {
    int index = 0;
    std::string label;
};

/// Polarization encoded in a label suffix, if any.
std::optional<Polarization> label_polarization(std::string_view label);

enum class Party { Alice, Bob };

/// Ordered set of modes with unique labels, contiguous indices and one role
/// each. Immutable once handed to a FockState or Circuit (by convention:
/// build it fully, then share it via shared_ptr<const ModeRegistry>).
class ModeRegistry {
public:
    /// Appends a mode; returns its index.
    /// Throws RegistryError on duplicate label.
    int add_mode(std::string label, ModeRole role);

    int size() const { return static_cast<int>(modes_.size()); }
    const ModeId& mode(int index) const;
    ModeRole role(int index) const;
    std::optional<Polarization> polarization(int index) const;

    std::optional<int> find(std::string_view label) const;
    /// Like find() but throws RegistryError when the label is unknown.
    int require(std::string_view label) const;

    std::vector<int> modes_with_role(ModeRole role) const;

    /// Modes read out by a party. Uses the alice/bob roles when the registry
    /// has them; otherwise falls back to the loop roles (in the minimal
    /// four-mode model Alice's detector sits on the co-rotating port and
    /// Bob's on the counter-rotating one).
    std::vector<int> detection_modes(Party party) const;

    const std::vector<ModeId>& modes() const { return modes_; }

    bool same_layout(const ModeRegistry& other) const;

private:
    std::vector<ModeId> modes_;
    std::vector<ModeRole> roles_;
    std::unordered_map<std::string, int> by_label_;
};

}  // namespace sagbell
