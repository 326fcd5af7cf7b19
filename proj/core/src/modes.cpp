#include "sagbell/modes.hpp"

#include "sagbell/errors.hpp"

namespace sagbell {

const char* to_string(ModeRole role) {
    switch (role) {
        case ModeRole::LoopCo: return "loop-co";
        case ModeRole::LoopCounter: return "loop-counter";
        case ModeRole::Alice: return "alice";
        case ModeRole::Bob: return "bob";
        case ModeRole::Discard: return "discard";
        case ModeRole::Source: return "source";
    }
    return "?";
}

std::optional<ModeRole> mode_role_from_string(std::string_view text) {
    if (text == "loop-co") return ModeRole::LoopCo;
    if (text == "loop-counter") return ModeRole::LoopCounter;
    if (text == "alice") return ModeRole::Alice;
    if (text == "bob") return ModeRole::Bob;
    if (text == "discard") return ModeRole::Discard;
    if (text == "source") return ModeRole::Source;
    return std::nullopt;
}

std::optional<Polarization> label_polarization(std::string_view label) {
    auto dot = label.rfind('.');
    if (dot == std::string_view::npos) return std::nullopt;
    auto suffix = label.substr(dot + 1);
    if (suffix == "H") return Polarization::H;
    if (suffix == "V") return Polarization::V;
    return std::nullopt;
}

int ModeRegistry::add_mode(std::string label, ModeRole role) {
    if (label.empty()) throw RegistryError("mode label must be non-empty");
    if (by_label_.count(label) != 0)
        throw RegistryError("duplicate mode label '" + label + "'");
    int index = static_cast<int>(modes_.size());
    by_label_.emplace(label, index);
    modes_.push_back(ModeId{index, std::move(label)});
    roles_.push_back(role);
    return index;
}

const ModeId& ModeRegistry::mode(int index) const {
    if (index < 0 || index >= size())
        throw RegistryError("mode index " + std::to_string(index) + " out of range");
    return modes_[static_cast<size_t>(index)];
}

ModeRole ModeRegistry::role(int index) const {
    mode(index);  // bounds check
    return roles_[static_cast<size_t>(index)];
}

std::optional<Polarization> ModeRegistry::polarization(int index) const {
    return label_polarization(mode(index).label);
}

std::optional<int> ModeRegistry::find(std::string_view label) const {
    auto it = by_label_.find(std::string(label));
    if (it == by_label_.end()) return std::nullopt;
    return it->second;
}

int ModeRegistry::require(std::string_view label) const {
    auto idx = find(label);
    if (!idx) throw RegistryError("unknown mode label '" + std::string(label) + "'");
    return *idx;
}

std::vector<int> ModeRegistry::modes_with_role(ModeRole role) const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (roles_[static_cast<size_t>(i)] == role) out.push_back(i);
    return out;
}

std::vector<int> ModeRegistry::detection_modes(Party party) const {
    auto direct = modes_with_role(party == Party::Alice ? ModeRole::Alice : ModeRole::Bob);
    if (!direct.empty()) return direct;
    return modes_with_role(party == Party::Alice ? ModeRole::LoopCo : ModeRole::LoopCounter);
}

bool ModeRegistry::same_layout(const ModeRegistry& other) const {
    if (size() != other.size()) return false;
    for (int i = 0; i < size(); ++i) {
        if (modes_[static_cast<size_t>(i)].label != other.modes_[static_cast<size_t>(i)].label)
            return false;
        if (roles_[static_cast<size_t>(i)] != other.roles_[static_cast<size_t>(i)]) return false;
    }
    return true;
}

}  // namespace sagbell
