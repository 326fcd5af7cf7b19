#include "sagbell/elements.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "sagbell/errors.hpp"

namespace sagbell {

namespace {

// One mode of each polarization, or RegistryError.
std::pair<int, int> hv_pair(const ModeRegistry& reg, const std::vector<int>& modes,
                            const char* what) {
    std::optional<int> h, v;
    for (int m : modes) {
        auto pol = reg.polarization(m);
        if (!pol) continue;
        if (*pol == Polarization::H) {
            if (h) throw RegistryError(std::string(what) + ": multiple H modes");
            h = m;
        } else {
            if (v) throw RegistryError(std::string(what) + ": multiple V modes");
            v = m;
        }
    }
    if (!h || !v)
        throw RegistryError(std::string(what) + ": need exactly one H and one V mode");
    return {*h, *v};
}

}  // namespace

double SagnacConfig::optical_omega() const {
    return 2.0 * std::numbers::pi * kSpeedOfLight / wavelength_m;
}

SagnacConfig SagnacConfig::with_omega(double omega_rad_s) const {
    SagnacConfig c = *this;
    c.omega_rot = omega_rad_s;
    return c;
}

SagnacConfig SagnacConfig::with_rotation_hz(double f_hz) const {
    return with_omega(2.0 * std::numbers::pi * f_hz);
}

double sagnac_phase(const SagnacConfig& cfg) {
    if (!(cfg.area_m2 > 0.0))
        throw PreconditionError("interferometer area must be positive");
    if (!(cfg.wavelength_m > 0.0))
        throw PreconditionError("wavelength must be positive");
    const double c = SagnacConfig::kSpeedOfLight;
    return 4.0 * cfg.area_m2 * cfg.optical_omega() * cfg.omega_rot / (c * c);
}

SagnacConfig sagnac_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("invalid SagnacConfig JSON: ") + e.what());
    }
    SagnacConfig cfg;
    if (!j.contains("area_m2") || !j.contains("wavelength_m"))
        throw PreconditionError("SagnacConfig JSON requires area_m2 and wavelength_m");
    cfg.area_m2 = j.at("area_m2").get<double>();
    cfg.wavelength_m = j.at("wavelength_m").get<double>();
    bool has_omega = j.contains("omega_rot_rad_s");
    bool has_hz = j.contains("rotation_hz");
    if (has_omega == has_hz)
        throw PreconditionError(
            "SagnacConfig JSON requires exactly one of omega_rot_rad_s / rotation_hz");
    if (has_omega)
        cfg.omega_rot = j.at("omega_rot_rad_s").get<double>();
    else
        cfg = cfg.with_rotation_hz(j.at("rotation_hz").get<double>());
    if (!(cfg.area_m2 > 0.0) || !(cfg.wavelength_m > 0.0))
        throw PreconditionError("area_m2 and wavelength_m must be positive");
    return cfg;
}

Mat2 beamsplitter_matrix() {
    const double s = 1.0 / std::sqrt(2.0);
    Mat2 u;
    u.m[0][0] = Complex{s, 0.0};
    u.m[0][1] = Complex{0.0, s};
    u.m[1][0] = Complex{0.0, s};
    u.m[1][1] = Complex{s, 0.0};
    return u;
}

Mat2 beamsplitter_matrix_inverse() { return beamsplitter_matrix().dagger(); }

FockState apply_element(const FockState& state, const OpticalElement& elem,
                        std::optional<double> phi_binding, double prune_threshold) {
    return std::visit(
        [&](const auto& e) -> FockState {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BeamSplitterElem>) {
                Mat2 u = e.inverse ? beamsplitter_matrix_inverse() : beamsplitter_matrix();
                return apply_mode_transform(state, u, e.m1, e.m2, prune_threshold);
            } else if constexpr (std::is_same_v<T, PhaseShiftElem>) {
                return apply_phase(state, e.mode, e.theta);
            } else if constexpr (std::is_same_v<T, SagnacPhaseElem>) {
                double phi;
                if (e.phi)
                    phi = *e.phi;
                else if (phi_binding)
                    phi = *phi_binding;
                else
                    throw ConfigError("sagnac element has unbound phi and no binding was given");
                FockState s = state;
                for (int m : e.co_modes) s = apply_phase(s, m, +phi / 2.0);
                for (int m : e.counter_modes) s = apply_phase(s, m, -phi / 2.0);
                return s;
            } else {
                static_assert(std::is_same_v<T, RouteElem>);
                FockState s = state;
                int split_partner = e.discard;
                if (e.in != e.through) {
                    s = apply_mode_swap(s, e.in, e.through);
                    if (e.discard == e.through)
                        throw ConfigError("route discard must differ from through");
                } else {
                    if (e.discard == e.in)
                        throw ConfigError("in-place route requires a separate discard mode");
                }
                return apply_mode_transform(s, beamsplitter_matrix(), e.through, split_partner,
                                            prune_threshold);
            }
        },
        elem);
}

std::vector<OpticalElement> entry_beamsplitter(const ModeRegistry& registry) {
    auto [co_h, co_v] = hv_pair(registry, registry.modes_with_role(ModeRole::LoopCo),
                                "loop co-rotating modes");
    auto [ct_h, ct_v] = hv_pair(registry, registry.modes_with_role(ModeRole::LoopCounter),
                                "loop counter-rotating modes");
    return {BeamSplitterElem{co_h, ct_h, false}, BeamSplitterElem{co_v, ct_v, false}};
}

std::vector<OpticalElement> exit_beamsplitter(const ModeRegistry& registry) {
    auto elems = entry_beamsplitter(registry);
    for (auto& e : elems) std::get<BeamSplitterElem>(e).inverse = true;
    return elems;
}

OpticalElement sagnac_loop_element(const ModeRegistry& registry,
                                   std::optional<double> phi) {
    auto co = registry.modes_with_role(ModeRole::LoopCo);
    auto counter = registry.modes_with_role(ModeRole::LoopCounter);
    if (co.empty() || counter.empty())
        throw RegistryError("registry has no loop-co / loop-counter modes");
    return SagnacPhaseElem{std::move(co), std::move(counter), phi};
}

bool Circuit::has_symbolic_phi() const {
    for (const auto& e : elements)
        if (const auto* s = std::get_if<SagnacPhaseElem>(&e); s && !s->phi) return true;
    return false;
}

FockState Circuit::run(std::optional<double> phi_binding, double prune_threshold) const {
    return apply(make_state(registry, input_modes), phi_binding, prune_threshold);
}

FockState Circuit::apply(const FockState& input, std::optional<double> phi_binding,
                         double prune_threshold) const {
    if (!input.registry().same_layout(*registry))
        throw RegistryError("input state registry does not match circuit registry");
    FockState s = input;
    for (const auto& e : elements) s = apply_element(s, e, phi_binding, prune_threshold);
    return s;
}

std::shared_ptr<const ModeRegistry> make_core_registry() {
    auto reg = std::make_shared<ModeRegistry>();
    reg->add_mode("a.H", ModeRole::LoopCo);
    reg->add_mode("a.V", ModeRole::LoopCo);
    reg->add_mode("b.H", ModeRole::LoopCounter);
    reg->add_mode("b.V", ModeRole::LoopCounter);
    return reg;
}

std::shared_ptr<const ModeRegistry> make_full_registry() {
    auto reg = std::make_shared<ModeRegistry>();
    reg->add_mode("s1.H", ModeRole::Source);
    reg->add_mode("s2.V", ModeRole::Source);
    reg->add_mode("a.H", ModeRole::LoopCo);
    reg->add_mode("a.V", ModeRole::LoopCo);
    reg->add_mode("b.H", ModeRole::LoopCounter);
    reg->add_mode("b.V", ModeRole::LoopCounter);
    reg->add_mode("alice.H", ModeRole::Alice);
    reg->add_mode("alice.V", ModeRole::Alice);
    reg->add_mode("bob.H", ModeRole::Bob);
    reg->add_mode("bob.V", ModeRole::Bob);
    reg->add_mode("discard.1", ModeRole::Discard);
    reg->add_mode("discard.2", ModeRole::Discard);
    return reg;
}

Circuit build_core_circuit(std::shared_ptr<const ModeRegistry> registry,
                           std::optional<double> phi) {
    if (!registry) throw ConfigError("null registry");
    Circuit c;
    c.registry = std::move(registry);
    const auto& reg = *c.registry;
    auto entry = entry_beamsplitter(reg);
    auto exit = exit_beamsplitter(reg);
    c.elements.insert(c.elements.end(), entry.begin(), entry.end());
    c.elements.push_back(sagnac_loop_element(reg, phi));
    c.elements.insert(c.elements.end(), exit.begin(), exit.end());
    auto [co_h, co_v] = hv_pair(reg, reg.modes_with_role(ModeRole::LoopCo), "loop-co");
    auto [ct_h, ct_v] = hv_pair(reg, reg.modes_with_role(ModeRole::LoopCounter), "loop-counter");
    (void)co_v;
    (void)ct_h;
    c.input_modes = {co_h, ct_v};  // one H photon co-rotating port, one V counter
    return c;
}

Circuit build_full_circuit(std::shared_ptr<const ModeRegistry> registry,
                           std::optional<double> phi) {
    if (!registry) throw ConfigError("null registry");
    const auto& reg = *registry;
    auto sources = reg.modes_with_role(ModeRole::Source);
    auto discards = reg.modes_with_role(ModeRole::Discard);
    auto alices = reg.modes_with_role(ModeRole::Alice);
    auto bobs = reg.modes_with_role(ModeRole::Bob);
    if (sources.size() != 2 || discards.size() < 2 || alices.size() != 2 || bobs.size() != 2)
        throw ConfigError(
            "full circuit needs 2 source, 2 alice, 2 bob and >=2 discard modes");

    auto [co_h, co_v] = hv_pair(reg, reg.modes_with_role(ModeRole::LoopCo), "loop-co");
    auto [ct_h, ct_v] = hv_pair(reg, reg.modes_with_role(ModeRole::LoopCounter), "loop-counter");
    auto [al_h, al_v] = hv_pair(reg, alices, "alice");
    auto [bo_h, bo_v] = hv_pair(reg, bobs, "bob");

    // Source 1 carries the H photon toward the co-rotating port, source 2
    // the V photon toward the counter-rotating one.
    std::optional<int> src_h, src_v;
    for (int s : sources) {
        auto pol = reg.polarization(s);
        if (pol == Polarization::H) src_h = s;
        if (pol == Polarization::V) src_v = s;
    }
    if (!src_h || !src_v)
        throw ConfigError("full circuit needs one H source mode and one V source mode");

    Circuit c;
    c.registry = std::move(registry);
    c.input_modes = {*src_h, *src_v};
    // Inbound routing: half the amplitude continues into the loop port, half
    // is rejected into a discard mode.
    c.elements.push_back(RouteElem{*src_h, co_h, discards[0]});
    c.elements.push_back(RouteElem{*src_v, ct_v, discards[1]});
    auto entry = entry_beamsplitter(reg);
    auto exit = exit_beamsplitter(reg);
    c.elements.insert(c.elements.end(), entry.begin(), entry.end());
    c.elements.push_back(sagnac_loop_element(reg, phi));
    c.elements.insert(c.elements.end(), exit.begin(), exit.end());
    // Outbound routing toward the detection stages. The reject half stays in
    // the vacated loop port (it heads back the way it came); a fresh discard
    // mode per split would enlarge the registry without changing any
    // post-selected observable.
    c.elements.push_back(RouteElem{co_h, al_h, co_h});
    c.elements.push_back(RouteElem{co_v, al_v, co_v});
    c.elements.push_back(RouteElem{ct_h, bo_h, ct_h});
    c.elements.push_back(RouteElem{ct_v, bo_v, ct_v});
    return c;
}

Circuit circuit_preset(const std::string& name, std::optional<double> phi) {
    if (name == "core4") return build_core_circuit(make_core_registry(), phi);
    if (name == "full12") return build_full_circuit(make_full_registry(), phi);
    throw ConfigError("unknown circuit preset '" + name + "' (expected core4 or full12)");
}

Projection coincidence_projection(const FockState& output) {
    return project_onto_counts(output, {{ModeRole::Alice, 1}, {ModeRole::Bob, 1}});
}

}  // namespace sagbell
