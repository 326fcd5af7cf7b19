#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "sagbell/bell.hpp"
#include "sagbell/elements.hpp"
#include "sagbell/errors.hpp"
#include "test_util.hpp"

using namespace sagbell;

namespace {

constexpr double kReferenceArea = 7.853981;     // 10 loops, r = 0.5 m
constexpr double kReferenceWavelength = 1e-6;   // 1 um

SagnacConfig reference_config(double omega = 0.0) {
    return SagnacConfig{kReferenceArea, kReferenceWavelength, omega};
}

}  // namespace

TEST_SUITE_BEGIN("elements");

TEST_CASE("sagnac_phase: zero rotation, linearity, sign, rejects bad parameters") {
    CHECK(sagnac_phase(reference_config(0.0)) == 0.0);

    auto cfg = reference_config(2.3878);
    CHECK(sagnac_phase(cfg) == doctest::Approx(M_PI / 2).epsilon(1e-3));

    auto doubled = cfg;
    doubled.area_m2 *= 2.0;
    CHECK(sagnac_phase(doubled) == doctest::Approx(2.0 * sagnac_phase(cfg)).epsilon(1e-15));

    auto neg = cfg;
    neg.omega_rot = -cfg.omega_rot;
    CHECK(sagnac_phase(neg) == doctest::Approx(-sagnac_phase(cfg)).epsilon(1e-15));

    CHECK_THROWS_AS(sagnac_phase(SagnacConfig{-1.0, 1e-6, 1.0}), PreconditionError);
    CHECK_THROWS_AS(sagnac_phase(SagnacConfig{1.0, 0.0, 1.0}), PreconditionError);
}

TEST_CASE("sagnac config JSON: both rotation spellings, exactly one required") {
    auto a = sagnac_config_from_json(
        R"({"area_m2": 7.853981, "wavelength_m": 1e-6, "omega_rot_rad_s": 2.0})");
    CHECK(a.omega_rot == doctest::Approx(2.0));
    auto b = sagnac_config_from_json(
        R"({"area_m2": 7.853981, "wavelength_m": 1e-6, "rotation_hz": 1.0})");
    CHECK(b.omega_rot == doctest::Approx(2.0 * M_PI));
    CHECK_THROWS_AS(sagnac_config_from_json(R"({"area_m2": 1.0, "wavelength_m": 1e-6})"),
                    PreconditionError);
    CHECK_THROWS_AS(
        sagnac_config_from_json(
            R"({"area_m2": 1.0, "wavelength_m": 1e-6, "rotation_hz": 1.0, "omega_rot_rad_s": 2.0})"),
        PreconditionError);
}

TEST_CASE("entry splitter reproduces the four-term superposition") {
    auto reg = make_core_registry();
    auto state = make_state(reg, std::vector<std::string>{"a.H", "b.V"});
    for (const auto& e : entry_beamsplitter(*reg)) state = apply_element(state, e);

    CHECK(std::abs(state.amplitude({1, 1, 0, 0}) - Complex{0.0, 0.5}) < 1e-12);   // a.H a.V
    CHECK(std::abs(state.amplitude({1, 0, 0, 1}) - Complex{0.5, 0.0}) < 1e-12);   // a.H b.V
    CHECK(std::abs(state.amplitude({0, 1, 1, 0}) - Complex{-0.5, 0.0}) < 1e-12);  // b.H a.V
    CHECK(std::abs(state.amplitude({0, 0, 1, 1}) - Complex{0.0, 0.5}) < 1e-12);   // b.H b.V
}

TEST_CASE("exit after entry is the identity at phi = 0") {
    auto circuit = circuit_preset("core4", 0.0);
    auto out = circuit.run();
    CHECK(std::abs(out.amplitude({1, 0, 0, 1}) - Complex{1.0, 0.0}) < 1e-12);
    CHECK(out.pruned(1e-12).term_count() == 1);
}

TEST_CASE("loop output decomposition: coincidence and bunching amplitudes") {
    // Oracle-verified expansion of the exit pass: coincidence amplitudes
    // (cos phi + 1)/2 on a.H b.V and (cos phi - 1)/2 on b.H a.V, bunching
    // amplitudes -/+ sin(phi)/2 on a.H a.V and b.H b.V. Both bunching terms
    // carry one H and one V photon; same-polarization pairs never appear.
    for (double phi : {0.4, M_PI / 2, 2.2}) {
        auto circuit = circuit_preset("core4", phi);
        auto out = circuit.run();
        double c = std::cos(phi), s = std::sin(phi);
        CHECK(std::abs(out.amplitude({1, 0, 0, 1}) - Complex{(c + 1) / 2, 0.0}) < 1e-12);
        CHECK(std::abs(out.amplitude({0, 1, 1, 0}) - Complex{(c - 1) / 2, 0.0}) < 1e-12);
        CHECK(std::abs(out.amplitude({1, 1, 0, 0}) - Complex{-s / 2, 0.0}) < 1e-12);
        CHECK(std::abs(out.amplitude({0, 0, 1, 1}) - Complex{s / 2, 0.0}) < 1e-12);
        CHECK(std::abs(out.amplitude({2, 0, 0, 0})) < 1e-15);
        CHECK(std::abs(out.amplitude({0, 0, 0, 2})) < 1e-15);

        auto expected = oracle::simulate(circuit, std::nullopt);
        CHECK(oracle::max_amplitude_deviation(out, expected) < 1e-12);
    }
}

TEST_CASE("sagnac loop element: phase structure and global-phase blindness") {
    auto reg = make_core_registry();
    auto entry = entry_beamsplitter(*reg);
    auto state = make_state(reg, std::vector<std::string>{"a.H", "b.V"});
    for (const auto& e : entry) state = apply_element(state, e);

    double phi = 1.3;
    auto phased = apply_element(state, sagnac_loop_element(*reg, phi));
    // term amplitudes multiply by e^{i (n_a - n_b) phi / 2}
    for (const auto& [occ, amp] : state.terms()) {
        int na = occ[0] + occ[1], nb = occ[2] + occ[3];
        Complex expect = amp * std::exp(Complex{0.0, (na - nb) * phi / 2.0});
        CHECK(std::abs(phased.amplitude(occ) - expect) < 1e-12);
    }

    auto zero = apply_element(state, sagnac_loop_element(*reg, 0.0));
    for (const auto& [occ, amp] : state.terms())
        CHECK(std::abs(zero.amplitude(occ) - amp) < 1e-15);

    auto missing = std::make_shared<ModeRegistry>();
    missing->add_mode("x.H", ModeRole::Alice);
    CHECK_THROWS_AS(sagnac_loop_element(*missing, 0.0), RegistryError);
}

TEST_CASE("full circuit: detection probability and post-selected states") {
    auto reg = make_full_registry();

    SUBCASE("no rotation: identity map, 1/16 coincidences") {
        auto proj = coincidence_projection(build_full_circuit(reg, 0.0).run());
        CHECK(proj.probability == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
        auto q = two_qubit_from_state(proj.state);
        CHECK(std::abs(q.amp_hv - Complex{1.0, 0.0}) < 1e-12);
        CHECK(std::abs(q.amp_vh) < 1e-12);
    }
    SUBCASE("quarter-wave point: 1/32 coincidences") {
        auto proj = coincidence_projection(build_full_circuit(reg, M_PI / 2).run());
        CHECK(proj.probability == doctest::Approx(1.0 / 32.0).epsilon(1e-12));
    }
    SUBCASE("half-wave point: polarization flip") {
        auto proj = coincidence_projection(build_full_circuit(reg, M_PI).run());
        CHECK(proj.probability == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
        auto q = two_qubit_from_state(proj.state);
        CHECK(std::abs(q.amp_hv) < 1e-12);
        CHECK(std::abs(std::abs(q.amp_vh) - 1.0) < 1e-12);
    }
    SUBCASE("random phi grid matches the closed-form curve") {
        std::mt19937_64 rng(0x5eed0004);
        std::uniform_real_distribution<double> dist(-2 * M_PI, 2 * M_PI);
        auto circuit = build_full_circuit(reg, std::nullopt);
        for (int i = 0; i < 25; ++i) {
            double phi = dist(rng);
            auto proj = coincidence_projection(circuit.run(phi));
            CHECK(std::abs(proj.probability - closed_form_P(phi)) < 1e-12);
        }
    }
    SUBCASE("wrong registry shape is rejected") {
        CHECK_THROWS_AS(build_full_circuit(make_core_registry(), 0.0), ConfigError);
    }
}

TEST_CASE("every element is unitary, including routes") {
    auto circuit = circuit_preset("full12", 0.77);
    auto state = make_state(circuit.registry, circuit.input_modes);
    for (const auto& e : circuit.elements) {
        state = apply_element(state, e);
        CHECK(std::abs(state.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("common-mode phases factor out of the post-selected state") {
    // Polarization-dependent phases hitting both directions alike, and any
    // common phase on both propagation directions, leave the post-selected
    // state invariant (fidelity 1).
    std::mt19937_64 rng(0x5eed0006);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    const double phi = 0.9;
    auto reg = make_core_registry();
    auto baseline = two_qubit_from_state(
        coincidence_projection(build_core_circuit(reg, phi).run()).state);

    for (int trial = 0; trial < 10; ++trial) {
        Circuit circuit = build_core_circuit(reg, phi);
        double theta_h = dist(rng), theta_v = dist(rng), theta_common = dist(rng);
        std::vector<OpticalElement> injected = {
            PhaseShiftElem{reg->require("a.H"), theta_h},
            PhaseShiftElem{reg->require("b.H"), theta_h},
            PhaseShiftElem{reg->require("a.V"), theta_v},
            PhaseShiftElem{reg->require("b.V"), theta_v},
        };
        for (int m = 0; m < reg->size(); ++m)
            injected.push_back(PhaseShiftElem{m, theta_common});
        // insert inside the loop, between entry and exit
        circuit.elements.insert(circuit.elements.begin() + 3, injected.begin(), injected.end());
        auto q = two_qubit_from_state(coincidence_projection(circuit.run()).state);
        CHECK(fidelity(q, baseline) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("preset names") {
    CHECK_NOTHROW(circuit_preset("core4"));
    CHECK_NOTHROW(circuit_preset("full12"));
    CHECK_THROWS_AS(circuit_preset("full13"), ConfigError);
}

TEST_CASE("full12 oracle cross-check") {
    auto circuit = circuit_preset("full12", 1.234);
    auto out = circuit.run();
    auto expected = oracle::simulate(circuit, std::nullopt);
    CHECK(oracle::max_amplitude_deviation(out, expected) < 1e-12);
}

TEST_SUITE_END();
