#include <benchmark/benchmark.h>

#include <cmath>

#include "sagbell/bell.hpp"
#include "sagbell/circuit_lang.hpp"
#include "sagbell/elements.hpp"
#include "sagbell/sampler.hpp"

using namespace sagbell;

static void BM_ModeTransform(benchmark::State& state) {
    auto circuit = circuit_preset("full12", 0.7);
    auto input = make_state(circuit.registry, circuit.input_modes);
    // evolve to a richer superposition first
    FockState s = input;
    for (const auto& e : circuit.elements) s = apply_element(s, e);
    auto u = beamsplitter_matrix();
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_mode_transform(s, u, 2, 4));
    }
}
BENCHMARK(BM_ModeTransform);

static void BM_SimulateCore4(benchmark::State& state) {
    auto circuit = circuit_preset("core4");
    double phi = 0.3;
    for (auto _ : state) {
        phi += 1e-6;
        benchmark::DoNotOptimize(coincidence_projection(circuit.run(phi)).probability);
    }
}
BENCHMARK(BM_SimulateCore4);

static void BM_SimulateFull12(benchmark::State& state) {
    auto circuit = circuit_preset("full12");
    double phi = 0.3;
    for (auto _ : state) {
        phi += 1e-6;
        benchmark::DoNotOptimize(coincidence_projection(circuit.run(phi)).probability);
    }
}
BENCHMARK(BM_SimulateFull12);

static void BM_SweepRow(benchmark::State& state) {
    auto settings = MeasurementSetting::max_violation();
    SagnacConfig cfg{7.853981, 1e-6, 0.0};
    double f = 0.1;
    for (auto _ : state) {
        f += 1e-7;
        benchmark::DoNotOptimize(sweep(cfg, f, f + 0.2, 2, settings));
    }
}
BENCHMARK(BM_SweepRow);

static void BM_Sampler10k(benchmark::State& state) {
    auto settings = MeasurementSetting::max_violation();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            run_experiment(M_PI / 2, settings, DetectorModel{1.0, 42, 10'000}));
    }
}
BENCHMARK(BM_Sampler10k);

static void BM_ParseCompileFull12(benchmark::State& state) {
    std::string source =
        "mode s1.H source\nmode s2.V source\nmode a.H loop-co\nmode a.V loop-co\n"
        "mode b.H loop-counter\nmode b.V loop-counter\nmode alice.H alice\nmode alice.V alice\n"
        "mode bob.H bob\nmode bob.V bob\nmode discard.1 discard\nmode discard.2 discard\n"
        "input s1.H s2.V\nroute s1.H a.H discard.1\nroute s2.V b.V discard.2\n"
        "bs a.H b.H\nbs a.V b.V\nsagnac phi\nbs a.H b.H inverse\nbs a.V b.V inverse\n"
        "route a.H alice.H a.H\nroute a.V alice.V a.V\nroute b.H bob.H b.H\nroute b.V bob.V b.V\n";
    for (auto _ : state) {
        benchmark::DoNotOptimize(compile(parse(source)));
    }
}
BENCHMARK(BM_ParseCompileFull12);

BENCHMARK_MAIN();
