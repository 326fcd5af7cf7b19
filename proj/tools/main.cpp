// sagbell: simulate the rotating Sagnac-loop entanglement source, analyze
// the CHSH curve, and run seeded detection experiments.
//
// Subcommands: simulate, sweep, bell-freq, sample, parse-check.
// Exit codes: 0 success, 1 domain error, 2 usage or parse error.

#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sagbell/bell.hpp"
#include "sagbell/circuit_lang.hpp"
#include "sagbell/elements.hpp"
#include "sagbell/errors.hpp"
#include "sagbell/sampler.hpp"
#include "sagbell/version.hpp"
#include "svg_plot.hpp"

namespace {

using namespace sagbell;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GlobalOpts {
    bool quiet = false;
    std::string format;
};

std::string iso8601_utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw ConfigError("failed writing to '" + path + "'");
}

// The manifest accompanies each file output as <output>.manifest.json; the
// data files themselves stay timestamp-free so repeat runs are byte
// identical.
void write_manifest(const std::string& output_path, const std::string& command,
                    const std::map<std::string, std::string>& parameters,
                    std::optional<uint64_t> seed) {
    json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["tool_version"] = kVersion;
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["timestamp"] = iso8601_utc_now();
    write_file(output_path + ".manifest.json", j.dump(2) + "\n");
}

// Shared physical-parameter flags. Wavelength and area carry reference-scale
// defaults; area may be given directly or as loops x radius.
struct PhysicalFlags {
    double wavelength_m = 1e-6;
    double area_m2 = 0.0;
    double loops = 10.0;
    double radius_m = 0.5;
    bool area_given = false;

    std::optional<double> rotation_hz;
    std::optional<double> rotation_rad_s;

    void add_area_flags(CLI::App* cmd) {
        cmd->add_option("--wavelength-m", wavelength_m, "photon wavelength [m]")
            ->capture_default_str();
        auto* area = cmd->add_option("--area-m2", area_m2, "interferometer area [m^2]");
        cmd->add_option("--loops", loops, "fiber loop count (with --radius-m)")
            ->capture_default_str();
        cmd->add_option("--radius-m", radius_m, "fiber loop radius [m] (with --loops)")
            ->capture_default_str();
        area->each([this](const std::string&) { area_given = true; });
    }

    void add_rotation_flags(CLI::App* cmd) {
        cmd->add_option("--rotation-hz", rotation_hz, "platform rotation frequency f [Hz]");
        cmd->add_option("--rotation-rad-s", rotation_rad_s,
                        "platform angular frequency Omega [rad/s]");
    }

    double area() const {
        if (area_given) return area_m2;
        return loops * std::numbers::pi * radius_m * radius_m;
    }

    SagnacConfig config_without_rotation() const {
        return SagnacConfig{area(), wavelength_m, 0.0};
    }

    bool has_rotation() const { return rotation_hz.has_value() || rotation_rad_s.has_value(); }

    SagnacConfig config() const {
        if (rotation_hz && rotation_rad_s)
            throw UsageError("give only one of --rotation-hz / --rotation-rad-s");
        auto cfg = config_without_rotation();
        if (rotation_hz) return cfg.with_rotation_hz(*rotation_hz);
        if (rotation_rad_s) return cfg.with_omega(*rotation_rad_s);
        throw UsageError("missing rotation: give --rotation-hz or --rotation-rad-s");
    }
};

json two_qubit_to_json(const TwoQubitState& q) {
    auto c = [](Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; };
    return json{{"amp_HV", c(q.amp_hv)},
                {"amp_VH", c(q.amp_vh)},
                {"amp_HH", c(q.amp_hh)},
                {"amp_VV", c(q.amp_vv)}};
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string preset;
    std::string circuit_file;
    std::optional<double> phi;
    PhysicalFlags phys;
    std::string output;
};

int cmd_simulate(const SimulateArgs& args, const GlobalOpts& global) {
    if (args.preset.empty() == args.circuit_file.empty())
        throw UsageError("give exactly one of --preset / --circuit");

    double phi;
    std::string phi_source;
    if (args.phi) {
        if (args.phys.has_rotation())
            throw UsageError("give either --phi or a rotation, not both");
        phi = *args.phi;
        phi_source = "explicit";
    } else if (args.phys.has_rotation()) {
        phi = sagnac_phase(args.phys.config());
        phi_source = "rotation";
    } else {
        throw UsageError("missing phase: give --phi or --rotation-hz/--rotation-rad-s");
    }

    Circuit circuit;
    std::string name;
    if (!args.preset.empty()) {
        circuit = circuit_preset(args.preset);
        name = args.preset;
    } else {
        circuit = compile_file(args.circuit_file).second;
        name = args.circuit_file;
        if (circuit.input_modes.empty())
            throw ConfigError("circuit file has no input declaration");
    }

    FockState out = circuit.run(phi);
    auto projected = coincidence_projection(out);

    json j;
    j["circuit"] = name;
    j["phi_rad"] = phi;
    j["phi_source"] = phi_source;
    j["pre_projection_state"] = json::parse(state_to_json(out));
    j["coincidence_probability"] = projected.probability;
    if (projected.null_result) {
        j["postselected"] = nullptr;
    } else {
        auto q = two_qubit_from_state(projected.state);
        j["postselected"] = two_qubit_to_json(q);
        j["S_abs_default_settings"] =
            std::abs(chsh_S(q, MeasurementSetting::max_violation()));
    }

    std::string text = j.dump(2) + "\n";
    if (args.output.empty()) {
        std::cout << text;
    } else {
        write_file(args.output, text);
        write_manifest(args.output, "simulate",
                       {{"circuit", name},
                        {"phi_rad", std::to_string(phi)},
                        {"phi_source", phi_source}},
                       std::nullopt);
        if (!global.quiet)
            std::cout << "wrote " << args.output << " (coincidence p = "
                      << projected.probability << ")\n";
    }
    return kExitOk;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
    double f_min = 0.0;
    double f_max = 2.0;
    int points = 401;
    PhysicalFlags phys;
    std::string output;
    std::string svg;
};

int cmd_sweep(const SweepArgs& args, const GlobalOpts& global) {
    if (args.points < 2) throw UsageError("--points must be >= 2");
    if (!(args.f_min < args.f_max)) throw UsageError("need --f-min < --f-max");
    auto rows = sweep(args.phys.config_without_rotation(), args.f_min, args.f_max,
                      args.points, MeasurementSetting::max_violation());
    auto csv = sweep_to_csv(rows);
    if (args.output.empty()) {
        std::cout << csv;
    } else {
        write_file(args.output, csv);
        write_manifest(args.output, "sweep",
                       {{"f_min_hz", std::to_string(args.f_min)},
                        {"f_max_hz", std::to_string(args.f_max)},
                        {"points", std::to_string(args.points)},
                        {"area_m2", std::to_string(args.phys.area())},
                        {"wavelength_m", std::to_string(args.phys.wavelength_m)}},
                       std::nullopt);
        if (!global.quiet) std::cout << "wrote " << args.output << "\n";
    }
    if (!args.svg.empty()) {
        write_file(args.svg, plot::sweep_svg(rows));
        if (!global.quiet) std::cout << "wrote " << args.svg << "\n";
    }
    return kExitOk;
}

// --------------------------------------------------------------- bell-freq

struct BellFreqArgs {
    long k_min = 0;
    long k_max = 2;
    PhysicalFlags phys;
    std::string output;
};

int cmd_bell_freq(const BellFreqArgs& args, const GlobalOpts& global) {
    if (args.k_min > args.k_max) throw UsageError("need k-min <= k-max");
    auto cfg = args.phys.config_without_rotation();

    std::ostringstream out;
    if (global.format == "json") {
        json rows = json::array();
        for (long k = args.k_min; k <= args.k_max; ++k) {
            auto ob = omega_bell(cfg, k);
            rows.push_back({{"k", k}, {"omega_rad_s", ob.omega_rad_s}, {"f_hz", ob.freq_hz}});
        }
        out << rows.dump(2) << "\n";
    } else {
        out << "k,omega_rad_s,f_hz\n";
        char buf[128];
        for (long k = args.k_min; k <= args.k_max; ++k) {
            auto ob = omega_bell(cfg, k);
            std::snprintf(buf, sizeof(buf), "%ld,%.12g,%.12g\n", k, ob.omega_rad_s, ob.freq_hz);
            out << buf;
        }
    }
    if (args.output.empty())
        std::cout << out.str();
    else {
        write_file(args.output, out.str());
        if (!global.quiet) std::cout << "wrote " << args.output << "\n";
    }
    return kExitOk;
}

// ------------------------------------------------------------------ sample

struct SampleArgs {
    std::optional<double> phi;
    PhysicalFlags phys;
    uint64_t shots = 0;
    std::optional<uint64_t> seed;
    double efficiency = 1.0;
    std::string model = "full12";
    std::string output;
};

int cmd_sample(const SampleArgs& args, const GlobalOpts& global) {
    if (!args.seed) throw UsageError("--seed is required (no implicit entropy)");
    if (args.shots == 0) throw UsageError("--shots must be >= 1");
    double phi;
    if (args.phi) {
        if (args.phys.has_rotation())
            throw UsageError("give either --phi or a rotation, not both");
        phi = *args.phi;
    } else if (args.phys.has_rotation()) {
        phi = sagnac_phase(args.phys.config());
    } else {
        throw UsageError("missing phase: give --phi or --rotation-hz/--rotation-rad-s");
    }
    CircuitModel model;
    if (args.model == "full12")
        model = CircuitModel::Full12;
    else if (args.model == "core4")
        model = CircuitModel::Core4;
    else
        throw UsageError("--model must be core4 or full12");

    DetectorModel det{args.efficiency, *args.seed, args.shots};
    auto result = run_experiment(phi, MeasurementSetting::max_violation(), det, model);

    std::string records_path = args.output + ".ndjson";
    std::ofstream rec(records_path, std::ios::binary);
    if (!rec) throw ConfigError("cannot open output file '" + records_path + "'");
    for (const auto& r : result.records) rec << record_to_json(r) << "\n";
    if (!rec) throw ConfigError("failed writing to '" + records_path + "'");
    rec.close();

    std::string estimate_path = args.output + ".estimate.json";
    write_file(estimate_path, estimate_to_json(result.estimate) + "\n");
    write_manifest(args.output, "sample",
                   {{"phi_rad", std::to_string(phi)},
                    {"shots", std::to_string(args.shots)},
                    {"efficiency", std::to_string(args.efficiency)},
                    {"model", args.model}},
                   *args.seed);

    const auto& est = result.estimate;
    if (est.S_hat) {
        if (!global.quiet)
            std::cout << "S_hat = " << *est.S_hat << " +/- " << *est.stderr_S
                      << "  (|S_hat| = " << std::abs(*est.S_hat)
                      << ", coincidence rate = " << est.coincidence_rate << ", shots = "
                      << est.shots << ")\n";
    } else {
        std::cout << "warning: no coincidences in some setting pair; estimate undefined\n";
    }
    if (!global.quiet)
        std::cout << "wrote " << records_path << ", " << estimate_path << "\n";
    return kExitOk;
}

// ------------------------------------------------------------- parse-check

struct ParseCheckArgs {
    std::string file;
};

int cmd_parse_check(const ParseCheckArgs& args, const GlobalOpts& global) {
    std::ifstream in(args.file, std::ios::binary);
    if (!in) throw ConfigError("cannot open circuit file '" + args.file + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    auto ast = parse(buf.str());
    compile(ast);
    if (global.format == "json")
        std::cout << ast_to_json(ast) << "\n";
    else
        std::cout << pretty_print(ast);
    if (!global.quiet)
        std::cerr << args.file << ": ok (" << ast.statements.size() << " statements)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotating Sagnac-loop entanglement simulator and CHSH analysis"};
    app.set_version_flag("--version", std::string("sagbell ") + kVersion);
    app.require_subcommand(1);

    GlobalOpts global;
    app.add_flag("--quiet", global.quiet, "suppress informational output");
    app.add_option("--format", global.format, "output format where applicable")
        ->check(CLI::IsMember({"csv", "json", "ndjson", "svg"}));

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "run a circuit and post-select coincidences");
    c_sim->add_option("--preset", sim.preset, "built-in circuit (core4|full12)")
        ->check(CLI::IsMember({"core4", "full12"}));
    c_sim->add_option("--circuit", sim.circuit_file, "circuit description file (.icl)");
    c_sim->add_option("--phi", sim.phi, "Sagnac phase [rad]");
    sim.phys.add_area_flags(c_sim);
    sim.phys.add_rotation_flags(c_sim);
    c_sim->add_option("--output", sim.output, "write JSON here instead of stdout");

    SweepArgs sw;
    auto* c_sweep = app.add_subcommand("sweep", "scan rotation frequency; CSV and SVG output");
    c_sweep->add_option("--f-min", sw.f_min, "start frequency [Hz]")->capture_default_str();
    c_sweep->add_option("--f-max", sw.f_max, "end frequency [Hz]")->capture_default_str();
    c_sweep->add_option("--points", sw.points, "grid size (>= 2)")->capture_default_str();
    sw.phys.add_area_flags(c_sweep);
    c_sweep->add_option("--output", sw.output, "CSV output path (default stdout)");
    c_sweep->add_option("--svg", sw.svg, "also write an SVG figure here");

    BellFreqArgs bf;
    auto* c_bf = app.add_subcommand("bell-freq", "rotation frequencies that reach the singlet");
    c_bf->add_option("--k-min", bf.k_min, "first branch index")->capture_default_str();
    c_bf->add_option("--k-max", bf.k_max, "last branch index")->capture_default_str();
    bf.phys.add_area_flags(c_bf);
    c_bf->add_option("--output", bf.output, "write table here instead of stdout");

    SampleArgs sa;
    auto* c_sample = app.add_subcommand("sample", "seeded Monte Carlo detection run");
    c_sample->add_option("--phi", sa.phi, "Sagnac phase [rad]");
    sa.phys.add_area_flags(c_sample);
    sa.phys.add_rotation_flags(c_sample);
    c_sample->add_option("--shots", sa.shots, "number of shots")->required();
    c_sample->add_option("--seed", sa.seed, "RNG seed (required)");
    c_sample->add_option("--efficiency", sa.efficiency, "per-detector click probability")
        ->capture_default_str();
    c_sample->add_option("--model", sa.model, "coincidence model (core4|full12)")
        ->check(CLI::IsMember({"core4", "full12"}))
        ->capture_default_str();
    c_sample->add_option("--output", sa.output, "output prefix for .ndjson/.estimate.json")
        ->required();

    ParseCheckArgs pc;
    auto* c_pc = app.add_subcommand("parse-check", "parse and compile a circuit file");
    c_pc->add_option("file", pc.file, "circuit description file (.icl)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (c_sim->parsed()) return cmd_simulate(sim, global);
        if (c_sweep->parsed()) return cmd_sweep(sw, global);
        if (c_bf->parsed()) return cmd_bell_freq(bf, global);
        if (c_sample->parsed()) return cmd_sample(sa, global);
        if (c_pc->parsed()) return cmd_parse_check(pc, global);
    } catch (const CircuitLangError& e) {
        std::string file = !sim.circuit_file.empty() ? sim.circuit_file : pc.file;
        std::cerr << e.formatted(file.empty() ? "<input>" : file) << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitOk;
}
