#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp_or_empty(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path work_dir() {
    auto dir = fs::temp_directory_path() / "sagbell_cli_tests";
    fs::create_directories(dir);
    return dir;
}

RunResult run_cli(const std::string& args) {
    auto dir = work_dir();
    auto out_path = dir / "stdout.txt";
    auto err_path = dir / "stderr.txt";
    std::string cmd = std::string(SAGBELL_CLI_PATH) + " " + args + " > " + out_path.string() +
                      " 2> " + err_path.string();
    int status = std::system(cmd.c_str());
    int code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    return RunResult{code, slurp_or_empty(out_path), slurp_or_empty(err_path)};
}

std::string circuits_dir() { return SAGBELL_CIRCUITS_DIR; }
std::string malformed_dir() { return SAGBELL_MALFORMED_DIR; }

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("simulate: core4 at the Bell point") {
    auto r = run_cli("simulate --preset core4 --phi 1.5707963");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["coincidence_probability"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(j["postselected"]["amp_HV"]["re"].get<double>() ==
          doctest::Approx(0.7071).epsilon(1e-3));
    CHECK(j["postselected"]["amp_VH"]["re"].get<double>() ==
          doctest::Approx(-0.7071).epsilon(1e-3));
    CHECK(j["pre_projection_state"]["modes"].size() == 4);
}

TEST_CASE("simulate: full12 without rotation") {
    auto r = run_cli("simulate --preset full12 --phi 0");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["coincidence_probability"].get<double>() == doctest::Approx(0.0625).epsilon(1e-12));
}

TEST_CASE("simulate: rotation flags instead of phi") {
    auto r = run_cli("simulate --preset core4 --rotation-hz 0.3797 --loops 10 --radius-m 0.5");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["phi_rad"].get<double>() == doctest::Approx(M_PI / 2).epsilon(1e-3));
}

TEST_CASE("simulate: usage errors exit with 2") {
    CHECK(run_cli("simulate --preset core4").exit_code == 2);                      // no phase
    CHECK(run_cli("simulate --phi 1").exit_code == 2);                             // no circuit
    CHECK(run_cli("simulate --preset core4 --phi 1 --rotation-hz 1").exit_code == 2);
}

TEST_CASE("simulate: malformed circuit file exits 2 with a span diagnostic") {
    auto file = malformed_dir() + std::string("/02_bs_missing_arg.icl");
    auto r = run_cli("simulate --circuit " + file + " --phi 1");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find(":1:") != std::string::npos);
    CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("parse-check: accepts the bundled circuits, rejects the corpus") {
    auto ok = run_cli("parse-check " + circuits_dir() + std::string("/core4.icl"));
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("sagnac phi") != std::string::npos);

    auto ok_json =
        run_cli("--format json parse-check " + circuits_dir() + std::string("/full12.icl"));
    CHECK(ok_json.exit_code == 0);
    CHECK(json::parse(ok_json.out)["statements"].size() == 24);

    for (const auto& entry : fs::directory_iterator(malformed_dir())) {
        if (entry.path().extension() != ".icl") continue;
        auto r = run_cli("parse-check " + entry.path().string());
        INFO("file: " << entry.path().filename().string());
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("error:") != std::string::npos);
    }
}

TEST_CASE("sweep: CSV header, SVG output, reproducibility") {
    auto dir = work_dir();
    auto csv1 = (dir / "sweep1.csv").string();
    auto csv2 = (dir / "sweep2.csv").string();
    auto svg = (dir / "sweep.svg").string();
    auto r1 = run_cli("sweep --f-min 0 --f-max 1 --points 41 --output " + csv1 +
                      " --svg " + svg);
    REQUIRE(r1.exit_code == 0);
    auto r2 = run_cli("sweep --f-min 0 --f-max 1 --points 41 --output " + csv2);
    REQUIRE(r2.exit_code == 0);

    auto text1 = slurp_or_empty(csv1);
    CHECK(text1.rfind("f_hz,omega_rad_s,phi_rad,S_abs,S_signed,P_coincidence,violation\n", 0) ==
          0);
    CHECK(text1 == slurp_or_empty(csv2));

    auto svg_text = slurp_or_empty(svg);
    CHECK(svg_text.find("<svg") != std::string::npos);
    CHECK(svg_text.find("|S| = 2") != std::string::npos);

    CHECK(fs::exists(csv1 + ".manifest.json"));

    CHECK(run_cli("sweep --points 1 --output " + csv1).exit_code == 2);
    CHECK(run_cli("sweep --f-min 1 --f-max 1 --output " + csv1).exit_code == 2);
}

TEST_CASE("bell-freq: table of singlet frequencies") {
    auto r = run_cli("bell-freq --k-min 0 --k-max 2 --loops 10 --radius-m 0.5");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("k,omega_rad_s,f_hz\n", 0) == 0);
    CHECK(r.out.find("0.379") != std::string::npos);
    CHECK(r.out.find("1.13") != std::string::npos);
    CHECK(r.out.find("1.89") != std::string::npos);

    auto neg = run_cli("--format json bell-freq --k-min -1 --k-max -1");
    REQUIRE(neg.exit_code == 0);
    auto j = json::parse(neg.out);
    CHECK(j[0]["f_hz"].get<double>() < 0.0);
}

TEST_CASE("sample: deterministic outputs, seed required") {
    auto dir = work_dir();
    auto p1 = (dir / "runA").string();
    auto p2 = (dir / "runB").string();
    auto cmd = [](const std::string& prefix) {
        return "sample --phi 1.5707963267948966 --shots 3000 --seed 42 --output " + prefix;
    };
    REQUIRE(run_cli(cmd(p1)).exit_code == 0);
    REQUIRE(run_cli(cmd(p2)).exit_code == 0);
    CHECK(slurp_or_empty(p1 + ".ndjson") == slurp_or_empty(p2 + ".ndjson"));
    CHECK(slurp_or_empty(p1 + ".estimate.json") == slurp_or_empty(p2 + ".estimate.json"));

    auto est = json::parse(slurp_or_empty(p1 + ".estimate.json"));
    CHECK(est["shots"].get<uint64_t>() == 3000);
    CHECK(est["seed"].get<uint64_t>() == 42);

    // first NDJSON line mentions shot 0
    auto stream = slurp_or_empty(p1 + ".ndjson");
    CHECK(stream.rfind("{\"alice\":", 0) == 0);
    CHECK(stream.find("\"shot\":0") != std::string::npos);

    CHECK(run_cli("sample --phi 1 --shots 10 --output " + p1).exit_code == 2);  // no seed
    CHECK(run_cli("sample --phi 1 --seed 1 --output " + p1).exit_code == 2);    // no shots
    CHECK(run_cli("sample --phi 1 --shots 0 --seed 1 --output " + p1).exit_code == 2);
}

TEST_CASE("sample: zero efficiency warns but exits 0") {
    auto dir = work_dir();
    auto prefix = (dir / "zero").string();
    auto r = run_cli("sample --phi 1 --shots 100 --seed 7 --efficiency 0 --output " + prefix);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("undefined") != std::string::npos);
    auto est = json::parse(slurp_or_empty(prefix + ".estimate.json"));
    CHECK(est["S_hat"].is_null());
}

TEST_CASE("version flag") {
    auto r = run_cli("--version");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("sagbell 0.1.0") != std::string::npos);
}

TEST_SUITE_END();
