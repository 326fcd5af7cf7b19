#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sagbell/bell.hpp"
#include "sagbell/circuit_lang.hpp"
#include "sagbell/errors.hpp"
#include "test_util.hpp"

using namespace sagbell;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path circuits_dir() { return SAGBELL_CIRCUITS_DIR; }
std::filesystem::path malformed_dir() { return SAGBELL_MALFORMED_DIR; }
std::filesystem::path golden_dir() { return SAGBELL_GOLDEN_DIR; }

// Span inside the source: line within line count, column within that line.
void check_span_in_bounds(const std::string& source, const SourceSpan& span) {
    std::vector<std::string> lines;
    std::istringstream in(source);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(span.line >= 1);
    REQUIRE(span.line <= static_cast<int>(lines.size()));
    const auto& l = lines[static_cast<size_t>(span.line - 1)];
    CHECK(span.column >= 1);
    CHECK(span.column <= static_cast<int>(l.size()) + 1);
    CHECK(span.length >= 1);
    CHECK(span.column - 1 + span.length <= static_cast<int>(l.size()) + 1);
}

}  // namespace

TEST_SUITE_BEGIN("lang");

TEST_CASE("smallest valid program: a lone preset") {
    auto ast = parse("preset full12\n");
    REQUIRE(ast.statements.size() == 1);
    auto* p = std::get_if<PresetStmt>(&ast.statements[0].node);
    REQUIRE(p != nullptr);
    CHECK(p->name == "full12");

    auto [reg, circuit] = compile(ast);
    CHECK(reg->size() == 12);
    CHECK(testutil::same_circuit(circuit, circuit_preset("full12")));
}

TEST_CASE("core4.icl parses to the golden AST and compiles to the loop pipeline") {
    auto source = slurp(circuits_dir() / "core4.icl");
    auto ast = parse(source);
    CHECK(ast.statements.size() == 10);

    auto golden = slurp(golden_dir() / "core4_ast.json");
    CHECK(ast_to_json(ast) + "\n" == golden);

    auto [reg, circuit] = compile(ast);
    REQUIRE(reg->size() == 4);
    CHECK(circuit.has_symbolic_phi());

    // bind phi = pi/2 and check the singlet comes out
    auto proj = coincidence_projection(circuit.run(M_PI / 2));
    auto q = two_qubit_from_state(proj.state);
    TwoQubitState bell;
    bell.amp_hv = Complex{1.0 / std::sqrt(2.0), 0.0};
    bell.amp_vh = Complex{-1.0 / std::sqrt(2.0), 0.0};
    CHECK(fidelity(q, bell) >= 1.0 - 1e-12);
}

TEST_CASE("full12.icl compiles to the same circuit as the preset builder") {
    auto [reg, circuit] = compile_file((circuits_dir() / "full12.icl").string());
    CHECK(reg->size() == 12);
    CHECK(testutil::same_circuit(circuit, circuit_preset("full12")));

    auto proj = coincidence_projection(circuit.run(0.0));
    CHECK(proj.probability == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("symbolic phi: one compile, many bindings") {
    auto [reg, circuit] = compile_file((circuits_dir() / "core4.icl").string());
    for (double phi : {0.0, 0.5, 1.0, 2.0}) {
        auto proj = coincidence_projection(circuit.run(phi));
        CHECK(proj.probability ==
              doctest::Approx((1.0 + std::cos(phi) * std::cos(phi)) / 2.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(circuit.run(), ConfigError);  // unbound phi
}

TEST_CASE("missing argument points at the offending line") {
    try {
        parse("bs a.H\n");
        FAIL("expected a parse error");
    } catch (const CircuitLangError& e) {
        CHECK(e.span().line == 1);
        CHECK(std::string(e.what()).find("second mode label") != std::string::npos);
    }
}

TEST_CASE("every malformed corpus file is rejected with an in-bounds span") {
    size_t count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(malformed_dir())) {
        if (entry.path().extension() != ".icl") continue;
        ++count;
        auto source = slurp(entry.path());
        INFO("file: " << entry.path().filename().string());
        try {
            compile(parse(source));
            FAIL_CHECK("expected rejection: " << entry.path().filename().string());
        } catch (const CircuitLangError& e) {
            check_span_in_bounds(source, e.span());
            CHECK(std::string(e.what()).size() > 0);
        }
    }
    CHECK(count >= 20);
}

TEST_CASE("pretty-print round trip over the bundled and synthetic corpus") {
    std::vector<std::string> sources = {
        slurp(circuits_dir() / "core4.icl"),
        slurp(circuits_dir() / "full12.icl"),
        "preset core4\n",
        "mode a.H loop-co\nmode b.H loop-counter\n"
        "input a.H a.H\nbs a.H b.H\nphase b.H 2.5e-3\nsagnac 0.25\nbs a.H b.H inverse\n",
    };
    for (const auto& src : sources) {
        auto ast = parse(src);
        auto printed = pretty_print(ast);
        auto reparsed = parse(printed);
        CHECK(same_ast(ast, reparsed));
        CHECK(pretty_print(reparsed) == printed);
    }
}

TEST_CASE("parsing is deterministic") {
    auto source = slurp(circuits_dir() / "full12.icl");
    CHECK(ast_to_json(parse(source)) == ast_to_json(parse(source)));
}

TEST_CASE("programmatically reordered AST fails at compile time") {
    auto ast = parse("mode a.H loop-co\nmode b.H loop-counter\nbs a.H b.H\n");
    std::rotate(ast.statements.begin(), ast.statements.begin() + 2, ast.statements.end());
    CHECK_THROWS_AS(compile(ast), CircuitLangError);
}

TEST_CASE("error formatting carries file, line and column") {
    try {
        parse("mode a.H loopy\n");
        FAIL("expected a parse error");
    } catch (const CircuitLangError& e) {
        auto msg = e.formatted("x.icl");
        CHECK(msg.rfind("x.icl:1:10: error:", 0) == 0);
    }
}

TEST_SUITE_END();
