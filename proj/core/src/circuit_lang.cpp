#include "sagbell/circuit_lang.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sagbell/errors.hpp"

namespace sagbell {

namespace {

struct Token {
    std::string text;
    SourceSpan span;
};

bool valid_label(const std::string& t) {
    if (t.empty() || !std::isalpha(static_cast<unsigned char>(t[0]))) return false;
    for (char c : t)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '_' && c != '-')
            return false;
    return true;
}

std::optional<double> parse_number(const std::string& t) {
    if (t.empty()) return std::nullopt;
    const char* begin = t.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + t.size()) return std::nullopt;
    return v;
}

std::vector<std::vector<Token>> lex(const std::string& source) {
    std::vector<std::vector<Token>> lines;
    std::istringstream in(source);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::vector<Token> tokens;
        size_t i = 0;
        while (i < line.size()) {
            if (std::isspace(static_cast<unsigned char>(line[i]))) {
                ++i;
                continue;
            }
            if (line[i] == '#') break;
            size_t start = i;
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
                   line[i] != '#')
                ++i;
            tokens.push_back(Token{line.substr(start, i - start),
                                   SourceSpan{line_no, static_cast<int>(start) + 1,
                                              static_cast<int>(i - start)}});
        }
        lines.push_back(std::move(tokens));
    }
    return lines;
}

[[noreturn]] void fail(const SourceSpan& span, const std::string& message) {
    throw CircuitLangError(span, message);
}

// Span to blame when an expected token is missing: the last token present.
const SourceSpan& tail_span(const std::vector<Token>& tokens) {
    return tokens.back().span;
}

std::string expect_label(const std::vector<Token>& tokens, size_t idx, const char* what) {
    if (idx >= tokens.size())
        fail(tail_span(tokens), std::string("expected ") + what);
    const Token& t = tokens[idx];
    if (!valid_label(t.text))
        fail(t.span, std::string("expected ") + what + ", got '" + t.text + "'");
    return t.text;
}

void expect_end(const std::vector<Token>& tokens, size_t next) {
    if (next < tokens.size())
        fail(tokens[next].span, "unexpected token '" + tokens[next].text + "'");
}

void check_declared(const std::set<std::string>& declared, const Token& t) {
    if (declared.count(t.text) == 0)
        fail(t.span, "reference to undeclared mode '" + t.text + "'");
}

const char* kind_name(ElementKind k) {
    switch (k) {
        case ElementKind::BeamSplitter: return "bs";
        case ElementKind::Phase: return "phase";
        case ElementKind::Sagnac: return "sagnac";
        case ElementKind::Route: return "route";
    }
    return "?";
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string CircuitLangError::formatted(const std::string& filename) const {
    std::ostringstream out;
    out << filename << ":" << span_.line << ":" << span_.column << ": error: " << what();
    return out.str();
}

CircuitAst parse(const std::string& source) {
    CircuitAst ast;
    std::set<std::string> declared;
    for (const auto& tokens : lex(source)) {
        if (tokens.empty()) continue;
        const Token& head = tokens[0];
        const std::string& kw = head.text;
        Statement stmt;
        stmt.span = head.span;

        if (kw == "mode") {
            std::string label = expect_label(tokens, 1, "mode label");
            if (tokens.size() < 3)
                fail(tail_span(tokens),
                     "expected role (loop-co|loop-counter|alice|bob|discard|source)");
            auto role = mode_role_from_string(tokens[2].text);
            if (!role)
                fail(tokens[2].span, "unknown role '" + tokens[2].text +
                                         "' (expected loop-co|loop-counter|alice|bob|discard|source)");
            expect_end(tokens, 3);
            if (declared.count(label) != 0)
                fail(tokens[1].span, "duplicate mode label '" + label + "'");
            declared.insert(label);
            stmt.node = ModeDeclStmt{label, *role};
        } else if (kw == "input") {
            if (tokens.size() < 2) fail(tail_span(tokens), "expected at least one mode label");
            InputDeclStmt decl;
            for (size_t i = 1; i < tokens.size(); ++i)
                decl.labels.push_back(expect_label(tokens, i, "mode label"));
            for (size_t i = 1; i < tokens.size(); ++i) check_declared(declared, tokens[i]);
            stmt.node = std::move(decl);
        } else if (kw == "bs") {
            // syntax first (arity, token classes), then declaration checks
            ElementStmt e{ElementKind::BeamSplitter, {}, std::nullopt, false, false};
            e.labels.push_back(expect_label(tokens, 1, "first mode label"));
            e.labels.push_back(expect_label(tokens, 2, "second mode label"));
            size_t next = 3;
            if (tokens.size() > 3 && tokens[3].text == "inverse") {
                e.inverse = true;
                next = 4;
            }
            expect_end(tokens, next);
            check_declared(declared, tokens[1]);
            check_declared(declared, tokens[2]);
            stmt.node = std::move(e);
        } else if (kw == "phase") {
            ElementStmt e{ElementKind::Phase, {}, std::nullopt, false, false};
            e.labels.push_back(expect_label(tokens, 1, "mode label"));
            if (tokens.size() < 3) fail(tail_span(tokens), "expected phase value (number)");
            auto num = parse_number(tokens[2].text);
            if (!num) fail(tokens[2].span, "expected number, got '" + tokens[2].text + "'");
            e.number = num;
            expect_end(tokens, 3);
            check_declared(declared, tokens[1]);
            stmt.node = std::move(e);
        } else if (kw == "sagnac") {
            ElementStmt e{ElementKind::Sagnac, {}, std::nullopt, false, false};
            if (tokens.size() < 2) fail(tail_span(tokens), "expected number or 'phi'");
            if (tokens[1].text == "phi") {
                e.symbolic_phi = true;
            } else {
                auto num = parse_number(tokens[1].text);
                if (!num)
                    fail(tokens[1].span,
                         "expected number or 'phi', got '" + tokens[1].text + "'");
                e.number = num;
            }
            expect_end(tokens, 2);
            stmt.node = std::move(e);
        } else if (kw == "route") {
            ElementStmt e{ElementKind::Route, {}, std::nullopt, false, false};
            static const char* names[3] = {"in mode label", "through mode label",
                                           "discard mode label"};
            for (size_t i = 0; i < 3; ++i)
                e.labels.push_back(expect_label(tokens, i + 1, names[i]));
            expect_end(tokens, 4);
            for (size_t i = 0; i < 3; ++i) check_declared(declared, tokens[i + 1]);
            stmt.node = std::move(e);
        } else if (kw == "preset") {
            if (tokens.size() < 2) fail(tail_span(tokens), "expected preset name (core4|full12)");
            const std::string& name = tokens[1].text;
            if (name != "core4" && name != "full12")
                fail(tokens[1].span, "unknown preset '" + name + "' (expected core4|full12)");
            expect_end(tokens, 2);
            stmt.node = PresetStmt{name};
        } else {
            fail(head.span, "unknown statement '" + kw +
                                "' (expected mode|input|bs|phase|sagnac|route|preset)");
        }
        ast.statements.push_back(std::move(stmt));
    }
    return ast;
}

bool same_ast(const CircuitAst& a, const CircuitAst& b) {
    if (a.statements.size() != b.statements.size()) return false;
    for (size_t i = 0; i < a.statements.size(); ++i) {
        const auto& na = a.statements[i].node;
        const auto& nb = b.statements[i].node;
        if (na.index() != nb.index()) return false;
        bool eq = std::visit(
            [&](const auto& x) -> bool {
                using T = std::decay_t<decltype(x)>;
                const auto& y = std::get<T>(nb);
                if constexpr (std::is_same_v<T, ModeDeclStmt>)
                    return x.label == y.label && x.role == y.role;
                else if constexpr (std::is_same_v<T, InputDeclStmt>)
                    return x.labels == y.labels;
                else if constexpr (std::is_same_v<T, ElementStmt>)
                    return x.kind == y.kind && x.labels == y.labels && x.number == y.number &&
                           x.symbolic_phi == y.symbolic_phi && x.inverse == y.inverse;
                else
                    return x.name == std::get<PresetStmt>(nb).name;
            },
            na);
        if (!eq) return false;
    }
    return true;
}

std::string pretty_print(const CircuitAst& ast) {
    std::ostringstream out;
    for (const auto& stmt : ast.statements) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ModeDeclStmt>) {
                    out << "mode " << x.label << " " << to_string(x.role);
                } else if constexpr (std::is_same_v<T, InputDeclStmt>) {
                    out << "input";
                    for (const auto& l : x.labels) out << " " << l;
                } else if constexpr (std::is_same_v<T, ElementStmt>) {
                    out << kind_name(x.kind);
                    for (const auto& l : x.labels) out << " " << l;
                    if (x.kind == ElementKind::Sagnac)
                        out << " " << (x.symbolic_phi ? "phi" : format_number(*x.number));
                    else if (x.number)
                        out << " " << format_number(*x.number);
                    if (x.inverse) out << " inverse";
                } else {
                    out << "preset " << x.name;
                }
                out << "\n";
            },
            stmt.node);
    }
    return out.str();
}

std::string ast_to_json(const CircuitAst& ast) {
    nlohmann::json j;
    j["statements"] = nlohmann::json::array();
    for (const auto& stmt : ast.statements) {
        nlohmann::json s;
        s["line"] = stmt.span.line;
        s["column"] = stmt.span.column;
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ModeDeclStmt>) {
                    s["kind"] = "mode";
                    s["label"] = x.label;
                    s["role"] = to_string(x.role);
                } else if constexpr (std::is_same_v<T, InputDeclStmt>) {
                    s["kind"] = "input";
                    s["labels"] = x.labels;
                } else if constexpr (std::is_same_v<T, ElementStmt>) {
                    s["kind"] = kind_name(x.kind);
                    s["labels"] = x.labels;
                    if (x.kind == ElementKind::Sagnac)
                        s["phi"] = x.symbolic_phi ? nlohmann::json("phi") : nlohmann::json(*x.number);
                    else if (x.number)
                        s["value"] = *x.number;
                    if (x.kind == ElementKind::BeamSplitter) s["inverse"] = x.inverse;
                } else {
                    s["kind"] = "preset";
                    s["name"] = x.name;
                }
            },
            stmt.node);
        j["statements"].push_back(std::move(s));
    }
    return j.dump(2);
}

std::pair<std::shared_ptr<const ModeRegistry>, Circuit> compile(const CircuitAst& ast) {
    // A preset stands alone: it defines the whole circuit.
    const PresetStmt* preset = nullptr;
    for (const auto& stmt : ast.statements) {
        if (const auto* p = std::get_if<PresetStmt>(&stmt.node)) {
            if (ast.statements.size() != 1)
                fail(stmt.span, "a preset must be the only statement in the program");
            preset = p;
        }
    }
    if (preset) {
        Circuit c = circuit_preset(preset->name);
        return {c.registry, std::move(c)};
    }

    auto registry = std::make_shared<ModeRegistry>();
    Circuit circuit;
    bool have_input = false;

    auto lookup = [&](const std::string& label, const SourceSpan& span) -> int {
        auto idx = registry->find(label);
        if (!idx) fail(span, "reference to undeclared mode '" + label + "'");
        return *idx;
    };

    for (const auto& stmt : ast.statements) {
        const SourceSpan& span = stmt.span;
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ModeDeclStmt>) {
                    try {
                        registry->add_mode(x.label, x.role);
                    } catch (const RegistryError& e) {
                        fail(span, e.what());
                    }
                } else if constexpr (std::is_same_v<T, InputDeclStmt>) {
                    if (have_input) fail(span, "duplicate input declaration");
                    have_input = true;
                    for (const auto& l : x.labels)
                        circuit.input_modes.push_back(lookup(l, span));
                } else if constexpr (std::is_same_v<T, ElementStmt>) {
                    switch (x.kind) {
                        case ElementKind::BeamSplitter: {
                            int m1 = lookup(x.labels[0], span);
                            int m2 = lookup(x.labels[1], span);
                            if (m1 == m2) fail(span, "bs needs two distinct modes");
                            circuit.elements.push_back(BeamSplitterElem{m1, m2, x.inverse});
                            break;
                        }
                        case ElementKind::Phase:
                            circuit.elements.push_back(
                                PhaseShiftElem{lookup(x.labels[0], span), *x.number});
                            break;
                        case ElementKind::Sagnac: {
                            auto co = registry->modes_with_role(ModeRole::LoopCo);
                            auto counter = registry->modes_with_role(ModeRole::LoopCounter);
                            if (co.empty() || counter.empty())
                                fail(span,
                                     "sagnac requires declared loop-co and loop-counter modes");
                            circuit.elements.push_back(SagnacPhaseElem{
                                std::move(co), std::move(counter),
                                x.symbolic_phi ? std::nullopt : x.number});
                            break;
                        }
                        case ElementKind::Route: {
                            int in = lookup(x.labels[0], span);
                            int through = lookup(x.labels[1], span);
                            int discard = lookup(x.labels[2], span);
                            if (through == discard)
                                fail(span, "route discard must differ from through");
                            if (in == through && discard == in)
                                fail(span, "in-place route needs a separate discard mode");
                            if (discard != in && registry->role(discard) != ModeRole::Discard)
                                fail(span,
                                     "route discard must be a discard-role mode or the vacated "
                                     "in-mode");
                            circuit.elements.push_back(RouteElem{in, through, discard});
                            break;
                        }
                    }
                } else {
                    // preset handled above
                }
            },
            stmt.node);
    }

    circuit.registry = registry;
    return {registry, std::move(circuit)};
}

std::pair<std::shared_ptr<const ModeRegistry>, Circuit> compile_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open circuit file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return compile(parse(buf.str()));
}

}  // namespace sagbell
