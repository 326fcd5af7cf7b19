#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sagbell/elements.hpp"
#include "sagbell/modes.hpp"

namespace sagbell {

/// Half-open location of a token in the source text, 1-based.
struct SourceSpan {
    int line = 1;
    int column = 1;
    int length = 1;
};

/// Parse or compile failure, carrying the offending span.
class CircuitLangError : public std::runtime_error {
public:
    CircuitLangError(SourceSpan span, const std::string& message)
        : std::runtime_error(message), span_(span) {}
    const SourceSpan& span() const { return span_; }

    /// "file:line:col: error: message"
    std::string formatted(const std::string& filename) const;

private:
    SourceSpan span_;
};

// -- AST -----------------------------------------------------------------
//
// The interferometer layout language is line oriented, one statement per
// line, '#' comments to end of line:
//
//   mode LABEL ROLE          ROLE: loop-co loop-counter alice bob discard source
//   input LABEL...           creation list of the input state
//   bs LABEL LABEL [inverse] canonical 50:50 splitter on a mode pair
//   phase LABEL NUMBER       fixed phase shift
//   sagnac (NUMBER | phi)    rotation phase pair on the loop-role modes;
//                            the token `phi` leaves it bound at run time
//   route LABEL LABEL LABEL  in, through, discard
//   preset (core4 | full12)  entire circuit from a built-in preset
//
// LABEL: [A-Za-z][A-Za-z0-9._-]*   NUMBER: decimal or scientific literal

struct ModeDeclStmt {
    std::string label;
    ModeRole role;
};

struct InputDeclStmt {
    std::vector<std::string> labels;
};

enum class ElementKind { BeamSplitter, Phase, Sagnac, Route };

struct ElementStmt {
    ElementKind kind;
    std::vector<std::string> labels;   // referenced mode labels, in order
    std::optional<double> number;      // phase value / fixed sagnac phi
    bool symbolic_phi = false;         // sagnac phi
    bool inverse = false;              // bs ... inverse
};

struct PresetStmt {
    std::string name;
};

struct Statement {
    std::variant<ModeDeclStmt, InputDeclStmt, ElementStmt, PresetStmt> node;
    SourceSpan span;  // span of the statement's keyword
};

struct CircuitAst {
    std::vector<Statement> statements;
};

/// Structural equality, spans ignored.
bool same_ast(const CircuitAst& a, const CircuitAst& b);

/// Parses source text into an AST. Deterministic; all lexical, syntax and
/// undeclared-label errors throw CircuitLangError with the offending span.
CircuitAst parse(const std::string& source);

/// Canonical text form; parse(pretty_print(parse(s))) == parse(s).
std::string pretty_print(const CircuitAst& ast);

/// JSON rendering of the AST (used by parse-check and the golden files).
std::string ast_to_json(const CircuitAst& ast);

/// Builds the registry (declaration order) and the compiled element
/// pipeline (declaration order). Role constraint violations - a sagnac
/// element without loop-role modes, a route discard that is neither a
/// discard-role mode nor the vacated in-mode, a preset mixed with other
/// statements - throw CircuitLangError with the span of the bad statement.
std::pair<std::shared_ptr<const ModeRegistry>, Circuit> compile(const CircuitAst& ast);

/// parse + compile of a named file, with errors formatted against it.
std::pair<std::shared_ptr<const ModeRegistry>, Circuit> compile_file(
    const std::string& path);

}  // namespace sagbell
