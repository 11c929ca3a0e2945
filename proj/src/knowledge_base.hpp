#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hiplan::kb {

// Error raised by the parsers and validators. `line` is 1-based; 0 means the
// error is not tied to a specific line.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& message)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                      : message),
          line_(line) {}

    int line() const { return line_; }

private:
    int line_ = 0;
};

// A ground atom: predicate applied to an object, e.g. On_right_side_hill(Car).
struct Symbol {
    std::string predicate;
    std::string object;

    std::string name() const { return predicate + "(" + object + ")"; }

    friend bool operator==(const Symbol&, const Symbol&) = default;
};

Symbol parse_symbol_name(const std::string& text, int line = 0);

// Ground operator instance: applying it in `precondition` yields `effect`.
struct Operator {
    std::string id;
    Symbol precondition;
    Symbol effect;

    friend bool operator==(const Operator&, const Operator&) = default;
};

struct KnowledgeBase {
    std::string domain_name;
    std::vector<std::string> objects;     // declaration order, unique
    std::vector<std::string> predicates;  // declaration order, unique
    Symbol goal;
    std::vector<Operator> operators;  // file order, grounded per object

    // All ground symbols: predicates x objects, predicate-major, in
    // declaration order. This ordering also fixes the policy's symbol index.
    std::vector<Symbol> ground_symbols() const;

    friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

struct SymbolInterval {
    Symbol symbol;
    int dimension = 0;  // raw state dimension the interval constrains
    double lower = 0.0;
    double upper = 0.0;

    double midpoint() const { return 0.5 * (lower + upper); }

    friend bool operator==(const SymbolInterval&, const SymbolInterval&) = default;
};

struct GroundingTable {
    std::vector<SymbolInterval> entries;  // file order

    const SymbolInterval* find(const Symbol& s) const;

    friend bool operator==(const GroundingTable&, const GroundingTable&) = default;
};

// Domain file: s-expression PDDL subset with one predicate per precondition
// and effect. Throws ParseError with a line number on malformed input or any
// invariant violation.
KnowledgeBase parse_domain(const std::string& text);

// Grounding table file: one tab-separated entry per line,
//   <pred>(<object>) \t <dimension> \t <lower> \t <upper>
// ';' starts a comment in both formats.
GroundingTable parse_grounding(const std::string& text);

std::string serialize(const KnowledgeBase& kb);
std::string serialize(const GroundingTable& table);

// Cross-check: table entries must be exactly kb's predicates x objects.
void validate_pair(const KnowledgeBase& kb, const GroundingTable& table);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace hiplan::kb
