#include "knowledge_base.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hiplan::kb {

namespace {

struct Token {
    enum Kind { LParen, RParen, Atom, End } kind;
    std::string text;
    int line;
};

// S-expression tokenizer with line tracking; ';' comments run to end of line.
class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_ws();
        if (pos_ >= text_.size()) return {Token::End, "", line_};
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            return {Token::LParen, "(", line_};
        }
        if (c == ')') {
            ++pos_;
            return {Token::RParen, ")", line_};
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ';') {
            ++pos_;
        }
        return {Token::Atom, text_.substr(start, pos_ - start), line_};
    }

private:
    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

class DomainParser {
public:
    Lexer lex;

    explicit DomainParser(const std::string& text) : lex(text) {}

    KnowledgeBase parse() {
        expect(Token::LParen);
        expect_atom("define");
        expect(Token::LParen);
        expect_atom("domain");
        kb_.domain_name = expect_name("domain name");
        expect(Token::RParen);

        parse_objects();
        parse_predicates();
        parse_goal();
        while (true) {
            Token t = lex.next();
            if (t.kind == Token::RParen) break;
            if (t.kind != Token::LParen) fail(t, "expected (:operator ...) or ')'");
            parse_operator(t.line);
        }
        Token t = lex.next();
        if (t.kind != Token::End) fail(t, "trailing content after domain");
        return kb_;
    }

private:
    KnowledgeBase kb_;

    [[noreturn]] void fail(const Token& t, const std::string& msg) {
        throw ParseError(t.line, msg + (t.kind == Token::End ? " (unexpected end of input)"
                                                             : ", got '" + t.text + "'"));
    }

    Token expect(Token::Kind kind) {
        Token t = lex.next();
        if (t.kind != kind) {
            fail(t, std::string("expected '") + (kind == Token::LParen ? "(" : ")") + "'");
        }
        return t;
    }

    void expect_atom(const std::string& text) {
        Token t = lex.next();
        if (t.kind != Token::Atom || t.text != text) fail(t, "expected '" + text + "'");
    }

    std::string expect_name(const std::string& what) {
        Token t = lex.next();
        if (t.kind != Token::Atom || t.text.empty() || t.text[0] == ':' || t.text[0] == '?') {
            fail(t, "expected " + what);
        }
        return t.text;
    }

    void expect_keyword(const std::string& kw) {
        Token t = lex.next();
        if (t.kind != Token::Atom || t.text != kw) fail(t, "expected '" + kw + "'");
    }

    void parse_objects() {
        expect(Token::LParen);
        expect_keyword(":objects");
        while (true) {
            Token t = lex.next();
            if (t.kind == Token::RParen) break;
            if (t.kind != Token::Atom) fail(t, "expected object name");
            if (std::find(kb_.objects.begin(), kb_.objects.end(), t.text) != kb_.objects.end()) {
                throw ParseError(t.line, "duplicate object '" + t.text + "'");
            }
            kb_.objects.push_back(t.text);
        }
        if (kb_.objects.empty()) throw ParseError(0, "domain declares no objects");
    }

    void parse_predicates() {
        expect(Token::LParen);
        expect_keyword(":predicates");
        while (true) {
            Token t = lex.next();
            if (t.kind == Token::RParen) break;
            if (t.kind != Token::LParen) fail(t, "expected (<predicate> ?x)");
            std::string name = expect_name("predicate name");
            Token var = lex.next();
            if (var.kind != Token::Atom || var.text.empty() || var.text[0] != '?') {
                fail(var, "expected variable like '?x'");
            }
            expect(Token::RParen);
            if (std::find(kb_.predicates.begin(), kb_.predicates.end(), name) !=
                kb_.predicates.end()) {
                throw ParseError(t.line, "duplicate predicate '" + name + "'");
            }
            kb_.predicates.push_back(name);
        }
        if (kb_.predicates.empty()) throw ParseError(0, "domain declares no predicates");
    }

    void parse_goal() {
        Token opener = lex.next();
        if (opener.kind != Token::LParen) {
            if (opener.kind == Token::RParen || opener.kind == Token::End) {
                throw ParseError(opener.line, "missing (:goal ...) section");
            }
            fail(opener, "expected (:goal ...)");
        }
        Token kw = lex.next();
        if (kw.kind != Token::Atom || kw.text != ":goal") {
            throw ParseError(kw.line, "missing (:goal ...) section, found '" + kw.text + "'");
        }
        Token t = expect(Token::LParen);
        std::string pred = expect_name("goal predicate");
        std::string obj = expect_name("goal object");
        expect(Token::RParen);
        expect(Token::RParen);
        check_predicate(pred, t.line);
        if (std::find(kb_.objects.begin(), kb_.objects.end(), obj) == kb_.objects.end()) {
            throw ParseError(t.line, "unknown object '" + obj + "' in goal");
        }
        kb_.goal = Symbol{pred, obj};
    }

    // (:operator <id> :precondition (<pred> ?x) :effect (<pred> ?x))
    // Already consumed the opening '('. Instantiated once per object; ids get
    // a ':<object>' suffix when the domain has more than one object.
    void parse_operator(int line) {
        expect_keyword(":operator");
        std::string id = expect_name("operator id");
        if (id.find(':') != std::string::npos) {
            throw ParseError(line, "operator id may not contain ':'");
        }
        expect_keyword(":precondition");
        std::string pre = parse_pred_var();
        expect_keyword(":effect");
        std::string eff = parse_pred_var();
        expect(Token::RParen);

        check_predicate(pre, line);
        check_predicate(eff, line);
        if (pre == eff) {
            throw ParseError(line, "operator '" + id + "' has identical precondition and effect");
        }
        for (const Operator& op : kb_.operators) {
            if (op.id == id || op.id.substr(0, op.id.find(':')) == id) {
                throw ParseError(line, "duplicate operator id '" + id + "'");
            }
        }
        for (const std::string& obj : kb_.objects) {
            std::string inst_id = kb_.objects.size() == 1 ? id : id + ":" + obj;
            kb_.operators.push_back(Operator{inst_id, Symbol{pre, obj}, Symbol{eff, obj}});
        }
    }

    std::string parse_pred_var() {
        expect(Token::LParen);
        std::string pred = expect_name("predicate name");
        Token var = lex.next();
        if (var.kind != Token::Atom || var.text.empty() || var.text[0] != '?') {
            fail(var, "expected variable like '?x'");
        }
        expect(Token::RParen);
        return pred;
    }

    void check_predicate(const std::string& name, int line) {
        if (std::find(kb_.predicates.begin(), kb_.predicates.end(), name) ==
            kb_.predicates.end()) {
            throw ParseError(line, "unknown predicate '" + name + "'");
        }
    }
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Symbol parse_symbol_name(const std::string& text, int line) {
    std::size_t open = text.find('(');
    if (open == std::string::npos || text.back() != ')' || open == 0 ||
        open + 2 > text.size() - 1) {
        throw ParseError(line, "expected symbol like 'Predicate(Object)', got '" + text + "'");
    }
    return Symbol{text.substr(0, open), text.substr(open + 1, text.size() - open - 2)};
}

std::vector<Symbol> KnowledgeBase::ground_symbols() const {
    std::vector<Symbol> out;
    out.reserve(predicates.size() * objects.size());
    for (const std::string& pred : predicates) {
        for (const std::string& obj : objects) {
            out.push_back(Symbol{pred, obj});
        }
    }
    return out;
}

const SymbolInterval* GroundingTable::find(const Symbol& s) const {
    for (const SymbolInterval& e : entries) {
        if (e.symbol == s) return &e;
    }
    return nullptr;
}

KnowledgeBase parse_domain(const std::string& text) {
    return DomainParser(text).parse();
}

GroundingTable parse_grounding(const std::string& text) {
    GroundingTable table;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == ';') continue;

        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            std::size_t tab = line.find('\t', pos);
            fields.push_back(line.substr(pos, tab == std::string::npos ? tab : tab - pos));
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }
        if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
            fields.back().pop_back();
        }
        if (fields.size() != 4) {
            throw ParseError(line_no, "expected 4 tab-separated fields, got " +
                                          std::to_string(fields.size()));
        }

        SymbolInterval entry;
        entry.symbol = parse_symbol_name(fields[0], line_no);

        auto parse_num = [&](const std::string& s, const char* what, double& out) {
            const char* begin = s.data();
            const char* end = s.data() + s.size();
            auto [ptr, ec] = std::from_chars(begin, end, out);
            if (ec != std::errc() || ptr != end) {
                throw ParseError(line_no, std::string("non-numeric ") + what + " '" + s + "'");
            }
        };
        double dim = 0.0;
        parse_num(fields[1], "dimension", dim);
        if (dim < 0 || dim != static_cast<int>(dim)) {
            throw ParseError(line_no, "dimension must be a non-negative integer");
        }
        entry.dimension = static_cast<int>(dim);
        parse_num(fields[2], "lower bound", entry.lower);
        parse_num(fields[3], "upper bound", entry.upper);
        if (!(entry.lower < entry.upper)) {
            throw ParseError(line_no, "lower bound must be strictly below upper bound");
        }
        if (table.find(entry.symbol) != nullptr) {
            throw ParseError(line_no, "duplicate symbol '" + entry.symbol.name() + "'");
        }
        table.entries.push_back(entry);
    }
    return table;
}

std::string serialize(const KnowledgeBase& kb) {
    std::ostringstream out;
    out << "(define (domain " << kb.domain_name << ")\n";
    out << "  (:objects";
    for (const std::string& obj : kb.objects) out << " " << obj;
    out << ")\n";
    out << "  (:predicates";
    for (const std::string& pred : kb.predicates) out << " (" << pred << " ?x)";
    out << ")\n";
    out << "  (:goal (" << kb.goal.predicate << " " << kb.goal.object << "))\n";
    // Operators were instantiated per object from one declaration; emit each
    // declaration once, in first-occurrence order.
    std::vector<std::string> seen;
    for (const Operator& op : kb.operators) {
        std::string base = op.id.substr(0, op.id.find(':'));
        if (std::find(seen.begin(), seen.end(), base) != seen.end()) continue;
        seen.push_back(base);
        out << "  (:operator " << base << " :precondition (" << op.precondition.predicate
            << " ?x) :effect (" << op.effect.predicate << " ?x))\n";
    }
    out << ")\n";
    return out.str();
}

std::string serialize(const GroundingTable& table) {
    std::ostringstream out;
    for (const SymbolInterval& e : table.entries) {
        out << e.symbol.name() << "\t" << e.dimension << "\t" << format_double(e.lower) << "\t"
            << format_double(e.upper) << "\n";
    }
    return out.str();
}

void validate_pair(const KnowledgeBase& kb, const GroundingTable& table) {
    std::vector<Symbol> expected = kb.ground_symbols();
    for (const Symbol& s : expected) {
        if (table.find(s) == nullptr) {
            throw ParseError(0, "grounding table has no entry for symbol '" + s.name() + "'");
        }
    }
    if (table.entries.size() != expected.size()) {
        for (const SymbolInterval& e : table.entries) {
            if (std::find(expected.begin(), expected.end(), e.symbol) == expected.end()) {
                throw ParseError(0, "grounding table entry '" + e.symbol.name() +
                                        "' is not a domain symbol");
            }
        }
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace hiplan::kb
