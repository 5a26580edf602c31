#pragma once

#include "varkit/dsl/model.hpp"

#include <cctype>
#include <optional>
#include <string>
#include <vector>

namespace varkit::dsl {

namespace lex {

enum class Kind { ident, number, symbol, end };

struct Token {
    Kind kind = Kind::end;
    std::string text;
    int line = 1;
    int column = 1;
};

inline std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t by) {
        for (std::size_t k = 0; k < by; ++k) {
            if (src[i + k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        i += by;
    };
    while (i < src.size()) {
        const char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            t.kind = Kind::ident;
            t.text = src.substr(i, j - i);
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.') {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            t.kind = Kind::number;
            t.text = src.substr(i, j - i);
            advance(j - i);
        } else if (std::string("{}();:,=+-*/^").find(c) != std::string::npos) {
            t.kind = Kind::symbol;
            t.text = std::string(1, c);
            advance(1);
        } else {
            throw ParseError("unexpected character '" + std::string(1, c) + "'", line, col);
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Kind::end;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

} // namespace lex

/// Recursive-descent parser for the model format. Errors carry line/column.
class Parser {
public:
    explicit Parser(const std::string& source) : tokens_(lex::tokenize(source)) {}

    ModelFile parse() {
        // the space block must come first so later expressions can resolve
        expect_ident("space");
        ModelFile model = parse_space_block();
        std::vector<std::optional<JetExpr>> equations(
            static_cast<std::size_t>(model.space.fiber_dim()));
        while (!at_end()) {
            const lex::Token head = peek();
            const std::string keyword = expect_kind(lex::Kind::ident, "block keyword").text;
            if (keyword == "equation") {
                parse_equation(model, equations);
            } else if (keyword == "vectorfield") {
                parse_vectorfield(model);
            } else if (keyword == "current") {
                parse_current(model);
            } else if (keyword == "section") {
                parse_section(model);
            } else {
                throw ParseError("unknown block '" + keyword + "'", head.line, head.column);
            }
        }
        for (int a = 0; a < model.space.fiber_dim(); ++a) {
            if (!equations[static_cast<std::size_t>(a)])
                throw ParseError("missing equation block for fiber coordinate '" +
                                     model.space.fiber_name(a) + "'",
                                 1, 1);
            model.equations.push_back(*equations[static_cast<std::size_t>(a)]);
        }
        return model;
    }

private:
    // ----- token plumbing ---------------------------------------------------

    const lex::Token& peek(std::size_t ahead = 0) const {
        const std::size_t k = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[k];
    }
    bool at_end() const { return peek().kind == lex::Kind::end; }
    const lex::Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    bool accept_symbol(const std::string& s) {
        if (peek().kind == lex::Kind::symbol && peek().text == s) {
            next();
            return true;
        }
        return false;
    }
    const lex::Token& expect_symbol(const std::string& s) {
        if (peek().kind != lex::Kind::symbol || peek().text != s)
            throw ParseError("expected '" + s + "', got '" + peek().text + "'", peek().line,
                             peek().column);
        return next();
    }
    const lex::Token& expect_kind(lex::Kind k, const std::string& what) {
        if (peek().kind != k)
            throw ParseError("expected " + what + ", got '" + peek().text + "'", peek().line,
                             peek().column);
        return next();
    }
    void expect_ident(const std::string& word) {
        const lex::Token& t = peek();
        if (t.kind != lex::Kind::ident || t.text != word)
            throw ParseError("expected '" + word + "', got '" + t.text + "'", t.line, t.column);
        next();
    }

    // ----- blocks -----------------------------------------------------------

    ModelFile parse_space_block() {
        expect_symbol("{");
        std::optional<std::vector<std::string>> base, fiber;
        std::optional<int> order;
        while (!accept_symbol("}")) {
            const lex::Token key = expect_kind(lex::Kind::ident, "space entry");
            expect_symbol(":");
            if (key.text == "base") {
                base = parse_name_list();
            } else if (key.text == "fiber") {
                fiber = parse_name_list();
            } else if (key.text == "order") {
                const lex::Token n = expect_kind(lex::Kind::number, "order value");
                order = std::stoi(n.text);
                if (*order < 1 || *order > 6)
                    throw ParseError("declared order must lie in 1..6", n.line, n.column);
            } else {
                throw ParseError("unknown space entry '" + key.text + "'", key.line, key.column);
            }
            if (!accept_symbol(";")) {
                expect_symbol("}");
                break;
            }
        }
        if (!base || !fiber || !order)
            throw ParseError("space block needs base, fiber and order entries", peek().line,
                             peek().column);
        for (const auto& names : {*base, *fiber})
            for (const auto& n : names)
                if (n == "sin" || n == "cos" || n == "exp" || n == "d")
                    throw ParseError("coordinate name '" + n + "' is reserved", 1, 1);
        // operator compositions need jet orders beyond the declared order;
        // Euler-Lagrange of an order-k Lagrangian reaches order 2k
        const int max_order = std::max(6, 2 * *order + 2);
        try {
            ModelFile model{JetSpace(static_cast<int>(base->size()), static_cast<int>(fiber->size()),
                                     max_order, *base, *fiber),
                            *order,
                            {},
                            {},
                            {},
                            {}};
            return model;
        } catch (const Error& err) {
            throw ParseError(err.what(), peek().line, peek().column);
        }
    }

    std::vector<std::string> parse_name_list() {
        std::vector<std::string> names;
        names.push_back(expect_kind(lex::Kind::ident, "coordinate name").text);
        while (accept_symbol(",")) names.push_back(expect_kind(lex::Kind::ident, "coordinate name").text);
        return names;
    }

    void parse_equation(ModelFile& model, std::vector<std::optional<JetExpr>>& equations) {
        const lex::Token name = expect_kind(lex::Kind::ident, "equation name");
        int alpha = -1;
        if (name.text.size() > 2 && name.text.rfind("f_", 0) == 0) {
            const std::string fiber = name.text.substr(2);
            for (int a = 0; a < model.space.fiber_dim(); ++a)
                if (model.space.fiber_name(a) == fiber) alpha = a;
        }
        if (alpha < 0)
            throw ParseError("equation name must be f_<fiber coordinate>, got '" + name.text + "'",
                             name.line, name.column);
        if (equations[static_cast<std::size_t>(alpha)])
            throw ParseError("duplicate equation for '" + name.text.substr(2) + "'", name.line,
                             name.column);
        expect_symbol("=");
        const JetExpr e = parse_expression(model);
        check_order_budget(e, model, name);
        expect_symbol(";");
        equations[static_cast<std::size_t>(alpha)] = e;
    }

    void parse_vectorfield(ModelFile& model) {
        const lex::Token name = expect_kind(lex::Kind::ident, "vector field name");
        expect_symbol("=");
        std::vector<JetExpr> base(static_cast<std::size_t>(model.space.base_dim()),
                                  JetExpr::zero(model.space));
        std::vector<JetExpr> fiber(static_cast<std::size_t>(model.space.fiber_dim()),
                                   JetExpr::zero(model.space));
        bool first = true;
        while (true) {
            Rational sign = 1;
            if (accept_symbol("-")) sign = -1;
            else if (accept_symbol("+")) sign = 1;
            else if (!first)
                break;
            parse_vf_term(model, sign, base, fiber);
            first = false;
            if (peek().kind == lex::Kind::symbol && (peek().text == "+" || peek().text == "-"))
                continue;
            break;
        }
        expect_symbol(";");
        try {
            model.fields.emplace_back(name.text,
                                      ProjectableVectorField(model.space, base, fiber, name.text));
        } catch (const Error& err) {
            throw ParseError(err.what(), name.line, name.column);
        }
    }

    /// One summand of a vector field: a product of scalar factors and
    /// exactly one direction d/d<coordinate>.
    void parse_vf_term(ModelFile& model, const Rational& sign, std::vector<JetExpr>& base,
                       std::vector<JetExpr>& fiber) {
        JetExpr coeff = JetExpr::constant(model.space, sign);
        int direction_base = -1, direction_fiber = -1;
        const lex::Token start = peek();
        bool have_direction = false;
        while (true) {
            if (is_direction_token()) {
                if (have_direction)
                    throw ParseError("vector field term has two directions", peek().line,
                                     peek().column);
                parse_direction(model, direction_base, direction_fiber);
                have_direction = true;
            } else {
                coeff = coeff * parse_power(model);
            }
            if (!accept_symbol("*")) break;
        }
        if (!have_direction)
            throw ParseError("vector field term needs a direction like d/dx", start.line,
                             start.column);
        if (direction_base >= 0)
            base[static_cast<std::size_t>(direction_base)] += coeff;
        else
            fiber[static_cast<std::size_t>(direction_fiber)] += coeff;
    }

    bool is_direction_token() const {
        return peek().kind == lex::Kind::ident && peek().text == "d" &&
               peek(1).kind == lex::Kind::symbol && peek(1).text == "/" &&
               peek(2).kind == lex::Kind::ident && peek(2).text.size() > 1 &&
               peek(2).text[0] == 'd';
    }

    void parse_direction(ModelFile& model, int& out_base, int& out_fiber) {
        next(); // d
        next(); // /
        const lex::Token t = next();
        const std::string coord = t.text.substr(1);
        for (int i = 0; i < model.space.base_dim(); ++i)
            if (model.space.base_name(i) == coord) {
                out_base = i;
                return;
            }
        for (int a = 0; a < model.space.fiber_dim(); ++a)
            if (model.space.fiber_name(a) == coord) {
                out_fiber = a;
                return;
            }
        throw ParseError("direction 'd/d" + coord + "' names no declared coordinate", t.line,
                         t.column);
    }

    void parse_current(ModelFile& model) {
        const lex::Token name = expect_kind(lex::Kind::ident, "current name");
        expect_symbol("=");
        std::vector<JetExpr> comps;
        comps.push_back(parse_expression(model));
        while (accept_symbol(",")) comps.push_back(parse_expression(model));
        expect_symbol(";");
        if (static_cast<int>(comps.size()) != model.space.base_dim())
            throw ParseError("current '" + name.text + "' needs " +
                                 std::to_string(model.space.base_dim()) + " component(s)",
                             name.line, name.column);
        model.currents.emplace_back(name.text, CurrentDensity(model.space, comps));
    }

    void parse_section(ModelFile& model) {
        const lex::Token name = expect_kind(lex::Kind::ident, "section name");
        expect_symbol("=");
        std::vector<XPoly> comps;
        comps.push_back(parse_x_polynomial(model));
        while (accept_symbol(",")) comps.push_back(parse_x_polynomial(model));
        expect_symbol(";");
        if (static_cast<int>(comps.size()) != model.space.fiber_dim())
            throw ParseError("section '" + name.text + "' needs " +
                                 std::to_string(model.space.fiber_dim()) + " component(s)",
                             name.line, name.column);
        model.sections.emplace_back(name.text, SectionPolynomial(model.space, comps));
    }

    XPoly parse_x_polynomial(ModelFile& model) {
        const lex::Token at = peek();
        const JetExpr e = parse_expression(model);
        if (!e.is_x_polynomial())
            throw ParseError("expected a polynomial in the base coordinates", at.line, at.column);
        return e.to_xpoly();
    }

    void check_order_budget(const JetExpr& e, const ModelFile& model, const lex::Token& at) {
        if (e.order() > model.declared_order)
            throw ParseError("expression uses derivatives of order " + std::to_string(e.order()) +
                                 " but the space declares order " +
                                 std::to_string(model.declared_order),
                             at.line, at.column);
    }

    // ----- expressions (public entry used by the CLI for flag values) -------

public:
    JetExpr parse_expression(const ModelFile& model) {
        JetExpr e = parse_product(model);
        while (peek().kind == lex::Kind::symbol && (peek().text == "+" || peek().text == "-")) {
            const bool plus = next().text == "+";
            const JetExpr rhs = parse_product(model);
            e = plus ? e + rhs : e - rhs;
        }
        return e;
    }

private:
    JetExpr parse_product(const ModelFile& model) {
        JetExpr e = parse_unary(model);
        while (peek().kind == lex::Kind::symbol && (peek().text == "*" || peek().text == "/")) {
            const lex::Token op = next();
            const JetExpr rhs = parse_unary(model);
            if (op.text == "*") {
                e = e * rhs;
            } else {
                const Rational d = constant_value_of(rhs, op);
                if (d == 0) throw ParseError("division by zero", op.line, op.column);
                e = e / d;
            }
        }
        return e;
    }

    JetExpr parse_unary(const ModelFile& model) {
        if (accept_symbol("-")) return -parse_unary(model);
        if (accept_symbol("+")) return parse_unary(model);
        return parse_power(model);
    }

    JetExpr parse_power(const ModelFile& model) {
        JetExpr base = parse_atom(model);
        if (peek().kind == lex::Kind::symbol && peek().text == "^") {
            const lex::Token op = next();
            bool negative = false;
            if (accept_symbol("-")) negative = true;
            const lex::Token expo = expect_kind(lex::Kind::number, "integer exponent");
            if (expo.text.find('.') != std::string::npos)
                throw ParseError("exponents must be integers", expo.line, expo.column);
            const int k = std::stoi(expo.text);
            if (negative) {
                const Rational v = constant_value_of(base, op);
                if (v == 0) throw ParseError("division by zero", op.line, op.column);
                Rational out = 1;
                for (int i = 0; i < k; ++i) out /= v;
                return JetExpr::constant(model.space, out);
            }
            return base.pow(k);
        }
        return base;
    }

    Rational constant_value_of(const JetExpr& e, const lex::Token& at) {
        if (e.is_zero()) return Rational(0);
        if (e.terms().size() == 1 && e.terms().begin()->first.is_one())
            return e.terms().begin()->second;
        throw ParseError("only division by nonzero rational constants is supported "
                         "(rational coefficients keep results exact)",
                         at.line, at.column);
    }

    JetExpr parse_atom(const ModelFile& model) {
        const lex::Token t = peek();
        if (t.kind == lex::Kind::number) {
            next();
            return JetExpr::constant(model.space, rational_from_literal(t));
        }
        if (t.kind == lex::Kind::symbol && t.text == "(") {
            next();
            const JetExpr e = parse_expression(model);
            expect_symbol(")");
            return e;
        }
        if (t.kind == lex::Kind::ident) {
            next();
            if (t.text == "sin" || t.text == "cos" || t.text == "exp") {
                expect_symbol("(");
                const JetExpr arg = parse_expression(model);
                expect_symbol(")");
                if (!arg.is_x_polynomial())
                    throw ParseError("transcendental functions accept polynomial arguments in the "
                                     "base coordinates only",
                                     t.line, t.column);
                const AtomKind kind = t.text == "sin"   ? AtomKind::sin
                                      : t.text == "cos" ? AtomKind::cos
                                                        : AtomKind::exp;
                return JetExpr::atom_expr(model.space, kind, arg.to_xpoly());
            }
            return resolve_coordinate(model, t);
        }
        throw ParseError("expected an expression, got '" + t.text + "'", t.line, t.column);
    }

    static Rational rational_from_literal(const lex::Token& t) {
        const auto dot = t.text.find('.');
        if (dot == std::string::npos) return Rational(Integer(t.text));
        const std::string digits = t.text.substr(0, dot) + t.text.substr(dot + 1);
        const std::size_t frac = t.text.size() - dot - 1;
        Integer den = 1;
        for (std::size_t i = 0; i < frac; ++i) den *= 10;
        return Rational(Integer(digits), den);
    }

    JetExpr resolve_coordinate(const ModelFile& model, const lex::Token& t) {
        const JetSpace& s = model.space;
        for (int i = 0; i < s.base_dim(); ++i)
            if (s.base_name(i) == t.text) return JetExpr::base_coord(s, i);
        for (int a = 0; a < s.fiber_dim(); ++a)
            if (s.fiber_name(a) == t.text) return JetExpr::coordinate(s, a);

        // derivative coordinate: <fiber>_<base suffix>, greedy longest match
        const auto underscore = t.text.find('_');
        if (underscore != std::string::npos) {
            const std::string head = t.text.substr(0, underscore);
            int alpha = -1;
            for (int a = 0; a < s.fiber_dim(); ++a)
                if (s.fiber_name(a) == head) alpha = a;
            if (alpha >= 0) {
                const std::string suffix = t.text.substr(underscore + 1);
                std::vector<int> entries;
                std::size_t pos = 0;
                while (pos < suffix.size()) {
                    int match = -1;
                    std::size_t match_len = 0;
                    for (int i = 0; i < s.base_dim(); ++i) {
                        const std::string& bn = s.base_name(i);
                        if (suffix.compare(pos, bn.size(), bn) == 0 && bn.size() > match_len) {
                            match = i;
                            match_len = bn.size();
                        }
                    }
                    if (match < 0)
                        throw ParseError("cannot resolve derivative suffix '" + suffix +
                                             "' of '" + t.text + "'",
                                         t.line, t.column);
                    entries.push_back(match);
                    pos += match_len;
                }
                if (static_cast<int>(entries.size()) > model.declared_order)
                    throw ParseError("derivative order " + std::to_string(entries.size()) +
                                         " exceeds the declared order " +
                                         std::to_string(model.declared_order),
                                     t.line, t.column);
                return JetExpr::coordinate(s, alpha, MultiIndex(entries));
            }
        }
        throw ParseError("undeclared coordinate '" + t.text + "'", t.line, t.column);
    }

    std::vector<lex::Token> tokens_;
    std::size_t pos_ = 0;
};

inline ModelFile parse(const std::string& source) { return Parser(source).parse(); }

/// Parses a standalone expression (e.g. a CLI flag value) in the coordinate
/// environment of an already-parsed model.
inline JetExpr parse_expression_in(const ModelFile& model, const std::string& text) {
    Parser p(text);
    return p.parse_expression(model);
}

/// Canonical text form; parse(serialize(m)) reproduces the model.
inline std::string serialize(const ModelFile& model) {
    const JetSpace& s = model.space;
    std::string out = "space { base: ";
    for (int i = 0; i < s.base_dim(); ++i) out += (i ? "," : "") + s.base_name(i);
    out += "; fiber: ";
    for (int a = 0; a < s.fiber_dim(); ++a) out += (a ? "," : "") + s.fiber_name(a);
    out += "; order: " + std::to_string(model.declared_order) + " }\n";
    for (int a = 0; a < s.fiber_dim(); ++a)
        out += "equation f_" + s.fiber_name(a) + " = " +
               model.equations[static_cast<std::size_t>(a)].to_string() + ";\n";
    for (const auto& [name, V] : model.fields) {
        out += "vectorfield " + name + " = ";
        bool first = true;
        auto emit = [&](const JetExpr& coeff, const std::string& dir) {
            if (coeff.is_zero()) return;
            if (!first) out += " + ";
            out += "(" + coeff.to_string() + ")*d/d" + dir;
            first = false;
        };
        for (int i = 0; i < s.base_dim(); ++i) emit(V.base_component(i), s.base_name(i));
        for (int a = 0; a < s.fiber_dim(); ++a) emit(V.fiber_component(a), s.fiber_name(a));
        if (first) out += "0*d/d" + s.fiber_name(0);
        out += ";\n";
    }
    for (const auto& [name, J] : model.currents) {
        out += "current " + name + " = ";
        for (int i = 0; i < s.base_dim(); ++i)
            out += (i ? ", " : "") + J.component(i).to_string();
        out += ";\n";
    }
    for (const auto& [name, sec] : model.sections) {
        out += "section " + name + " = ";
        for (int a = 0; a < s.fiber_dim(); ++a)
            out += (a ? ", " : "") + sec.component(a).to_string(s.base_names());
        out += ";\n";
    }
    return out;
}

} // namespace varkit::dsl
