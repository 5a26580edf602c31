#pragma once

#include "varkit/core/error.hpp"
#include "varkit/core/rational.hpp"
#include "varkit/jet/space.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace varkit {

/// Sparse exponent vector over the base coordinates, sorted by index.
struct XMonomial {
    std::vector<std::pair<int, int>> pow; // (base index, exponent > 0)

    int exponent(int i) const {
        for (const auto& [idx, e] : pow)
            if (idx == i) return e;
        return 0;
    }

    int total_degree() const {
        int d = 0;
        for (const auto& [idx, e] : pow) d += e;
        return d;
    }

    XMonomial times(const XMonomial& other) const {
        XMonomial out = *this;
        for (const auto& [idx, e] : other.pow) out.bump(idx, e);
        return out;
    }

    void bump(int i, int by) {
        for (auto it = pow.begin(); it != pow.end(); ++it) {
            if (it->first == i) {
                it->second += by;
                if (it->second == 0) pow.erase(it);
                return;
            }
            if (it->first > i) {
                pow.insert(it, {i, by});
                return;
            }
        }
        pow.push_back({i, by});
    }

    friend bool operator==(const XMonomial& a, const XMonomial& b) { return a.pow == b.pow; }
    friend bool operator<(const XMonomial& a, const XMonomial& b) {
        if (a.total_degree() != b.total_degree()) return a.total_degree() < b.total_degree();
        return a.pow < b.pow;
    }
};

/// Exact polynomial in the base coordinates only. Serves as atom argument,
/// section component, and integration remainder.
class XPoly {
public:
    XPoly() = default;
    explicit XPoly(const Rational& c) {
        if (c != 0) terms_[XMonomial{}] = c;
    }

    static XPoly variable(int i) {
        XPoly p;
        XMonomial m;
        m.pow.push_back({i, 1});
        p.terms_[m] = 1;
        return p;
    }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.pow.empty());
    }
    Rational constant_value() const {
        if (terms_.empty()) return Rational(0);
        return terms_.begin()->second;
    }
    const std::map<XMonomial, Rational>& terms() const { return terms_; }

    void add_term(const XMonomial& m, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    XPoly operator+(const XPoly& o) const {
        XPoly out = *this;
        for (const auto& [m, c] : o.terms_) out.add_term(m, c);
        return out;
    }
    XPoly operator-(const XPoly& o) const {
        XPoly out = *this;
        for (const auto& [m, c] : o.terms_) out.add_term(m, -c);
        return out;
    }
    XPoly operator*(const XPoly& o) const {
        XPoly out;
        for (const auto& [ma, ca] : terms_)
            for (const auto& [mb, cb] : o.terms_) out.add_term(ma.times(mb), ca * cb);
        return out;
    }
    XPoly operator*(const Rational& c) const {
        XPoly out;
        for (const auto& [m, cc] : terms_) out.add_term(m, cc * c);
        return out;
    }
    XPoly operator-() const { return *this * Rational(-1); }

    XPoly partial(int i) const {
        XPoly out;
        for (const auto& [m, c] : terms_) {
            const int e = m.exponent(i);
            if (e == 0) continue;
            XMonomial m2 = m;
            m2.bump(i, -1);
            out.add_term(m2, c * e);
        }
        return out;
    }

    /// Exact antiderivative in x^i (integration constant zero).
    XPoly antiderivative(int i) const {
        XPoly out;
        for (const auto& [m, c] : terms_) {
            const int e = m.exponent(i);
            XMonomial m2 = m;
            m2.bump(i, +1);
            out.add_term(m2, c / (e + 1));
        }
        return out;
    }

    double eval(const std::vector<double>& x) const {
        double sum = 0.0;
        for (const auto& [m, c] : terms_) {
            double v = to_double(c);
            for (const auto& [idx, e] : m.pow)
                for (int k = 0; k < e; ++k) v *= x.at(idx);
            sum += v;
        }
        return sum;
    }

    Rational eval_exact(const std::vector<Rational>& x) const {
        Rational sum = 0;
        for (const auto& [m, c] : terms_) {
            Rational v = c;
            for (const auto& [idx, e] : m.pow)
                for (int k = 0; k < e; ++k) v *= x.at(idx);
            sum += v;
        }
        return sum;
    }

    int degree_in(int i) const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.exponent(i));
        return d;
    }

    /// Exact substitution x^i -> v.
    XPoly substitute(int i, const Rational& v) const {
        XPoly out;
        for (const auto& [m, c] : terms_) {
            const int e = m.exponent(i);
            Rational coeff = c;
            for (int k = 0; k < e; ++k) coeff *= v;
            XMonomial m2 = m;
            if (e > 0) m2.bump(i, -e);
            out.add_term(m2, coeff);
        }
        return out;
    }

    std::string to_string(const std::vector<std::string>& names) const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            Rational coeff = c;
            if (first) {
                if (coeff < 0) { out += "-"; coeff = -coeff; }
            } else {
                out += (coeff < 0) ? " - " : " + ";
                if (coeff < 0) coeff = -coeff;
            }
            first = false;
            std::string factors;
            for (const auto& [idx, e] : m.pow) {
                if (!factors.empty()) factors += "*";
                factors += names.at(idx);
                if (e > 1) factors += "^" + std::to_string(e);
            }
            if (factors.empty()) {
                out += varkit::to_string(coeff);
            } else {
                if (coeff != 1) out += varkit::to_string(coeff) + "*";
                out += factors;
            }
        }
        return out;
    }

    friend bool operator==(const XPoly& a, const XPoly& b) { return a.terms_ == b.terms_; }
    friend bool operator<(const XPoly& a, const XPoly& b) {
        return std::lexicographical_compare(
            a.terms_.begin(), a.terms_.end(), b.terms_.begin(), b.terms_.end(),
            [](const auto& l, const auto& r) {
                if (l.first < r.first) return true;
                if (r.first < l.first) return false;
                return l.second < r.second;
            });
    }

private:
    std::map<XMonomial, Rational> terms_;
};

enum class AtomKind { sin, cos, exp };

inline const char* atom_name(AtomKind k) {
    switch (k) {
        case AtomKind::sin: return "sin";
        case AtomKind::cos: return "cos";
        case AtomKind::exp: return "exp";
    }
    return "?";
}

/// Transcendental factor applied to a polynomial in the base coordinates.
/// Restricting atom arguments to x keeps the rational fragment of the
/// algebra exactly canonical while still covering coefficient functions
/// like sin(x) in symmetry fields.
struct Atom {
    AtomKind kind;
    XPoly arg;

    friend bool operator==(const Atom& a, const Atom& b) { return a.kind == b.kind && a.arg == b.arg; }
    friend bool operator<(const Atom& a, const Atom& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.arg < b.arg;
    }

    double eval(const std::vector<double>& x) const {
        const double v = arg.eval(x);
        switch (kind) {
            case AtomKind::sin: return std::sin(v);
            case AtomKind::cos: return std::cos(v);
            case AtomKind::exp: return std::exp(v);
        }
        return 0.0;
    }
};

} // namespace varkit
