#pragma once

#include "varkit/core/error.hpp"
#include "varkit/core/rational.hpp"
#include "varkit/core/rng.hpp"
#include "varkit/jet/space.hpp"
#include "varkit/jet/xpoly.hpp"

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace varkit {

/// A single jet coordinate u^alpha_I. Ordered graded-lexicographically by
/// (derivative order, fiber index, multi-index), which fixes the term order
/// of every canonical expression.
struct JetVar {
    int alpha = 0;
    MultiIndex index;

    friend bool operator==(const JetVar& a, const JetVar& b) {
        return a.alpha == b.alpha && a.index == b.index;
    }
    friend bool operator<(const JetVar& a, const JetVar& b) {
        if (a.index.order() != b.index.order()) return a.index.order() < b.index.order();
        if (a.alpha != b.alpha) return a.alpha < b.alpha;
        return a.index < b.index;
    }
};

/// Product of base-coordinate powers, jet-coordinate powers and atom powers.
struct Monomial {
    XMonomial x;
    std::vector<std::pair<JetVar, int>> jets;   // sorted, exponents > 0
    std::vector<std::pair<Atom, int>> atoms;    // sorted, exponents > 0

    bool is_one() const { return x.pow.empty() && jets.empty() && atoms.empty(); }

    int jet_order() const {
        int r = 0;
        for (const auto& [v, p] : jets) r = std::max(r, v.index.order());
        return r;
    }

    /// Joint polynomial degree in the coordinates of exactly the given order.
    /// Order 0 counts the fiber coordinates u^alpha only.
    int degree_in_order(int r) const {
        int d = 0;
        for (const auto& [v, p] : jets)
            if (v.index.order() == r) d += p;
        return d;
    }

    /// Total polynomial degree in all fiber coordinates (any order).
    int fiber_degree() const {
        int d = 0;
        for (const auto& [v, p] : jets) d += p;
        return d;
    }

    int jet_exponent(const JetVar& v) const {
        for (const auto& [w, p] : jets)
            if (w == v) return p;
        return 0;
    }

    Monomial times_x(const XMonomial& xm) const {
        Monomial out = *this;
        out.x = out.x.times(xm);
        return out;
    }

    Monomial times_jet(const JetVar& v, int by = 1) const {
        Monomial out = *this;
        bump_sorted(out.jets, v, by);
        return out;
    }

    Monomial times_atom(const Atom& a, int by = 1) const {
        Monomial out = *this;
        bump_sorted(out.atoms, a, by);
        return out;
    }

    Monomial times(const Monomial& o) const {
        Monomial out = *this;
        out.x = out.x.times(o.x);
        for (const auto& [v, p] : o.jets) bump_sorted(out.jets, v, p);
        for (const auto& [a, p] : o.atoms) bump_sorted(out.atoms, a, p);
        return out;
    }

    template <typename Key>
    static void bump_sorted(std::vector<std::pair<Key, int>>& vec, const Key& key, int by) {
        for (auto it = vec.begin(); it != vec.end(); ++it) {
            if (it->first == key) {
                it->second += by;
                if (it->second == 0) vec.erase(it);
                return;
            }
            if (key < it->first) {
                vec.insert(it, {key, by});
                return;
            }
        }
        vec.push_back({key, by});
    }

    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.x == b.x && a.jets == b.jets && a.atoms == b.atoms;
    }
    friend bool operator<(const Monomial& a, const Monomial& b) {
        if (a.jets != b.jets) return a.jets < b.jets;
        if (!(a.x == b.x)) return a.x < b.x;
        return a.atoms < b.atoms;
    }
};

/// Numeric assignment of every coordinate up to a stated order; used for
/// randomized identity testing and pointwise span checks.
struct JetPoint {
    std::vector<double> x;                          // size n
    std::map<std::pair<int, MultiIndex>, double> jets;

    double jet_value(int alpha, const MultiIndex& I) const {
        auto it = jets.find({alpha, I});
        if (it == jets.end()) throw Error("jet point has no value for a referenced coordinate");
        return it->second;
    }

    static JetPoint random(const JetSpace& space, int up_to_order, Rng& rng,
                           double lo = -2.0, double hi = 2.0) {
        JetPoint p;
        for (int i = 0; i < space.base_dim(); ++i) p.x.push_back(rng.uniform(lo, hi));
        for (const auto& I : multi_indices_up_to(space.base_dim(), up_to_order))
            for (int a = 0; a < space.fiber_dim(); ++a)
                p.jets[{a, I}] = rng.uniform(lo, hi);
        return p;
    }
};

/// Exact symbolic function on a finite-order jet space: a canonical sum of
/// rational multiples of monomials. Expressions are immutable values; every
/// operation returns a new canonical expression.
class JetExpr {
public:
    explicit JetExpr(const JetSpace& space) : space_(space) {}

    static JetExpr zero(const JetSpace& s) { return JetExpr(s); }

    static JetExpr constant(const JetSpace& s, const Rational& c) {
        JetExpr e(s);
        e.add_term(Monomial{}, c);
        return e;
    }

    static JetExpr base_coord(const JetSpace& s, int i) {
        check_base(s, i);
        JetExpr e(s);
        Monomial m;
        m.x.bump(i, 1);
        e.add_term(m, 1);
        return e;
    }

    static JetExpr coordinate(const JetSpace& s, int alpha, const MultiIndex& I = {}) {
        check_fiber(s, alpha);
        if (I.order() > s.max_order()) throw CapacityError(I.order(), s.max_order());
        for (int i : I.entries()) check_base(s, i);
        JetExpr e(s);
        Monomial m;
        m.jets.push_back({JetVar{alpha, I}, 1});
        e.add_term(m, 1);
        return e;
    }

    static JetExpr from_xpoly(const JetSpace& s, const XPoly& p) {
        JetExpr e(s);
        for (const auto& [xm, c] : p.terms()) {
            Monomial m;
            m.x = xm;
            e.add_term(m, c);
        }
        return e;
    }

    static JetExpr atom_expr(const JetSpace& s, AtomKind kind, const XPoly& arg) {
        if (arg.is_constant()) {
            // collapse to an exact value only for argument zero
            if (arg.is_zero()) {
                switch (kind) {
                    case AtomKind::sin: return zero(s);
                    case AtomKind::cos: return constant(s, 1);
                    case AtomKind::exp: return constant(s, 1);
                }
            }
        }
        JetExpr e(s);
        Monomial m;
        m.atoms.push_back({Atom{kind, arg}, 1});
        e.add_term(m, 1);
        return e;
    }

    const JetSpace& space() const { return space_; }
    const std::map<Monomial, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool has_atoms() const {
        for (const auto& [m, c] : terms_)
            if (!m.atoms.empty()) return true;
        return false;
    }

    bool depends_only_on_x() const {
        for (const auto& [m, c] : terms_)
            if (!m.jets.empty()) return false;
        return true;
    }

    bool is_x_polynomial() const {
        for (const auto& [m, c] : terms_)
            if (!m.jets.empty() || !m.atoms.empty()) return false;
        return true;
    }

    XPoly to_xpoly() const {
        if (!is_x_polynomial()) throw UnsupportedInputError("expression is not a polynomial in the base coordinates");
        XPoly p;
        for (const auto& [m, c] : terms_) p.add_term(m.x, c);
        return p;
    }

    /// Smallest r such that the expression lives on the order-r jet space.
    int order() const {
        int r = 0;
        for (const auto& [m, c] : terms_) r = std::max(r, m.jet_order());
        return r;
    }

    /// Joint polynomial degree in the order-r coordinates.
    int degree_in_order(int r) const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.degree_in_order(r));
        return d;
    }

    int fiber_degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.fiber_degree());
        return d;
    }

    void add_term(const Monomial& m, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    JetExpr operator+(const JetExpr& o) const {
        require_compatible(o);
        JetExpr out = *this;
        for (const auto& [m, c] : o.terms_) out.add_term(m, c);
        return out;
    }
    JetExpr operator-(const JetExpr& o) const {
        require_compatible(o);
        JetExpr out = *this;
        for (const auto& [m, c] : o.terms_) out.add_term(m, -c);
        return out;
    }
    JetExpr operator-() const { return *this * Rational(-1); }
    JetExpr operator*(const JetExpr& o) const {
        require_compatible(o);
        JetExpr out(space_);
        for (const auto& [ma, ca] : terms_)
            for (const auto& [mb, cb] : o.terms_) out.add_term(ma.times(mb), ca * cb);
        return out;
    }
    JetExpr operator*(const Rational& c) const {
        JetExpr out(space_);
        for (const auto& [m, cc] : terms_) out.add_term(m, cc * c);
        return out;
    }
    JetExpr operator/(const Rational& c) const {
        if (c == 0) throw Error("division by zero");
        return *this * (Rational(1) / c);
    }
    JetExpr& operator+=(const JetExpr& o) { return *this = *this + o; }
    JetExpr& operator-=(const JetExpr& o) { return *this = *this - o; }

    JetExpr pow(int k) const {
        if (k < 0) throw UnsupportedInputError("negative powers of expressions are not representable");
        JetExpr out = constant(space_, 1);
        for (int i = 0; i < k; ++i) out = out * *this;
        return out;
    }

    /// Partial derivative in x^i with all jet coordinates held fixed.
    JetExpr partial_base(int i) const {
        check_base(space_, i);
        JetExpr out(space_);
        for (const auto& [m, c] : terms_) accumulate_base_partial(out, m, c, i);
        return out;
    }

    /// Plain partial derivative in the coordinate u^alpha_I.
    JetExpr partial_jet(int alpha, const MultiIndex& I) const {
        check_fiber(space_, alpha);
        const JetVar v{alpha, I};
        JetExpr out(space_);
        for (const auto& [m, c] : terms_) {
            const int p = m.jet_exponent(v);
            if (p == 0) continue;
            out.add_term(m.times_jet(v, -1), c * p);
        }
        return out;
    }

    /// Weighted partial: (l_1!..l_n!/l!) d/du^alpha_I; permutation invariant
    /// in I by construction.
    JetExpr weighted_partial(int alpha, const MultiIndex& I) const {
        JetExpr plain = partial_jet(alpha, I);
        if (I.order() <= 1) return plain;
        return plain * I.weight(space_.base_dim());
    }

    /// Total derivative D_i: formal derivative along x^i through all jet
    /// orders; raises the order by at most one.
    JetExpr total_derivative(int i) const {
        check_base(space_, i);
        const int needed = order() + 1;
        if (needed > space_.max_order()) throw CapacityError(needed, space_.max_order());
        JetExpr out(space_);
        for (const auto& [m, c] : terms_) {
            accumulate_base_partial(out, m, c, i);
            for (std::size_t k = 0; k < m.jets.size(); ++k) {
                const auto& [v, p] = m.jets[k];
                Monomial m2 = m.times_jet(v, -1).times_jet(JetVar{v.alpha, v.index.appended(i)});
                out.add_term(m2, c * p);
            }
        }
        return out;
    }

    JetExpr total_derivative(const MultiIndex& I) const {
        JetExpr out = *this;
        for (int i : I.entries()) out = out.total_derivative(i);
        return out;
    }

    /// Substitutes u^alpha_I -> given x-polynomials (the I-th derivative of a
    /// section component); the result depends on x only.
    JetExpr substitute_fibers(const std::vector<std::map<MultiIndex, XPoly>>& values) const {
        JetExpr out(space_);
        for (const auto& [m, c] : terms_) {
            XPoly acc(Rational(1));
            for (const auto& [v, p] : m.jets) {
                const auto& per_alpha = values.at(v.alpha);
                auto it = per_alpha.find(v.index);
                if (it == per_alpha.end()) throw Error("substitution missing a referenced jet coordinate");
                for (int k = 0; k < p; ++k) acc = acc * it->second;
            }
            Monomial shell;
            shell.x = m.x;
            shell.atoms = m.atoms;
            for (const auto& [xm, cc] : acc.terms()) out.add_term(shell.times_x(xm), c * cc);
        }
        return out;
    }

    double eval(const JetPoint& p) const {
        double sum = 0.0;
        for (const auto& [m, c] : terms_) sum += eval_term(m, c, p);
        return sum;
    }

    /// Value plus the largest single-term magnitude, the scale reference for
    /// relative zero tests.
    std::pair<double, double> eval_with_scale(const JetPoint& p) const {
        double sum = 0.0, scale = 0.0;
        for (const auto& [m, c] : terms_) {
            const double t = eval_term(m, c, p);
            sum += t;
            scale = std::max(scale, std::abs(t));
        }
        return {sum, scale};
    }

    std::string to_string() const {
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
            const std::string factors = factors_string(m);
            if (factors.empty()) {
                out += varkit::to_string(coeff);
            } else {
                if (coeff != 1) out += varkit::to_string(coeff) + "*";
                out += factors;
            }
        }
        return out;
    }

    std::string jet_var_string(const JetVar& v) const {
        std::string s = space_.fiber_name(v.alpha);
        if (v.index.empty()) return s;
        bool single = true;
        for (int i = 0; i < space_.base_dim(); ++i)
            if (space_.base_name(i).size() != 1) single = false;
        s += "_";
        if (single) {
            for (int i : v.index.entries()) s += space_.base_name(i);
        } else {
            s += "{";
            bool first = true;
            for (int i : v.index.entries()) {
                if (!first) s += ",";
                s += space_.base_name(i);
                first = false;
            }
            s += "}";
        }
        return s;
    }

private:
    void require_compatible(const JetExpr& o) const {
        if (!compatible(space_, o.space_)) throw Error("expressions live on different jet spaces");
    }

    static void check_base(const JetSpace& s, int i) {
        if (i < 0 || i >= s.base_dim()) throw Error("base coordinate index out of range");
    }
    static void check_fiber(const JetSpace& s, int a) {
        if (a < 0 || a >= s.fiber_dim()) throw Error("fiber coordinate index out of range");
    }

    // d/dx^i of the x-power and atom factors of one term.
    void accumulate_base_partial(JetExpr& out, const Monomial& m, const Rational& c, int i) const {
        const int e = m.x.exponent(i);
        if (e > 0) {
            Monomial m2 = m;
            m2.x.bump(i, -1);
            out.add_term(m2, c * e);
        }
        for (std::size_t k = 0; k < m.atoms.size(); ++k) {
            const auto& [atom, q] = m.atoms[k];
            const XPoly darg = atom.arg.partial(i);
            if (darg.is_zero()) continue;
            Monomial m2 = m.times_atom(atom, -1);
            Rational sign = 1;
            Atom outer = atom;
            switch (atom.kind) {
                case AtomKind::sin: outer.kind = AtomKind::cos; break;
                case AtomKind::cos: outer.kind = AtomKind::sin; sign = -1; break;
                case AtomKind::exp: break;
            }
            Monomial m3 = m2.times_atom(outer);
            for (const auto& [xm, cc] : darg.terms())
                out.add_term(m3.times_x(xm), c * q * sign * cc);
        }
    }

    static double eval_term(const Monomial& m, const Rational& c, const JetPoint& p) {
        double v = to_double(c);
        for (const auto& [idx, e] : m.x.pow)
            for (int k = 0; k < e; ++k) v *= p.x.at(idx);
        for (const auto& [jv, e] : m.jets) {
            const double jval = p.jet_value(jv.alpha, jv.index);
            for (int k = 0; k < e; ++k) v *= jval;
        }
        for (const auto& [a, e] : m.atoms) {
            const double aval = a.eval(p.x);
            for (int k = 0; k < e; ++k) v *= aval;
        }
        return v;
    }

    std::string factors_string(const Monomial& m) const {
        std::string s;
        auto append = [&](const std::string& f, int e) {
            if (!s.empty()) s += "*";
            s += f;
            if (e > 1) s += "^" + std::to_string(e);
        };
        for (const auto& [idx, e] : m.x.pow) append(space_.base_name(idx), e);
        for (const auto& [v, e] : m.jets) append(jet_var_string(v), e);
        for (const auto& [a, e] : m.atoms)
            append(std::string(atom_name(a.kind)) + "(" + a.arg.to_string(space_.base_names()) + ")", e);
        return s;
    }

    JetSpace space_;
    std::map<Monomial, Rational> terms_;
};

inline JetExpr operator*(const Rational& c, const JetExpr& e) { return e * c; }

/// Outcome of an equality decision. `probabilistic` marks results that were
/// settled by randomized evaluation because transcendental atoms blocked a
/// canonical-form decision.
struct Equality {
    bool equal = false;
    bool probabilistic = false;
    explicit operator bool() const { return equal; }
};

inline Equality check_equal(const JetExpr& a, const JetExpr& b, int trials = 20,
                            std::uint64_t seed = global_seed()) {
    const JetExpr diff = a - b;
    if (diff.is_zero()) return {true, false};
    if (!diff.has_atoms()) return {false, false};
    // Atoms admit hidden identities (sin^2 + cos^2 = 1); sample instead.
    // Rational parts evaluate exactly up to double rounding, atoms in double.
    Rng rng(seed);
    const int up_to = diff.order();
    bool all_zero = true;
    for (int t = 0; t < trials; ++t) {
        const JetPoint p = JetPoint::random(diff.space(), up_to, rng);
        const auto [value, scale] = diff.eval_with_scale(p);
        if (std::abs(value) > 1e-9 * (1.0 + scale)) {
            all_zero = false;
            break;
        }
    }
    return {all_zero, true};
}

inline bool equals(const JetExpr& a, const JetExpr& b) { return check_equal(a, b).equal; }

} // namespace varkit
