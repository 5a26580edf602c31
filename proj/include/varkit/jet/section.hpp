#pragma once

#include "varkit/jet/expr.hpp"

#include <map>
#include <vector>

namespace varkit {

/// Polynomial local section: one x-polynomial per fiber component. All
/// derivatives are exact, so pullbacks of expressions are exact.
class SectionPolynomial {
public:
    SectionPolynomial(const JetSpace& space, std::vector<XPoly> components)
        : space_(space), components_(std::move(components)) {
        if (static_cast<int>(components_.size()) != space.fiber_dim())
            throw Error("section needs one polynomial per fiber coordinate");
    }

    const JetSpace& space() const { return space_; }
    const XPoly& component(int alpha) const { return components_.at(alpha); }

    /// d^|I| s^alpha / dx^I, exact.
    XPoly derivative(int alpha, const MultiIndex& I) const {
        XPoly p = components_.at(alpha);
        for (int i : I.entries()) p = p.partial(i);
        return p;
    }

    /// Table of all derivative polynomials up to the given order, indexed the
    /// same way jet coordinates are.
    std::vector<std::map<MultiIndex, XPoly>> derivative_table(int up_to_order) const {
        std::vector<std::map<MultiIndex, XPoly>> table(space_.fiber_dim());
        for (const auto& I : multi_indices_up_to(space_.base_dim(), up_to_order))
            for (int a = 0; a < space_.fiber_dim(); ++a) table[a][I] = derivative(a, I);
        return table;
    }

private:
    JetSpace space_;
    std::vector<XPoly> components_;
};

/// Substitutes u^alpha_I -> d^|I| s^alpha / dx^I; the result depends on x
/// only (a polynomial whenever e carries no atoms).
inline JetExpr pullback(const JetExpr& e, const SectionPolynomial& s) {
    if (!compatible(e.space(), s.space())) throw Error("section and expression live on different spaces");
    return e.substitute_fibers(s.derivative_table(e.order()));
}

} // namespace varkit
