#pragma once

#include "varkit/jet/expr.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace varkit {

/// Projectable vector field V = V^i(x) d_i + V^alpha(x,u) d_alpha on the
/// total space: the base components depend on x only, so the flow maps
/// sections to sections.
class ProjectableVectorField {
public:
    ProjectableVectorField(const JetSpace& space, std::vector<JetExpr> base,
                           std::vector<JetExpr> fiber, std::string name = "V")
        : space_(space), base_(std::move(base)), fiber_(std::move(fiber)), name_(std::move(name)) {
        if (static_cast<int>(base_.size()) != space.base_dim() ||
            static_cast<int>(fiber_.size()) != space.fiber_dim())
            throw Error("vector field needs one coefficient per coordinate of the total space");
        for (const auto& c : base_)
            if (!c.depends_only_on_x())
                throw Error("base coefficients of a projectable field may depend on x only");
        for (const auto& c : fiber_)
            if (c.order() > 0)
                throw Error("fiber coefficients of a projectable field may depend on (x,u) only");
    }

    const JetSpace& space() const { return space_; }
    const std::string& name() const { return name_; }
    const JetExpr& base_component(int i) const { return base_.at(i); }
    const JetExpr& fiber_component(int a) const { return fiber_.at(a); }

    /// Derivation on order-zero functions.
    JetExpr apply(const JetExpr& g) const {
        JetExpr out(space_);
        for (int i = 0; i < space_.base_dim(); ++i) out += base_[i] * g.partial_base(i);
        for (int a = 0; a < space_.fiber_dim(); ++a) out += fiber_[a] * g.partial_jet(a, {});
        return out;
    }

private:
    JetSpace space_;
    std::vector<JetExpr> base_;
    std::vector<JetExpr> fiber_;
    std::string name_;
};

/// Characteristic V_ch^alpha = V^alpha - u^alpha_i V^i; its prolongation is
/// the vertical part of the prolonged field.
inline std::vector<JetExpr> characteristic(const ProjectableVectorField& V) {
    const JetSpace& s = V.space();
    std::vector<JetExpr> ch;
    for (int a = 0; a < s.fiber_dim(); ++a) {
        JetExpr c = V.fiber_component(a);
        for (int i = 0; i < s.base_dim(); ++i)
            c -= JetExpr::coordinate(s, a, {i}) * V.base_component(i);
        ch.push_back(std::move(c));
    }
    return ch;
}

/// Prolongation of a projectable field to a derivation on the order-k jet
/// space, with fully symmetrized xi-coefficients.
class ProlongedVectorField {
public:
    ProlongedVectorField(ProjectableVectorField base, int order,
                         std::map<std::pair<int, MultiIndex>, JetExpr> xi)
        : base_(std::move(base)), order_(order), xi_(std::move(xi)) {}

    const ProjectableVectorField& base() const { return base_; }
    int order() const { return order_; }

    const JetExpr& xi(int alpha, const MultiIndex& I) const {
        auto it = xi_.find({alpha, I});
        if (it == xi_.end()) throw Error("prolongation does not carry the requested coefficient");
        return it->second;
    }

    /// Derivation on functions of order <= the prolongation order.
    JetExpr apply(const JetExpr& g) const {
        if (g.order() > order_)
            throw Error("prolongation order too low to differentiate this expression");
        const JetSpace& s = base_.space();
        JetExpr out = base_.apply(g);
        for (int k = 1; k <= order_; ++k)
            for (const auto& I : multi_indices_of_order(s.base_dim(), k))
                for (int a = 0; a < s.fiber_dim(); ++a) {
                    const JetExpr part = g.partial_jet(a, I);
                    if (!part.is_zero()) out += xi(a, I) * part;
                }
        return out;
    }

private:
    ProjectableVectorField base_;
    int order_;
    std::map<std::pair<int, MultiIndex>, JetExpr> xi_;
};

/// Recursive prolongation:
///   xi^a_i   = D_i V^a - u^a_j D_i V^j
///   xi^a_{I,i} = D_i xi^a_I - u^a_{j u I} D_i V^j.
inline ProlongedVectorField prolong(const ProjectableVectorField& V, int k) {
    const JetSpace& s = V.space();
    if (k > s.max_order()) throw CapacityError(k, s.max_order());
    std::map<std::pair<int, MultiIndex>, JetExpr> xi;
    for (int a = 0; a < s.fiber_dim(); ++a) {
        for (int order = 1; order <= k; ++order) {
            for (const auto& I : multi_indices_of_order(s.base_dim(), order)) {
                const int last = I.entries().back();
                JetExpr value(s);
                if (order == 1) {
                    value = V.fiber_component(a).total_derivative(last);
                    for (int j = 0; j < s.base_dim(); ++j)
                        value -= JetExpr::coordinate(s, a, {j}) *
                                 V.base_component(j).total_derivative(last);
                } else {
                    const MultiIndex head = I.removed(last);
                    value = xi.at({a, head}).total_derivative(last);
                    for (int j = 0; j < s.base_dim(); ++j)
                        value -= JetExpr::coordinate(s, a, head.appended(j)) *
                                 V.base_component(j).total_derivative(last);
                }
                xi.insert({{a, I}, std::move(value)});
            }
        }
    }
    return ProlongedVectorField(V, k, std::move(xi));
}

/// Characteristic-form prolongation xi^a_I = D_I V_ch^a + V^j u^a_{I u j};
/// must agree with the recursion above.
inline ProlongedVectorField prolong_via_characteristic(const ProjectableVectorField& V, int k) {
    const JetSpace& s = V.space();
    if (k + 1 > s.max_order()) throw CapacityError(k + 1, s.max_order());
    const std::vector<JetExpr> ch = characteristic(V);
    std::map<std::pair<int, MultiIndex>, JetExpr> xi;
    for (int a = 0; a < s.fiber_dim(); ++a)
        for (int order = 1; order <= k; ++order)
            for (const auto& I : multi_indices_of_order(s.base_dim(), order)) {
                JetExpr value = ch[a].total_derivative(I);
                for (int j = 0; j < s.base_dim(); ++j)
                    value += V.base_component(j) * JetExpr::coordinate(s, a, I.appended(j));
                xi.insert({{a, I}, std::move(value)});
            }
    return ProlongedVectorField(V, k, std::move(xi));
}

/// Lie bracket of projectable fields; the result is projectable again.
inline ProjectableVectorField bracket(const ProjectableVectorField& V,
                                      const ProjectableVectorField& W) {
    const JetSpace& s = V.space();
    std::vector<JetExpr> base, fiber;
    for (int i = 0; i < s.base_dim(); ++i)
        base.push_back(V.apply(W.base_component(i)) - W.apply(V.base_component(i)));
    for (int a = 0; a < s.fiber_dim(); ++a)
        fiber.push_back(V.apply(W.fiber_component(a)) - W.apply(V.fiber_component(a)));
    return ProjectableVectorField(s, std::move(base), std::move(fiber),
                                  "[" + V.name() + "," + W.name() + "]");
}

/// Componentwise bracket of two prolonged fields, as a derivation on the
/// order-k jet space.
inline ProlongedVectorField prolonged_bracket(const ProlongedVectorField& A,
                                              const ProlongedVectorField& B) {
    const ProjectableVectorField VW = bracket(A.base(), B.base());
    const JetSpace& s = VW.space();
    const int k = std::min(A.order(), B.order());
    std::map<std::pair<int, MultiIndex>, JetExpr> xi;
    for (int a = 0; a < s.fiber_dim(); ++a)
        for (int order = 1; order <= k; ++order)
            for (const auto& I : multi_indices_of_order(s.base_dim(), order))
                xi.insert({{a, I}, A.apply(B.xi(a, I)) - B.apply(A.xi(a, I))});
    return ProlongedVectorField(VW, k, std::move(xi));
}

} // namespace varkit
