#pragma once

#include "varkit/jet/expr.hpp"

#include <vector>

namespace varkit {

/// Lagrange form L dx: the integrand of an action functional.
struct LagrangeForm {
    JetExpr L;

    explicit LagrangeForm(JetExpr lagrangian) : L(std::move(lagrangian)) {
        if (L.order() > L.space().max_order())
            throw CapacityError(L.order(), L.space().max_order());
    }
    const JetSpace& space() const { return L.space(); }
};

/// Source form f_alpha du^alpha ^ dx: a PDE system packaged with the
/// transformation behavior of Euler-Lagrange expressions.
struct SourceForm {
    SourceForm(const JetSpace& space, std::vector<JetExpr> coefficients)
        : space_(space), f_(std::move(coefficients)) {
        if (static_cast<int>(f_.size()) != space.fiber_dim())
            throw Error("source form needs exactly one coefficient per fiber coordinate");
        for (const auto& e : f_)
            if (!compatible(e.space(), space)) throw Error("source form coefficient on wrong space");
    }

    const JetSpace& space() const { return space_; }
    const JetExpr& coefficient(int alpha) const { return f_.at(alpha); }
    const std::vector<JetExpr>& coefficients() const { return f_; }

    int order() const {
        int r = 0;
        for (const auto& e : f_) r = std::max(r, e.order());
        return r;
    }

    bool is_zero() const {
        for (const auto& e : f_)
            if (!e.is_zero()) return false;
        return true;
    }

private:
    JetSpace space_;
    std::vector<JetExpr> f_;
};

/// Current density: the n coefficient functions J^i of a horizontal
/// (n-1)-form; its total divergence D_i J^i is the conserved-quantity side
/// of a continuity equation.
struct CurrentDensity {
    CurrentDensity(const JetSpace& space, std::vector<JetExpr> components)
        : space_(space), J_(std::move(components)) {
        if (static_cast<int>(J_.size()) != space.base_dim())
            throw Error("current density needs exactly one component per base coordinate");
    }

    const JetSpace& space() const { return space_; }
    const JetExpr& component(int i) const { return J_.at(i); }
    const std::vector<JetExpr>& components() const { return J_; }

private:
    JetSpace space_;
    std::vector<JetExpr> J_;
};

/// The triple (H_ab, H^i_ab, H^ij_ab) of Helmholtz expressions of a
/// second-order source form. H^ij is symmetric in (i,j) by construction.
class HelmholtzTensor {
public:
    explicit HelmholtzTensor(const JetSpace& space)
        : space_(space),
          H_(static_cast<std::size_t>(space.fiber_dim() * space.fiber_dim()), JetExpr(space)),
          Hi_(static_cast<std::size_t>(space.base_dim() * space.fiber_dim() * space.fiber_dim()),
              JetExpr(space)),
          Hij_(static_cast<std::size_t>(space.base_dim() * space.base_dim() * space.fiber_dim() *
                                        space.fiber_dim()),
               JetExpr(space)) {}

    const JetSpace& space() const { return space_; }

    const JetExpr& H(int a, int b) const { return H_[h_idx(a, b)]; }
    const JetExpr& Hi(int i, int a, int b) const { return Hi_[hi_idx(i, a, b)]; }
    const JetExpr& Hij(int i, int j, int a, int b) const { return Hij_[hij_idx(i, j, a, b)]; }

    void set_H(int a, int b, JetExpr e) { H_[h_idx(a, b)] = std::move(e); }
    void set_Hi(int i, int a, int b, JetExpr e) { Hi_[hi_idx(i, a, b)] = std::move(e); }
    void set_Hij(int i, int j, int a, int b, JetExpr e) { Hij_[hij_idx(i, j, a, b)] = std::move(e); }

    bool h_all_zero() const { return all_zero(H_); }
    bool hi_all_zero() const { return all_zero(Hi_); }
    bool hij_all_zero() const { return all_zero(Hij_); }
    bool all_components_zero() const { return h_all_zero() && hi_all_zero() && hij_all_zero(); }

private:
    static bool all_zero(const std::vector<JetExpr>& v) {
        for (const auto& e : v)
            if (!e.is_zero()) return false;
        return true;
    }

    std::size_t h_idx(int a, int b) const {
        return static_cast<std::size_t>(a * space_.fiber_dim() + b);
    }
    std::size_t hi_idx(int i, int a, int b) const {
        const int m = space_.fiber_dim();
        return static_cast<std::size_t>((i * m + a) * m + b);
    }
    std::size_t hij_idx(int i, int j, int a, int b) const {
        const int m = space_.fiber_dim();
        const int n = space_.base_dim();
        return static_cast<std::size_t>(((i * n + j) * m + a) * m + b);
    }

    JetSpace space_;
    std::vector<JetExpr> H_;
    std::vector<JetExpr> Hi_;
    std::vector<JetExpr> Hij_;
};

} // namespace varkit
