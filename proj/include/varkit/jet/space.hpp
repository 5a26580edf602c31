#pragma once

#include "varkit/core/error.hpp"
#include "varkit/core/rational.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace varkit {

/// Finite-order jet space over base coordinates x^1..x^n and fiber
/// coordinates u^1..u^m. max_order bounds the derivative coordinates the
/// space can hold; intermediate results of composed operators need headroom,
/// hence the default of 6 (Euler-Lagrange of a second-order Lagrangian
/// already reaches order 4).
class JetSpace {
public:
    JetSpace(int base_dim, int fiber_dim, int max_order = 6,
             std::vector<std::string> base_names = {},
             std::vector<std::string> fiber_names = {})
        : n_(base_dim), m_(fiber_dim), max_order_(max_order),
          base_names_(std::move(base_names)), fiber_names_(std::move(fiber_names)) {
        if (n_ < 1 || m_ < 1) throw Error("jet space needs at least one base and one fiber coordinate");
        if (max_order_ < 2) throw Error("jet space max_order must be at least 2");
        if (base_names_.empty()) base_names_ = default_base_names(n_);
        if (fiber_names_.empty()) fiber_names_ = default_fiber_names(m_);
        if (static_cast<int>(base_names_.size()) != n_ || static_cast<int>(fiber_names_.size()) != m_)
            throw Error("coordinate name count does not match dimensions");
        std::vector<std::string> all = base_names_;
        all.insert(all.end(), fiber_names_.begin(), fiber_names_.end());
        std::sort(all.begin(), all.end());
        if (std::adjacent_find(all.begin(), all.end()) != all.end())
            throw Error("coordinate names must be pairwise distinct");
    }

    int base_dim() const { return n_; }
    int fiber_dim() const { return m_; }
    int max_order() const { return max_order_; }
    const std::string& base_name(int i) const { return base_names_.at(i); }
    const std::string& fiber_name(int a) const { return fiber_names_.at(a); }
    const std::vector<std::string>& base_names() const { return base_names_; }
    const std::vector<std::string>& fiber_names() const { return fiber_names_; }

    /// Structural compatibility; names are presentation only.
    friend bool compatible(const JetSpace& a, const JetSpace& b) {
        return a.n_ == b.n_ && a.m_ == b.m_ && a.max_order_ == b.max_order_;
    }

    static std::vector<std::string> default_base_names(int n) {
        static const char* few[] = {"x", "y", "z", "t"};
        std::vector<std::string> names;
        for (int i = 0; i < n; ++i)
            names.push_back(n <= 4 ? few[i] : "x" + std::to_string(i + 1));
        return names;
    }

    static std::vector<std::string> default_fiber_names(int m) {
        static const char* few[] = {"u", "v", "w"};
        std::vector<std::string> names;
        for (int a = 0; a < m; ++a)
            names.push_back(m <= 3 ? few[a] : "u" + std::to_string(a + 1));
        return names;
    }

private:
    int n_;
    int m_;
    int max_order_;
    std::vector<std::string> base_names_;
    std::vector<std::string> fiber_names_;
};

/// Symmetrized derivative multi-index: a nondecreasing tuple of base
/// coordinate indices (0-based). u^a_{xy} and u^a_{yx} name the same
/// coordinate, so appending re-sorts.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
        std::sort(entries_.begin(), entries_.end());
    }
    MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

    int order() const { return static_cast<int>(entries_.size()); }
    bool empty() const { return entries_.empty(); }
    const std::vector<int>& entries() const { return entries_; }

    MultiIndex appended(int i) const {
        std::vector<int> e = entries_;
        e.insert(std::upper_bound(e.begin(), e.end(), i), i);
        MultiIndex out;
        out.entries_ = std::move(e);
        return out;
    }

    /// Removes one occurrence of i; caller must check contains(i).
    MultiIndex removed(int i) const {
        std::vector<int> e = entries_;
        auto it = std::find(e.begin(), e.end(), i);
        if (it == e.end()) throw Error("multi-index does not contain the removed index");
        e.erase(it);
        MultiIndex out;
        out.entries_ = std::move(e);
        return out;
    }

    bool contains(int i) const {
        return std::binary_search(entries_.begin(), entries_.end(), i);
    }

    int multiplicity(int i) const {
        const auto [lo, hi] = std::equal_range(entries_.begin(), entries_.end(), i);
        return static_cast<int>(hi - lo);
    }

    std::vector<int> multiplicities(int n) const {
        std::vector<int> mult(n, 0);
        for (int e : entries_) mult.at(e)++;
        return mult;
    }

    /// l_1! l_2! ... l_n! / l!  -- the symmetrization weight; always in (0, 1].
    Rational weight(int n) const {
        Integer num = 1;
        for (int mult : multiplicities(n)) num *= factorial(mult);
        return Rational(num, factorial(order()));
    }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.entries_ == b.entries_; }
    friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }
    /// Graded lexicographic: by order first, then entries.
    friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
        if (a.order() != b.order()) return a.order() < b.order();
        return a.entries_ < b.entries_;
    }

private:
    std::vector<int> entries_;
};

/// All sorted multi-indices of exactly the given order over n base indices.
inline std::vector<MultiIndex> multi_indices_of_order(int n, int order) {
    std::vector<MultiIndex> out;
    std::vector<int> current;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(current.size()) == order) {
            out.push_back(MultiIndex(current));
            return;
        }
        for (int i = start; i < n; ++i) {
            current.push_back(i);
            self(self, i);
            current.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

inline std::vector<MultiIndex> multi_indices_up_to(int n, int max_order) {
    std::vector<MultiIndex> out;
    for (int k = 0; k <= max_order; ++k)
        for (auto& mi : multi_indices_of_order(n, k)) out.push_back(std::move(mi));
    return out;
}

} // namespace varkit
