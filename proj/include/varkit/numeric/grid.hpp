#pragma once

#include "varkit/core/error.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace varkit {

/// Rectangular quadrature domain in one or two base dimensions with a
/// composite-Simpson rule; O(h^4) accuracy on smooth integrands.
struct GridSpec {
    int dim = 1;
    std::vector<double> lo;        // per axis
    std::vector<double> hi;        // per axis
    std::vector<int> intervals;    // per axis, even, >= 32

    static GridSpec interval(double a, double b, int n = 1024) {
        GridSpec g;
        g.dim = 1;
        g.lo = {a};
        g.hi = {b};
        g.intervals = {n};
        g.validate();
        return g;
    }

    static GridSpec rectangle(double ax, double bx, double ay, double by, int n = 128) {
        GridSpec g;
        g.dim = 2;
        g.lo = {ax, ay};
        g.hi = {bx, by};
        g.intervals = {n, n};
        g.validate();
        return g;
    }

    void validate() const {
        if (dim != 1 && dim != 2) throw Error("quadrature grids support 1-D and 2-D domains only");
        for (int a = 0; a < dim; ++a) {
            if (!std::isfinite(lo[a]) || !std::isfinite(hi[a]) || !(lo[a] < hi[a]))
                throw Error("quadrature domain bounds must be finite and ordered");
            if (intervals[a] < 32) throw Error("quadrature needs at least 32 intervals per axis");
            if (intervals[a] % 2 != 0) throw Error("composite Simpson needs an even interval count");
        }
    }

    double simpson(const std::function<double(const std::vector<double>&)>& f) const {
        validate();
        auto weight = [](int k, int n) { return (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0); };
        if (dim == 1) {
            const int n = intervals[0];
            const double h = (hi[0] - lo[0]) / n;
            double acc = 0.0;
            std::vector<double> x(1);
            for (int k = 0; k <= n; ++k) {
                x[0] = lo[0] + k * h;
                acc += weight(k, n) * f(x);
            }
            return acc * h / 3.0;
        }
        const int nx = intervals[0], ny = intervals[1];
        const double hx = (hi[0] - lo[0]) / nx;
        const double hy = (hi[1] - lo[1]) / ny;
        double acc = 0.0;
        std::vector<double> x(2);
        for (int k = 0; k <= nx; ++k) {
            x[0] = lo[0] + k * hx;
            double row = 0.0;
            for (int l = 0; l <= ny; ++l) {
                x[1] = lo[1] + l * hy;
                row += weight(l, ny) * f(x);
            }
            acc += weight(k, nx) * row;
        }
        return acc * hx * hy / 9.0;
    }
};

} // namespace varkit
