#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "gaborcert/errors.hpp"
#include "gaborcert/lattice.hpp"

namespace gaborcert {

using cplx = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

// Uniform grid over [-R, R)^n with N samples per axis; N a power of two
// (and >= 4 so the centered transform phases stay trivial).
struct GridSpec {
    std::size_t dim = 1;
    double half_width = 8.0; // R
    std::size_t points = 256; // N per axis

    double spacing() const { return 2.0 * half_width / static_cast<double>(points); }
    double coord(std::size_t i) const { return -half_width + static_cast<double>(i) * spacing(); }
    std::size_t size() const {
        std::size_t s = 1;
        for (std::size_t k = 0; k < dim; ++k) s *= points;
        return s;
    }
    // Quadrature cell measure h^n.
    double cell_measure() const {
        double m = 1.0;
        for (std::size_t k = 0; k < dim; ++k) m *= spacing();
        return m;
    }
    bool operator==(const GridSpec& o) const {
        return dim == o.dim && half_width == o.half_width && points == o.points;
    }

    void validate() const {
        if (dim == 0) throw ConfigError("grid dimension must be positive");
        if (half_width <= 0.0) throw ConfigError("grid half-width must be positive");
        if (points < 4 || (points & (points - 1)) != 0)
            throw ConfigError("grid points per axis must be a power of two >= 4");
    }

    // Spec of the frequency-side grid produced by the unitary transform:
    // spacing 1/(2R), half-width N/(4R), same point count.
    GridSpec frequency_spec() const {
        GridSpec f;
        f.dim = dim;
        f.points = points;
        f.half_width = static_cast<double>(points) / (4.0 * half_width);
        return f;
    }
};

struct GridFunction {
    GridSpec spec;
    std::vector<cplx> values;

    GridFunction() = default;
    explicit GridFunction(const GridSpec& s) : spec(s), values(s.size(), cplx(0.0, 0.0)) {
        spec.validate();
    }

    std::size_t flat_index(const std::vector<std::size_t>& idx) const {
        std::size_t f = 0;
        for (std::size_t k = 0; k < spec.dim; ++k) f = f * spec.points + idx[k];
        return f;
    }
    void unflatten(std::size_t f, std::vector<std::size_t>& idx) const {
        idx.resize(spec.dim);
        for (std::size_t k = spec.dim; k-- > 0;) {
            idx[k] = f % spec.points;
            f /= spec.points;
        }
    }
    Vec coords(const std::vector<std::size_t>& idx) const {
        Vec x(spec.dim);
        for (std::size_t k = 0; k < spec.dim; ++k) x[k] = spec.coord(idx[k]);
        return x;
    }

    // L^2 grid norm: h^{n/2} * Euclidean norm of the samples.
    double l2_norm() const {
        double s = 0.0;
        for (const cplx& v : values) s += std::norm(v);
        return std::sqrt(s * spec.cell_measure());
    }
};

inline cplx inner_product(const GridFunction& u, const GridFunction& v) {
    if (!(u.spec == v.spec)) throw GridMismatch("inner product needs matching grids");
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < u.values.size(); ++i) s += u.values[i] * std::conj(v.values[i]);
    return s * u.spec.cell_measure();
}

// Sample an arbitrary function f : R^n -> C on the grid.
template <class F>
GridFunction sample_on_grid(const GridSpec& spec, F&& f) {
    GridFunction g(spec);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        g.unflatten(i, idx);
        g.values[i] = f(g.coords(idx));
    }
    return g;
}

} // namespace gaborcert
