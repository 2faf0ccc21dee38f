#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "gaborcert/errors.hpp"
#include "gaborcert/grid.hpp"
#include "gaborcert/lattice.hpp"
#include "gaborcert/shells.hpp"
#include "gaborcert/window.hpp"

namespace gaborcert {

// Evaluable symbol on R^n, optionally with an evaluable transform. Windows
// adapt to this directly; composite symbols supply lambdas.
struct Symbol {
    std::size_t dim = 1;
    std::function<cplx(const Vec&)> value;
    std::function<cplx(const Vec&)> ft; // may be empty

    bool has_ft() const { return static_cast<bool>(ft); }
};

inline Symbol symbol_from_window(const Window& w) {
    Symbol s;
    s.dim = w.dim();
    s.value = [w](const Vec& z) { return w.value(z); };
    const Window wh = w.fourier_transform();
    if (w.is_analytic()) s.ft = [wh](const Vec& z) { return wh.value(z); };
    return s;
}

// Partial sums of the lattice periodization sum_{kappa} q(L t + L kappa),
// tabulated on a parameter grid t in [0,1)^n with M points per axis.
struct PeriodizedSymbol {
    Mat lattice_matrix;           // kept for point lookup
    Mat lattice_inverse;
    double abs_det = 0.0;
    std::size_t dim = 1;
    std::size_t points_per_axis = 0; // M
    long truncation = 0;             // shells summed
    double last_shell_increment = 0.0;
    double previous_shell_increment = 0.0;
    std::vector<cplx> values; // M^n, row-major over t indices

    std::size_t size() const { return values.size(); }

    std::size_t flat_index(const std::vector<std::size_t>& idx) const {
        std::size_t f = 0;
        for (std::size_t k = 0; k < dim; ++k) f = f * points_per_axis + idx[k];
        return f;
    }

    // Value at an arbitrary point z, which must wrap onto a table node.
    cplx at_point(const Vec& z) const {
        Vec t = lattice_inverse.apply(z);
        std::vector<std::size_t> idx(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            double frac = t[k] - std::floor(t[k]);
            double pos = frac * static_cast<double>(points_per_axis);
            double r = std::round(pos);
            if (std::abs(pos - r) > 1e-7)
                throw GridMismatch("point does not wrap onto the fundamental-domain grid");
            idx[k] = static_cast<std::size_t>(r) % points_per_axis;
        }
        return values[flat_index(idx)];
    }
};

// Shell-by-shell evaluation of the periodization partial sums F_{L,h}. The
// last two shell increments are recorded as an empirical tail diagnostic;
// rigorous remainders come from the decay-constant machinery downstream.
inline PeriodizedSymbol periodize(const Symbol& q, const Lattice& lat, long h_trunc,
                                  std::size_t points_per_axis) {
    if (q.dim != lat.dim_total()) throw ConfigError("symbol/lattice dimension mismatch");
    if (h_trunc < 0) throw ConfigError("truncation must be nonnegative");
    if (points_per_axis == 0) throw ConfigError("fundamental-domain grid must be nonempty");
    const std::size_t n = q.dim;
    PeriodizedSymbol out;
    out.lattice_matrix = lat.matrix();
    out.lattice_inverse = lat.inverse();
    out.abs_det = lat.abs_det();
    out.dim = n;
    out.points_per_axis = points_per_axis;
    out.truncation = h_trunc;

    std::size_t total = 1;
    for (std::size_t k = 0; k < n; ++k) total *= points_per_axis;
    out.values.assign(total, cplx(0, 0));

    std::vector<Vec> base_points(total);
    {
        std::vector<std::size_t> idx(n);
        for (std::size_t f = 0; f < total; ++f) {
            std::size_t rem = f;
            Vec t(n);
            for (std::size_t k = n; k-- > 0;) {
                idx[k] = rem % points_per_axis;
                rem /= points_per_axis;
            }
            for (std::size_t k = 0; k < n; ++k)
                t[k] = static_cast<double>(idx[k]) / static_cast<double>(points_per_axis);
            base_points[f] = lat.matrix().apply(t);
        }
    }

    double prev_inc = 0.0, last_inc = 0.0;
    std::vector<cplx> shell(total);
    for (long h = 0; h <= h_trunc; ++h) {
        std::fill(shell.begin(), shell.end(), cplx(0, 0));
        for_each_l1_shell(n, h, [&](const std::vector<long>& kappa) {
            const Vec shift = lat.point(kappa);
            for (std::size_t f = 0; f < total; ++f) {
                Vec z = base_points[f];
                for (std::size_t k = 0; k < n; ++k) z[k] += shift[k];
                shell[f] += q.value(z);
            }
        });
        double inc = 0.0;
        for (std::size_t f = 0; f < total; ++f) {
            out.values[f] += shell[f];
            inc = std::max(inc, std::abs(shell[f]));
        }
        prev_inc = last_inc;
        last_inc = inc;
    }
    out.last_shell_increment = last_inc;
    out.previous_shell_increment = prev_inc;
    if (h_trunc >= 1) {
        double scale = 0.0;
        for (const cplx& v : out.values) scale = std::max(scale, std::abs(v));
        if (last_inc > prev_inc && last_inc > 1e-13 * scale)
            throw NonDecaying("final periodization shell grew relative to the previous one");
    }
    return out;
}

// Fourier coefficient of the periodized symbol: q^(L^{-T} kappa) / |det L|.
inline cplx fourier_coeff(const Symbol& q, const Lattice& lat, const std::vector<long>& kappa) {
    if (!q.has_ft()) throw ConfigError("symbol has no evaluable transform");
    return q.ft(lat.dual(kappa)) / lat.abs_det();
}

// |direct lattice sum - dual-lattice transform sum| at x, both truncated to
// the l1 ball of radius K: the two sides of the summation formula.
inline double poisson_residual(const Symbol& f, const Lattice& lat, const Vec& x, long K) {
    if (!f.has_ft()) throw ConfigError("symbol has no evaluable transform");
    if (x.size() != f.dim) throw ConfigError("evaluation point dimension mismatch");
    cplx lhs(0, 0), rhs(0, 0);
    for_each_l1_ball(f.dim, K, [&](const std::vector<long>& kappa) {
        Vec z = lat.point(kappa);
        for (std::size_t k = 0; k < f.dim; ++k) z[k] += x[k];
        lhs += f.value(z);
        const Vec mu = lat.dual(kappa);
        double phase = 0.0;
        for (std::size_t k = 0; k < f.dim; ++k) phase += mu[k] * x[k];
        rhs += f.ft(mu) * cplx(std::cos(kTwoPi * phase), std::sin(kTwoPi * phase));
    });
    rhs /= lat.abs_det();
    return std::abs(lhs - rhs);
}

} // namespace gaborcert
