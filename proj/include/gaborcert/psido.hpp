#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "gaborcert/fft.hpp"
#include "gaborcert/grid.hpp"
#include "gaborcert/lattice.hpp"
#include "gaborcert/parallel.hpp"
#include "gaborcert/periodize.hpp"
#include "gaborcert/shells.hpp"

namespace gaborcert {

// Kohn-Nirenberg application of a phase-space symbol p(x, w):
//   (Op p) u(x) = integral e^{2 pi i x.w} p(x, w) u^(w) dw,
// discretized with u^ on the frequency grid of u and the w-integral by the
// grid quadrature. The symbol callback receives (x, w) with d entries each.
inline GridFunction apply_kn(const std::function<cplx(const Vec&, const Vec&)>& symbol,
                             const GridFunction& u) {
    const std::size_t d = u.spec.dim;
    const GridFunction uhat = fourier(u);
    const GridSpec& wspec = uhat.spec;
    GridFunction out(u.spec);
    const double wmeasure = wspec.cell_measure();
    const std::size_t nx = u.values.size();
    const std::size_t nw = uhat.values.size();
    parallel_for(nx, [&](std::size_t xi) {
        std::vector<std::size_t> idx(d);
        std::size_t rem = xi;
        Vec x(d);
        for (std::size_t k = d; k-- > 0;) {
            idx[k] = rem % u.spec.points;
            rem /= u.spec.points;
        }
        for (std::size_t k = 0; k < d; ++k) x[k] = u.spec.coord(idx[k]);
        cplx acc(0, 0);
        std::vector<std::size_t> widx(d);
        Vec w(d);
        for (std::size_t wi = 0; wi < nw; ++wi) {
            std::size_t r2 = wi;
            for (std::size_t k = d; k-- > 0;) {
                widx[k] = r2 % wspec.points;
                r2 /= wspec.points;
            }
            double phase = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                w[k] = wspec.coord(widx[k]);
                phase += x[k] * w[k];
            }
            acc += symbol(x, w) * uhat.values[wi] *
                   cplx(std::cos(kTwoPi * phase), std::sin(kTwoPi * phase));
        }
        out.values[xi] = acc * wmeasure;
    });
    return out;
}

inline GridFunction apply_kn(const PeriodizedSymbol& p, const GridFunction& u) {
    const std::size_t d = u.spec.dim;
    if (p.dim != 2 * d) throw GridMismatch("periodized symbol dimension must be 2d");
    return apply_kn(
        [&p, d](const Vec& x, const Vec& w) {
            Vec z(2 * d);
            for (std::size_t k = 0; k < d; ++k) {
                z[k] = x[k];
                z[d + k] = w[k];
            }
            return p.at_point(z);
        },
        u);
}

// Weighted coefficient series sigma_{L,v}(q) = sum_kappa v(J L^{-T} kappa)
// |q^(L^{-T} kappa)|, truncated to |kappa| <= K, with a caller-supplied
// rigorous remainder.
struct SymbolSeries {
    struct Term {
        std::vector<long> kappa;
        double weight = 1.0;    // v(J L^{-T} kappa)
        double magnitude = 0.0; // |q^(L^{-T} kappa)|
    };
    long radius = 0;
    double tail_bound = 0.0;
    std::vector<Term> terms;
    cplx zero_coefficient{0.0, 0.0}; // q^(0) = integral of q

    double partial_sum(bool include_zero) const {
        double s = 0.0;
        for (const auto& t : terms) {
            if (!include_zero && l1_order(t.kappa) == 0) continue;
            s += t.weight * t.magnitude;
        }
        return s;
    }
};

inline SymbolSeries build_symbol_series(const Symbol& q, const Lattice& lat, const PolyWeight& w,
                                        long K, double tail_bound = 0.0) {
    if (!q.has_ft()) throw ConfigError("symbol has no evaluable transform");
    if (tail_bound < 0.0) throw ConfigError("tail bound must be nonnegative");
    SymbolSeries s;
    s.radius = K;
    s.tail_bound = tail_bound;
    for_each_l1_ball(lat.dim_total(), K, [&](const std::vector<long>& kappa) {
        SymbolSeries::Term t;
        t.kappa = kappa;
        const Vec mu = lat.dual(kappa);
        t.weight = w(lat.apply_rotation(mu));
        const cplx qhat = q.ft(mu);
        t.magnitude = std::abs(qhat);
        if (l1_order(kappa) == 0) s.zero_coefficient = qhat;
        s.terms.push_back(std::move(t));
    });
    return s;
}

// (partial sum + rigorous tail, tail).
inline std::pair<double, double> sigma_Lv(const SymbolSeries& s) {
    return {s.partial_sum(true) + s.tail_bound, s.tail_bound};
}

// Operator-norm bound C sigma / |det L| for the periodization of q.
inline double continuity_bound(double sigma, const Lattice& lat, double C) {
    if (C <= 0.0) throw ConfigError("shift-invariance constant must be positive");
    return C * sigma / lat.abs_det();
}

struct InvertibilityMargin {
    double margin = 0.0; // |integral q| - C * (kappa != 0 series)
    bool invertible = false;
    std::optional<double> inverse_norm_bound;
    double det_scale = 1.0;
};

// Perturbation criterion around the zero coefficient: invertible iff the
// weighted series without the zero term stays strictly below |c0| / C. The
// inverse-norm denominator keeps the zero term inside sigma, so it can close
// to zero at a marginal pass; no bound is reported in that case.
inline InvertibilityMargin invertibility_margin(cplx c0_integral, double sigma_without_zero,
                                                double C, const Lattice& lat) {
    if (C <= 0.0) throw ConfigError("shift-invariance constant must be positive");
    if (sigma_without_zero < 0.0) throw ConfigError("series bound must be nonnegative");
    const double c0 = std::abs(c0_integral);
    if (c0 == 0.0) throw ZeroMean("symbol has zero integral");
    InvertibilityMargin out;
    out.det_scale = lat.abs_det();
    out.margin = c0 - C * sigma_without_zero;
    out.invertible = out.margin > 0.0;
    if (out.invertible) {
        const double sigma_full = sigma_without_zero + c0; // weight at zero is 1
        const double denom = (1.0 + C) * c0 - C * sigma_full;
        if (denom > 0.0) out.inverse_norm_bound = out.det_scale / denom;
    }
    return out;
}

} // namespace gaborcert
