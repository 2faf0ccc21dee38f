#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "gaborcert/fft.hpp"
#include "gaborcert/grid.hpp"
#include "gaborcert/lattice.hpp"
#include "gaborcert/periodize.hpp"
#include "gaborcert/psido.hpp"
#include "gaborcert/shells.hpp"
#include "gaborcert/stft.hpp"
#include "gaborcert/window.hpp"

namespace gaborcert {

// Gabor system {pi_{L kappa} g} with synthesis window gamma, truncated to the
// symmetric l1 ball |kappa| <= K (which makes the two sign conventions of the
// operator sum coincide).
struct GaborSystem {
    Window g;      // analysis window
    Window gamma;  // synthesis window
    Lattice lattice;
    long truncation = 1;
    bool synthesis_integrable = false;    // gamma in L^1
    bool analysis_ft_integrable = false;  // g^ in L^1

    GaborSystem(Window g_, Window gamma_, Lattice lat, long K)
        : g(std::move(g_)), gamma(std::move(gamma_)), lattice(std::move(lat)), truncation(K) {
        if (truncation < 0) throw ConfigError("truncation must be nonnegative");
        if (g.dim() != gamma.dim() || 2 * g.dim() != lattice.dim_total())
            throw ConfigError("window/lattice dimension mismatch");
        // Polynomial-times-gaussian axes decay faster than any polynomial, so
        // both integrability conditions hold for analytic windows. Sampled
        // windows only guarantee the time-side condition (finite support on
        // the grid); their transform may fail to be integrable.
        synthesis_integrable = true;
        analysis_ft_integrable = g.is_analytic();
    }
};

namespace gabordetail {

// A lattice term is kept only when its translation stays inside the one
// period [-R, R) represented by the grid and its modulation inside one alias
// period [-Nyq, Nyq). Outside terms would re-enter by wrap-around and double
// count grid modes.
inline bool in_band(const Vec& x, const Vec& w, const GridSpec& spec) {
    const double R = spec.half_width;
    const double h = spec.spacing();
    const double nyq = 1.0 / (2.0 * h);
    const double tx = h * 0.5;
    const double tw = 1e-9 * std::max(1.0, nyq);
    for (double v : x)
        if (v < -R - tx || v >= R - tx) return false;
    for (double v : w)
        if (v < -nyq - tw || v >= nyq - tw) return false;
    return true;
}

inline void split_phase_point(const Vec& z, std::size_t d, Vec& x, Vec& w) {
    x.assign(z.begin(), z.begin() + static_cast<long>(d));
    w.assign(z.begin() + static_cast<long>(d), z.end());
}

} // namespace gabordetail

struct GaborApplyResult {
    GridFunction out;
    bool truncation_warning = false;
    double last_shell_norm = 0.0;
};

// S u = sum_{|kappa| <= K} (u, pi_{L kappa} g) pi_{L kappa} gamma evaluated on
// the grid with quadrature inner products.
inline GaborApplyResult gabor_apply_direct_checked(const GaborSystem& sys, const GridFunction& u) {
    const std::size_t d = u.spec.dim;
    if (sys.g.dim() != d) throw ConfigError("system/grid dimension mismatch");
    const GridFunction gg = sys.g.sample(u.spec);
    const GridFunction gs = sys.gamma.sample(u.spec);
    GaborApplyResult res;
    res.out = GridFunction(u.spec);
    GridFunction shell_acc(u.spec);
    Vec x, w;
    for (long h = 0; h <= sys.truncation; ++h) {
        std::fill(shell_acc.values.begin(), shell_acc.values.end(), cplx(0, 0));
        for_each_l1_shell(2 * d, h, [&](const std::vector<long>& kappa) {
            const Vec z = sys.lattice.point(kappa);
            gabordetail::split_phase_point(z, d, x, w);
            if (!gabordetail::in_band(x, w, u.spec)) return;
            const GridFunction shifted_g = tf_shift(gg, x, w);
            const cplx coef = inner_product(u, shifted_g);
            const GridFunction shifted_gamma = tf_shift(gs, x, w);
            for (std::size_t i = 0; i < shell_acc.values.size(); ++i)
                shell_acc.values[i] += coef * shifted_gamma.values[i];
        });
        for (std::size_t i = 0; i < res.out.values.size(); ++i)
            res.out.values[i] += shell_acc.values[i];
        if (h == sys.truncation) res.last_shell_norm = shell_acc.l2_norm();
    }
    const double out_norm = res.out.l2_norm();
    res.truncation_warning = out_norm > 0.0 && res.last_shell_norm > 1e-10 * out_norm;
    return res;
}

inline GridFunction gabor_apply_direct(const GaborSystem& sys, const GridFunction& u) {
    return gabor_apply_direct_checked(sys, u).out;
}

// Dual-lattice expansion of the same operator: (1/|det L|) sum_kappa
// V_g gamma(J L^{-T} kappa) pi_{J L^{-T} kappa} u with precomputed samples.
inline GridFunction janssen_apply(const GaborSystem& sys, const GridFunction& u,
                                  const StftSamples& samples) {
    const std::size_t d = u.spec.dim;
    if (sys.g.dim() != d) throw ConfigError("system/grid dimension mismatch");
    GridFunction out(u.spec);
    Vec x, w;
    for (const auto& e : samples.entries) {
        if (std::abs(e.value) < 1e-300) continue;
        gabordetail::split_phase_point(e.point, d, x, w);
        if (!gabordetail::in_band(x, w, u.spec)) continue;
        const GridFunction shifted = tf_shift(u, x, w);
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += e.value * shifted.values[i];
    }
    const double scale = 1.0 / sys.lattice.abs_det();
    for (auto& v : out.values) v *= scale;
    return out;
}

// The rank-one product symbol q(x, w) = e^{-2 pi i x.w} gamma(x) conj(g^(w)).
// Its transform is supplied through the STFT: q^(eta, z) = V_g gamma(-z, eta).
inline Symbol rank_one_symbol(const GaborSystem& sys, const GridSpec& quad) {
    const std::size_t d = sys.g.dim();
    Symbol s;
    s.dim = 2 * d;
    const Window gamma = sys.gamma;
    const Window ghat = sys.g.fourier_transform();
    s.value = [gamma, ghat, d](const Vec& z) {
        Vec x(z.begin(), z.begin() + static_cast<long>(d));
        Vec w(z.begin() + static_cast<long>(d), z.end());
        double phase = 0.0;
        for (std::size_t k = 0; k < d; ++k) phase += x[k] * w[k];
        return cplx(std::cos(kTwoPi * phase), -std::sin(kTwoPi * phase)) * gamma.value(x) *
               std::conj(ghat.value(w));
    };
    const Window g = sys.g;
    s.ft = [gamma, g, d, quad](const Vec& etaz) {
        Vec eta(etaz.begin(), etaz.begin() + static_cast<long>(d));
        Vec z(etaz.begin() + static_cast<long>(d), etaz.end());
        Vec mz(d);
        for (std::size_t k = 0; k < d; ++k) mz[k] = -z[k];
        return stft_point(gamma, g, mz, eta, quad);
    };
    return s;
}

// Relative discrepancy between the Kohn-Nirenberg application of the
// periodized rank-one symbol and the direct lattice sum.
inline double equivalence_check(const GaborSystem& sys, const GridFunction& u, long symbol_shells,
                                std::size_t symbol_points_per_axis) {
    const double un = u.l2_norm();
    if (un == 0.0) return 0.0;
    const Symbol q = rank_one_symbol(sys, u.spec);
    const std::size_t d = u.spec.dim;
    GridFunction kn;
    if (symbol_shells == 0) {
        // zero-shell partial sum is the raw symbol itself (not periodic, so
        // the wrapped table would be the wrong object here)
        kn = apply_kn(
            [&q, d](const Vec& x, const Vec& w) {
                Vec z(2 * d);
                for (std::size_t k = 0; k < d; ++k) {
                    z[k] = x[k];
                    z[d + k] = w[k];
                }
                return q.value(z);
            },
            u);
    } else {
        const PeriodizedSymbol qL =
            periodize(q, sys.lattice, symbol_shells, symbol_points_per_axis);
        kn = apply_kn(qL, u);
    }
    const GridFunction direct = gabor_apply_direct(sys, u);
    double diff2 = 0.0;
    for (std::size_t i = 0; i < kn.values.size(); ++i) diff2 += std::norm(kn.values[i] - direct.values[i]);
    return std::sqrt(diff2 * u.spec.cell_measure()) / un;
}

} // namespace gaborcert
