#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "gaborcert/fft.hpp"
#include "gaborcert/grid.hpp"
#include "gaborcert/lattice.hpp"
#include "gaborcert/parallel.hpp"
#include "gaborcert/shells.hpp"
#include "gaborcert/window.hpp"

namespace gaborcert {

struct StftValue {
    cplx value{0.0, 0.0};
    bool support_truncated = false; // boundary samples above 1e-14 of the peak
};

// V_g f(x, w) = integral f(t) e^{-2 pi i w.t} conj(g(t - x)) dt by trapezoid
// quadrature on the uniform grid. For the gaussian-type corpus the quadrature
// error is super-algebraically small; the truncation flag guards windows with
// heavier tails.
inline StftValue stft_point_checked(const Window& f, const Window& g, const Vec& x,
                                    const Vec& w, const GridSpec& quad) {
    quad.validate();
    const std::size_t d = quad.dim;
    if (f.dim() != d || g.dim() != d || x.size() != d || w.size() != d)
        throw ConfigError("stft dimension mismatch");
    StftValue out;
    cplx acc(0.0, 0.0);
    double peak = 0.0, boundary = 0.0;
    std::vector<std::size_t> idx(d, 0);
    const std::size_t total = quad.size();
    Vec t(d), ts(d);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        bool on_boundary = false;
        for (std::size_t k = d; k-- > 0;) {
            idx[k] = rem % quad.points;
            rem /= quad.points;
            if (idx[k] == 0 || idx[k] + 1 == quad.points) on_boundary = true;
        }
        double phase = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            t[k] = quad.coord(idx[k]);
            ts[k] = t[k] - x[k];
            phase += w[k] * t[k];
        }
        const cplx integrand =
            f.value(t) * std::conj(g.value(ts)) * cplx(std::cos(kTwoPi * phase), -std::sin(kTwoPi * phase));
        acc += integrand;
        const double mag = std::abs(integrand);
        peak = std::max(peak, mag);
        if (on_boundary) boundary = std::max(boundary, mag);
    }
    out.value = acc * quad.cell_measure();
    out.support_truncated = boundary > 1e-14 * peak && peak > 0.0;
    return out;
}

inline cplx stft_point(const Window& f, const Window& g, const Vec& x, const Vec& w,
                       const GridSpec& quad) {
    return stft_point_checked(f, g, x, w, quad).value;
}

inline cplx stft_point(const Window& f, const Window& g, const Vec& z, const GridSpec& quad) {
    const std::size_t d = quad.dim;
    if (z.size() != 2 * d) throw ConfigError("phase-space point must have dimension 2d");
    Vec x(z.begin(), z.begin() + static_cast<long>(d));
    Vec w(z.begin() + static_cast<long>(d), z.end());
    return stft_point(f, g, x, w, quad);
}

namespace stftdetail {

// y_m = sum_j buf_j e^{-2 pi i w_m t_j} on the centered grid t_j = -R + j h,
// w_m = -R + m h. Reduces to a chirp transform with phi = h^2.
inline void chirp_line(std::vector<cplx>& buf, double R, double h) {
    const std::size_t n = buf.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double q = std::fmod(R * h * static_cast<double>(j), 1.0);
        buf[j] *= cplx(std::cos(kTwoPi * q), std::sin(kTwoPi * q));
    }
    buf = fftdetail::chirp_transform(buf, n, h * h);
    const double r2 = std::fmod(R * R, 1.0);
    for (std::size_t m = 0; m < n; ++m) {
        const double q = std::fmod(R * h * static_cast<double>(m), 1.0) - r2;
        buf[m] *= cplx(std::cos(kTwoPi * q), std::sin(kTwoPi * q));
    }
}

} // namespace stftdetail

// Full STFT table on the 2d-dimensional grid [-R, R)^{2d}: for every x node,
// the windowed slice t -> f(t) conj(g(t-x)) is transformed to all w nodes of
// the same axis grid (chirp transform, so w is not tied to the FFT grid).
inline GridFunction stft_grid(const Window& f, const Window& g, const GridSpec& spec) {
    spec.validate();
    if (spec.dim % 2 != 0) throw ConfigError("stft grid must have even dimension");
    const std::size_t d = spec.dim / 2;
    if (f.dim() != d || g.dim() != d) throw ConfigError("stft dimension mismatch");
    // frequency nodes up to R must stay within the quadrature Nyquist 1/(2h)
    if (4.0 * spec.half_width * spec.half_width > static_cast<double>(spec.points))
        throw GridMismatch("frequency axis exceeds the quadrature Nyquist; increase N");

    GridSpec tspec;
    tspec.dim = d;
    tspec.half_width = spec.half_width;
    tspec.points = spec.points;
    const GridFunction fsamp = f.sample(tspec);
    const GridFunction gsamp = g.sample(tspec);
    if (gsamp.l2_norm() == 0.0) throw DegenerateWindow("stft window has zero norm");

    GridFunction out(spec);
    const std::size_t slice = tspec.size();
    const std::size_t nx = slice;
    const double h = tspec.spacing();
    const double measure = tspec.cell_measure();

    parallel_for(nx, [&](std::size_t xf) {
        // windowed slice over t for this x node
        std::vector<std::size_t> xidx(d);
        std::size_t rem = xf;
        for (std::size_t k = d; k-- > 0;) {
            xidx[k] = rem % tspec.points;
            rem /= tspec.points;
        }
        std::vector<cplx> w(slice);
        std::vector<std::size_t> tidx(d), sidx(d);
        const long n = static_cast<long>(tspec.points);
        for (std::size_t tf = 0; tf < slice; ++tf) {
            std::size_t r2 = tf;
            bool inside = true;
            for (std::size_t k = d; k-- > 0;) {
                tidx[k] = r2 % tspec.points;
                r2 /= tspec.points;
                const long s = static_cast<long>(tidx[k]) - static_cast<long>(xidx[k]) +
                               n / 2; // index of t - x
                if (s < 0 || s >= n) {
                    inside = false;
                } else {
                    sidx[k] = static_cast<std::size_t>(s);
                }
            }
            if (!inside) {
                w[tf] = cplx(0, 0);
                continue;
            }
            // t - x coincides with the grid point of index s since x is a node
            std::size_t sflat = 0;
            for (std::size_t k = 0; k < d; ++k) sflat = sflat * tspec.points + sidx[k];
            w[tf] = fsamp.values[tf] * std::conj(gsamp.values[sflat]);
        }
        // transform each t axis to the matching w axis
        for (std::size_t axis = 0; axis < d; ++axis) {
            std::size_t stride = 1;
            for (std::size_t k = axis + 1; k < d; ++k) stride *= tspec.points;
            const std::size_t lines = slice / tspec.points;
            for (std::size_t l = 0; l < lines; ++l) {
                const std::size_t outer = l / stride;
                const std::size_t inner = l % stride;
                const std::size_t base = outer * stride * tspec.points + inner;
                std::vector<cplx> buf(tspec.points);
                for (std::size_t j = 0; j < tspec.points; ++j) buf[j] = w[base + j * stride];
                stftdetail::chirp_line(buf, tspec.half_width, h);
                for (std::size_t j = 0; j < tspec.points; ++j) w[base + j * stride] = buf[j];
            }
        }
        for (std::size_t wf = 0; wf < slice; ++wf) out.values[xf * slice + wf] = w[wf] * measure;
    });
    return out;
}

// STFT samples on the rotated dual lattice J L^{-T} Z^{2d}, truncated to the
// l1 ball |kappa| <= K.
struct StftSamples {
    struct Entry {
        std::vector<long> kappa;
        Vec point; // J L^{-T} kappa
        cplx value;
    };
    std::size_t dim_d = 1;
    long radius = 0;
    std::vector<Entry> entries;
    GridSpec quad;

    const Entry& at_zero() const {
        for (const auto& e : entries)
            if (l1_order(e.kappa) == 0) return e;
        throw ConfigError("samples are missing the zero entry");
    }
};

// Quadrature on a grid with spacing h cannot resolve modulations beyond the
// Nyquist frequency 1/(2h); such evaluations alias back into the band.
// Strict refuses them, Skip drops those lattice entries (used when the
// samples feed the band-limited grid operator rather than a series bound).
enum class BandPolicy { Strict, Skip };

inline StftSamples stft_on_dual_lattice(const Window& f, const Window& g, const Lattice& lat,
                                        long K, const GridSpec& quad,
                                        BandPolicy policy = BandPolicy::Strict) {
    if (K < 0) throw ConfigError("truncation radius must be nonnegative");
    StftSamples out;
    out.dim_d = lat.dim_d();
    out.radius = K;
    out.quad = quad;
    const std::size_t d = lat.dim_d();
    const double nyquist = 1.0 / (2.0 * quad.spacing());
    std::vector<std::vector<long>> kappas;
    for_each_l1_ball(lat.dim_total(), K, [&](const std::vector<long>& k) { kappas.push_back(k); });
    std::vector<Vec> points(kappas.size());
    std::vector<char> keep(kappas.size(), 1);
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        points[i] = lat.rotated_dual(kappas[i]);
        for (std::size_t k = d; k < 2 * d; ++k) {
            if (std::abs(points[i][k]) > nyquist * (1.0 + 1e-9)) {
                if (policy == BandPolicy::Strict)
                    throw GridMismatch(
                        "dual-lattice modulation exceeds the quadrature Nyquist; increase the "
                        "grid resolution or lower the truncation radius");
                keep[i] = 0;
            }
        }
    }
    out.entries.resize(kappas.size());
    parallel_for(kappas.size(), [&](std::size_t i) {
        StftSamples::Entry e;
        e.kappa = kappas[i];
        e.point = points[i];
        e.value = keep[i] ? stft_point(f, g, e.point, quad) : cplx(0, 0);
        out.entries[i] = std::move(e);
    });
    if (policy == BandPolicy::Skip) {
        std::vector<StftSamples::Entry> kept;
        kept.reserve(out.entries.size());
        for (std::size_t i = 0; i < out.entries.size(); ++i)
            if (keep[i]) kept.push_back(std::move(out.entries[i]));
        out.entries = std::move(kept);
    }
    return out;
}

// | |V_g f(x,w)| - |V_{g^} f^(w,-x)| |, a quadrature self-test of the
// transform symmetry of the STFT modulus.
inline double fourier_symmetry_check(const Window& f, const Window& g, const Vec& z,
                                     const GridSpec& quad) {
    const std::size_t d = quad.dim;
    if (z.size() != 2 * d) throw ConfigError("phase-space point must have dimension 2d");
    Vec x(z.begin(), z.begin() + static_cast<long>(d));
    Vec w(z.begin() + static_cast<long>(d), z.end());
    const double lhs = std::abs(stft_point(f, g, x, w, quad));
    Vec mx(d);
    for (std::size_t k = 0; k < d; ++k) mx[k] = -x[k];
    const double rhs =
        std::abs(stft_point(f.fourier_transform(), g.fourier_transform(), w, mx, quad));
    return std::abs(lhs - rhs);
}

} // namespace gaborcert
