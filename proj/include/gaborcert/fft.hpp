#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "gaborcert/grid.hpp"
#include "gaborcert/parallel.hpp"

namespace gaborcert {

namespace fftdetail {

// In-place iterative radix-2 transform, sign = -1 forward / +1 inverse
// (unnormalized).
inline void fft_radix2(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (n < 2) return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * kTwoPi / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Chirp transform y_m = sum_j x_j e^{-2 pi i phi j m}, m = 0..M-1, via
// Bluestein's convolution. phi = 1/N recovers the plain DFT.
inline std::vector<cplx> chirp_transform(const std::vector<cplx>& x, std::size_t m_out,
                                         double phi) {
    const std::size_t n = x.size();
    std::size_t conv = 1;
    while (conv < n + m_out - 1) conv <<= 1;
    std::vector<cplx> a(conv, cplx(0, 0)), b(conv, cplx(0, 0));
    auto chirp = [phi](long t) {
        // e^{+ i pi phi t^2}; reduce t^2 phi mod 2 to keep the argument small.
        const double q = std::fmod(phi * static_cast<double>(t) * static_cast<double>(t), 2.0);
        return cplx(std::cos(kPi * q), std::sin(kPi * q));
    };
    for (std::size_t j = 0; j < n; ++j) a[j] = x[j] * std::conj(chirp(static_cast<long>(j)));
    for (long t = -(static_cast<long>(n) - 1); t < static_cast<long>(m_out); ++t) {
        const std::size_t slot = static_cast<std::size_t>((t + static_cast<long>(conv)) % static_cast<long>(conv));
        b[slot] = chirp(t);
    }
    fft_radix2(a, -1);
    fft_radix2(b, -1);
    for (std::size_t i = 0; i < conv; ++i) a[i] *= b[i];
    fft_radix2(a, +1);
    const double inv = 1.0 / static_cast<double>(conv);
    std::vector<cplx> y(m_out);
    for (std::size_t m = 0; m < m_out; ++m)
        y[m] = a[m] * inv * std::conj(chirp(static_cast<long>(m)));
    return y;
}

// Centered line transform on samples u_j at t_j = (j - N/2) h:
//   out_m = h * sum_j u_j e^{-2 pi i t_j w_m},  w_m = (m - N/2) / (N h).
// With N divisible by 4 the centering collapses to sign flips around a
// radix-2 transform; the inverse swaps the phase signs and uses 1/(N h).
inline void centered_line(std::vector<cplx>& line, double h, bool forward) {
    const std::size_t n = line.size();
    for (std::size_t j = 0; j < n; ++j)
        if (j & 1) line[j] = -line[j];
    fft_radix2(line, forward ? -1 : +1);
    const double scale = forward ? h : 1.0 / (static_cast<double>(n) * h);
    for (std::size_t m = 0; m < n; ++m) {
        line[m] *= scale;
        if (m & 1) line[m] = -line[m];
    }
}

template <class LineFn>
void transform_axes(GridFunction& g, LineFn&& line_fn) {
    const std::size_t n = g.spec.points;
    const std::size_t total = g.values.size();
    for (std::size_t axis = 0; axis < g.spec.dim; ++axis) {
        // stride between consecutive indices along this axis (row-major)
        std::size_t stride = 1;
        for (std::size_t k = axis + 1; k < g.spec.dim; ++k) stride *= n;
        const std::size_t lines = total / n;
        parallel_for(lines, [&](std::size_t l) {
            // map line id to the base offset of that line
            const std::size_t outer = l / stride;
            const std::size_t inner = l % stride;
            const std::size_t base = outer * stride * n + inner;
            std::vector<cplx> buf(n);
            for (std::size_t j = 0; j < n; ++j) buf[j] = g.values[base + j * stride];
            line_fn(buf);
            for (std::size_t j = 0; j < n; ++j) g.values[base + j * stride] = buf[j];
        });
    }
}

} // namespace fftdetail

// Unitary approximation of the continuous transform
// (F u)(w) = integral u(t) e^{-2 pi i t.w} dt on the centered grid. Output
// lives on the frequency grid of u.spec (spacing 1/(2R)).
inline GridFunction fourier(const GridFunction& u) {
    u.spec.validate();
    GridFunction out = u;
    fftdetail::transform_axes(out, [&](std::vector<cplx>& line) {
        fftdetail::centered_line(line, u.spec.spacing(), true);
    });
    out.spec = u.spec.frequency_spec();
    return out;
}

inline GridFunction inverse_fourier(const GridFunction& uhat) {
    uhat.spec.validate();
    GridFunction out = uhat;
    // Recover the time-side spacing from the frequency spec: h = 1/(2 W).
    const double h = 1.0 / (2.0 * uhat.spec.half_width);
    fftdetail::transform_axes(out, [&](std::vector<cplx>& line) {
        fftdetail::centered_line(line, h, false);
    });
    GridSpec time;
    time.dim = uhat.spec.dim;
    time.points = uhat.spec.points;
    time.half_width = static_cast<double>(uhat.spec.points) * h / 2.0;
    out.spec = time;
    return out;
}

// Time-frequency shift pi_z u = M_w T_x u on the grid. Translations must be
// grid-aligned and act circularly (exact index permutation); modulation is an
// exact pointwise phase.
inline GridFunction tf_shift(const GridFunction& u, const Vec& x, const Vec& w) {
    const std::size_t d = u.spec.dim;
    if (x.size() != d || w.size() != d)
        throw ConfigError("shift parameter dimension mismatch");
    const double h = u.spec.spacing();
    std::vector<long> steps(d);
    for (std::size_t k = 0; k < d; ++k) {
        const double ratio = x[k] / h;
        const double rounded = std::round(ratio);
        if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio)))
            throw MisalignedShift("translation is not an integer multiple of the grid spacing");
        steps[k] = static_cast<long>(rounded);
    }
    GridFunction out(u.spec);
    const long n = static_cast<long>(u.spec.points);
    std::vector<std::size_t> idx, src(d);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.unflatten(i, idx);
        for (std::size_t k = 0; k < d; ++k) {
            long j = (static_cast<long>(idx[k]) - steps[k]) % n;
            if (j < 0) j += n;
            src[k] = static_cast<std::size_t>(j);
        }
        double phase = 0.0;
        for (std::size_t k = 0; k < d; ++k) phase += w[k] * u.spec.coord(idx[k]);
        out.values[i] = u.values[u.flat_index(src)] * cplx(std::cos(kTwoPi * phase), std::sin(kTwoPi * phase));
    }
    return out;
}

inline GridFunction tf_shift(const GridFunction& u, const Vec& z) {
    const std::size_t d = u.spec.dim;
    if (z.size() != 2 * d) throw ConfigError("phase-space point must have dimension 2d");
    Vec x(z.begin(), z.begin() + static_cast<long>(d));
    Vec w(z.begin() + static_cast<long>(d), z.end());
    return tf_shift(u, x, w);
}

} // namespace gaborcert
