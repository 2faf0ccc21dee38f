#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gaborcert/count.hpp"
#include "gaborcert/errors.hpp"
#include "gaborcert/grid.hpp"
#include "gaborcert/lattice.hpp"
#include "gaborcert/stft.hpp"
#include "gaborcert/window.hpp"

namespace gaborcert {

// ---------------------------------------------------------------------------
// Decay-constant calculus
// ---------------------------------------------------------------------------

// Grid maxima of (1 + |x|)^{d+eps} |f| over the families
//   { x^b d^a w },  { x^b d_j d^a w },  { x_j x^b d^a w },  a, b in {0,1}^d,
// for a window and its transform. Grid maxima are lower bounds of the true
// sups; `rigorous` records whether exact derivatives were available.
struct DecayConstants {
    double epsilon = 1.0;
    double H = 0.0;     // max_k max_a { sup w, sup x_k x^a w }
    double K = 0.0;     // window constant
    double K_hat = 0.0; // constant of the transform
    double K_sym = 0.0; // sqrt(K * K_hat)
    double grid_R = 0.0;
    std::size_t grid_N = 0;
    bool rigorous = false;
};

namespace certdetail {

inline double weighted_sup(const Window& w, double epsilon, const GridSpec& grid) {
    const std::size_t d = grid.dim;
    const double expo = static_cast<double>(d) + epsilon;
    double best = 0.0;
    std::vector<std::size_t> idx(d);
    Vec x(d);
    const std::size_t total = grid.size();
    for (std::size_t f = 0; f < total; ++f) {
        std::size_t rem = f;
        for (std::size_t k = d; k-- > 0;) {
            idx[k] = rem % grid.points;
            rem /= grid.points;
        }
        double r2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            x[k] = grid.coord(idx[k]);
            r2 += x[k] * x[k];
        }
        const double mag = std::abs(w.value(x));
        if (mag == 0.0) continue;
        best = std::max(best, std::pow(1.0 + std::sqrt(r2), expo) * mag);
    }
    return best;
}

template <class Fn>
void for_each_binary_multiindex(std::size_t d, Fn&& fn) {
    std::vector<int> a(d, 0);
    const std::size_t total = static_cast<std::size_t>(1) << d;
    for (std::size_t mask = 0; mask < total; ++mask) {
        for (std::size_t k = 0; k < d; ++k) a[k] = (mask >> k) & 1u ? 1 : 0;
        fn(a);
    }
}

inline Window apply_powers(const Window& w, const std::vector<int>& b) {
    Window out = w;
    for (std::size_t k = 0; k < b.size(); ++k)
        for (int rep = 0; rep < b[k]; ++rep) out = out.mul_coord(k);
    return out;
}

struct SingleWindowConstants {
    double H = 0.0;
    double K = 0.0;
};

inline SingleWindowConstants window_constants(const Window& w, double epsilon,
                                              const GridSpec& grid) {
    const std::size_t d = grid.dim;
    SingleWindowConstants out;
    for_each_binary_multiindex(d, [&](const std::vector<int>& a) {
        const Window da = w.partial_derivative(a);
        for_each_binary_multiindex(d, [&](const std::vector<int>& b) {
            const Window base = apply_powers(da, b);
            out.K = std::max(out.K, weighted_sup(base, epsilon, grid));
            for (std::size_t j = 0; j < d; ++j) {
                std::vector<int> aj(a);
                aj[j] += 1;
                const Window dj = apply_powers(w.partial_derivative(aj), b);
                out.K = std::max(out.K, weighted_sup(dj, epsilon, grid));
                out.K = std::max(out.K, weighted_sup(base.mul_coord(j), epsilon, grid));
            }
        });
    });
    const double plain = weighted_sup(w, epsilon, grid);
    for (std::size_t k = 0; k < d; ++k) {
        double hk = plain;
        for_each_binary_multiindex(d, [&](const std::vector<int>& a) {
            Window m = w;
            for (std::size_t j = 0; j < d; ++j)
                for (int rep = 0; rep < a[j]; ++rep) m = m.mul_coord(j);
            hk = std::max(hk, weighted_sup(m.mul_coord(k), epsilon, grid));
        });
        out.H = std::max(out.H, hk);
    }
    return out;
}

} // namespace certdetail

inline DecayConstants decay_constants(const Window& win, double epsilon, const GridSpec& grid,
                                      bool require_rigorous = false) {
    if (epsilon <= 0.0) throw ConfigError("epsilon must be positive");
    if (win.dim() != grid.dim) throw ConfigError("window/grid dimension mismatch");
    if (!win.has_exact_derivatives() && require_rigorous)
        throw MissingDerivatives("sampled window lacks exact derivatives");
    DecayConstants out;
    out.epsilon = epsilon;
    out.grid_R = grid.half_width;
    out.grid_N = grid.points;
    out.rigorous = win.has_exact_derivatives();

    const auto time_side = certdetail::window_constants(win, epsilon, grid);
    const Window hat = win.fourier_transform();
    GridSpec hat_grid = grid;
    if (!win.is_analytic()) hat_grid = hat.raw_samples().spec;
    const auto freq_side = certdetail::window_constants(hat, epsilon, hat_grid);

    out.H = time_side.H;
    out.K = time_side.K;
    out.K_hat = freq_side.K;
    out.K_sym = std::sqrt(out.K * out.K_hat);
    return out;
}

// ---------------------------------------------------------------------------
// Envelope and closed-form series bound
// ---------------------------------------------------------------------------

inline double envelope_dimension_constant(std::size_t d) {
    return std::pow(2.0, 2.0 * static_cast<double>(d) + 1.0) *
           std::pow(static_cast<double>(d), static_cast<double>(d)) *
           std::pow(1.0 + 1.0 / kPi, static_cast<double>(d) + 1.0);
}

// Pointwise bound on |V_g f| combining homogeneous decay in |x|, |omega| with
// per-axis factors; `product_form` is the weaker all-per-axis variant used
// for lattice tails.
struct Envelope {
    std::size_t d = 1;
    double epsilon = 1.0;
    double C_d = 0.0;
    double K_sym_f = 0.0; // synthesis window
    double K_sym_g = 0.0; // analysis window

    double amplitude() const { return C_d * K_sym_f * K_sym_g; }

    double value(const Vec& x, const Vec& w) const {
        const double half = (static_cast<double>(d) + epsilon) / 2.0;
        const double axis = 0.5 + 1.0 / (2.0 * static_cast<double>(d));
        double e = amplitude() * std::pow(1.0 + norm2(x), -half) * std::pow(1.0 + norm2(w), -half);
        for (std::size_t j = 0; j < d; ++j)
            e *= std::pow(1.0 + std::abs(x[j]), -axis) * std::pow(1.0 + std::abs(w[j]), -axis);
        return e;
    }

    double product_form(const Vec& x, const Vec& w) const {
        const double axis = 1.0 + (1.0 + epsilon) / (2.0 * static_cast<double>(d));
        double e = amplitude();
        for (std::size_t j = 0; j < d; ++j)
            e *= std::pow(1.0 + std::abs(x[j]), -axis) * std::pow(1.0 + std::abs(w[j]), -axis);
        return e;
    }
};

inline Envelope envelope_bound(const DecayConstants& consts_f, const DecayConstants& consts_g,
                               std::size_t d) {
    if (consts_f.epsilon != consts_g.epsilon)
        throw ConfigError("envelope requires matching epsilon");
    Envelope e;
    e.d = d;
    e.epsilon = consts_f.epsilon;
    e.C_d = envelope_dimension_constant(d);
    e.K_sym_f = consts_f.K_sym;
    e.K_sym_g = consts_g.K_sym;
    return e;
}

// Closed-form bound on the nonzero lattice series in terms of the maximal
// mesh theta: C_d [ (1 + 4 d theta / (1+eps))^{2d} - 1 ] K_f K_g.
inline double series_closed_bound(double k_sym_f, double k_sym_g, std::size_t d, double epsilon,
                                  double theta) {
    if (theta < 0.0) throw ConfigError("mesh must be nonnegative");
    const double dd = static_cast<double>(d);
    const double bracket =
        std::pow(1.0 + 4.0 * dd * theta / (1.0 + epsilon), 2.0 * dd) - 1.0;
    return envelope_dimension_constant(d) * bracket * k_sym_f * k_sym_g;
}

// Largest mesh for which the closed-form bound stays below |c0| / C.
inline double theta_max(double c0, double k_sym_f, double k_sym_g, std::size_t d, double epsilon,
                        double C) {
    if (c0 <= 0.0) throw NonPositiveInner("window inner product must be positive");
    if (C <= 0.0) throw ConfigError("shift-invariance constant must be positive");
    const double dd = static_cast<double>(d);
    const double ratio = c0 / (envelope_dimension_constant(d) * k_sym_f * k_sym_g * C);
    return (1.0 + epsilon) / (4.0 * dd) * (std::pow(ratio + 1.0, 1.0 / (2.0 * dd)) - 1.0);
}

// ---------------------------------------------------------------------------
// Rigorous lattice tails from the product envelope (diagonal lattices)
// ---------------------------------------------------------------------------

// Upper bound on sum over |kappa|_1 > K of v(mu_kappa) |V(mu_kappa)| for the
// rotated dual lattice of diag(alpha, beta). Uses the per-axis comparison
// integral; requires s < (1+eps)/(2d), otherwise the tail is unbounded and
// infinity is returned.
inline double envelope_lattice_tail(const Envelope& env, double weight_s, const Vec& alpha,
                                    const Vec& beta, long K) {
    const double dd = static_cast<double>(env.d);
    const double q = 1.0 + (1.0 + env.epsilon) / (2.0 * dd) - weight_s;
    if (q <= 1.0) return std::numeric_limits<double>::infinity();
    std::vector<double> mesh;
    // rotated dual coordinates: first block spacing 1/beta_j, second 1/alpha_j,
    // i.e. integer index k_j scaled by 1/beta_j (and h_j by 1/alpha_j)
    for (double b : beta) mesh.push_back(b);
    for (double a : alpha) mesh.push_back(a);
    const long n = static_cast<long>(mesh.size());
    const long T = K / (2 * static_cast<long>(env.d));
    double total = 0.0;
    for (long c = 0; c < n; ++c) {
        double prod = 1.0;
        for (long c2 = 0; c2 < n; ++c2) {
            if (c2 == c) continue;
            prod *= 1.0 + 2.0 * mesh[c2] / (q - 1.0);
        }
        const double tail_axis = 2.0 * mesh[c] / (q - 1.0) *
                                 std::pow(1.0 + static_cast<double>(T) / mesh[c], 1.0 - q);
        total += tail_axis * prod;
    }
    return env.amplitude() * total;
}

// ---------------------------------------------------------------------------
// Gabor series and operator certificates
// ---------------------------------------------------------------------------

// sigma_{L,g,gamma} truncation: weighted l1 sum of the dual-lattice STFT
// samples plus a caller-supplied rigorous remainder.
inline double sigma_gabor(const StftSamples& samples, const PolyWeight& w, double tail) {
    if (tail < 0.0) throw ConfigError("tail must be nonnegative");
    double s = 0.0;
    for (const auto& e : samples.entries) s += w(e.point) * std::abs(e.value);
    return s + tail;
}

inline double sigma_gabor_nonzero(const StftSamples& samples, const PolyWeight& w, double tail) {
    if (tail < 0.0) throw ConfigError("tail must be nonnegative");
    double s = 0.0;
    for (const auto& e : samples.entries) {
        if (l1_order(e.kappa) == 0) continue;
        s += w(e.point) * std::abs(e.value);
    }
    return s + tail;
}

inline double boundedness_cert(double sigma, const Lattice& lat, double C) {
    if (C <= 0.0) throw ConfigError("shift-invariance constant must be positive");
    return C * sigma / lat.abs_det();
}

// ---------------------------------------------------------------------------
// Weighted Wiener machinery (per-cube sups of the STFT)
// ---------------------------------------------------------------------------

struct WienerTable {
    struct Cube {
        std::vector<long> vertex; // (r, s) in Z^{2d}
        double sup = 0.0;         // sub-grid max of |V_g gamma| over the cube
    };
    long region = 0;
    double partial = 0.0; // sum of v(vertex) * sup over the table
    std::vector<Cube> cubes;
};

// Cube sups of |V_g gamma| over the l-infinity box of cubes with
// |vertex|_inf <= region. Sub-grid maxima are lower bounds of the true sups;
// when a diagonal lattice is supplied its points inside each cube join the
// scan so lattice samples are always dominated by their cube entry.
inline WienerTable wiener_norm_stft(const Window& f, const Window& g, const PolyWeight& w,
                                    long region, const GridSpec& quad, std::size_t subdiv = 4,
                                    const Lattice* include_lattice = nullptr) {
    const std::size_t d = quad.dim;
    WienerTable table;
    table.region = region;
    const std::size_t n2 = 2 * d;
    std::vector<long> vertex(n2, -region);
    const std::size_t pts = subdiv + 1;

    std::vector<Vec> lattice_pts;
    if (include_lattice != nullptr) {
        const auto& diag = include_lattice->diagonal();
        if (diag) {
            // enumerate rotated dual points with coordinates within the box
            std::vector<std::vector<long>> ranges;
            Vec mesh;
            for (double b : diag->beta) mesh.push_back(1.0 / b);
            for (double a : diag->alpha) mesh.push_back(1.0 / a);
            std::vector<long> counts(n2);
            for (std::size_t c = 0; c < n2; ++c)
                counts[c] = static_cast<long>(std::floor((static_cast<double>(region) + 1.0) / mesh[c])) + 1;
            std::vector<long> k(n2, 0);
            std::function<void(std::size_t)> rec = [&](std::size_t pos) {
                if (pos == n2) {
                    Vec p(n2);
                    for (std::size_t c = 0; c < d; ++c) p[c] = -static_cast<double>(k[c]) * mesh[c];
                    for (std::size_t c = d; c < n2; ++c) p[c] = static_cast<double>(k[c]) * mesh[c];
                    lattice_pts.push_back(std::move(p));
                    return;
                }
                for (long v = -counts[pos]; v <= counts[pos]; ++v) {
                    k[pos] = v;
                    rec(pos + 1);
                }
            };
            rec(0);
        }
    }

    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
        if (pos == n2) {
            WienerTable::Cube cube;
            cube.vertex = vertex;
            std::size_t total = 1;
            for (std::size_t k = 0; k < n2; ++k) total *= pts;
            Vec z(n2);
            for (std::size_t flat = 0; flat < total; ++flat) {
                std::size_t rem = flat;
                for (std::size_t k = n2; k-- > 0;) {
                    const std::size_t i = rem % pts;
                    rem /= pts;
                    z[k] = static_cast<double>(vertex[k]) +
                           static_cast<double>(i) / static_cast<double>(subdiv);
                }
                cube.sup = std::max(cube.sup, std::abs(stft_point(f, g, z, quad)));
            }
            for (const Vec& p : lattice_pts) {
                bool inside = true;
                for (std::size_t k = 0; k < n2; ++k)
                    if (p[k] < static_cast<double>(vertex[k]) ||
                        p[k] > static_cast<double>(vertex[k]) + 1.0)
                        inside = false;
                if (inside) cube.sup = std::max(cube.sup, std::abs(stft_point(f, g, p, quad)));
            }
            Vec rv(n2);
            for (std::size_t k = 0; k < n2; ++k) rv[k] = static_cast<double>(vertex[k]);
            table.partial += w(rv) * cube.sup;
            table.cubes.push_back(std::move(cube));
            return;
        }
        for (long v = -region; v <= region; ++v) {
            vertex[pos] = v;
            rec(pos + 1);
        }
    };
    rec(0);
    return table;
}

// Rigorous bound on the Wiener cube sum outside the l-infinity box, from the
// product envelope. Infinity when the weighted per-axis exponent fails.
inline double wiener_tail_bound(const Envelope& env, double weight_s, long region) {
    const double dd = static_cast<double>(env.d);
    const double q = 1.0 + (1.0 + env.epsilon) / (2.0 * dd) - weight_s;
    if (q <= 1.0 || region < 1) return std::numeric_limits<double>::infinity();
    const std::size_t n2 = 2 * env.d;
    const double axis_sum = 2.0 * (1.0 + 1.0 / (q - 1.0));
    const double axis_tail = 2.0 / (q - 1.0) * std::pow(static_cast<double>(region), 1.0 - q);
    double total = 0.0;
    for (std::size_t c = 0; c < n2; ++c) {
        double prod = 1.0;
        for (std::size_t c2 = 0; c2 < n2; ++c2)
            if (c2 != c) prod *= axis_sum;
        total += axis_tail * prod;
    }
    const double weight_slack = std::pow(2.0, 2.0 * dd * weight_s);
    return env.amplitude() * weight_slack * total;
}

// A cube with vertex (r, s) holds no nonzero rotated dual point (-k/beta,
// h/alpha) when |r_j| < [1/beta_j] and |s_j| < [1/alpha_j] for every j. (The
// first block of the vertex tracks the -k/beta coordinates.)
inline bool cube_exclusion(const Vec& alpha, const Vec& beta, const std::vector<long>& r,
                           const std::vector<long>& s) {
    const std::size_t d = alpha.size();
    if (beta.size() != d || r.size() != d || s.size() != d)
        throw ConfigError("cube exclusion dimension mismatch");
    for (std::size_t j = 0; j < d; ++j) {
        const long rb = static_cast<long>(std::floor(1.0 / beta[j]));
        const long sa = static_cast<long>(std::floor(1.0 / alpha[j]));
        if (!(std::labs(r[j]) < rb && std::labs(s[j]) < sa)) return false;
    }
    return true;
}

// Diagonal-case refinement: drop the excluded cubes from the Wiener sum and
// scale by the sampling constant of the rotated dual lattice,
// M_v prod_j ([alpha_j]+1)([beta_j]+1).
inline double refined_sigma_diag(const WienerTable& table, const PolyWeight& w, const Vec& alpha,
                                 const Vec& beta, double wiener_partial, double wiener_tail) {
    const std::size_t d = alpha.size();
    double constant = w.unit_cube_max();
    for (std::size_t j = 0; j < d; ++j)
        constant *= (std::floor(alpha[j]) + 1.0) * (std::floor(beta[j]) + 1.0);
    double excluded = 0.0;
    for (const auto& cube : table.cubes) {
        std::vector<long> r(cube.vertex.begin(), cube.vertex.begin() + static_cast<long>(d));
        std::vector<long> s(cube.vertex.begin() + static_cast<long>(d), cube.vertex.end());
        if (!cube_exclusion(alpha, beta, r, s)) continue;
        Vec rv(cube.vertex.size());
        for (std::size_t k = 0; k < cube.vertex.size(); ++k)
            rv[k] = static_cast<double>(cube.vertex[k]);
        excluded += w(rv) * cube.sup;
    }
    return std::max(0.0, constant * (wiener_partial + wiener_tail - excluded));
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

struct InvertibilityCert {
    bool invertible = false;
    std::optional<double> inverse_norm_bound;
};

// Invertible when C times the rigorous nonzero-series bound stays strictly
// below |(gamma, g)|; the inverse-norm denominator keeps the zero term of
// sigma, matching the operator statement verbatim.
inline InvertibilityCert invertibility_cert(cplx c0, double kappa_nonzero_sum, double C,
                                            const Lattice& lat, double sigma_full) {
    if (std::abs(c0) == 0.0) throw ZeroInner("analysis/synthesis inner product vanishes");
    if (C <= 0.0) throw ConfigError("shift-invariance constant must be positive");
    InvertibilityCert out;
    out.invertible = C * kappa_nonzero_sum < std::abs(c0);
    if (out.invertible) {
        const double denom = (1.0 + C) * std::abs(c0) - C * sigma_full;
        if (denom > 0.0) out.inverse_norm_bound = lat.abs_det() / denom;
    }
    return out;
}

struct FrameBounds {
    double A = 0.0;
    double B = 0.0;
};

// Frame bounds from the series route: requires sigma_{L,g} < 2 ||g||^2.
inline FrameBounds frame_bounds(double c0_norm2, double sigma_Lg, const Lattice& lat) {
    if (!(sigma_Lg - c0_norm2 < c0_norm2))
        throw ConditionFailed("nonzero series does not stay below the window norm");
    FrameBounds fb;
    fb.A = (2.0 * c0_norm2 - sigma_Lg) / lat.abs_det();
    fb.B = sigma_Lg / lat.abs_det();
    return fb;
}

// Mesh-threshold variant of the frame bounds. As printed, its A replaces the
// whole series by the closed-form bound of the nonzero part only, so it is
// exposed as a labeled value and not used for oracle verification.
inline FrameBounds frame_bounds_gfb(double c0_norm2, double closed_nonzero_bound,
                                    const Vec& alpha, const Vec& beta) {
    double vol = 1.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) vol *= alpha[j] * beta[j];
    FrameBounds fb;
    fb.A = (2.0 * c0_norm2 - closed_nonzero_bound) / vol;
    fb.B = 2.0 * c0_norm2 / vol;
    return fb;
}

enum class BoundMethod { LatticeSum, ClosedFormBinomial, DiagonalRefined };

inline std::string bound_method_name(BoundMethod m) {
    switch (m) {
        case BoundMethod::LatticeSum: return "lattice-sum";
        case BoundMethod::ClosedFormBinomial: return "binomial";
        case BoundMethod::DiagonalRefined: return "diag-refined";
    }
    return "unknown";
}

// Full output record of a certification run.
struct Certificate {
    std::string system;
    double C = 1.0;
    double weight_s = 0.0;
    double epsilon = 1.0;
    long truncation = 0;

    cplx c0{0.0, 0.0};       // (gamma, g)
    double sigma = 0.0;      // truncated sigma_{L,g,gamma} + tail
    double sigma_tail = 0.0; // rigorous remainder used in sigma
    double kappa_nonzero_bound = 0.0;
    BoundMethod method = BoundMethod::LatticeSum;

    bool bounded = false;
    double norm_bound = 0.0;
    bool invertible = false;
    std::optional<double> inverse_norm_bound;
    bool frame = false;
    std::optional<FrameBounds> bounds;
    std::optional<FrameBounds> bounds_gfb; // labeled mesh-threshold variant

    double theta = 0.0;   // max mesh of the lattice (diagonal case)
    double theta_0 = 0.0; // certified threshold (0 when unavailable)

    bool rigorous = false;
    double constants_drift = 0.0; // relative change under grid doubling

    struct Sensitivity {
        double epsilon;
        double margin; // |c0| - C * nonzero bound at this epsilon
    };
    std::vector<Sensitivity> epsilon_sensitivity;

    void enforce_implications() const {
        if (frame && !invertible) throw ConditionFailed("frame certificate without invertibility");
        if (invertible && !bounded) throw ConditionFailed("invertibility certificate without boundedness");
        if (frame && bounds) {
            if (!(bounds->A > 0.0) || !(bounds->A <= bounds->B))
                throw ConditionFailed("frame bounds must satisfy 0 < A <= B");
        }
    }
};

} // namespace gaborcert
