#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gaborcert/cert.hpp"
#include "gaborcert/errors.hpp"
#include "gaborcert/gabor.hpp"
#include "gaborcert/grid.hpp"
#include "gaborcert/parallel.hpp"

namespace gaborcert {

// Brute-force frame operator on the discretized box: either a dense matrix
// (small grids) or an implicit matvec. Assembly goes through the lattice sum
// when the lattice translations are grid-aligned, otherwise through the
// dual-lattice expansion (whose translations 1/beta_j may align even when
// alpha_j is far below the grid spacing).
class FrameOperatorMatrix {
public:
    enum class Method { DirectGaborSum, JanssenSum, Raw };

    static constexpr std::size_t kDenseLimit = 4096;

    GridSpec grid;
    Method method = Method::DirectGaborSum;
    long truncation = 0;
    bool dense = false;
    std::vector<cplx> matrix; // column-major n x n when dense
    std::function<GridFunction(const GridFunction&)> apply_fn;

    std::size_t n() const { return grid.size(); }

    GridFunction apply(const GridFunction& u) const {
        if (!(u.spec == grid)) throw GridMismatch("operator/grid mismatch");
        if (!dense) return apply_fn(u);
        GridFunction out(grid);
        const std::size_t nn = n();
        for (std::size_t j = 0; j < nn; ++j) {
            const cplx uj = u.values[j];
            if (uj == cplx(0, 0)) continue;
            const cplx* col = matrix.data() + j * nn;
            for (std::size_t i = 0; i < nn; ++i) out.values[i] += col[i] * uj;
        }
        return out;
    }

    double hermitian_defect() const {
        if (!dense) throw ConfigError("hermitian defect needs a dense matrix");
        const std::size_t nn = n();
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < nn; ++j)
            for (std::size_t i = 0; i < nn; ++i) {
                const cplx a = matrix[j * nn + i];
                const cplx b = std::conj(matrix[i * nn + j]);
                num += std::norm(a - b);
                den += std::norm(a);
            }
        return den == 0.0 ? 0.0 : std::sqrt(num / den);
    }
};

namespace verifydetail {

inline bool aligned(double value, double h) {
    const double ratio = value / h;
    return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, std::abs(ratio));
}

inline bool direct_alignment_ok(const GaborSystem& sys, const GridSpec& grid) {
    const std::size_t d = grid.dim;
    const double h = grid.spacing();
    // all translation components of lattice points are integer combinations of
    // the first-block columns of L; checking the columns suffices
    for (std::size_t j = 0; j < 2 * d; ++j)
        for (std::size_t i = 0; i < d; ++i)
            if (!aligned(sys.lattice.matrix()(i, j), h)) return false;
    return true;
}

inline bool janssen_alignment_ok(const GaborSystem& sys, const GridSpec& grid) {
    const std::size_t d = grid.dim;
    const double h = grid.spacing();
    // translations of the dual expansion are the first block of J L^{-T},
    // i.e. minus the second block of rows of L^{-T}
    for (std::size_t j = 0; j < 2 * d; ++j)
        for (std::size_t i = 0; i < d; ++i)
            if (!aligned(sys.lattice.inv_transpose()(d + i, j), h)) return false;
    return true;
}

} // namespace verifydetail

// Truncation radius for the direct-sum oracle: the retained lattice
// translations must cover the whole time box and the retained modulations the
// whole frequency band, otherwise the truncated operator annihilates edge
// content and its smallest eigenvalue is an artifact.
inline long oracle_truncation(const Lattice& lat, const GridSpec& grid, long fallback) {
    if (!lat.diagonal()) return fallback;
    double amin = lat.diagonal()->alpha[0], bmin = lat.diagonal()->beta[0];
    for (double a : lat.diagonal()->alpha) amin = std::min(amin, a);
    for (double b : lat.diagonal()->beta) bmin = std::min(bmin, b);
    const double nyquist = 1.0 / (2.0 * grid.spacing());
    const double kt = std::ceil(grid.half_width / amin);
    const double kf = std::ceil(nyquist / bmin);
    if (kt + kf > 1e7) return fallback;
    return static_cast<long>(kt + kf) + 2;
}

// Assemble the truncated frame operator. Dense assembly applies the operator
// to every basis vector; the implicit form keeps a matvec closure.
inline FrameOperatorMatrix assemble(const GaborSystem& sys, const GridSpec& grid, long K,
                                    bool want_dense = true, const StftSamples* samples = nullptr) {
    grid.validate();
    FrameOperatorMatrix op;
    op.grid = grid;
    op.truncation = K;

    GaborSystem truncated = sys;
    truncated.truncation = K;

    const bool direct_ok = verifydetail::direct_alignment_ok(sys, grid);
    const bool janssen_ok = samples != nullptr && verifydetail::janssen_alignment_ok(sys, grid);
    if (direct_ok) {
        op.method = FrameOperatorMatrix::Method::DirectGaborSum;
        op.apply_fn = [truncated](const GridFunction& u) {
            return gabor_apply_direct(truncated, u);
        };
    } else if (janssen_ok) {
        op.method = FrameOperatorMatrix::Method::JanssenSum;
        const StftSamples samp = *samples;
        op.apply_fn = [truncated, samp](const GridFunction& u) {
            return janssen_apply(truncated, u, samp);
        };
    } else {
        throw MisalignedShift(
            "neither the lattice nor its rotated dual is aligned with the grid");
    }

    if (want_dense) {
        if (op.n() > FrameOperatorMatrix::kDenseLimit)
            throw GridTooLarge("dense assembly limited to 4096 grid points");
        const std::size_t nn = op.n();
        op.matrix.assign(nn * nn, cplx(0, 0));
        if (op.method == FrameOperatorMatrix::Method::DirectGaborSum) {
            // S = h^d sum_kappa gamma_kappa g_kappa^H; precompute the in-band
            // shifted windows once and accumulate outer products
            const std::size_t d = grid.dim;
            const GridFunction gg = sys.g.sample(grid);
            const GridFunction gs = sys.gamma.sample(grid);
            std::vector<GridFunction> analysis, synthesis;
            Vec x, w;
            for_each_l1_ball(2 * d, K, [&](const std::vector<long>& kappa) {
                const Vec z = sys.lattice.point(kappa);
                gabordetail::split_phase_point(z, d, x, w);
                if (!gabordetail::in_band(x, w, grid)) return;
                analysis.push_back(tf_shift(gg, x, w));
                synthesis.push_back(tf_shift(gs, x, w));
            });
            const double h = grid.cell_measure();
            parallel_for(nn, [&](std::size_t j) {
                cplx* col = op.matrix.data() + j * nn;
                for (std::size_t t = 0; t < analysis.size(); ++t) {
                    const cplx coef = h * std::conj(analysis[t].values[j]);
                    if (coef == cplx(0, 0)) continue;
                    const cplx* src = synthesis[t].values.data();
                    for (std::size_t i = 0; i < nn; ++i) col[i] += coef * src[i];
                }
            });
        } else {
            std::vector<GridFunction> cols(nn);
            parallel_for(nn, [&](std::size_t j) {
                GridFunction e(grid);
                e.values[j] = cplx(1.0, 0.0);
                cols[j] = op.apply_fn(e);
            });
            for (std::size_t j = 0; j < nn; ++j)
                for (std::size_t i = 0; i < nn; ++i) op.matrix[j * nn + i] = cols[j].values[i];
        }
        op.dense = true;
    }
    return op;
}

inline FrameOperatorMatrix raw_operator(const GridSpec& grid, std::vector<cplx> column_major) {
    FrameOperatorMatrix op;
    op.grid = grid;
    op.method = FrameOperatorMatrix::Method::Raw;
    op.dense = true;
    if (column_major.size() != grid.size() * grid.size())
        throw ConfigError("matrix size does not match the grid");
    op.matrix = std::move(column_major);
    return op;
}

struct EigReport {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    long iterations_max = 0;
    long iterations_min = 0;
    bool converged = true;
};

namespace verifydetail {

inline GridFunction random_vector(const GridSpec& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    GridFunction v(grid);
    for (auto& x : v.values) x = cplx(dist(rng), dist(rng));
    return v;
}

inline void normalize(GridFunction& v) {
    const double n = v.l2_norm();
    if (n == 0.0) return;
    for (auto& x : v.values) x /= n;
}

// Rayleigh-quotient power iteration for a Hermitian positive operator.
// scale_hint widens the convergence scale: iterating the shifted operator of
// a nearly tight frame, the dominant eigenvalue can be negligible relative to
// the spectrum scale, and resolving it further is numerical noise.
template <class ApplyFn>
std::pair<double, long> power_iteration(const ApplyFn& apply, const GridSpec& grid,
                                        double rel_tol, long cap, std::uint64_t seed,
                                        bool* converged, double scale_hint = 0.0) {
    GridFunction v = random_vector(grid, seed);
    normalize(v);
    double lambda = 0.0;
    for (long it = 1; it <= cap; ++it) {
        GridFunction w = apply(v);
        const double norm_w = w.l2_norm();
        if (norm_w <= std::max(1e-300, 1e-14 * rel_tol * scale_hint)) {
            // operator annihilates the probe: zero dominant eigenvalue
            if (converged) *converged = true;
            return {0.0, it};
        }
        const double rq = std::real(inner_product(w, v));
        const double delta = std::abs(rq - lambda);
        lambda = rq;
        v = std::move(w);
        normalize(v);
        // second disjunct: the dominant shifted eigenvalue is below tolerance
        // relative to the spectrum scale, so it is already resolved
        if (it > 2 && (delta <= rel_tol * std::max(std::abs(lambda), 1e-300) ||
                       (scale_hint > 0.0 && std::abs(lambda) <= rel_tol * scale_hint))) {
            if (converged) *converged = true;
            return {lambda, it};
        }
    }
    if (converged) *converged = false;
    return {lambda, cap};
}

} // namespace verifydetail

// Extremal eigenvalues: lambda_max by power iteration, lambda_min by power
// iteration on the spectral shift lambda_max I - S.
inline EigReport extremal_eigs(const FrameOperatorMatrix& S, double rel_tol = 1e-8,
                               long cap = 20000, std::uint64_t seed = 20240901ull) {
    EigReport rep;
    bool conv_max = false, conv_min = false;
    auto apply = [&S](const GridFunction& u) { return S.apply(u); };
    auto [lmax, it_max] =
        verifydetail::power_iteration(apply, S.grid, rel_tol, cap, seed, &conv_max);
    rep.lambda_max = lmax;
    rep.iterations_max = it_max;

    auto shifted = [&S, lmax](const GridFunction& u) {
        GridFunction w = S.apply(u);
        for (std::size_t i = 0; i < w.values.size(); ++i) w.values[i] = lmax * u.values[i] - w.values[i];
        return w;
    };
    auto [mu, it_min] = verifydetail::power_iteration(shifted, S.grid, rel_tol, cap, seed + 1,
                                                      &conv_min, std::abs(lmax));
    rep.lambda_min = lmax - mu;
    rep.iterations_min = it_min;
    rep.converged = conv_max && conv_min;
    if (!rep.converged) throw NoConvergence("power iteration hit the iteration cap");
    return rep;
}

enum class Verdict { Sound, Unsound };

// Certified bounds must bracket the measured extremal eigenvalues up to the
// verdict tolerance.
inline Verdict verify_certificate(const FrameBounds& fb, const EigReport& eigs,
                                  double tol = 1e-3) {
    const bool ok = fb.A <= eigs.lambda_min * (1.0 + tol) && eigs.lambda_max <= fb.B * (1.0 + tol);
    return ok ? Verdict::Sound : Verdict::Unsound;
}

// Conjugate-gradient solve S x = g for the canonical dual window.
inline GridFunction dual_window(const FrameOperatorMatrix& S, const GridFunction& g,
                                double rel_residual = 1e-8, long cap = 10000) {
    if (!(g.spec == S.grid)) throw GridMismatch("window grid does not match the operator");
    GridFunction x(S.grid);
    GridFunction r = g;
    GridFunction p = r;
    const double g_norm = g.l2_norm();
    if (g_norm == 0.0) return x;
    double rs = std::real(inner_product(r, r)); // = ||r||_{L2}^2
    for (long it = 0; it < cap; ++it) {
        if (std::sqrt(rs) / g_norm <= rel_residual) return x;
        GridFunction Sp = S.apply(p);
        const double denom = std::real(inner_product(Sp, p));
        if (denom <= 0.0) throw NoConvergence("operator is not positive along the search direction");
        const double alpha = rs / denom;
        for (std::size_t i = 0; i < x.values.size(); ++i) {
            x.values[i] += alpha * p.values[i];
            r.values[i] -= alpha * Sp.values[i];
        }
        const double rs_new = std::real(inner_product(r, r));
        const double beta = rs_new / rs;
        rs = rs_new;
        for (std::size_t i = 0; i < p.values.size(); ++i) p.values[i] = r.values[i] + beta * p.values[i];
    }
    throw NoConvergence("conjugate gradient hit the iteration cap");
}

} // namespace gaborcert
