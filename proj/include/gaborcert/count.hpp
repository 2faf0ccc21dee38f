#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "gaborcert/errors.hpp"
#include "gaborcert/lattice.hpp"

namespace gaborcert {

struct IntervalCount {
    long count = 0; // exact number of integers in [a, b]
    long bound = 0; // [b - a] + 1 whenever the interval holds an integer
};

inline IntervalCount integers_in_interval(double a, double b) {
    if (a > b) throw EmptyInterval("interval is empty");
    IntervalCount out;
    const double lo = std::ceil(a);
    const double hi = std::floor(b);
    out.count = hi >= lo ? static_cast<long>(hi - lo) + 1 : 0;
    out.bound = out.count == 0 ? 0 : static_cast<long>(std::floor(b - a)) + 1;
    return out;
}

// Exact count of kappa in Z^n with L kappa in the closed cube r + [0,1]^n.
// Enumeration runs over the axis-aligned bounding box of L^{-1}(r + [0,1]^n)
// (vertex projections plus a one-unit safety margin).
inline long count_lattice_in_cube(const Lattice& lat, const std::vector<long>& r) {
    const std::size_t n = lat.dim_total();
    if (r.size() != n) throw ConfigError("cube vertex dimension mismatch");
    std::vector<double> lo(n, 0.0), hi(n, 0.0);
    const std::size_t corners = static_cast<std::size_t>(1) << n;
    for (std::size_t mask = 0; mask < corners; ++mask) {
        Vec corner(n);
        for (std::size_t k = 0; k < n; ++k)
            corner[k] = static_cast<double>(r[k]) + ((mask >> k) & 1u ? 1.0 : 0.0);
        const Vec pre = lat.inverse().apply(corner);
        for (std::size_t k = 0; k < n; ++k) {
            if (mask == 0) {
                lo[k] = hi[k] = pre[k];
            } else {
                lo[k] = std::min(lo[k], pre[k]);
                hi[k] = std::max(hi[k], pre[k]);
            }
        }
    }
    std::vector<long> klo(n), khi(n);
    for (std::size_t k = 0; k < n; ++k) {
        klo[k] = static_cast<long>(std::floor(lo[k])) - 1;
        khi[k] = static_cast<long>(std::ceil(hi[k])) + 1;
    }
    long count = 0;
    std::vector<long> kappa(n, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
        if (pos == n) {
            const Vec p = lat.point(kappa);
            for (std::size_t k = 0; k < n; ++k) {
                const double rk = static_cast<double>(r[k]);
                if (p[k] < rk || p[k] > rk + 1.0) return;
            }
            ++count;
            return;
        }
        for (long v = klo[pos]; v <= khi[pos]; ++v) {
            kappa[pos] = v;
            rec(pos + 1);
        }
    };
    rec(0);
    return count;
}

// Vertex-independent cofactor bound on the cube count:
//   prod_j ( [ sum_i |a^{i,j} / det L| ] + 1 ).
inline long counting_bound(const Lattice& lat) {
    const std::size_t n = lat.dim_total();
    long prod = 1;
    for (std::size_t j = 0; j < n; ++j) {
        double colsum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            colsum += std::abs(lat.cofactor()(i, j) / lat.det());
        prod *= static_cast<long>(std::floor(colsum)) + 1;
    }
    return prod;
}

// Sampling constant C_{L,v} = M_v * counting bound.
inline double C_Lv(const Lattice& lat, const PolyWeight& w) {
    return w.unit_cube_max() * static_cast<double>(counting_bound(lat));
}

struct CountReport {
    std::vector<long> vertex;
    long brute_count = 0;
    long bound = 0;
    double c_lv = 1.0;
};

inline CountReport make_count_report(const Lattice& lat, const std::vector<long>& r,
                                     const PolyWeight& w) {
    CountReport rep;
    rep.vertex = r;
    rep.brute_count = count_lattice_in_cube(lat, r);
    rep.bound = counting_bound(lat);
    rep.c_lv = C_Lv(lat, w);
    return rep;
}

struct SamplingSumCheck {
    double lhs = 0.0; // truncated weighted sample sum
    double rhs = 0.0; // C_{L,v} times the truncated cube-sup sum
};

// Two sides of the weighted sampling bound. Cube sups are taken over a
// sub-grid of each cube plus every sampled lattice point the cube contains,
// so lhs <= rhs holds structurally at any truncation.
inline SamplingSumCheck sampling_sum_check(const std::function<double(const Vec&)>& f_abs,
                                           const Lattice& lat, const PolyWeight& w, long K,
                                           std::size_t subdiv = 4) {
    const std::size_t n = lat.dim_total();
    SamplingSumCheck out;
    std::vector<long> rlo(n, 0), rhi(n, 0);
    bool first = true;

    // sampled points and the cubes that contain them
    std::vector<std::pair<std::vector<long>, double>> samples; // (cube vertex, weighted value)
    std::vector<Vec> sample_points;
    std::vector<long> kappa(n, -K);
    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
        if (pos == n) {
            const Vec p = lat.point(kappa);
            const double term = w(p) * f_abs(p);
            out.lhs += term;
            std::vector<long> vertex(n);
            for (std::size_t k = 0; k < n; ++k) {
                vertex[k] = static_cast<long>(std::floor(p[k]));
                if (first) {
                    rlo[k] = rhi[k] = vertex[k];
                } else {
                    rlo[k] = std::min(rlo[k], vertex[k]);
                    rhi[k] = std::max(rhi[k], vertex[k]);
                }
            }
            first = false;
            samples.emplace_back(std::move(vertex), 0.0);
            sample_points.push_back(p);
            return;
        }
        for (long v = -K; v <= K; ++v) {
            kappa[pos] = v;
            rec(pos + 1);
        }
    };
    rec(0);

    // truncated Wiener sum over every cube that received a sample
    std::vector<long> r(n, 0);
    std::function<void(std::size_t)> cube_rec = [&](std::size_t pos) {
        if (pos == n) {
            double sup = 0.0;
            std::vector<std::size_t> idx(n, 0);
            const std::size_t pts = subdiv + 1;
            std::size_t total = 1;
            for (std::size_t k = 0; k < n; ++k) total *= pts;
            Vec x(n);
            for (std::size_t flat = 0; flat < total; ++flat) {
                std::size_t rem = flat;
                for (std::size_t k = n; k-- > 0;) {
                    idx[k] = rem % pts;
                    rem /= pts;
                }
                for (std::size_t k = 0; k < n; ++k)
                    x[k] = static_cast<double>(r[k]) +
                           static_cast<double>(idx[k]) / static_cast<double>(subdiv);
                sup = std::max(sup, f_abs(x));
            }
            for (std::size_t s = 0; s < sample_points.size(); ++s) {
                bool inside = true;
                for (std::size_t k = 0; k < n; ++k) {
                    const double c = sample_points[s][k];
                    if (c < static_cast<double>(r[k]) || c > static_cast<double>(r[k]) + 1.0)
                        inside = false;
                }
                if (inside) sup = std::max(sup, f_abs(sample_points[s]));
            }
            Vec rv(n);
            for (std::size_t k = 0; k < n; ++k) rv[k] = static_cast<double>(r[k]);
            out.rhs += w(rv) * sup;
            return;
        }
        for (long v = rlo[pos]; v <= rhi[pos]; ++v) {
            r[pos] = v;
            cube_rec(pos + 1);
        }
    };
    if (!first) cube_rec(0);
    out.rhs *= C_Lv(lat, w);
    return out;
}

} // namespace gaborcert
