#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "gaborcert/errors.hpp"
#include "gaborcert/fft.hpp"
#include "gaborcert/grid.hpp"

namespace gaborcert {

namespace windetail {

using Poly = std::vector<cplx>; // coefficient k multiplies t^k

inline cplx poly_eval(const Poly& p, double t) {
    cplx acc(0.0, 0.0);
    for (std::size_t k = p.size(); k-- > 0;) acc = acc * t + p[k];
    return acc;
}

inline Poly poly_derivative(const Poly& p) {
    if (p.size() <= 1) return Poly{cplx(0, 0)};
    Poly q(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) q[k - 1] = p[k] * static_cast<double>(k);
    return q;
}

inline Poly poly_mul_t(const Poly& p) {
    Poly q(p.size() + 1, cplx(0, 0));
    for (std::size_t k = 0; k < p.size(); ++k) q[k + 1] = p[k];
    return q;
}

inline void poly_axpy(Poly& acc, const cplx& a, const Poly& p) {
    if (acc.size() < p.size()) acc.resize(p.size(), cplx(0, 0));
    for (std::size_t k = 0; k < p.size(); ++k) acc[k] += a * p[k];
}

} // namespace windetail

// One axis of an analytic window: p(t) e^{-pi a t^2} with polynomial p.
// Closed under differentiation, coordinate multiplication and the Fourier
// transform, which is what the decay-constant calculus needs.
struct PolyGauss1d {
    windetail::Poly coef{cplx(1.0, 0.0)};
    double width = 1.0; // a > 0

    cplx eval(double t) const {
        return windetail::poly_eval(coef, t) * std::exp(-kPi * width * t * t);
    }

    PolyGauss1d derivative() const {
        // (p e^{-pi a t^2})' = (p' - 2 pi a t p) e^{-pi a t^2}
        PolyGauss1d out;
        out.width = width;
        out.coef = windetail::poly_derivative(coef);
        windetail::poly_axpy(out.coef, cplx(-kTwoPi * width, 0.0), windetail::poly_mul_t(coef));
        return out;
    }

    PolyGauss1d mul_t() const {
        PolyGauss1d out;
        out.width = width;
        out.coef = windetail::poly_mul_t(coef);
        return out;
    }

    // Exact transform: F[t^k e^{-pi a t^2}](w) = (i/2pi)^k d^k/dw^k [a^{-1/2} e^{-pi w^2/a}].
    PolyGauss1d fourier() const {
        PolyGauss1d base;
        base.width = 1.0 / width;
        base.coef = windetail::Poly{cplx(1.0 / std::sqrt(width), 0.0)};
        PolyGauss1d out;
        out.width = base.width;
        out.coef = windetail::Poly{cplx(0, 0)};
        PolyGauss1d dk = base;
        cplx factor(1.0, 0.0);
        const cplx step = cplx(0.0, 1.0) / kTwoPi;
        for (std::size_t k = 0; k < coef.size(); ++k) {
            windetail::poly_axpy(out.coef, coef[k] * factor, dk.coef);
            dk = dk.derivative();
            factor *= step;
        }
        return out;
    }
};

// Window on R^d. Analytic windows are separable products of PolyGauss1d axes
// and expose exact derivatives and transforms; sampled windows carry grid
// values and only non-rigorous finite-difference derivatives.
class Window {
public:
    static Window gaussian(std::size_t d, double width = 1.0) {
        if (width <= 0.0) throw ConfigError("gaussian width must be positive");
        Window w;
        w.axes_.assign(d, PolyGauss1d{{cplx(1.0, 0.0)}, width});
        return w;
    }

    // Hermite-modulated gaussian: product over axes of H_{n_j}(sqrt(2 pi) t) e^{-pi t^2}.
    static Window hermite(const std::vector<int>& orders) {
        Window w;
        for (int n : orders) {
            if (n < 0) throw ConfigError("hermite order must be nonnegative");
            const double c = std::sqrt(kTwoPi);
            windetail::Poly hm1{cplx(1.0, 0.0)}; // H_0
            windetail::Poly h{cplx(0.0, 0.0), cplx(2.0 * c, 0.0)}; // H_1(ct) = 2ct
            windetail::Poly cur = (n == 0) ? hm1 : h;
            for (int k = 1; k < n; ++k) {
                windetail::Poly next = windetail::poly_mul_t(cur);
                for (auto& v : next) v *= 2.0 * c;
                windetail::poly_axpy(next, cplx(-2.0 * k, 0.0), hm1);
                hm1 = cur;
                cur = next;
            }
            w.axes_.push_back(PolyGauss1d{cur, 1.0});
        }
        return w;
    }

    static Window sampled(GridFunction samples) {
        Window w;
        w.samples_ = std::make_shared<GridFunction>(std::move(samples));
        return w;
    }

    // Indicator of [0,1)^d sampled on the grid.
    static Window box(const GridSpec& spec) {
        GridFunction g = sample_on_grid(spec, [](const Vec& t) {
            for (double v : t)
                if (v < 0.0 || v >= 1.0) return cplx(0, 0);
            return cplx(1, 0);
        });
        return sampled(std::move(g));
    }

    bool is_analytic() const { return !axes_.empty(); }
    bool has_exact_derivatives() const { return is_analytic(); }
    std::size_t dim() const { return is_analytic() ? axes_.size() : samples_->spec.dim; }

    cplx value(const Vec& t) const {
        if (is_analytic()) {
            cplx v(1.0, 0.0);
            for (std::size_t k = 0; k < axes_.size(); ++k) v *= axes_[k].eval(t[k]);
            return v;
        }
        const GridSpec& s = samples_->spec;
        std::vector<std::size_t> idx(s.dim);
        for (std::size_t k = 0; k < s.dim; ++k) {
            const double pos = (t[k] + s.half_width) / s.spacing();
            const double r = std::round(pos);
            if (std::abs(pos - r) > 1e-9 * std::max(1.0, std::abs(pos)))
                throw MisalignedShift("sampled window evaluated off its grid");
            if (r < 0.0 || r >= static_cast<double>(s.points)) return cplx(0, 0);
            idx[k] = static_cast<std::size_t>(r);
        }
        return samples_->values[samples_->flat_index(idx)];
    }

    // Partial derivative of multi-order `order` (one entry per axis). Exact
    // for analytic windows; central finite differences otherwise.
    Window partial_derivative(const std::vector<int>& order) const {
        if (order.size() != dim()) throw ConfigError("derivative order dimension mismatch");
        if (is_analytic()) {
            Window out = *this;
            for (std::size_t k = 0; k < axes_.size(); ++k)
                for (int j = 0; j < order[k]; ++j) out.axes_[k] = out.axes_[k].derivative();
            return out;
        }
        GridFunction g = *samples_;
        const long n = static_cast<long>(g.spec.points);
        for (std::size_t axis = 0; axis < g.spec.dim; ++axis) {
            for (int rep = 0; rep < order[axis]; ++rep) {
                GridFunction next(g.spec);
                std::vector<std::size_t> idx;
                const double inv2h = 1.0 / (2.0 * g.spec.spacing());
                for (std::size_t i = 0; i < g.values.size(); ++i) {
                    next.unflatten(i, idx);
                    std::vector<std::size_t> up = idx, dn = idx;
                    cplx hi(0, 0), lo(0, 0);
                    if (static_cast<long>(idx[axis]) + 1 < n) {
                        up[axis] = idx[axis] + 1;
                        hi = g.values[g.flat_index(up)];
                    }
                    if (static_cast<long>(idx[axis]) - 1 >= 0) {
                        dn[axis] = idx[axis] - 1;
                        lo = g.values[g.flat_index(dn)];
                    }
                    next.values[i] = (hi - lo) * inv2h;
                }
                g = std::move(next);
            }
        }
        return sampled(std::move(g));
    }

    // Multiply by the coordinate t_j.
    Window mul_coord(std::size_t axis) const {
        if (axis >= dim()) throw ConfigError("axis out of range");
        if (is_analytic()) {
            Window out = *this;
            out.axes_[axis] = out.axes_[axis].mul_t();
            return out;
        }
        GridFunction g = *samples_;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < g.values.size(); ++i) {
            g.unflatten(i, idx);
            g.values[i] *= g.spec.coord(idx[axis]);
        }
        return sampled(std::move(g));
    }

    Window fourier_transform() const {
        if (is_analytic()) {
            Window out = *this;
            for (auto& ax : out.axes_) ax = ax.fourier();
            return out;
        }
        return sampled(fourier(*samples_));
    }

    GridFunction sample(const GridSpec& spec) const {
        if (is_analytic())
            return sample_on_grid(spec, [this](const Vec& t) { return value(t); });
        if (!(samples_->spec == spec))
            throw GridMismatch("sampled window carries a different grid");
        return *samples_;
    }

    const GridFunction& raw_samples() const {
        if (is_analytic()) throw ConfigError("analytic window has no raw samples");
        return *samples_;
    }

private:
    std::vector<PolyGauss1d> axes_;          // analytic form (empty if sampled)
    std::shared_ptr<GridFunction> samples_;  // sampled form
};

} // namespace gaborcert
