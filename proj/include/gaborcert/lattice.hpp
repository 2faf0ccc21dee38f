#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "gaborcert/errors.hpp"

namespace gaborcert {

using Vec = std::vector<double>;

// Dense square matrix, row-major. Dimensions stay tiny (lattices in phase
// space), so plain O(n^3)/O(n^5) kernels are fine.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

    static Mat identity(std::size_t n) {
        Mat m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat diagonal(const Vec& d) {
        Mat m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t n() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    Vec apply(const Vec& x) const {
        Vec y(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    Mat transpose() const {
        Mat t(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double max_abs_entry() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

namespace detail {

// Determinant by LU with partial pivoting.
inline double determinant(Mat m) {
    const std::size_t n = m.n();
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
        if (m(piv, c) == 0.0) return 0.0;
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = m(r, c) / m(c, c);
            for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return det;
}

inline Mat gauss_jordan_inverse(Mat m) {
    const std::size_t n = m.n();
    Mat inv = Mat::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
        if (m(piv, c) == 0.0) throw SingularMatrix("matrix is numerically singular");
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(piv, j), m(c, j));
                std::swap(inv(piv, j), inv(c, j));
            }
        }
        const double p = m(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            m(c, j) /= p;
            inv(c, j) /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = m(r, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                m(r, j) -= f * m(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

// Signed minors, computed independently of the inverse so the relation
// inverse = cofactor^T / det is a genuine cross-check.
inline Mat cofactor_matrix(const Mat& m) {
    const std::size_t n = m.n();
    Mat cof(n);
    if (n == 1) {
        cof(0, 0) = 1.0;
        return cof;
    }
    Mat minor(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t rr = 0;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                std::size_t cc = 0;
                for (std::size_t c = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor(rr, cc) = m(r, c);
                    ++cc;
                }
                ++rr;
            }
            const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            cof(i, j) = sign * determinant(minor);
        }
    }
    return cof;
}

} // namespace detail

// Diagonal phase-space lattice data: matrix = diag(alpha, beta).
struct DiagonalLattice {
    Vec alpha;
    Vec beta;
};

// Invertible lattice generator in R^n with cached derived matrices. For the
// time-frequency ops n = 2d; periodization and Poisson summation accept any n.
class Lattice {
public:
    explicit Lattice(Mat matrix) : matrix_(std::move(matrix)) {
        const std::size_t n = matrix_.n();
        if (n == 0) throw ConfigError("lattice matrix must be nonempty");
        det_ = detail::determinant(matrix_);
        const double scale = matrix_.max_abs_entry();
        double threshold = 1e-12;
        for (std::size_t k = 0; k < n; ++k) threshold *= scale;
        if (std::abs(det_) <= threshold)
            throw SingularMatrix("lattice matrix is singular or near-singular");
        inverse_ = detail::gauss_jordan_inverse(matrix_);
        inv_transpose_ = inverse_.transpose();
        cofactor_ = detail::cofactor_matrix(matrix_);
        detect_diagonal();
    }

    std::size_t dim_total() const { return matrix_.n(); }

    // Phase-space half-dimension; valid only when dim_total is even.
    std::size_t dim_d() const {
        if (matrix_.n() % 2 != 0)
            throw ConfigError("operation requires an even-dimensional lattice");
        return matrix_.n() / 2;
    }

    const Mat& matrix() const { return matrix_; }
    const Mat& inverse() const { return inverse_; }
    const Mat& inv_transpose() const { return inv_transpose_; }
    const Mat& cofactor() const { return cofactor_; }
    double det() const { return det_; }
    double abs_det() const { return std::abs(det_); }
    const std::optional<DiagonalLattice>& diagonal() const { return diagonal_; }

    Vec point(const std::vector<long>& kappa) const {
        return matrix_.apply(to_vec(kappa));
    }

    // Dual lattice point L^{-T} kappa.
    Vec dual(const std::vector<long>& kappa) const {
        return inv_transpose_.apply(to_vec(kappa));
    }

    // Symplectically rotated dual point: J (x, w) = (-w, x), blocks of size d.
    Vec rotated_dual(const std::vector<long>& kappa) const {
        return apply_rotation(dual(kappa));
    }

    Vec apply_rotation(const Vec& z) const {
        const std::size_t d = dim_d();
        Vec out(2 * d);
        for (std::size_t j = 0; j < d; ++j) {
            out[j] = -z[d + j];
            out[d + j] = z[j];
        }
        return out;
    }

private:
    static Vec to_vec(const std::vector<long>& kappa) {
        Vec v(kappa.size());
        for (std::size_t i = 0; i < kappa.size(); ++i) v[i] = static_cast<double>(kappa[i]);
        return v;
    }

    void detect_diagonal() {
        const std::size_t n = matrix_.n();
        if (n % 2 != 0) return;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && matrix_(i, j) != 0.0) return;
        const std::size_t d = n / 2;
        DiagonalLattice diag;
        diag.alpha.resize(d);
        diag.beta.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            diag.alpha[j] = matrix_(j, j);
            diag.beta[j] = matrix_(d + j, d + j);
            if (diag.alpha[j] <= 0.0 || diag.beta[j] <= 0.0) return;
        }
        diagonal_ = std::move(diag);
    }

    Mat matrix_;
    Mat inverse_;
    Mat inv_transpose_;
    Mat cofactor_;
    double det_ = 0.0;
    std::optional<DiagonalLattice> diagonal_;
};

inline Lattice make_lattice(const Mat& matrix) { return Lattice(matrix); }

inline Lattice make_diagonal_lattice(const Vec& alpha, const Vec& beta) {
    if (alpha.size() != beta.size() || alpha.empty())
        throw ConfigError("alpha and beta must be nonempty and of equal length");
    Vec d(alpha.size() * 2);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        d[j] = alpha[j];
        d[alpha.size() + j] = beta[j];
    }
    return Lattice(Mat::diagonal(d));
}

// Pair (L^{-T} kappa, J L^{-T} kappa).
inline std::pair<Vec, Vec> dual_point(const Lattice& lat, const std::vector<long>& kappa) {
    if (kappa.size() != lat.dim_total())
        throw ConfigError("kappa length must equal the lattice dimension");
    Vec mu = lat.dual(kappa);
    Vec rotated = lat.apply_rotation(mu);
    return {std::move(mu), std::move(rotated)};
}

inline double norm2(const Vec& z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    return std::sqrt(s);
}

// Polynomial weight v_s(z) = (1 + |z|)^s on R^n.
struct PolyWeight {
    double s = 0.0;
    std::size_t dim = 1;

    double operator()(const Vec& z) const { return std::pow(1.0 + norm2(z), s); }

    // max over the closed unit cube [0,1]^n, attained at (1,...,1).
    double unit_cube_max() const {
        return std::pow(1.0 + std::sqrt(static_cast<double>(dim)), s);
    }
};

inline double weight_eval(const PolyWeight& w, const Vec& z) { return w(z); }
inline double unit_cube_max(const PolyWeight& w) { return w.unit_cube_max(); }

} // namespace gaborcert
