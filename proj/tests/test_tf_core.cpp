#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gaborcert/fft.hpp"
#include "gaborcert/grid.hpp"
#include "gaborcert/lattice.hpp"
#include "gaborcert/window.hpp"
#include "oracles.hpp"

using namespace gaborcert;

TEST_CASE("make_lattice basic cases") {
    Lattice id(Mat::identity(2));
    CHECK(id.det() == 1.0);
    CHECK(id.inv_transpose()(0, 0) == 1.0);
    CHECK(id.inv_transpose()(0, 1) == 0.0);

    Lattice half = make_diagonal_lattice({0.5}, {0.5});
    CHECK(half.det() == Catch::Approx(0.25));
    CHECK(half.inv_transpose()(0, 0) == Catch::Approx(2.0));
    CHECK(half.inv_transpose()(1, 1) == Catch::Approx(2.0));
    REQUIRE(half.diagonal().has_value());

    Mat bad(2);
    bad(0, 0) = bad(0, 1) = bad(1, 0) = bad(1, 1) = 1.0;
    CHECK_THROWS_AS(make_lattice(bad), SingularMatrix);
}

TEST_CASE("cofactor identity on random well-conditioned matrices") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> entry(-3.0, 3.0);
    int done = 0;
    while (done < 200) {
        Mat m(2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) m(i, j) = entry(rng);
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        if (std::abs(det) < 0.3) continue;
        Lattice lat(m);
        // L * (cofactor^T / det) = I
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < 2; ++k)
                    s += m(i, k) * lat.cofactor()(j, k) / lat.det();
                CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-9);
            }
        ++done;
    }
}

TEST_CASE("dual_point applies the rotation J") {
    Lattice id(Mat::identity(2));
    auto [mu, rot] = dual_point(id, {1, 0});
    CHECK(mu[0] == 1.0);
    CHECK(mu[1] == 0.0);
    CHECK(rot[0] == 0.0);
    CHECK(rot[1] == 1.0);

    auto [mu0, rot0] = dual_point(id, {0, 0});
    CHECK(mu0[0] == 0.0);
    CHECK(rot0[1] == 0.0);

    // diag(alpha, beta): J L^{-T} (h, k) = (-k/beta, h/alpha)
    Lattice diag = make_diagonal_lattice({0.25}, {0.5});
    auto [mu2, rot2] = dual_point(diag, {3, -2});
    CHECK(mu2[0] == Catch::Approx(12.0));
    CHECK(mu2[1] == Catch::Approx(-4.0));
    CHECK(rot2[0] == Catch::Approx(4.0));
    CHECK(rot2[1] == Catch::Approx(12.0));
}

TEST_CASE("poly weight evaluation and cube maximum") {
    PolyWeight w0{0.0, 2};
    CHECK(w0({3.0, 4.0}) == 1.0);
    CHECK(w0.unit_cube_max() == 1.0);

    PolyWeight w2{2.0, 2};
    CHECK(w2({3.0, 4.0}) == Catch::Approx(36.0));

    PolyWeight w1{1.0, 2};
    CHECK(w1.unit_cube_max() == Catch::Approx(1.0 + std::sqrt(2.0)));
}

TEST_CASE("poly weight is submultiplicative on random pairs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    PolyWeight w{1.7, 2};
    for (int t = 0; t < 1000; ++t) {
        Vec z1{coord(rng), coord(rng)}, z2{coord(rng), coord(rng)};
        Vec sum{z1[0] + z2[0], z1[1] + z2[1]};
        CHECK(w(sum) <= w(z1) * w(z2));
    }
}

TEST_CASE("fourier transform: self-dual gaussian, Parseval, round trip") {
    GridSpec spec{1, 6.0, 256};
    Window g = Window::gaussian(1);
    GridFunction gf = g.sample(spec);

    GridFunction hat = fourier(gf);
    std::vector<std::size_t> idx;
    double err = 0.0;
    for (std::size_t i = 0; i < hat.values.size(); ++i) {
        hat.unflatten(i, idx);
        const double w = hat.spec.coord(idx[0]);
        err = std::max(err, std::abs(hat.values[i] - cplx(std::exp(-kPi * w * w), 0.0)));
    }
    CHECK(err < 1e-10);

    // cross-check the transform against naive quadrature at a few nodes
    for (std::size_t m : {0u, 57u, 128u, 200u}) {
        const double w = hat.spec.coord(m);
        cplx naive(0, 0);
        for (std::size_t j = 0; j < gf.values.size(); ++j) {
            const double t = spec.coord(j);
            naive += gf.values[j] * cplx(std::cos(kTwoPi * w * t), -std::sin(kTwoPi * w * t));
        }
        naive *= spec.cell_measure();
        CHECK(std::abs(hat.values[m] - naive) < 1e-12);
    }

    CHECK(hat.l2_norm() == Catch::Approx(gf.l2_norm()).margin(1e-12));

    GridFunction back = inverse_fourier(hat);
    double rt = 0.0;
    for (std::size_t i = 0; i < back.values.size(); ++i)
        rt = std::max(rt, std::abs(back.values[i] - gf.values[i]));
    CHECK(rt < 1e-12);
}

TEST_CASE("two-dimensional transform is separable and invertible") {
    GridSpec spec{2, 5.0, 128};
    Window g2 = Window::gaussian(2, 1.5);
    GridFunction gf = g2.sample(spec);
    GridFunction hat = fourier(gf);
    const Window ghat = g2.fourier_transform();
    std::vector<std::size_t> idx;
    double err = 0.0;
    for (std::size_t i = 0; i < hat.values.size(); ++i) {
        hat.unflatten(i, idx);
        err = std::max(err, std::abs(hat.values[i] - ghat.value(hat.coords(idx))));
    }
    CHECK(err < 1e-10);
    GridFunction back = inverse_fourier(hat);
    double rt = 0.0;
    for (std::size_t i = 0; i < back.values.size(); ++i)
        rt = std::max(rt, std::abs(back.values[i] - gf.values[i]));
    CHECK(rt < 1e-13);
}

TEST_CASE("four-dimensional lattice algebra") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> entry(-2.0, 2.0);
    int done = 0;
    while (done < 20) {
        Mat m(4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) m(i, j) = entry(rng);
        double det;
        try {
            Lattice lat(m);
            det = lat.det();
            if (std::abs(det) < 0.5) continue;
            // inverse and cofactor identities
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t j = 0; j < 4; ++j) {
                    double inv_ij = 0.0, cof_ij = 0.0;
                    for (std::size_t k = 0; k < 4; ++k) {
                        inv_ij += m(i, k) * lat.inverse()(k, j);
                        cof_ij += m(i, k) * lat.cofactor()(j, k) / det;
                    }
                    const double expect = i == j ? 1.0 : 0.0;
                    CHECK(std::abs(inv_ij - expect) < 1e-9);
                    CHECK(std::abs(cof_ij - expect) < 1e-9);
                }
            // rotation swaps the two-dimensional blocks with a sign
            auto [mu, rot] = dual_point(lat, {1, -2, 0, 3});
            CHECK(rot[0] == Catch::Approx(-mu[2]).margin(1e-15));
            CHECK(rot[1] == Catch::Approx(-mu[3]).margin(1e-15));
            CHECK(rot[2] == Catch::Approx(mu[0]).margin(1e-15));
            CHECK(rot[3] == Catch::Approx(mu[1]).margin(1e-15));
            ++done;
        } catch (const SingularMatrix&) {
            continue;
        }
    }
}

TEST_CASE("fourier round trip stays exact across sizes") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> dist;
    for (std::size_t n : {16u, 64u, 1024u, 4096u}) {
        GridSpec spec{1, 4.0, n};
        GridFunction u(spec);
        for (auto& v : u.values) v = cplx(dist(rng), dist(rng));
        GridFunction back = inverse_fourier(fourier(u));
        double rel = 0.0;
        for (std::size_t i = 0; i < u.values.size(); ++i)
            rel = std::max(rel, std::abs(back.values[i] - u.values[i]));
        CHECK(rel < 1e-12 * u.l2_norm());
    }
}

TEST_CASE("translation rule under the transform") {
    GridSpec spec{1, 8.0, 256};
    Window g = Window::gaussian(1);
    GridFunction gf = g.sample(spec);
    const double x = 0.5; // multiple of h = 1/16

    GridFunction lhs = fourier(tf_shift(gf, {x}, {0.0}));
    GridFunction rhs = tf_shift(fourier(gf), {0.0}, {-x});
    double err = 0.0;
    for (std::size_t i = 0; i < lhs.values.size(); ++i)
        err = std::max(err, std::abs(lhs.values[i] - rhs.values[i]));
    CHECK(err < 1e-10);
}

TEST_CASE("tf_shift: identity, norm preservation, commutation") {
    GridSpec spec{1, 8.0, 128};
    std::mt19937_64 rng(5);
    std::normal_distribution<double> dist;
    GridFunction u(spec);
    for (auto& v : u.values) v = cplx(dist(rng), dist(rng));

    GridFunction same = tf_shift(u, {0.0}, {0.0});
    for (std::size_t i = 0; i < u.values.size(); ++i) CHECK(same.values[i] == u.values[i]);

    const double x = 0.25, w = 2.0; // x.w = 1/2 -> commutation factor -1
    GridFunction shifted = tf_shift(u, {x}, {w});
    CHECK(shifted.l2_norm() == Catch::Approx(u.l2_norm()).margin(1e-12));

    // T_x M_w u = e^{-2 pi i x w} M_w T_x u, checked as exact phase algebra
    GridFunction mw = tf_shift(u, {0.0}, {w});
    GridFunction txmw = tf_shift(mw, {x}, {0.0});
    GridFunction mwtx = tf_shift(tf_shift(u, {x}, {0.0}), {0.0}, {w});
    double err = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
        err = std::max(err, std::abs(txmw.values[i] + mwtx.values[i])); // factor is -1
    CHECK(err < 1e-12);

    CHECK_THROWS_AS(tf_shift(u, {0.3}, {0.0}), MisalignedShift); // h = 1/8
}

TEST_CASE("transform intertwines shifts through the rotation") {
    GridSpec spec{1, 8.0, 512};
    Window g = Window::gaussian(1);
    GridFunction gf = g.sample(spec);
    const double x = 0.5, w = 1.0;

    GridFunction lhs = fourier(tf_shift(gf, {x}, {w}));
    // J^T (x, w) = (w, -x); extra phase e^{2 pi i x w}
    GridFunction rhs = tf_shift(fourier(gf), {w}, {-x});
    const cplx phase(std::cos(kTwoPi * x * w), std::sin(kTwoPi * x * w));
    double err = 0.0;
    for (std::size_t i = 0; i < lhs.values.size(); ++i)
        err = std::max(err, std::abs(lhs.values[i] - phase * rhs.values[i]));
    CHECK(err < 1e-10);
}

TEST_CASE("hermite windows are transform eigenfunctions") {
    // H_n(sqrt(2 pi) t) e^{-pi t^2} maps to (-i)^n itself
    for (int n : {0, 1, 2, 3}) {
        Window h = Window::hermite({n});
        Window hhat = h.fourier_transform();
        const cplx factor = std::pow(cplx(0, -1), n);
        for (double t : {-1.3, -0.2, 0.0, 0.7, 2.1}) {
            CHECK(std::abs(hhat.value({t}) - factor * h.value({t})) < 1e-12);
        }
    }
}

TEST_CASE("analytic derivative matches finite differences") {
    Window g = Window::gaussian(1, 2.0);
    Window dg = g.partial_derivative({1});
    const double eps = 1e-6;
    for (double t : {-0.9, 0.1, 1.4}) {
        const cplx fd = (g.value({t + eps}) - g.value({t - eps})) / (2.0 * eps);
        CHECK(std::abs(dg.value({t}) - fd) < 1e-6);
    }
}
