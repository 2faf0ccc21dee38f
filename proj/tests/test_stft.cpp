#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gaborcert/stft.hpp"
#include "oracles.hpp"

using namespace gaborcert;

namespace {
const GridSpec kQuad{1, 8.0, 512};
}

TEST_CASE("stft_point against the gaussian closed form") {
    Window g = Window::gaussian(1);

    const cplx v00 = stft_point(g, g, {0.0}, {0.0}, kQuad);
    CHECK(std::abs(v00 - cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);

    const cplx v10 = stft_point(g, g, {1.0}, {0.0}, kQuad);
    CHECK(std::abs(std::abs(v10) - std::exp(-kPi / 2.0) / std::sqrt(2.0)) < 1e-12);

    for (double x : {-1.5, 0.3, 2.0})
        for (double w : {-2.0, 0.5, 1.0}) {
            const cplx v = stft_point(g, g, {x}, {w}, kQuad);
            CHECK(std::abs(v - oracle::gaussian_stft(x, w)) < 1e-12);
        }
}

TEST_CASE("stft_point vanishes for disjoint supports") {
    GridSpec spec{1, 8.0, 256};
    Window box = Window::box(spec); // supported in [0, 1)
    // translate the window far away: integrand is identically zero
    const cplx v = stft_point(box, box, {4.0}, {0.7}, spec);
    CHECK(std::abs(v) == 0.0);
}

TEST_CASE("stft_point flags support truncation") {
    // a gaussian too wide for the quadrature box leaves visible boundary mass
    GridSpec tiny{1, 2.0, 64};
    Window wide = Window::gaussian(1, 0.05);
    const StftValue v = stft_point_checked(wide, wide, {0.0}, {0.0}, tiny);
    CHECK(v.support_truncated);
    const StftValue ok =
        stft_point_checked(Window::gaussian(1), Window::gaussian(1), {0.0}, {0.0}, kQuad);
    CHECK_FALSE(ok.support_truncated);
}

TEST_CASE("stft_grid matches the closed form and stft_point") {
    Window g = Window::gaussian(1);
    GridSpec full{2, 8.0, 512};
    const GridFunction V = stft_grid(g, g, full);

    std::vector<std::size_t> idx;
    double cf_err = 0.0;
    for (std::size_t i = 0; i < V.values.size(); ++i) {
        V.unflatten(i, idx);
        const double x = full.coord(idx[0]), w = full.coord(idx[1]);
        cf_err = std::max(cf_err, std::abs(std::abs(V.values[i]) -
                                           std::abs(oracle::gaussian_stft(x, w))));
    }
    CHECK(cf_err < 1e-8);

    double pt_err = 0.0;
    for (std::size_t i = 0; i < V.values.size(); i += 4099) {
        V.unflatten(i, idx);
        const cplx ref = stft_point(g, g, {full.coord(idx[0])}, {full.coord(idx[1])}, kQuad);
        pt_err = std::max(pt_err, std::abs(ref - V.values[i]));
    }
    CHECK(pt_err < 1e-10);
}

TEST_CASE("stft isometry on the grid") {
    GridSpec full{2, 8.0, 512};
    const std::vector<std::pair<Window, Window>> corpus = {
        {Window::gaussian(1), Window::gaussian(1)},
        {Window::gaussian(1, 1.7), Window::gaussian(1)},
        {Window::hermite({1}), Window::gaussian(1)},
        {Window::hermite({2}), Window::hermite({1})},
    };
    for (const auto& [f, g] : corpus) {
        const GridFunction V = stft_grid(f, g, full);
        const GridFunction fs = f.sample(kQuad);
        const GridFunction gs = g.sample(kQuad);
        const double ratio = V.l2_norm() / (fs.l2_norm() * gs.l2_norm());
        CHECK(std::abs(ratio - 1.0) < 1e-6);
    }
}

TEST_CASE("stft_grid rejects a zero window") {
    GridSpec spec{1, 8.0, 256};
    GridFunction zero(spec);
    Window z = Window::sampled(zero);
    GridSpec full{2, 8.0, 256};
    CHECK_THROWS_AS(stft_grid(Window::gaussian(1), z, full), DegenerateWindow);
}

TEST_CASE("transform symmetry of the modulus") {
    Window g = Window::gaussian(1);
    CHECK(fourier_symmetry_check(g, g, {1.0, 0.5}, kQuad) < 1e-9);
    CHECK(fourier_symmetry_check(g, g, {0.0, 0.0}, kQuad) < 1e-12);

    Window h = Window::hermite({1});
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int t = 0; t < 100; ++t) {
        Vec z{coord(rng), coord(rng)};
        CHECK(fourier_symmetry_check(h, g, z, kQuad) < 1e-8);
    }
}

TEST_CASE("dual-lattice samples") {
    Window g = Window::gaussian(1);
    Lattice lat = make_diagonal_lattice({0.5}, {0.5});
    const StftSamples s = stft_on_dual_lattice(g, g, lat, 6, kQuad);

    // zero entry equals the quadrature inner product
    const GridFunction gs = g.sample(kQuad);
    const cplx ip = inner_product(gs, gs);
    CHECK(std::abs(s.at_zero().value - ip) < 1e-10);

    // entries sit at (-2k, 2h) and match the closed form
    for (const auto& e : s.entries) {
        const double x = -2.0 * static_cast<double>(e.kappa[1]);
        const double w = 2.0 * static_cast<double>(e.kappa[0]);
        CHECK(e.point[0] == Catch::Approx(x).margin(1e-14));
        CHECK(e.point[1] == Catch::Approx(w).margin(1e-14));
        CHECK(std::abs(e.value - oracle::gaussian_stft(x, w)) < 1e-10);
    }

    const StftSamples single = stft_on_dual_lattice(g, g, lat, 0, kQuad);
    CHECK(single.entries.size() == 1);

    // modulations beyond the quadrature band are refused (or skipped)
    CHECK_THROWS_AS(stft_on_dual_lattice(g, g, lat, 12, kQuad), GridMismatch);
    const StftSamples skipped =
        stft_on_dual_lattice(g, g, lat, 12, kQuad, BandPolicy::Skip);
    for (const auto& e : skipped.entries)
        CHECK(std::abs(e.point[1]) <= 1.0 / (2.0 * kQuad.spacing()) * (1 + 1e-9));
}
