#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gaborcert/psido.hpp"
#include "gaborcert/window.hpp"
#include "oracles.hpp"

using namespace gaborcert;

namespace {

Symbol gaussian_symbol2() {
    Symbol s;
    s.dim = 2;
    s.value = [](const Vec& z) {
        return cplx(std::exp(-kPi * (z[0] * z[0] + z[1] * z[1])), 0.0);
    };
    s.ft = s.value;
    return s;
}

GridFunction random_u(const GridSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    GridFunction u(spec);
    for (auto& v : u.values) v = cplx(dist(rng), dist(rng));
    return u;
}

// materialized operator norm estimate via power iteration on A^H A
double opnorm_estimate(const std::function<GridFunction(const GridFunction&)>& apply,
                       const GridSpec& spec, int iters = 60) {
    const std::size_t n = spec.size();
    std::vector<std::vector<cplx>> cols(n);
    for (std::size_t j = 0; j < n; ++j) {
        GridFunction e(spec);
        e.values[j] = cplx(1, 0);
        cols[j] = apply(e).values;
    }
    GridFunction v = random_u(spec, 99);
    double sigma = 0.0;
    for (int it = 0; it < iters; ++it) {
        // w = A v
        std::vector<cplx> w(n, cplx(0, 0));
        for (std::size_t j = 0; j < n; ++j) {
            const cplx vj = v.values[j];
            if (vj == cplx(0, 0)) continue;
            for (std::size_t i = 0; i < n; ++i) w[i] += cols[j][i] * vj;
        }
        // v' = A^H w
        GridFunction next(spec);
        for (std::size_t j = 0; j < n; ++j) {
            cplx acc(0, 0);
            for (std::size_t i = 0; i < n; ++i) acc += std::conj(cols[j][i]) * w[i];
            next.values[j] = acc;
        }
        double wn = 0.0;
        for (const cplx& c : w) wn += std::norm(c);
        double vn = 0.0;
        for (const cplx& c : v.values) vn += std::norm(c);
        sigma = std::sqrt(wn / vn);
        v = next;
        double nn = 0.0;
        for (const cplx& c : v.values) nn += std::norm(c);
        nn = std::sqrt(nn);
        for (auto& c : v.values) c /= nn;
    }
    return sigma;
}

} // namespace

TEST_CASE("apply_kn with constant and multiplier symbols") {
    GridSpec spec{1, 6.0, 64};
    const GridFunction u = random_u(spec, 3);

    const GridFunction cu = apply_kn(
        [](const Vec&, const Vec&) { return cplx(2.5, -0.5); }, u);
    double err = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
        err = std::max(err, std::abs(cu.values[i] - cplx(2.5, -0.5) * u.values[i]));
    CHECK(err < 1e-12);

    auto m = [](double x) { return cplx(std::cos(x), 0.3 * std::sin(2.0 * x)); };
    const GridFunction mu = apply_kn(
        [&m](const Vec& x, const Vec&) { return m(x[0]); }, u);
    err = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double x = spec.coord(i);
        err = std::max(err, std::abs(mu.values[i] - m(x) * u.values[i]));
    }
    CHECK(err < 1e-10);
}

TEST_CASE("apply_kn with a pure frequency phase acts as translation") {
    GridSpec spec{1, 8.0, 128};
    Window g = Window::gaussian(1);
    const GridFunction u = g.sample(spec);
    const double a = 0.5; // grid aligned, h = 1/8
    const GridFunction tu = apply_kn(
        [a](const Vec&, const Vec& w) {
            return cplx(std::cos(kTwoPi * w[0] * a), std::sin(kTwoPi * w[0] * a));
        },
        u);
    double err = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double x = spec.coord(i);
        err = std::max(err, std::abs(tu.values[i] - g.value({x + a})));
    }
    CHECK(err < 1e-10);
}

TEST_CASE("weighted coefficient series of the gaussian symbol") {
    Lattice I2(Mat::identity(2));
    const Symbol q = gaussian_symbol2();

    SymbolSeries s0 = build_symbol_series(q, I2, PolyWeight{0.0, 2}, 6);
    auto [val, tail] = sigma_Lv(s0);
    const double theta = oracle::theta_sum(1.0);
    CHECK(val == Catch::Approx(theta * theta).epsilon(1e-9));
    CHECK(tail == 0.0);

    // single-coefficient idealization
    SymbolSeries one;
    one.radius = 0;
    one.terms.push_back({{0, 0}, 1.0, 0.8});
    one.zero_coefficient = cplx(0.8, 0.0);
    CHECK(sigma_Lv(one).first == Catch::Approx(0.8));

    // monotone in K and in s
    double prev = 0.0;
    for (long K = 0; K <= 5; ++K) {
        auto [v, t] = sigma_Lv(build_symbol_series(q, I2, PolyWeight{0.0, 2}, K));
        CHECK(v >= prev);
        prev = v;
    }
    auto [vs0, t0] = sigma_Lv(build_symbol_series(q, I2, PolyWeight{0.0, 2}, 5));
    auto [vs1, t1] = sigma_Lv(build_symbol_series(q, I2, PolyWeight{1.0, 2}, 5));
    CHECK(vs1 >= vs0);
}

TEST_CASE("continuity bound arithmetic and soundness at desk scale") {
    Lattice I2(Mat::identity(2));
    CHECK(continuity_bound(1.0, I2, 1.0) == 1.0);

    Lattice quarter = make_diagonal_lattice({0.5}, {0.5});
    CHECK(continuity_bound(2.5, quarter, 1.0) == Catch::Approx(10.0));

    // periodized gaussian symbol on the integer lattice: estimated grid
    // operator norm stays below the series bound
    const Symbol q = gaussian_symbol2();
    Lattice lat(Mat::identity(2));
    const PeriodizedSymbol qL = periodize(q, lat, 8, 16);
    GridSpec spec{1, 4.0, 64};
    auto apply = [&](const GridFunction& u) { return apply_kn(qL, u); };
    const double est = opnorm_estimate(apply, spec);
    auto [sigma, tail] = sigma_Lv(build_symbol_series(q, lat, PolyWeight{0.0, 2}, 8));
    const double bound = continuity_bound(sigma, lat, 1.0);
    CHECK(est <= bound + 1e-6);
    CHECK(bound == Catch::Approx(1.18034).epsilon(1e-4));
}

TEST_CASE("constant symbols give exact multiplication and norm") {
    GridSpec spec{1, 4.0, 64};
    auto apply = [](const GridFunction& u) {
        return apply_kn([](const Vec&, const Vec&) { return cplx(0.7, 0.0); }, u);
    };
    const double est = opnorm_estimate(apply, spec);
    CHECK(est == Catch::Approx(0.7).margin(1e-10));
}

TEST_CASE("invertibility margin") {
    Lattice I2(Mat::identity(2));

    // only the zero coefficient present
    const InvertibilityMargin m = invertibility_margin(cplx(1.0, 0.0), 0.0, 1.0, I2);
    CHECK(m.invertible);
    CHECK(m.margin == Catch::Approx(1.0));
    REQUIRE(m.inverse_norm_bound.has_value());
    CHECK(*m.inverse_norm_bound == Catch::Approx(1.0));

    CHECK_THROWS_AS(invertibility_margin(cplx(0.0, 0.0), 0.5, 1.0, I2), ZeroMean);

    // gaussian symbol: nonzero series 0.1803... < 1
    const Symbol q = gaussian_symbol2();
    SymbolSeries s = build_symbol_series(q, I2, PolyWeight{0.0, 2}, 6);
    const double nonzero = s.partial_sum(false);
    const double theta = oracle::theta_sum(1.0);
    CHECK(nonzero == Catch::Approx(theta * theta - 1.0).epsilon(1e-9));
    const InvertibilityMargin mg = invertibility_margin(s.zero_coefficient, nonzero, 1.0, I2);
    CHECK(mg.invertible);

    // boundary: equality is not invertible
    const InvertibilityMargin eq = invertibility_margin(cplx(1.0, 0.0), 1.0, 1.0, I2);
    CHECK_FALSE(eq.invertible);
}

TEST_CASE("invertible symbol has matching smallest eigenvalue at desk scale") {
    // self-adjoint case: the periodized gaussian symbol's operator
    const Symbol q = gaussian_symbol2();
    Lattice lat(Mat::identity(2));
    const PeriodizedSymbol qL = periodize(q, lat, 8, 16);
    GridSpec spec{1, 4.0, 64};

    // materialize and run shifted power iteration for the smallest eigenvalue
    const std::size_t n = spec.size();
    std::vector<std::vector<cplx>> cols(n);
    for (std::size_t j = 0; j < n; ++j) {
        GridFunction e(spec);
        e.values[j] = cplx(1, 0);
        cols[j] = apply_kn(qL, e).values;
    }
    auto matvec = [&](const std::vector<cplx>& v) {
        std::vector<cplx> w(n, cplx(0, 0));
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) w[i] += cols[j][i] * v[j];
        return w;
    };
    // lambda_max estimate
    std::vector<cplx> v(n);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> dist;
    for (auto& c : v) c = cplx(dist(rng), dist(rng));
    double lmax = 0.0;
    for (int it = 0; it < 300; ++it) {
        auto w = matvec(v);
        double nn = 0.0;
        cplx rq(0, 0);
        for (std::size_t i = 0; i < n; ++i) {
            rq += w[i] * std::conj(v[i]);
            nn += std::norm(w[i]);
        }
        double vn = 0.0;
        for (const cplx& c : v) vn += std::norm(c);
        lmax = std::real(rq) / vn;
        nn = std::sqrt(nn);
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nn;
    }
    for (auto& c : v) c = cplx(dist(rng), dist(rng));
    double mu = 0.0;
    for (int it = 0; it < 300; ++it) {
        auto w = matvec(v);
        for (std::size_t i = 0; i < n; ++i) w[i] = lmax * v[i] - w[i];
        double nn = 0.0;
        cplx rq(0, 0);
        for (std::size_t i = 0; i < n; ++i) {
            rq += w[i] * std::conj(v[i]);
            nn += std::norm(w[i]);
        }
        double vn = 0.0;
        for (const cplx& c : v) vn += std::norm(c);
        mu = std::real(rq) / vn;
        nn = std::sqrt(nn);
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nn;
    }
    const double lmin = lmax - mu;

    SymbolSeries s = build_symbol_series(q, lat, PolyWeight{0.0, 2}, 8);
    const InvertibilityMargin m =
        invertibility_margin(s.zero_coefficient, s.partial_sum(false), 1.0, lat);
    REQUIRE(m.invertible);
    REQUIRE(m.inverse_norm_bound.has_value());
    CHECK(lmin >= 1.0 / *m.inverse_norm_bound - 1e-3);
}
