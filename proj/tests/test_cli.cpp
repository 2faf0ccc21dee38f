#include <catch2/catch_amalgamated.hpp>

#include "gaborcert/pipeline.hpp"

using namespace gaborcert;

namespace {
RunConfig base_config() {
    RunConfig cfg;
    cfg.window.family = "gaussian";
    cfg.alpha = {0.5};
    cfg.beta = {0.5};
    cfg.trunc_K = 6;
    cfg.grid_R = 8.0;
    cfg.grid_N = 512;
    return cfg;
}
} // namespace

TEST_CASE("reports are byte-identical across runs") {
    const RunConfig cfg = base_config();
    const std::string a = certify_report_to_json(cfg, run_certify(cfg)).dump(2);
    const std::string b = certify_report_to_json(cfg, run_certify(cfg)).dump(2);
    CHECK(a == b);
}

TEST_CASE("report carries the schema sections") {
    RunConfig cfg = base_config();
    cfg.verify = true;
    const CertifyReport rep = run_certify(cfg);
    const ordered_json j = certify_report_to_json(cfg, rep);
    CHECK(j.contains("config"));
    CHECK(j.contains("constants"));
    CHECK(j.contains("series"));
    CHECK(j.contains("certificate"));
    CHECK(j.contains("oracle"));
    CHECK_FALSE(j.contains("timings")); // determinism default

    RunConfig timed = cfg;
    timed.verify = false;
    timed.emit_timings = true;
    const ordered_json jt = certify_report_to_json(timed, run_certify(timed));
    CHECK(jt.contains("timings"));
}

TEST_CASE("certification outcomes over the corpus lattices") {
    RunConfig cfg = base_config();
    const CertifyReport fire = run_certify(cfg);
    CHECK(fire.certificate.frame);
    CHECK(fire.exit_code == 0);
    fire.certificate.enforce_implications();

    RunConfig critical = base_config();
    critical.alpha = {1.0};
    critical.beta = {1.0};
    const CertifyReport stale = run_certify(critical);
    CHECK_FALSE(stale.certificate.frame);
    CHECK(stale.exit_code == 1);
    // no frame claim accompanies a nonzero exit
    CHECK_FALSE(stale.certificate.bounds.has_value());
}

TEST_CASE("binomial method produces a rigorous certificate at small mesh") {
    RunConfig cfg = base_config();
    cfg.method = "binomial";
    cfg.grid_N = 1024;
    const BoundsTable b = run_bounds(cfg);
    REQUIRE(b.theta_0 > 0.0);
    const double h = 2.0 * cfg.grid_R / static_cast<double>(cfg.grid_N);
    const long m = static_cast<long>(std::ceil(1.0 / (h * b.theta_0 / 2.0)));
    const double mesh = 1.0 / (h * static_cast<double>(m));
    cfg.alpha = {mesh};
    cfg.beta = {mesh};
    const CertifyReport rep = run_certify(cfg);
    CHECK(rep.certificate.frame);
    CHECK(rep.certificate.rigorous);
    CHECK(rep.exit_code == 0);
    REQUIRE(rep.certificate.bounds_gfb.has_value());
    CHECK(rep.certificate.bounds_gfb->B >=
          rep.certificate.bounds->B * (1.0 - 1e-12)); // labeled variant is the looser majorant
    REQUIRE(rep.certificate.epsilon_sensitivity.size() == 2);
}

TEST_CASE("box window certifies the orthonormal expansion end to end") {
    RunConfig cfg;
    cfg.window.family = "box";
    cfg.alpha = {1.0};
    cfg.beta = {1.0};
    cfg.trunc_K = 6;
    cfg.grid_R = 8.0;
    cfg.grid_N = 256;
    cfg.verify = true;
    const CertifyReport rep = run_certify(cfg);
    CHECK(rep.certificate.frame);
    CHECK_FALSE(rep.certificate.rigorous); // sampled window, truncated sums
    REQUIRE(rep.certificate.bounds.has_value());
    CHECK(rep.certificate.bounds->A == Catch::Approx(1.0).margin(1e-10));
    CHECK(rep.certificate.bounds->B == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(rep.oracle.has_value());
    CHECK(rep.oracle->eigs.lambda_min == Catch::Approx(1.0).margin(1e-8));
    CHECK(rep.oracle->eigs.lambda_max == Catch::Approx(1.0).margin(1e-8));
    CHECK(rep.exit_code == 0);
}

TEST_CASE("two-dimensional gaussian certification") {
    RunConfig cfg;
    cfg.window.family = "gaussian";
    cfg.alpha = {0.5, 0.5};
    cfg.beta = {0.5, 0.5};
    cfg.trunc_K = 2;
    cfg.grid_R = 6.0;
    cfg.grid_N = 128;
    const CertifyReport rep = run_certify(cfg);
    CHECK(rep.certificate.frame);
    CHECK(std::abs(rep.certificate.c0) == Catch::Approx(0.5).epsilon(1e-8));
    REQUIRE(rep.certificate.bounds.has_value());
    CHECK(rep.certificate.bounds->A > 0.0);
    CHECK(rep.certificate.bounds->A <= rep.certificate.bounds->B);
    CHECK(rep.certificate.theta_0 > 0.0);
    CHECK(rep.exit_code == 0);
}

TEST_CASE("invalid configurations are rejected") {
    RunConfig cfg = base_config();
    cfg.alpha = {0.5, 0.7}; // mismatched lists
    CHECK_THROWS_AS(run_certify(cfg), ConfigError);

    RunConfig bad_method = base_config();
    bad_method.method = "magic";
    CHECK_THROWS_AS(run_certify(bad_method), ConfigError);

    RunConfig bad_grid = base_config();
    bad_grid.grid_N = 300; // not a power of two
    CHECK_THROWS_AS(run_certify(bad_grid), ConfigError);

    RunConfig bad_matrix = base_config();
    bad_matrix.alpha.clear();
    bad_matrix.beta.clear();
    bad_matrix.matrix_entries = {1.0, 1.0, 1.0, 1.0}; // singular
    CHECK_THROWS_AS(run_certify(bad_matrix), SingularMatrix);

    RunConfig misaligned = base_config();
    misaligned.alpha = {3.0 / 256.0}; // aligns only at a finer grid
    misaligned.beta = {3.0 / 256.0};
    misaligned.verify = true;
    CHECK_THROWS_AS(run_certify(misaligned), ConfigError); // with a suggestion
    try {
        run_certify(misaligned);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("--grid-N") != std::string::npos);
    }

    RunConfig incommensurate = base_config();
    incommensurate.alpha = {0.3};
    incommensurate.beta = {0.3};
    incommensurate.verify = true;
    CHECK_THROWS_AS(run_certify(incommensurate), ConfigError);
}

TEST_CASE("poisson table decays to rounding level") {
    RunConfig cfg = base_config();
    cfg.alpha = {1.0};
    cfg.beta.clear();
    const PoissonTable t = run_poisson(cfg, 8);
    REQUIRE(t.residuals.size() == 8);
    CHECK(t.residuals.back() < 1e-12);
    for (std::size_t i = 3; i + 1 < t.residuals.size(); ++i)
        CHECK(t.residuals[i + 1] <= t.residuals[i] + 1e-15);
}

TEST_CASE("count batch satisfies the bound row by row") {
    RunConfig cfg = base_config();
    const CountTable t = run_count(cfg, 100);
    REQUIRE(t.rows.size() == 100);
    for (const auto& r : t.rows) CHECK(r.brute_count <= r.bound);
}

TEST_CASE("sampled windows load from files") {
    // write the box window and read it back through the config path
    GridSpec spec{1, 8.0, 256};
    const GridFunction box = Window::box(spec).raw_samples();
    ordered_json j;
    j["dim"] = spec.dim;
    j["R"] = spec.half_width;
    j["N"] = spec.points;
    std::vector<double> re, im;
    for (const cplx& v : box.values) {
        re.push_back(v.real());
        im.push_back(v.imag());
    }
    j["re"] = re;
    j["im"] = im;
    const std::string path = "window_roundtrip.json";
    {
        std::ofstream out(path);
        out << j.dump();
    }
    RunConfig cfg = base_config();
    cfg.window.family = "file";
    cfg.window.file = path;
    cfg.alpha = {1.0};
    cfg.beta = {1.0};
    cfg.grid_N = 256;
    cfg.trunc_K = 4;
    const BoundsTable b = run_bounds(cfg);
    CHECK(b.c0 == Catch::Approx(1.0).epsilon(1e-10)); // ||box||^2 on the grid
    CHECK(b.theta_0 == 0.0);                          // no exact derivatives
    std::remove(path.c_str());
}

TEST_CASE("stft table peaks at the origin") {
    RunConfig cfg = base_config();
    cfg.grid_N = 256;
    const GridFunction v = run_stft(cfg);
    double peak = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < v.values.size(); ++i)
        if (std::abs(v.values[i]) > peak) {
            peak = std::abs(v.values[i]);
            arg = i;
        }
    CHECK(peak == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
    std::vector<std::size_t> idx;
    v.unflatten(arg, idx);
    CHECK(v.spec.coord(idx[0]) == 0.0);
    CHECK(v.spec.coord(idx[1]) == 0.0);
}
