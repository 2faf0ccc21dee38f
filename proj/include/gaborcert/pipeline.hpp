#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaborcert/cert.hpp"
#include "gaborcert/count.hpp"
#include "gaborcert/errors.hpp"
#include "gaborcert/gabor.hpp"
#include "gaborcert/periodize.hpp"
#include "gaborcert/stft.hpp"
#include "gaborcert/verify.hpp"
#include "gaborcert/window.hpp"

namespace gaborcert {

using ordered_json = nlohmann::ordered_json;

struct WindowChoice {
    std::string family = "gaussian"; // gaussian | hermite | box | file
    double width = 1.0;              // gaussian width parameter
    std::vector<int> orders;         // hermite orders per axis
    std::string file;                // sampled window path
};

struct RunConfig {
    WindowChoice window;
    std::vector<double> alpha;          // diagonal lattice meshes
    std::vector<double> beta;
    std::vector<double> matrix_entries; // row-major alternative to alpha/beta
    double weight_s = 0.0;
    double epsilon = 1.0;
    double C = 1.0;
    long trunc_K = 12;
    double grid_R = 8.0;
    std::size_t grid_N = 512;
    std::string method = "lattice-sum"; // lattice-sum | binomial | diag-refined
    std::string tail_mode = "none";     // none | envelope
    bool verify = false;
    std::uint64_t seed = 20240901ull;
    std::string out_path;
    std::string format = "json"; // json | csv
    long wiener_region = 6;
    std::size_t wiener_subdiv = 4;
    bool emit_timings = false;
};

namespace pipedetail {

inline std::size_t window_dim(const RunConfig& cfg) {
    if (!cfg.alpha.empty()) return cfg.alpha.size();
    if (!cfg.matrix_entries.empty()) {
        std::size_t n = 0;
        while (n * n < cfg.matrix_entries.size()) ++n;
        if (n * n != cfg.matrix_entries.size() || n % 2 != 0)
            throw ConfigError("lattice matrix must be square with even dimension");
        return n / 2;
    }
    throw ConfigError("no lattice given: pass --alpha/--beta or --matrix");
}

inline Lattice make_lattice_from_config(const RunConfig& cfg) {
    if (!cfg.alpha.empty()) {
        if (cfg.alpha.size() != cfg.beta.size())
            throw ConfigError("--alpha and --beta must have the same length");
        for (double a : cfg.alpha)
            if (a <= 0.0) throw ConfigError("lattice meshes must be positive");
        for (double b : cfg.beta)
            if (b <= 0.0) throw ConfigError("lattice meshes must be positive");
        return make_diagonal_lattice(cfg.alpha, cfg.beta);
    }
    const std::size_t n = 2 * window_dim(cfg);
    Mat m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = cfg.matrix_entries[i * n + j];
    return make_lattice(m);
}

inline Window make_window_from_config(const RunConfig& cfg, const GridSpec& grid) {
    const std::size_t d = grid.dim;
    const auto& wc = cfg.window;
    if (wc.family == "gaussian") return Window::gaussian(d, wc.width);
    if (wc.family == "hermite") {
        std::vector<int> orders = wc.orders;
        if (orders.empty()) orders.assign(d, 1);
        if (orders.size() != d) throw ConfigError("hermite orders must match the dimension");
        return Window::hermite(orders);
    }
    if (wc.family == "box") return Window::box(grid);
    if (wc.family == "file") {
        std::ifstream in(wc.file);
        if (!in) throw ConfigError("cannot open window file: " + wc.file);
        ordered_json j;
        in >> j;
        GridSpec s;
        s.dim = j.at("dim").get<std::size_t>();
        s.half_width = j.at("R").get<double>();
        s.points = j.at("N").get<std::size_t>();
        GridFunction gf(s);
        const auto& re = j.at("re");
        const auto& im = j.at("im");
        if (re.size() != gf.values.size() || im.size() != gf.values.size())
            throw ConfigError("window file sample count does not match dim/N");
        for (std::size_t i = 0; i < gf.values.size(); ++i)
            gf.values[i] = cplx(re[i].get<double>(), im[i].get<double>());
        return Window::sampled(std::move(gf));
    }
    throw ConfigError("unknown window family: " + wc.family);
}

inline std::string describe_window(const WindowChoice& wc) {
    std::ostringstream os;
    os << wc.family;
    if (wc.family == "gaussian") os << "(a=" << wc.width << ")";
    if (wc.family == "hermite") {
        os << "(n=";
        for (std::size_t i = 0; i < wc.orders.size(); ++i) os << (i ? "," : "") << wc.orders[i];
        os << ")";
    }
    if (wc.family == "file") os << "(" << wc.file << ")";
    return os.str();
}

inline BoundMethod parse_method(const std::string& m) {
    if (m == "lattice-sum") return BoundMethod::LatticeSum;
    if (m == "binomial") return BoundMethod::ClosedFormBinomial;
    if (m == "diag-refined") return BoundMethod::DiagonalRefined;
    throw ConfigError("unknown method: " + m + " (expected lattice-sum|binomial|diag-refined)");
}

// Alignment of lattice translations (or dual translations) with the grid,
// with an actionable suggestion when both fail.
inline void check_oracle_alignment(const GaborSystem& sys, const GridSpec& grid) {
    if (verifydetail::direct_alignment_ok(sys, grid)) return;
    if (verifydetail::janssen_alignment_ok(sys, grid)) return;
    // look for a finer power-of-two N that aligns the direct lattice
    const double R = grid.half_width;
    for (std::size_t n = grid.points; n <= (1u << 22); n *= 2) {
        GridSpec trial{grid.dim, R, n};
        if (verifydetail::direct_alignment_ok(sys, trial) ||
            verifydetail::janssen_alignment_ok(sys, trial)) {
            std::ostringstream os;
            os << "lattice is not grid-aligned; try --grid-R " << R << " --grid-N " << n;
            throw ConfigError(os.str());
        }
    }
    throw ConfigError(
        "lattice is not grid-aligned and no compatible power-of-two refinement was found; "
        "choose meshes commensurate with the grid spacing");
}

} // namespace pipedetail

struct OracleReport {
    EigReport eigs;
    std::string assembly;
    bool verdict_sound = false;
    bool verdict_available = false;
};

struct CertifyReport {
    Certificate certificate;
    std::optional<OracleReport> oracle;
    int exit_code = 1;
    std::vector<std::pair<std::string, double>> timings_ms;
};

inline CertifyReport run_certify(const RunConfig& cfg) {
    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    auto lap = [&t0](std::vector<std::pair<std::string, double>>& sink, const char* label) {
        const auto t1 = clock::now();
        sink.emplace_back(label, std::chrono::duration<double, std::milli>(t1 - t0).count());
        t0 = t1;
    };

    CertifyReport report;
    Certificate& cert = report.certificate;

    GridSpec grid{pipedetail::window_dim(cfg), cfg.grid_R, cfg.grid_N};
    grid.validate();
    const Lattice lat = pipedetail::make_lattice_from_config(cfg);
    const Window g = pipedetail::make_window_from_config(cfg, grid);
    const std::size_t d = grid.dim;
    const PolyWeight w{cfg.weight_s, 2 * d};
    const BoundMethod method = pipedetail::parse_method(cfg.method);
    if (cfg.trunc_K < 0) throw ConfigError("--trunc-K must be nonnegative");
    if (cfg.epsilon <= 0.0) throw ConfigError("--epsilon must be positive");
    if (cfg.C <= 0.0) throw ConfigError("--C must be positive");

    cert.system = pipedetail::describe_window(cfg.window);
    cert.C = cfg.C;
    cert.weight_s = cfg.weight_s;
    cert.epsilon = cfg.epsilon;
    cert.truncation = cfg.trunc_K;
    cert.method = method;

    const bool diagonal = lat.diagonal().has_value();
    Vec alpha, beta;
    if (diagonal) {
        alpha = lat.diagonal()->alpha;
        beta = lat.diagonal()->beta;
        cert.theta = 0.0;
        for (double a : alpha) cert.theta = std::max(cert.theta, a);
        for (double b : beta) cert.theta = std::max(cert.theta, b);
    }

    // fail fast on oracle misalignment, with a suggested compatible grid
    if (cfg.verify) {
        const GaborSystem probe(g, g, lat, cfg.trunc_K);
        pipedetail::check_oracle_alignment(probe, grid);
    }

    // decay constants with a grid-doubling drift gate
    DecayConstants consts;
    bool have_consts = g.has_exact_derivatives();
    if (have_consts) {
        consts = decay_constants(g, cfg.epsilon, grid);
        GridSpec fine = grid;
        fine.points = grid.points * 2;
        const DecayConstants refined = decay_constants(g, cfg.epsilon, fine);
        const double drift_k = std::abs(refined.K - consts.K) / std::max(refined.K, 1e-300);
        const double drift_h =
            std::abs(refined.K_hat - consts.K_hat) / std::max(refined.K_hat, 1e-300);
        cert.constants_drift = std::max(drift_k, drift_h);
        consts = refined;
    }
    lap(report.timings_ms, "decay_constants");

    // dual-lattice STFT samples and c0; the series method needs every sampled
    // modulation resolved by the quadrature grid, the others only use the
    // in-band entries (c0 and the oracle coefficients)
    const BandPolicy policy =
        method == BoundMethod::LatticeSum ? BandPolicy::Strict : BandPolicy::Skip;
    const StftSamples samples = [&] {
        try {
            return stft_on_dual_lattice(g, g, lat, cfg.trunc_K, grid, policy);
        } catch (const GridMismatch& e) {
            throw ConfigError(std::string(e.what()) + " (raise --grid-N or lower --trunc-K)");
        }
    }();
    cert.c0 = samples.at_zero().value;
    lap(report.timings_ms, "stft_samples");

    // kappa != 0 bound by the selected method
    const Envelope env = have_consts ? envelope_bound(consts, consts, d) : Envelope{};
    const bool want_envelope_tail = [&] {
        if (cfg.tail_mode == "none") return false;
        if (cfg.tail_mode == "envelope") return true;
        throw ConfigError("unknown tail mode: " + cfg.tail_mode + " (expected none|envelope)");
    }();
    double tail = 0.0;
    bool tail_rigorous = false;
    double nonzero_bound = 0.0;
    switch (method) {
        case BoundMethod::LatticeSum: {
            if (want_envelope_tail && diagonal && have_consts) {
                tail = envelope_lattice_tail(env, cfg.weight_s, alpha, beta, cfg.trunc_K);
                tail_rigorous = std::isfinite(tail);
                if (!tail_rigorous) tail = 0.0;
            }
            nonzero_bound = sigma_gabor_nonzero(samples, w, tail);
            break;
        }
        case BoundMethod::ClosedFormBinomial: {
            // the closed form bounds the entire nonzero series, so no
            // truncation remainder enters at all
            if (!diagonal) throw ConfigError("binomial method needs a diagonal lattice");
            if (!have_consts)
                throw MissingDerivatives("binomial method needs exact window derivatives");
            if (cfg.weight_s != 0.0)
                throw ConfigError("binomial method is stated for the unweighted series (s = 0)");
            nonzero_bound = series_closed_bound(consts.K_sym, consts.K_sym, d, cfg.epsilon,
                                                cert.theta);
            tail_rigorous = true;
            break;
        }
        case BoundMethod::DiagonalRefined: {
            if (!diagonal) throw ConfigError("diag-refined method needs a diagonal lattice");
            if (!have_consts)
                throw MissingDerivatives("diag-refined method needs exact window derivatives");
            const WienerTable table = wiener_norm_stft(g, g, w, cfg.wiener_region, grid,
                                                       cfg.wiener_subdiv, &lat);
            double wtail = 0.0;
            if (want_envelope_tail) {
                wtail = wiener_tail_bound(env, cfg.weight_s, cfg.wiener_region);
                tail_rigorous = std::isfinite(wtail);
                if (!tail_rigorous) wtail = 0.0;
            }
            tail = wtail;
            nonzero_bound = refined_sigma_diag(table, w, alpha, beta, table.partial, wtail);
            break;
        }
    }
    cert.kappa_nonzero_bound = nonzero_bound;
    cert.sigma = std::abs(cert.c0) + nonzero_bound;
    cert.sigma_tail = tail;
    lap(report.timings_ms, "series_bound");

    // certificates
    cert.bounded = true;
    cert.norm_bound = boundedness_cert(cert.sigma, lat, cfg.C);
    const InvertibilityCert inv =
        invertibility_cert(cert.c0, nonzero_bound, cfg.C, lat, cert.sigma);
    cert.invertible = inv.invertible;
    cert.inverse_norm_bound = inv.inverse_norm_bound;

    // "rigorous" records a full-series bound with drift-gated constants;
    // without it the certificate is a truncated-sum statement whose sanity
    // net is the oracle cross-check.
    cert.rigorous = have_consts && tail_rigorous && cert.constants_drift < 0.005;
    const double c0_norm2 = std::abs(cert.c0);
    if (cfg.C == 1.0 && cert.invertible) {
        try {
            cert.bounds = frame_bounds(c0_norm2, cert.sigma, lat);
            cert.frame = true;
        } catch (const ConditionFailed&) {
            cert.frame = false;
        }
    }
    if (diagonal && have_consts) {
        cert.theta_0 = theta_max(c0_norm2, consts.K_sym, consts.K_sym, d, cfg.epsilon, cfg.C);
        const double closed =
            series_closed_bound(consts.K_sym, consts.K_sym, d, cfg.epsilon, cert.theta);
        cert.bounds_gfb = frame_bounds_gfb(c0_norm2, closed, alpha, beta);
        for (double eps : {cfg.epsilon / 2.0, cfg.epsilon * 2.0}) {
            const DecayConstants ce = decay_constants(g, eps, grid);
            const double be = series_closed_bound(ce.K_sym, ce.K_sym, d, eps, cert.theta);
            cert.epsilon_sensitivity.push_back({eps, c0_norm2 - cfg.C * be});
        }
    }
    cert.enforce_implications();
    lap(report.timings_ms, "certificates");

    // optional oracle verification
    if (cfg.verify) {
        const GaborSystem sys(g, g, lat, cfg.trunc_K);
        OracleReport oracle;
        const bool dense = grid.size() <= FrameOperatorMatrix::kDenseLimit;
        const long K_assembly = verifydetail::direct_alignment_ok(sys, grid)
                                    ? oracle_truncation(lat, grid, cfg.trunc_K)
                                    : cfg.trunc_K;
        const FrameOperatorMatrix S = assemble(sys, grid, K_assembly, dense, &samples);
        oracle.assembly = S.method == FrameOperatorMatrix::Method::DirectGaborSum
                              ? "direct"
                              : "janssen";
        oracle.eigs = extremal_eigs(S, 1e-8, 20000, cfg.seed);
        if (cert.frame && cert.bounds) {
            oracle.verdict_available = true;
            oracle.verdict_sound =
                verify_certificate(*cert.bounds, oracle.eigs) == Verdict::Sound;
        }
        report.oracle = oracle;
        lap(report.timings_ms, "oracle");
    }

    const bool certified = cert.frame;
    const bool oracle_ok =
        !cfg.verify || (report.oracle && (!report.oracle->verdict_available ||
                                          report.oracle->verdict_sound));
    report.exit_code = certified && oracle_ok ? 0 : 1;
    return report;
}

// ---------------------------------------------------------------------------
// Table subcommands
// ---------------------------------------------------------------------------

struct PoissonTable {
    std::vector<long> radii;
    std::vector<double> residuals;
};

inline PoissonTable run_poisson(const RunConfig& cfg, long K_max) {
    GridSpec grid{pipedetail::window_dim(cfg), cfg.grid_R, cfg.grid_N};
    const Window g = pipedetail::make_window_from_config(cfg, grid);
    const Symbol f = symbol_from_window(g);
    Lattice lat = [&] {
        if (!cfg.alpha.empty() && cfg.alpha.size() == 1) {
            // 1-d summation over alpha Z when a single mesh is given
            Mat m(1);
            m(0, 0) = cfg.alpha[0];
            return make_lattice(m);
        }
        return pipedetail::make_lattice_from_config(cfg);
    }();
    if (f.dim != lat.dim_total()) throw ConfigError("window dimension must match the lattice");
    PoissonTable table;
    const Vec x(f.dim, 0.0);
    for (long K = 1; K <= K_max; ++K) {
        table.radii.push_back(K);
        table.residuals.push_back(poisson_residual(f, lat, x, K));
    }
    return table;
}

struct CountTable {
    std::vector<CountReport> rows;
};

inline CountTable run_count(const RunConfig& cfg, int trials) {
    CountTable out;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> entry(-3.0, 3.0);
    std::uniform_int_distribution<long> vert(-5, 5);
    const PolyWeight w{cfg.weight_s, 2};
    for (int t = 0; t < trials; ++t) {
        Mat m(2);
        double det = 0.0;
        do {
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j) m(i, j) = entry(rng);
            det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        } while (std::abs(det) <= 0.1);
        const Lattice lat(m);
        out.rows.push_back(make_count_report(lat, {vert(rng), vert(rng)}, w));
    }
    return out;
}

struct BoundsTable {
    double sigma_partial = 0.0;
    double sigma_nonzero = 0.0;
    double c0 = 0.0;
    double c_lv = 0.0;
    double c_d = 0.0;
    double theta = 0.0;
    double theta_0 = 0.0;
    double k_sym = 0.0;
};

inline BoundsTable run_bounds(const RunConfig& cfg) {
    GridSpec grid{pipedetail::window_dim(cfg), cfg.grid_R, cfg.grid_N};
    const Lattice lat = pipedetail::make_lattice_from_config(cfg);
    const Window g = pipedetail::make_window_from_config(cfg, grid);
    const std::size_t d = grid.dim;
    const PolyWeight w{cfg.weight_s, 2 * d};
    BoundsTable out;
    const StftSamples samples = stft_on_dual_lattice(g, g, lat, cfg.trunc_K, grid);
    out.sigma_partial = sigma_gabor(samples, w, 0.0);
    out.sigma_nonzero = sigma_gabor_nonzero(samples, w, 0.0);
    out.c0 = std::abs(samples.at_zero().value);
    out.c_lv = C_Lv(lat, w);
    out.c_d = envelope_dimension_constant(d);
    if (g.has_exact_derivatives()) {
        const DecayConstants consts = decay_constants(g, cfg.epsilon, grid);
        out.k_sym = consts.K_sym;
        out.theta_0 = theta_max(out.c0, consts.K_sym, consts.K_sym, d, cfg.epsilon, cfg.C);
    }
    if (lat.diagonal()) {
        for (double a : lat.diagonal()->alpha) out.theta = std::max(out.theta, a);
        for (double b : lat.diagonal()->beta) out.theta = std::max(out.theta, b);
    }
    return out;
}

// Full STFT grid of the configured window pair (gamma = g), for plot-ready
// CSV emission.
inline GridFunction run_stft(const RunConfig& cfg) {
    const std::size_t d = pipedetail::window_dim(cfg);
    GridSpec tgrid{d, cfg.grid_R, cfg.grid_N};
    const Window g = pipedetail::make_window_from_config(cfg, tgrid);
    GridSpec full{2 * d, cfg.grid_R, cfg.grid_N};
    return stft_grid(g, g, full);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline ordered_json config_to_json(const RunConfig& cfg) {
    ordered_json j;
    j["window"] = pipedetail::describe_window(cfg.window);
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    if (!cfg.matrix_entries.empty()) j["matrix"] = cfg.matrix_entries;
    j["weight_s"] = cfg.weight_s;
    j["epsilon"] = cfg.epsilon;
    j["C"] = cfg.C;
    j["trunc_K"] = cfg.trunc_K;
    j["grid_R"] = cfg.grid_R;
    j["grid_N"] = cfg.grid_N;
    j["method"] = cfg.method;
    j["tail"] = cfg.tail_mode;
    j["verify"] = cfg.verify;
    j["seed"] = cfg.seed;
    j["format"] = cfg.format;
    return j;
}

inline ordered_json certify_report_to_json(const RunConfig& cfg, const CertifyReport& rep) {
    const Certificate& c = rep.certificate;
    ordered_json j;
    j["config"] = config_to_json(cfg);
    j["constants"] = {{"epsilon", c.epsilon},
                      {"constants_drift", c.constants_drift},
                      {"rigorous", c.rigorous},
                      {"theta", c.theta},
                      {"theta_0", c.theta_0}};
    j["series"] = {{"c0_abs", std::abs(c.c0)},
                   {"sigma", c.sigma},
                   {"sigma_tail", c.sigma_tail},
                   {"kappa_nonzero_bound", c.kappa_nonzero_bound},
                   {"method", bound_method_name(c.method)}};
    ordered_json jc;
    jc["bounded"] = c.bounded;
    jc["norm_bound"] = c.norm_bound;
    jc["invertible"] = c.invertible;
    if (c.inverse_norm_bound) jc["inverse_norm_bound"] = *c.inverse_norm_bound;
    jc["frame"] = c.frame;
    if (c.bounds) {
        jc["A"] = c.bounds->A;
        jc["B"] = c.bounds->B;
    }
    if (c.bounds_gfb) {
        jc["A_mesh_variant"] = c.bounds_gfb->A;
        jc["B_mesh_variant"] = c.bounds_gfb->B;
    }
    if (!c.epsilon_sensitivity.empty()) {
        ordered_json sens = ordered_json::array();
        for (const auto& s : c.epsilon_sensitivity)
            sens.push_back({{"epsilon", s.epsilon}, {"margin", s.margin}});
        jc["epsilon_sensitivity"] = sens;
    }
    j["certificate"] = jc;
    if (rep.oracle) {
        j["oracle"] = {{"assembly", rep.oracle->assembly},
                       {"lambda_min", rep.oracle->eigs.lambda_min},
                       {"lambda_max", rep.oracle->eigs.lambda_max},
                       {"iterations_max", rep.oracle->eigs.iterations_max},
                       {"iterations_min", rep.oracle->eigs.iterations_min},
                       {"verdict_available", rep.oracle->verdict_available},
                       {"verdict_sound", rep.oracle->verdict_sound}};
    }
    if (cfg.emit_timings) {
        ordered_json t;
        for (const auto& [k, v] : rep.timings_ms) t[k] = v;
        j["timings"] = t;
    }
    return j;
}

inline std::string to_csv(const std::vector<std::string>& header,
                          const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
    return os.str();
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace gaborcert
