// Batch front end: certify / verify / poisson / count / stft / bounds.
// Exit codes: 0 frame certified (and oracle-sound when --verify is on),
// 1 inconclusive, 2 invalid input.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaborcert/pipeline.hpp"

namespace {

using gaborcert::RunConfig;

void parse_window_flag(RunConfig& cfg, const std::string& text) {
    const auto colon = text.find(':');
    const std::string family = text.substr(0, colon == std::string::npos ? text.size() : colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    cfg.window.family = family;
    if (family == "gaussian") {
        cfg.window.width = arg.empty() ? 1.0 : std::stod(arg);
    } else if (family == "hermite") {
        cfg.window.orders.clear();
        std::stringstream ss(arg);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) cfg.window.orders.push_back(std::stoi(tok));
    } else if (family == "file") {
        cfg.window.file = arg;
    } else if (family != "box") {
        throw gaborcert::ConfigError("unknown window family: " + family);
    }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw gaborcert::ConfigError("cannot open config file: " + path);
    gaborcert::ordered_json j;
    in >> j;
    if (j.contains("window")) parse_window_flag(cfg, j["window"].get<std::string>());
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<std::vector<double>>();
    if (j.contains("beta")) cfg.beta = j["beta"].get<std::vector<double>>();
    if (j.contains("matrix")) cfg.matrix_entries = j["matrix"].get<std::vector<double>>();
    if (j.contains("weight_s")) cfg.weight_s = j["weight_s"].get<double>();
    if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
    if (j.contains("C")) cfg.C = j["C"].get<double>();
    if (j.contains("trunc_K")) cfg.trunc_K = j["trunc_K"].get<long>();
    if (j.contains("grid_R")) cfg.grid_R = j["grid_R"].get<double>();
    if (j.contains("grid_N")) cfg.grid_N = j["grid_N"].get<std::size_t>();
    if (j.contains("method")) cfg.method = j["method"].get<std::string>();
    if (j.contains("tail")) cfg.tail_mode = j["tail"].get<std::string>();
    if (j.contains("verify")) cfg.verify = j["verify"].get<bool>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("format")) cfg.format = j["format"].get<std::string>();
}

void emit(const RunConfig& cfg, const std::string& payload) {
    if (cfg.out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out) throw gaborcert::ConfigError("cannot open output path: " + cfg.out_path);
    out << payload;
}

std::string certificate_csv(const gaborcert::CertifyReport& rep) {
    using gaborcert::format_double;
    const auto& c = rep.certificate;
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"c0_abs", format_double(std::abs(c.c0))});
    rows.push_back({"sigma", format_double(c.sigma)});
    rows.push_back({"sigma_tail", format_double(c.sigma_tail)});
    rows.push_back({"kappa_nonzero_bound", format_double(c.kappa_nonzero_bound)});
    rows.push_back({"method", gaborcert::bound_method_name(c.method)});
    rows.push_back({"bounded", c.bounded ? "1" : "0"});
    rows.push_back({"norm_bound", format_double(c.norm_bound)});
    rows.push_back({"invertible", c.invertible ? "1" : "0"});
    if (c.inverse_norm_bound)
        rows.push_back({"inverse_norm_bound", format_double(*c.inverse_norm_bound)});
    rows.push_back({"frame", c.frame ? "1" : "0"});
    if (c.bounds) {
        rows.push_back({"A", format_double(c.bounds->A)});
        rows.push_back({"B", format_double(c.bounds->B)});
    }
    rows.push_back({"theta", format_double(c.theta)});
    rows.push_back({"theta_0", format_double(c.theta_0)});
    rows.push_back({"rigorous", c.rigorous ? "1" : "0"});
    if (rep.oracle) {
        rows.push_back({"lambda_min", format_double(rep.oracle->eigs.lambda_min)});
        rows.push_back({"lambda_max", format_double(rep.oracle->eigs.lambda_max)});
        rows.push_back({"verdict_sound", rep.oracle->verdict_sound ? "1" : "0"});
    }
    return gaborcert::to_csv({"key", "value"}, rows);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gabor frame certification on general phase-space lattices"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string window_flag, config_path;
    long poisson_kmax = 8;
    int count_trials = 100;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (flags override)");
        sub->add_option("--window", window_flag, "gaussian[:a] | hermite:n1,n2 | box | file:path");
        sub->add_option("--alpha", cfg.alpha, "diagonal lattice meshes (time side)");
        sub->add_option("--beta", cfg.beta, "diagonal lattice meshes (frequency side)");
        sub->add_option("--matrix", cfg.matrix_entries, "row-major 2d x 2d lattice matrix");
        sub->add_option("--weight-s", cfg.weight_s, "polynomial weight exponent");
        sub->add_option("--epsilon", cfg.epsilon, "decay parameter");
        sub->add_option("--C", cfg.C, "shift-invariance constant (1 for L^2)");
        sub->add_option("--trunc-K", cfg.trunc_K, "series truncation radius (l1)");
        sub->add_option("--grid-R", cfg.grid_R, "grid half-width");
        sub->add_option("--grid-N", cfg.grid_N, "grid points per axis (power of two)");
        sub->add_option("--method", cfg.method, "lattice-sum | binomial | diag-refined");
        sub->add_option("--tail", cfg.tail_mode,
                        "series remainder policy: none (truncated sums) | envelope (rigorous)");
        sub->add_option("--seed", cfg.seed, "seed for randomized subcommands");
        sub->add_option("--out", cfg.out_path, "output path (stdout if absent)");
        sub->add_option("--format", cfg.format, "json | csv");
        sub->add_flag("--emit-timings", cfg.emit_timings,
                      "include wall-clock timings in the report (breaks byte determinism)");
    };

    CLI::App* certify = app.add_subcommand("certify", "run the certification pipeline");
    add_common(certify);
    certify->add_flag("--verify", cfg.verify, "cross-check against the grid frame operator");

    CLI::App* verify = app.add_subcommand("verify", "certification plus the grid oracle");
    add_common(verify);

    CLI::App* poisson = app.add_subcommand("poisson", "summation-formula residual table");
    add_common(poisson);
    poisson->add_option("--k-max", poisson_kmax, "largest truncation radius");

    CLI::App* count = app.add_subcommand("count", "lattice-in-cube counting reports");
    add_common(count);
    count->add_option("--trials", count_trials, "number of random lattices");

    CLI::App* stft = app.add_subcommand("stft", "dump the STFT grid as CSV");
    add_common(stft);

    CLI::App* bounds = app.add_subcommand("bounds", "series and threshold values");
    add_common(bounds);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) load_config_file(cfg, config_path);
        if (!window_flag.empty()) parse_window_flag(cfg, window_flag);
        if (cfg.format != "json" && cfg.format != "csv")
            throw gaborcert::ConfigError("unknown format: " + cfg.format);

        if (certify->parsed() || verify->parsed()) {
            if (verify->parsed()) cfg.verify = true;
            const gaborcert::CertifyReport rep = gaborcert::run_certify(cfg);
            if (cfg.format == "json")
                emit(cfg, gaborcert::certify_report_to_json(cfg, rep).dump(2) + "\n");
            else
                emit(cfg, certificate_csv(rep));
            return rep.exit_code;
        }
        if (poisson->parsed()) {
            const auto table = gaborcert::run_poisson(cfg, poisson_kmax);
            std::vector<std::vector<std::string>> rows;
            for (std::size_t i = 0; i < table.radii.size(); ++i)
                rows.push_back({std::to_string(table.radii[i]),
                                gaborcert::format_double(table.residuals[i])});
            if (cfg.format == "csv") {
                emit(cfg, gaborcert::to_csv({"K", "residual"}, rows));
            } else {
                gaborcert::ordered_json j;
                j["config"] = gaborcert::config_to_json(cfg);
                j["table"] = gaborcert::ordered_json::array();
                for (std::size_t i = 0; i < table.radii.size(); ++i)
                    j["table"].push_back(
                        {{"K", table.radii[i]}, {"residual", table.residuals[i]}});
                emit(cfg, j.dump(2) + "\n");
            }
            return 0;
        }
        if (count->parsed()) {
            const auto table = gaborcert::run_count(cfg, count_trials);
            std::vector<std::vector<std::string>> rows;
            bool all_ok = true;
            for (const auto& r : table.rows) {
                all_ok = all_ok && r.brute_count <= r.bound;
                rows.push_back({std::to_string(r.vertex[0]), std::to_string(r.vertex[1]),
                                std::to_string(r.brute_count), std::to_string(r.bound),
                                gaborcert::format_double(r.c_lv)});
            }
            if (cfg.format == "csv") {
                emit(cfg, gaborcert::to_csv({"r0", "r1", "count", "bound", "C_Lv"}, rows));
            } else {
                gaborcert::ordered_json j;
                j["config"] = gaborcert::config_to_json(cfg);
                j["rows"] = gaborcert::ordered_json::array();
                for (const auto& r : table.rows)
                    j["rows"].push_back({{"vertex", r.vertex},
                                         {"count", r.brute_count},
                                         {"bound", r.bound},
                                         {"C_Lv", r.c_lv}});
                emit(cfg, j.dump(2) + "\n");
            }
            return all_ok ? 0 : 1;
        }
        if (stft->parsed()) {
            const gaborcert::GridFunction v = gaborcert::run_stft(cfg);
            std::ostringstream os;
            const std::size_t n2 = v.spec.dim;
            for (std::size_t k = 0; k < n2; ++k) os << (k ? "," : "") << "z" << k;
            os << ",re,im,abs\n";
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < v.values.size(); ++i) {
                v.unflatten(i, idx);
                for (std::size_t k = 0; k < n2; ++k)
                    os << (k ? "," : "") << gaborcert::format_double(v.spec.coord(idx[k]));
                os << "," << gaborcert::format_double(v.values[i].real()) << ","
                   << gaborcert::format_double(v.values[i].imag()) << ","
                   << gaborcert::format_double(std::abs(v.values[i])) << "\n";
            }
            emit(cfg, os.str());
            return 0;
        }
        if (bounds->parsed()) {
            const auto b = gaborcert::run_bounds(cfg);
            if (cfg.format == "csv") {
                std::vector<std::vector<std::string>> rows = {
                    {"sigma_partial", gaborcert::format_double(b.sigma_partial)},
                    {"sigma_nonzero", gaborcert::format_double(b.sigma_nonzero)},
                    {"c0", gaborcert::format_double(b.c0)},
                    {"C_Lv", gaborcert::format_double(b.c_lv)},
                    {"C_d", gaborcert::format_double(b.c_d)},
                    {"K_sym", gaborcert::format_double(b.k_sym)},
                    {"theta", gaborcert::format_double(b.theta)},
                    {"theta_0", gaborcert::format_double(b.theta_0)}};
                emit(cfg, gaborcert::to_csv({"key", "value"}, rows));
            } else {
                gaborcert::ordered_json j;
                j["config"] = gaborcert::config_to_json(cfg);
                j["bounds"] = {{"sigma_partial", b.sigma_partial},
                               {"sigma_nonzero", b.sigma_nonzero},
                               {"c0", b.c0},
                               {"C_Lv", b.c_lv},
                               {"C_d", b.c_d},
                               {"K_sym", b.k_sym},
                               {"theta", b.theta},
                               {"theta_0", b.theta_0}};
                emit(cfg, j.dump(2) + "\n");
            }
            return 0;
        }
    } catch (const gaborcert::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const gaborcert::SingularMatrix& e) {
        std::cerr << "invalid lattice: " << e.what() << "\n";
        return 2;
    } catch (const gaborcert::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
