// zetalab command-line driver.
//
//   zetalab run [config.json] [--preset NAME] [--band claim=lo,hi] ...
//   zetalab theta <t>
//   zetalab gram <nu> <tau>
//   zetalab zeta <sigma> <t> [--tol T]
//   zetalab dk <k> <n>
//   zetalab fseries <sigma> <omega> [--rel-tol R] [--budget N]
//   zetalab report-summary <dir>
//
// ZETALAB_CACHE sets the default cache file for `run`.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "zetalab/experiment.hpp"

using namespace zetalab;

namespace {

int cmd_run(const std::string& config_path, const std::string& preset,
            const std::vector<std::string>& band_args, const std::string& cache_flag,
            const std::string& output_flag, int threads_flag) {
    ExperimentConfig cfg;
    try {
        if (!config_path.empty()) {
            cfg = load_config(config_path);
        } else if (!preset.empty()) {
            cfg.params = GridParams::preset(preset);
        } else {
            std::cerr << "run: need a config file or --preset\n";
            return 1;
        }
        if (!preset.empty() && !config_path.empty())
            throw std::invalid_argument("run: pass either a config file or --preset, not both");
        for (const auto& b : band_args) {
            auto eq = b.find('=');
            auto comma = b.find(',', eq == std::string::npos ? 0 : eq);
            if (eq == std::string::npos || comma == std::string::npos)
                throw std::invalid_argument("--band expects claim=lo,hi");
            std::string claim = b.substr(0, eq);
            if (!supported_claims().count(claim))
                throw std::invalid_argument("--band: unknown claim '" + claim + "'");
            cfg.bands[claim] = {std::stod(b.substr(eq + 1, comma - eq - 1)),
                                std::stod(b.substr(comma + 1))};
        }
        if (!cache_flag.empty()) cfg.cache_path = cache_flag;
        if (cfg.cache_path.empty())
            if (const char* env = std::getenv("ZETALAB_CACHE")) cfg.cache_path = env;
        if (!output_flag.empty()) cfg.output_dir = output_flag;
        if (threads_flag > 0) cfg.threads = threads_flag;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    try {
        return run_experiment(cfg, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 1;
    }
}

int cmd_report_summary(const std::string& dir) {
    std::ifstream in(dir + "/summary.csv");
    if (!in) {
        std::cerr << "no summary.csv under " << dir << "\n";
        return 1;
    }
    std::string line;
    std::getline(in, line);  // header
    std::printf("%-14s %22s %22s %12s %8s\n", "claim", "computed", "main_term", "ratio", "pass");
    while (std::getline(in, line)) {
        std::string f[7];
        size_t pos = 0;
        for (int i = 0; i < 7; ++i) {
            size_t next = line.find(',', pos);
            f[i] = line.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        std::printf("%-14s %22s %22s %12s %8s\n", f[0].c_str(), f[1].c_str(), f[2].c_str(),
                    f[3].c_str(), f[6].c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for theta-grid mean values of the zeta function"};
    app.require_subcommand(1);

    std::string config_path, preset, cache_flag, output_flag, dir;
    std::vector<std::string> band_args;
    int threads_flag = 0;
    double t = 0, sigma = 0, tau = 0, omega = 0, tol = 1e-10, rel_tol = 1e-4;
    long long nu = 0, n = 1;
    int k = 2;
    uint32_t budget = 8'000'000;

    auto* run = app.add_subcommand("run", "execute claims from a config or preset");
    run->add_option("config", config_path, "JSON config file");
    run->add_option("--preset", preset, "named preset (T1e4, T1e5, T1e6, T1e7)");
    run->add_option("--band", band_args, "override band: claim=lo,hi")->take_all();
    run->add_option("--cache", cache_flag, "zeta cache file (default $ZETALAB_CACHE)");
    run->add_option("--output", output_flag, "output directory");
    run->add_option("--threads", threads_flag, "worker thread count (0 = hardware)");

    auto* th = app.add_subcommand("theta", "Riemann-Siegel theta at t");
    th->add_option("t", t)->required();

    auto* gram = app.add_subcommand("gram", "solve theta(t) = pi nu + tau");
    gram->add_option("nu", nu)->required();
    gram->add_option("tau", tau)->required();

    auto* zv = app.add_subcommand("zeta", "zeta(sigma + it) by Euler-Maclaurin");
    zv->add_option("sigma", sigma)->required();
    zv->add_option("t", t)->required();
    zv->add_option("--tol", tol, "absolute tolerance");

    auto* dk = app.add_subcommand("dk", "divisor function d_k(n)");
    dk->add_option("k", k)->required();
    dk->add_option("n", n)->required();

    auto* fs = app.add_subcommand("fseries", "F(sigma, omega) with tail estimate");
    fs->add_option("sigma", sigma)->required();
    fs->add_option("omega", omega)->required();
    fs->add_option("--rel-tol", rel_tol);
    fs->add_option("--budget", budget);

    auto* rs = app.add_subcommand("report-summary", "print the summary table of a run directory");
    rs->add_option("dir", dir)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, preset, band_args, cache_flag, output_flag, threads_flag);
        if (th->parsed()) {
            std::printf("%.15g\n", theta(t));
            return 0;
        }
        if (gram->parsed()) {
            GridPoint g = solve_grid_point(nu, tau);
            std::printf("nu=%lld tau=%.15g t=%.15g residual=%.3e\n",
                        static_cast<long long>(g.nu), g.tau, g.t, g.residual);
            return 0;
        }
        if (zv->parsed()) {
            auto z = zeta_checked({sigma, t}, tol);
            std::printf("%.15g %+.15gi\n", z.real(), z.imag());
            return 0;
        }
        if (dk->parsed()) {
            std::printf("%.15g\n", d_omega(static_cast<double>(k), static_cast<uint64_t>(n)));
            return 0;
        }
        if (fs->parsed()) {
            SeriesValue sv = f_series(sigma, omega, rel_tol, budget);
            std::printf("value=%.15g partial_sum=%.15g tail_estimate=%.15g tail_bound=%.3e "
                        "truncation=%u\n",
                        sv.value(), sv.partial_sum, sv.tail_estimate, sv.tail_bound,
                        sv.truncation);
            return 0;
        }
        if (rs->parsed()) return cmd_report_summary(dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
