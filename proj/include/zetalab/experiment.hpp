#pragma once

// Experiment runner: declarative JSON config, claim registry, report and
// plot-data emission, and the persistent zeta cache.
//
// Exit codes: 0 all claims in band, 1 config or infrastructure failure,
// 2 at least one claim outside its band.
//
// Every claim reduces to a ratio (computed / main term) checked against a
// band [lo, hi]; bands are configuration, printed into every report.  For
// threshold-style claims (count, spacing, lemma1, tau_scan, identities) the
// ratio is deviation / allowed-deviation, with band [0, 1].

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "zetalab/meanvalue.hpp"
#include "zetalab/report.hpp"

namespace zetalab {

inline const std::set<std::string>& supported_claims() {
    static const std::set<std::string> ids = {
        "count",  "spacing", "lemma1", "lemma2", "lemma3", "lemma4", "lemma5",
        "lemma6", "lemma7",  "thm1",   "thm2",   "cor1",   "cor2",   "cor3",
        "cor4",   "main",    "residual_scan",    "tau_scan",         "identities"};
    return ids;
}

struct ExperimentConfig {
    GridParams params = GridParams::preset("T1e6");
    std::vector<double> tau_list{0.0};
    std::vector<std::string> claims{supported_claims().begin(), supported_claims().end()};
    EvalPrecision precision{1e-8, 64, 8};
    std::map<std::string, std::pair<double, double>> bands;
    std::string output_dir = "out";
    std::string cache_path;
    int threads = 0;
    uint32_t diag_cutoff = 1'000'000;
    int quad_order = 8;
    uint32_t f_series_budget = 8'000'000;
};

inline std::pair<double, double> default_band(const std::string& claim, int k) {
    if (claim == "lemma2" || claim == "thm1" || claim == "cor1") return {0.8, 1.2};
    if (claim == "lemma7" || claim == "thm2") return {0.7, 1.3};
    if (claim == "lemma3" || claim == "lemma5" || claim == "lemma6") return {0.2, 1.2};
    if (claim == "lemma4") return {0.25, 1.2};
    if (claim == "cor2") return {0.8, 2.0};
    if (claim == "cor3") return {0.9, 1e9};
    if (claim == "cor4") return {0.0, 1.1};
    if (claim == "main") return {0.1, k == 1 ? 0.1 : 0.15};  // (slack_lo, slack_hi)
    if (claim == "residual_scan") return {-1e9, 1e9};        // informational per window
    return {0.0, 1.0};  // threshold-style
}

inline std::pair<double, double> resolve_band(const ExperimentConfig& cfg,
                                              const std::string& claim) {
    auto it = cfg.bands.find(claim);
    return it != cfg.bands.end() ? it->second : default_band(claim, cfg.params.k);
}

// ---------------------------------------------------------------------
// config parsing (strict: unknown keys are rejected)
// ---------------------------------------------------------------------
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    static const std::set<std::string> known = {
        "preset",     "T",         "epsilon",    "delta",     "sigma",
        "k",          "x",         "eta",        "tau_list",  "claims",
        "precision",  "bands",     "output_dir", "cache_path", "threads",
        "diag_cutoff", "quad_order", "f_series_budget"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() + "'");

    GridParams base = j.contains("preset") ? GridParams::preset(j["preset"].get<std::string>())
                                           : GridParams::preset("T1e6");
    double T = j.value("T", base.T);
    double eps = j.value("epsilon", base.epsilon);
    double delta = j.value("delta", base.delta);
    double sigma = j.value("sigma", base.sigma);
    int k = j.value("k", base.k);
    double x = j.value("x", base.x);
    double eta = j.value("eta", base.eta);
    cfg.params = GridParams::make(T, eps, delta, sigma, k, x, eta);

    if (j.contains("tau_list")) {
        cfg.tau_list = j["tau_list"].get<std::vector<double>>();
        if (cfg.tau_list.empty()) throw std::invalid_argument("config: tau_list empty");
        for (double tau : cfg.tau_list)
            if (!(tau >= -kPi && tau <= kPi))
                throw std::invalid_argument("config: tau outside [-pi, pi]");
    }
    if (j.contains("claims")) {
        cfg.claims = j["claims"].get<std::vector<std::string>>();
        for (const auto& c : cfg.claims)
            if (!supported_claims().count(c))
                throw std::invalid_argument("config: unsupported claim '" + c + "'");
    }
    if (j.contains("precision")) {
        const auto& pj = j["precision"];
        cfg.precision.target_abs_tol = pj.value("target_abs_tol", cfg.precision.target_abs_tol);
        cfg.precision.euler_maclaurin_cutoff =
            pj.value("euler_maclaurin_cutoff", cfg.precision.euler_maclaurin_cutoff);
        cfg.precision.bernoulli_terms = pj.value("bernoulli_terms", cfg.precision.bernoulli_terms);
        if (!(cfg.precision.target_abs_tol > 0))
            throw std::invalid_argument("config: target_abs_tol must be positive");
        if (cfg.precision.bernoulli_terms < 1 || cfg.precision.bernoulli_terms > 12)
            throw std::invalid_argument("config: bernoulli_terms must lie in [1,12]");
    }
    if (j.contains("bands"))
        for (auto it = j["bands"].begin(); it != j["bands"].end(); ++it) {
            if (!supported_claims().count(it.key()))
                throw std::invalid_argument("config: band for unknown claim '" + it.key() + "'");
            auto v = it.value().get<std::vector<double>>();
            if (v.size() != 2) throw std::invalid_argument("config: band must be [lo, hi]");
            cfg.bands[it.key()] = {v[0], v[1]};
        }
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.cache_path = j.value("cache_path", cfg.cache_path);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.diag_cutoff = j.value("diag_cutoff", cfg.diag_cutoff);
    cfg.quad_order = j.value("quad_order", cfg.quad_order);
    cfg.f_series_budget = j.value("f_series_budget", cfg.f_series_budget);
    if (cfg.quad_order < 8) throw std::invalid_argument("config: quad_order must be >= 8");
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: parse error: ") + e.what());
    }
    return config_from_json(j);
}

// ---------------------------------------------------------------------
// claim execution
// ---------------------------------------------------------------------
struct ClaimOutcome {
    MeanValueReport report;
    double band_lo = 0.0;
    double band_hi = 1.0;
    bool pass = false;
    double seconds = 0.0;
};

namespace detail {

inline MeanValueReport threshold_report(const std::string& id, const GridParams& p,
                                        double deviation, double allowed) {
    MeanValueReport rep;
    rep.claim_id = id;
    rep.params = p;
    rep.computed = deviation;
    rep.main_term = allowed;
    rep.ratio = allowed != 0.0 ? deviation / allowed : deviation;
    rep.error_observed = deviation;
    rep.error_scale_predicted = allowed;
    return rep;
}

}  // namespace detail

class ExperimentRun {
public:
    ExperimentRun(const ExperimentConfig& cfg, MeanContext& ctx) : cfg_(cfg), ctx_(ctx) {}

    ClaimOutcome run_claim(const std::string& id, const std::string& out_dir) {
        auto t0 = std::chrono::steady_clock::now();
        ClaimOutcome out;
        auto band = resolve_band(cfg_, id);
        out.band_lo = band.first;
        out.band_hi = band.second;
        const GridParams& p = cfg_.params;
        const double tau0 = cfg_.tau_list.front();

        if (id == "count") {
            const auto& grid = ctx_.grid(p, 0.0);
            double main = counting_main_term(p);
            MeanValueReport rep;
            rep.claim_id = "count";
            rep.params = p;
            rep.computed = static_cast<double>(grid.size());
            rep.main_term = main;
            rep.ratio = rep.computed / main;
            rep.error_observed = std::abs(rep.computed - main);
            rep.error_scale_predicted = 2.0;  // O(1) rendered as the +-2 contract
            rep.add("abs_deviation", rep.error_observed);
            if (!cfg_.bands.count("count")) {
                out.band_lo = (main - 2.0) / main;
                out.band_hi = (main + 2.0) / main;
            }
            out.report = rep;
        } else if (id == "spacing") {
            const DisconnectedSet& set = ctx_.g_set(p);
            const double expected = 4.0 * p.x / p.log_main();
            double maxdev = 0.0;
            for (const auto& [lo, hi] : set.intervals)
                maxdev = std::max(maxdev, std::abs((hi - lo) / expected - 1.0));
            out.report = detail::threshold_report("spacing", p, maxdev, 1e-3);
            out.report.add("expected_length", expected);
            out.report.add("interval_count", static_cast<double>(set.intervals.size()));
            if (!out_dir.empty()) {
                std::ofstream csv(out_dir + "/intervals.csv");
                write_intervals_csv(set, csv);
            }
        } else if (id == "lemma1") {
            const double taus[3] = {-kPi / 2, 0.0, kPi / 2};
            ExpSumScan scan = lemma1_scan(p, taus, ctx_);
            out.report = detail::threshold_report("lemma1", p, scan.envelope, 5.0);
            out.report.add("envelope", scan.envelope);
            out.report.tau = 0.0;
            if (!out_dir.empty()) {
                std::ofstream csv(out_dir + "/lemma1_scan.csv");
                write_expsum_csv(scan, csv);
            }
        } else if (id == "lemma2" || id == "lemma3" || id == "lemma4" || id == "lemma5" ||
                   id == "lemma6" || id == "lemma7") {
            static const std::map<std::string, MeanQuantity> qmap = {
                {"lemma2", MeanQuantity::U_k},     {"lemma3", MeanQuantity::w2},
                {"lemma4", MeanQuantity::U_k_sq},  {"lemma5", MeanQuantity::w3},
                {"lemma6", MeanQuantity::V_k_sq},  {"lemma7", MeanQuantity::abs_zeta_2k}};
            out.report = discrete_mean(ctx_.grid(p, tau0), qmap.at(id), p, ctx_);
        } else if (id == "thm1") {
            out.report = integrate_over_set(ctx_.g_set(p), Integrand::U_k, p, ctx_, cfg_.quad_order);
        } else if (id == "thm2") {
            out.report =
                integrate_over_set(ctx_.g_set(p), Integrand::abs_zeta_2k, p, ctx_, cfg_.quad_order);
        } else if (id == "cor1") {
            MeanValueReport base =
                integrate_over_set(ctx_.g_set(p), Integrand::U_k, p, ctx_, cfg_.quad_order);
            double m = base.get("measure");
            out.report = base;
            out.report.claim_id = "cor1";
            out.report.computed = base.computed / m;
            out.report.main_term = 1.0;
            out.report.ratio = out.report.computed;
            out.report.error_observed = std::abs(out.report.computed - 1.0);
            out.report.error_scale_predicted = 1.0 / std::log(p.T);
        } else if (id == "cor2") {
            out.report =
                integrate_over_set(ctx_.g_set(p), Integrand::abs_U_k, p, ctx_, cfg_.quad_order);
        } else if (id == "cor3") {
            out.report = integrate_over_set(ctx_.g_set(p), Integrand::abs_zeta_2k_minus_1, p, ctx_,
                                            cfg_.quad_order);
        } else if (id == "cor4") {
            MeanValueReport base = integrate_over_set(ctx_.g_set(p), Integrand::abs_zeta_2k_minus_1,
                                                      p, ctx_, cfg_.quad_order);
            SeriesValue fv = ctx_.f_value(p.sigma, 2 * p.k - 1);
            out.report = base;
            out.report.claim_id = "cor4";
            out.report.main_term = measure_main_term(p) * std::sqrt(fv.value());
            out.report.ratio = out.report.computed / out.report.main_term;
            out.report.error_observed = std::abs(out.report.computed - out.report.main_term);
            out.report.add("F_upper", fv.value());
            out.report.add("F_upper_tail_bound", fv.tail_bound);
        } else if (id == "main") {
            auto slack = resolve_band(cfg_, "main");
            out.report = bracket_report(p, ctx_, cfg_.quad_order, slack.first, slack.second);
            // ratio band equivalent to 1 - slack_lo < I < upper + slack_hi
            double upper = out.report.get("upper_anchor");
            out.band_lo = (1.0 - slack.first) / upper;
            out.band_hi = (upper + slack.second) / upper;
        } else if (id == "residual_scan") {
            ResidualDiagnostics diag = residual_scan(p, 16, cfg_.threads);
            MeanValueReport rep;
            rep.claim_id = "residual_scan";
            rep.params = p;
            rep.computed = diag.fitted_exponent;
            rep.main_term = 1.0;
            rep.ratio = diag.fitted_exponent;
            double med = 0.0;
            {
                std::vector<double> rs;
                for (auto& [t, r] : diag.samples) rs.push_back(r);
                std::nth_element(rs.begin(), rs.begin() + rs.size() / 2, rs.end());
                med = rs[rs.size() / 2];
            }
            rep.error_observed = med;
            rep.error_scale_predicted = std::pow(p.T, -p.lambda1());
            rep.add("median_residual", med);
            rep.add("tail_term_bound", tail_term_bound(p));
            out.report = rep;
            if (!out_dir.empty()) {
                std::ofstream csv(out_dir + "/residual_scan.csv");
                const ResidualDiagnostics arr[1] = {diag};
                write_residual_csv(arr, csv);
            }
        } else if (id == "tau_scan") {
            auto reports = tau_uniformity_scan(p, ctx_, 5);
            double spread = ratio_spread(reports);
            out.report = detail::threshold_report("tau_scan", p, spread, 0.2);
            for (size_t i = 0; i < reports.size(); ++i)
                out.report.add("ratio_tau_" + std::to_string(i), reports[i].ratio);
            if (!out_dir.empty()) {
                std::ofstream csv(out_dir + "/tau_scan.csv");
                csv << "tau,computed,main_term,ratio\n";
                for (const auto& r : reports)
                    csv << fmt15(r.tau) << ',' << fmt15(r.computed) << ',' << fmt15(r.main_term)
                        << ',' << fmt15(r.ratio) << "\n";
            }
        } else if (id == "identities") {
            out.report = identities_claim();
        } else {
            throw std::invalid_argument("unknown claim: " + id);
        }

        out.pass = out.report.ratio >= out.band_lo && out.report.ratio <= out.band_hi;
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }

private:
    // F(sigma,1) = zeta(2 sigma), F(sigma,2) = zeta(2s)^4 / zeta(4s), and the
    // half-order convolution d_{1/2} * d_{1/2} = d_1; each deviation is
    // normalized by its own tolerance, so the claim ratio is max/1
    MeanValueReport identities_claim() {
        const GridParams& p = cfg_.params;
        double worst = 0.0;
        MeanValueReport rep;
        rep.claim_id = "identities";
        rep.params = p;

        {
            const uint32_t n_max = 10'000;
            DivisorTable half = sieve_d_omega(0.5, n_max);
            std::vector<double> conv = dirichlet_convolve(half.values, half.values);
            double maxdev = 0.0;
            for (uint32_t n = 1; n <= n_max; ++n) maxdev = std::max(maxdev, std::abs(conv[n] - 1.0));
            rep.add("half_convolution_maxdev", maxdev);
            worst = std::max(worst, maxdev / 1e-9);
        }
        for (double sigma : {0.6, 0.75, 0.9}) {
            auto zeta_real = [&](double s) {
                return zeta({s, 0.0}, EvalPrecision{1e-12, 64, 10}).real();
            };
            SeriesValue f1 = f_series(sigma, 1.0, 1e-6, cfg_.f_series_budget);
            double dev1 = std::abs(f1.value() - zeta_real(2 * sigma));
            SeriesValue f2 = f_series(sigma, 2.0, 1e-6, cfg_.f_series_budget);
            double ref2 = std::pow(zeta_real(2 * sigma), 4) / zeta_real(4 * sigma);
            double dev2 = std::abs(f2.value() - ref2);
            std::string tag = fmt15(sigma);
            rep.add("F1_dev_sigma_" + tag, dev1);
            rep.add("F1_tol_sigma_" + tag, f1.tail_bound + 1e-8);
            rep.add("F2_dev_sigma_" + tag, dev2);
            rep.add("F2_tol_sigma_" + tag, f2.tail_bound + 1e-8);
            worst = std::max(worst, dev1 / (f1.tail_bound + 1e-8));
            worst = std::max(worst, dev2 / (f2.tail_bound + 1e-8));
        }
        rep.computed = worst;
        rep.main_term = 1.0;
        rep.ratio = worst;
        rep.error_observed = worst;
        rep.error_scale_predicted = 1.0;
        return rep;
    }

    const ExperimentConfig& cfg_;
    MeanContext& ctx_;
};

// ---------------------------------------------------------------------
// full run: reports, summary, plot script, metadata, cache persistence
// ---------------------------------------------------------------------
inline int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
    namespace fs = std::filesystem;
    // validate before any output exists
    for (const auto& c : cfg.claims)
        if (!supported_claims().count(c))
            throw std::invalid_argument("config: unsupported claim '" + c + "'");
    if (cfg.claims.empty()) throw std::invalid_argument("config: no claims requested");

    fs::create_directories(cfg.output_dir);

    std::unique_ptr<FileLock> lock;
    ZetaCache cache;
    if (!cfg.cache_path.empty()) {
        lock = std::make_unique<FileLock>(cfg.cache_path);
        cache.load(cfg.cache_path);
    }
    MeanContext ctx(cfg.cache_path.empty() ? nullptr : &cache, cfg.threads);
    ctx.set_f_budget(cfg.f_series_budget);
    ExperimentRun run(cfg, ctx);

    bool any_fail = false;
    std::vector<ClaimOutcome> outcomes;
    for (const auto& id : cfg.claims) {
        log << "claim " << id << " ... " << std::flush;
        ClaimOutcome oc = run.run_claim(id, cfg.output_dir);
        log << (oc.pass ? "pass" : "FAIL") << "  ratio=" << fmt15(oc.report.ratio) << "  band=["
            << fmt15(oc.band_lo) << "," << fmt15(oc.band_hi) << "]  (" << fmt15(oc.seconds)
            << " s)\n";
        {
            std::ofstream js(cfg.output_dir + "/" + id + ".json");
            write_report_json(js, oc.report, oc.band_lo, oc.band_hi, oc.pass);
        }
        any_fail = any_fail || !oc.pass;
        outcomes.push_back(std::move(oc));
    }

    {
        std::ofstream txt(cfg.output_dir + "/summary.txt");
        std::ofstream csv(cfg.output_dir + "/summary.csv");
        csv << "claim,computed,main_term,ratio,band_lo,band_hi,pass\n";
        char line[256];
        std::snprintf(line, sizeof line, "%-14s %22s %22s %12s %18s %6s\n", "claim", "computed",
                      "main_term", "ratio", "band", "pass");
        txt << line;
        for (size_t i = 0; i < outcomes.size(); ++i) {
            const auto& oc = outcomes[i];
            const auto& r = oc.report;
            std::snprintf(line, sizeof line, "%-14s %22.15g %22.15g %12.6g [%8.4g,%8.4g] %6s\n",
                          r.claim_id.c_str(), r.computed, r.main_term, r.ratio, oc.band_lo,
                          oc.band_hi, oc.pass ? "pass" : "FAIL");
            txt << line;
            csv << r.claim_id << ',' << fmt15(r.computed) << ',' << fmt15(r.main_term) << ','
                << fmt15(r.ratio) << ',' << fmt15(oc.band_lo) << ',' << fmt15(oc.band_hi) << ','
                << (oc.pass ? "true" : "false") << "\n";
        }
    }
    {
        std::ofstream gp(cfg.output_dir + "/plots.gp");
        gp << "# gnuplot script generated by zetalab\n"
           << "set datafile separator ','\n"
           << "set key off\n";
        if (fs::exists(cfg.output_dir + "/residual_scan.csv"))
            gp << "set logscale y\nset xlabel 't'\nset ylabel 'residual'\n"
               << "set terminal pngcairo size 900,600\nset output 'residual_scan.png'\n"
               << "plot 'residual_scan.csv' using 2:3 every ::1 with points pt 7\n"
               << "unset logscale y\n";
        if (fs::exists(cfg.output_dir + "/lemma1_scan.csv"))
            gp << "set xlabel 'n'\nset ylabel 'exp sum'\n"
               << "set terminal pngcairo size 900,600\nset output 'lemma1_scan.png'\n"
               << "plot 'lemma1_scan.csv' using 1:3 every ::1 with points pt 7\n";
        if (fs::exists(cfg.output_dir + "/tau_scan.csv"))
            gp << "set xlabel 'tau'\nset ylabel 'ratio'\n"
               << "set terminal pngcairo size 900,600\nset output 'tau_scan.png'\n"
               << "plot 'tau_scan.csv' using 1:4 every ::1 with linespoints pt 7\n";
    }
    {
        std::ofstream meta(cfg.output_dir + "/metadata.json");
        JsonWriter w(meta);
        auto now = std::chrono::system_clock::now().time_since_epoch();
        w.field("unix_time",
                static_cast<double>(std::chrono::duration_cast<std::chrono::seconds>(now).count()));
        w.field("threads", static_cast<double>(cfg.threads));
        w.field("fresh_zeta_evals", static_cast<double>(ctx.fresh_zeta_evals()));
        w.field("cache_entries", static_cast<double>(cache.size()));
        w.field("cache_corrupt_lines", static_cast<double>(cache.corrupt_lines()));
        double total = 0.0;
        for (const auto& oc : outcomes) total += oc.seconds;
        w.field("total_seconds", total);
    }
    if (!cfg.cache_path.empty()) cache.save(cfg.cache_path);
    return any_fail ? 2 : 0;
}

}  // namespace zetalab
