// proxysel: simulate linear-SCM data, select negative-control proxies, and
// estimate total causal effects under unmeasured confounding.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "proxysel/bench.hpp"
#include "proxysel/csv.hpp"
#include "proxysel/errors.hpp"
#include "proxysel/estimators.hpp"
#include "proxysel/fixtures.hpp"
#include "proxysel/selection.hpp"
#include "proxysel/version.hpp"

namespace {

using proxysel::VarSet;

int find_column(const proxysel::Dataset& data, const std::string& token, bool allow_outcome) {
    const int limit = allow_outcome ? data.p() + 1 : data.p();
    for (int i = 0; i < limit; ++i)
        if (data.names[static_cast<size_t>(i)] == token) return i;
    try {
        size_t used = 0;
        int idx = std::stoi(token, &used);
        if (used == token.size() && idx >= 1 && idx <= limit) return idx - 1;  // 1-based
    } catch (const std::exception&) {
    }
    throw proxysel::ConfigError("unknown variable '" + token + "'");
}

VarSet parse_varset(const proxysel::Dataset& data, const std::string& csv) {
    VarSet out;
    std::string token;
    std::stringstream ss(csv);
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        out.push_back(find_column(data, token, false));
    }
    if (out.empty()) throw proxysel::ConfigError("empty variable list '" + csv + "'");
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw proxysel::ParseError("cannot write " + path);
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
}

struct CliArgs {
    bool json_errors = false;

    // simulate
    std::string sim_fixture = "gaussian";
    int sim_q = 1;
    long sim_n = 1000;
    std::uint64_t sim_seed = 0;
    std::string sim_out, sim_scm_out, sim_scm_in;
    double sim_min_abs = 0.3;
    bool sim_no_margin = false;

    // select
    std::string sel_data, sel_out, sel_method = "rank", sel_outcome;
    int sel_q = 1;
    double sel_alpha = 0.05;
    bool sel_timing = false;
    bool sel_no_screen = false;
    int sel_permutations = 0;

    // estimate
    std::string est_data, est_out, est_method = "extended", est_outcome;
    std::string est_treatment, est_nce, est_nco;

    // bench
    std::string bench_config, bench_out, bench_raw_out;
};

int run_simulate(const CliArgs& a) {
    proxysel::LinearScm scm;
    if (!a.sim_scm_in.empty()) {
        scm = proxysel::load_scm_json(a.sim_scm_in);
    } else {
        proxysel::FixtureOptions fo;
        fo.min_abs_coef = a.sim_min_abs;
        fo.margin_rejection = !a.sim_no_margin;
        fo.appendix_q = a.sim_q;
        scm = proxysel::paper_graph(proxysel::paper_case_from_string(a.sim_fixture), a.sim_seed,
                                    fo);
    }
    proxysel::Dataset data = proxysel::sample(scm, a.sim_n, a.sim_seed);
    proxysel::write_csv(data, a.sim_out);
    if (!a.sim_scm_out.empty()) proxysel::save_scm_json(scm, a.sim_scm_out);
    return 0;
}

int run_select(const CliArgs& a) {
    proxysel::Dataset data = proxysel::load_csv(a.sel_data, a.sel_outcome);
    proxysel::SelectionOptions so;
    so.full_rank_screen = !a.sel_no_screen;
    so.hsic.permutations = a.sel_permutations;
    proxysel::SelectionReport report;
    if (a.sel_method == "rank") {
        report = proxysel::proxy_rank(data, a.sel_q, a.sel_alpha, so);
    } else if (a.sel_method == "gin") {
        std::cerr << "warning: GIN selection assumes non-Gaussian noise; the "
                     "non-Gaussianity assumption may be violated by this data\n";
        report = proxysel::proxy_gin(data, a.sel_q, a.sel_alpha, so);
    } else {
        throw proxysel::ConfigError("--method must be rank or gin");
    }
    std::string text = proxysel::report_to_json(report, a.sel_timing);
    if (a.sel_out.empty())
        std::cout << text << '\n';
    else
        write_text(a.sel_out, text);
    return 0;
}

int run_estimate(const CliArgs& a) {
    proxysel::Dataset data = proxysel::load_csv(a.est_data, a.est_outcome);
    const int k = find_column(data, a.est_treatment, false);

    proxysel::EffectEstimate est;
    if (a.est_method == "naive") {
        est = proxysel::naive_ols(data, k);
    } else {
        VarSet nce = parse_varset(data, a.est_nce);
        VarSet nco = parse_varset(data, a.est_nco);
        if (a.est_method == "standard") {
            if (nce.size() != 1 || nco.size() != 1)
                throw proxysel::ConfigError("standard estimator takes one NCE and one NCO");
            est = proxysel::standard_proxy_estimate(data, k, nce[0], nco[0]);
        } else if (a.est_method == "extended") {
            est = proxysel::extended_proxy_estimate(data, k, nce, nco);
        } else {
            throw proxysel::ConfigError("--method must be standard, extended or naive");
        }
    }

    nlohmann::json j;
    j["treatment"] = data.names[static_cast<size_t>(k)];
    j["method"] = proxysel::to_string(est.method);
    nlohmann::json nce_names = nlohmann::json::array(), nco_names = nlohmann::json::array();
    for (int i : est.nce) nce_names.push_back(data.names[static_cast<size_t>(i)]);
    for (int i : est.nco) nco_names.push_back(data.names[static_cast<size_t>(i)]);
    j["nce"] = nce_names;
    j["nco"] = nco_names;
    j["value"] = est.value ? nlohmann::json(*est.value) : nlohmann::json(nullptr);
    j["denominator_det"] = est.denominator_det;
    if (!est.na_reason.empty()) j["na_reason"] = est.na_reason;
    std::string text = j.dump(2);
    if (a.est_out.empty())
        std::cout << text << '\n';
    else
        write_text(a.est_out, text);
    return 0;
}

int run_bench(const CliArgs& a) {
    proxysel::BenchConfig config = proxysel::load_bench_config(a.bench_config);
    if (!a.bench_out.empty()) config.output_path = a.bench_out;
    if (!a.bench_raw_out.empty()) config.raw_output_path = a.bench_raw_out;
    if (config.output_path.empty()) throw proxysel::ConfigError("bench needs an output path");
    proxysel::BenchResult result = proxysel::run_benchmark(config);
    proxysel::write_bench_csv(result, config.output_path);
    if (!config.raw_output_path.empty())
        proxysel::write_bench_raw_csv(result, config.raw_output_path);
    return 0;
}

void report_error(bool json_errors, const std::string& kind, const std::string& what) {
    if (json_errors) {
        nlohmann::json j{{"error", kind}, {"message", what}};
        std::cerr << j.dump() << '\n';
    } else {
        std::cerr << "proxysel: " << what << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"proxy-variable selection and causal effect estimation"};
    app.set_version_flag("--version", proxysel::kVersion);
    CliArgs a;
    app.add_flag("--json-errors", a.json_errors, "machine-readable errors on stderr");
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "draw a synthetic dataset from a fixture");
    sim->add_option("--fixture", a.sim_fixture, "gaussian|nongaussian|mixture|appendixA");
    sim->add_option("--q", a.sim_q, "confounder count for appendixA");
    sim->add_option("--n", a.sim_n, "sample size")->required();
    sim->add_option("--seed", a.sim_seed, "RNG seed");
    sim->add_option("--out", a.sim_out, "output CSV path")->required();
    sim->add_option("--scm-out", a.sim_scm_out, "also write the drawn model as JSON");
    sim->add_option("--scm-in", a.sim_scm_in, "sample from this SCM JSON instead of a fixture");
    sim->add_option("--min-abs-coef", a.sim_min_abs, "coefficient rejection threshold (0 = off)");
    sim->add_flag("--no-margin-rejection", a.sim_no_margin,
                  "disable the faithfulness-margin redraws (raw paper draws)");

    auto* sel = app.add_subcommand("select", "search for valid NCE/NCO sets per treatment");
    sel->add_option("--data", a.sel_data, "input CSV")->required();
    sel->add_option("--q", a.sel_q, "number of unmeasured confounders")->required();
    sel->add_option("--method", a.sel_method, "rank|gin");
    sel->add_option("--alpha", a.sel_alpha, "test level");
    sel->add_option("--out", a.sel_out, "output JSON path (stdout if omitted)");
    sel->add_option("--outcome", a.sel_outcome, "outcome column name (default: last)");
    sel->add_option("--permutation", a.sel_permutations,
                    "HSIC permutation count (0 = gamma approximation)");
    sel->add_flag("--timing", a.sel_timing, "include per-treatment timings in the report");
    sel->add_flag("--no-screen", a.sel_no_screen, "disable the full-rank candidate screen");

    auto* est = app.add_subcommand("estimate", "estimate one effect from given proxies");
    est->add_option("--data", a.est_data, "input CSV")->required();
    est->add_option("--treatment", a.est_treatment, "treatment column (name or 1-based index)")
        ->required();
    est->add_option("--nce", a.est_nce, "comma-separated NCE columns");
    est->add_option("--nco", a.est_nco, "comma-separated NCO columns");
    est->add_option("--method", a.est_method, "standard|extended|naive");
    est->add_option("--out", a.est_out, "output JSON path (stdout if omitted)");
    est->add_option("--outcome", a.est_outcome, "outcome column name (default: last)");

    auto* ben = app.add_subcommand("bench", "run the synthetic benchmark harness");
    ben->add_option("--config", a.bench_config, "benchmark config JSON")->required();
    ben->add_option("--out", a.bench_out, "summary CSV path (overrides config)");
    ben->add_option("--raw-out", a.bench_raw_out, "per-replication CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return run_simulate(a);
        if (sel->parsed()) return run_select(a);
        if (est->parsed()) return run_estimate(a);
        if (ben->parsed()) return run_bench(a);
        return 2;
    } catch (const proxysel::ParseError& e) {
        report_error(a.json_errors, "parse", e.what());
        return 1;
    } catch (const proxysel::ConfigError& e) {
        report_error(a.json_errors, "config", e.what());
        return 1;
    } catch (const proxysel::Error& e) {
        report_error(a.json_errors, "runtime", e.what());
        return 1;
    } catch (const std::exception& e) {
        report_error(a.json_errors, "internal", e.what());
        return 1;
    }
}
