#include "proxysel/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "proxysel/errors.hpp"
#include "proxysel/estimators.hpp"
#include "proxysel/parallel.hpp"
#include "proxysel/rng.hpp"
#include "proxysel/selection.hpp"
#include "proxysel/version.hpp"

#include <nlohmann/json.hpp>

namespace proxysel {

std::string to_string(BenchMethod m) {
    switch (m) {
        case BenchMethod::ProxyRank:
            return "proxy-rank";
        case BenchMethod::ProxyGin:
            return "proxy-gin";
        case BenchMethod::Naive:
            return "naive";
        case BenchMethod::StandardProxy:
            return "standard";
        case BenchMethod::ExtendedProxy:
            return "extended";
    }
    return "?";
}

BenchMethod bench_method_from_string(const std::string& s) {
    if (s == "proxy-rank" || s == "rank") return BenchMethod::ProxyRank;
    if (s == "proxy-gin" || s == "gin") return BenchMethod::ProxyGin;
    if (s == "naive") return BenchMethod::Naive;
    if (s == "standard") return BenchMethod::StandardProxy;
    if (s == "extended") return BenchMethod::ExtendedProxy;
    throw ConfigError("unknown method: " + s);
}

std::string to_string(BenchFixture f) {
    switch (f) {
        case BenchFixture::Gaussian:
            return "gaussian";
        case BenchFixture::NonGaussian:
            return "nongaussian";
        case BenchFixture::Mixture:
            return "mixture";
        case BenchFixture::AppendixA:
            return "appendixA";
        case BenchFixture::Custom:
            return "custom";
    }
    return "?";
}

BenchFixture bench_fixture_from_string(const std::string& s) {
    if (s == "gaussian") return BenchFixture::Gaussian;
    if (s == "nongaussian") return BenchFixture::NonGaussian;
    if (s == "mixture") return BenchFixture::Mixture;
    if (s == "appendixA" || s == "appendixa") return BenchFixture::AppendixA;
    if (s == "custom") return BenchFixture::Custom;
    throw ConfigError("unknown fixture: " + s);
}

namespace {

nlohmann::json config_to_json_impl(const BenchConfig& c) {
    nlohmann::json j;
    j["fixture"] = to_string(c.fixture);
    if (c.fixture == BenchFixture::AppendixA) j["appendix_q"] = c.appendix_q;
    if (c.fixture == BenchFixture::Custom) j["scm_path"] = c.custom_scm_path;
    j["sample_sizes"] = c.sample_sizes;
    j["replications"] = c.replications;
    nlohmann::json methods = nlohmann::json::array();
    for (auto m : c.methods) methods.push_back(to_string(m));
    j["methods"] = methods;
    j["alpha"] = c.alpha;
    j["seed"] = c.seed;
    j["q"] = c.q;
    j["min_abs_coef"] = c.min_abs_coef;
    j["margin_rejection"] = c.margin_rejection;
    if (!c.output_path.empty()) j["output_path"] = c.output_path;
    if (!c.raw_output_path.empty()) j["raw_output_path"] = c.raw_output_path;
    if (c.threads > 0) j["threads"] = c.threads;
    return j;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::string bench_config_to_json(const BenchConfig& config) {
    return config_to_json_impl(config).dump(2);
}

BenchConfig bench_config_from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid bench config JSON: ") + e.what());
    }
    try {
        BenchConfig c;
        c.fixture = bench_fixture_from_string(j.at("fixture").get<std::string>());
        if (j.contains("appendix_q")) c.appendix_q = j.at("appendix_q").get<int>();
        if (j.contains("scm_path")) c.custom_scm_path = j.at("scm_path").get<std::string>();
        if (j.contains("sample_sizes"))
            c.sample_sizes = j.at("sample_sizes").get<std::vector<long>>();
        if (j.contains("replications")) c.replications = j.at("replications").get<int>();
        if (j.contains("methods")) {
            c.methods.clear();
            for (const auto& m : j.at("methods"))
                c.methods.push_back(bench_method_from_string(m.get<std::string>()));
        }
        if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("q")) c.q = j.at("q").get<int>();
        if (j.contains("min_abs_coef")) c.min_abs_coef = j.at("min_abs_coef").get<double>();
        if (j.contains("margin_rejection"))
            c.margin_rejection = j.at("margin_rejection").get<bool>();
        if (j.contains("output_path")) c.output_path = j.at("output_path").get<std::string>();
        if (j.contains("raw_output_path"))
            c.raw_output_path = j.at("raw_output_path").get<std::string>();
        if (j.contains("threads")) c.threads = j.at("threads").get<int>();

        if (c.replications < 1) throw ConfigError("replications must be >= 1");
        if (c.sample_sizes.empty()) throw ConfigError("sample_sizes must be nonempty");
        if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid bench config JSON: ") + e.what());
    }
}

BenchConfig load_bench_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return bench_config_from_json_string(ss.str());
}

namespace {

struct RepOutcome {
    // keyed by (method, treatment-name, n) in grid order
    std::vector<BenchRawRecord> records;
};

LinearScm draw_fixture(const BenchConfig& c, const LinearScm* custom, int rep) {
    if (c.fixture == BenchFixture::Custom) return *custom;
    FixtureOptions fo;
    fo.min_abs_coef = c.min_abs_coef;
    fo.margin_rejection = c.margin_rejection;
    fo.appendix_q = c.appendix_q;
    PaperCase pc;
    switch (c.fixture) {
        case BenchFixture::Gaussian:
            pc = PaperCase::Gaussian;
            break;
        case BenchFixture::NonGaussian:
            pc = PaperCase::NonGaussian;
            break;
        case BenchFixture::Mixture:
            pc = PaperCase::Mixture;
            break;
        case BenchFixture::AppendixA:
            pc = PaperCase::AppendixA;
            break;
        default:
            throw ConfigError("unexpected fixture");
    }
    return paper_graph(pc, mix_seed(c.seed, 0xab1e, static_cast<std::uint64_t>(rep)), fo);
}

void run_one_method(const BenchConfig& c, BenchMethod method, const LinearScm& scm,
                    const Dataset& data, long n, int rep, RepOutcome& out) {
    const Eigen::MatrixXd sigma = sample_covariance(data);

    // AppendixA has a single treatment of interest (the proxies are columns
    // too); the grid stays rectangular across methods.
    std::vector<int> targets;
    if (c.fixture == BenchFixture::AppendixA)
        targets = {0};
    else
        for (int k = 0; k < scm.p(); ++k) targets.push_back(k);

    auto push = [&](const std::string& treatment, std::optional<double> est, double truth) {
        out.records.push_back(BenchRawRecord{to_string(method), treatment, n, rep, est, truth});
    };

    switch (method) {
        case BenchMethod::ProxyRank:
        case BenchMethod::ProxyGin: {
            SelectionOptions so;
            so.threads = 1;  // replications are already dispatched in parallel
            SelectionReport rep_out = method == BenchMethod::ProxyRank
                                          ? proxy_rank(data, c.q, c.alpha, so)
                                          : proxy_gin(data, c.q, c.alpha, so);
            for (int k : targets) {
                const auto& t = rep_out.treatments[static_cast<size_t>(k)];
                push(data.names[static_cast<size_t>(k)],
                     t.status == SelectionStatus::Found ? t.effect.value : std::nullopt,
                     total_effect(scm, k));
            }
            break;
        }
        case BenchMethod::Naive: {
            for (int k : targets)
                push(data.names[static_cast<size_t>(k)], naive_ols(sigma, k).value,
                     total_effect(scm, k));
            break;
        }
        case BenchMethod::StandardProxy:
        case BenchMethod::ExtendedProxy: {
            // Ground-truth proxies of the AppendixA fixture: Z1..Zq, W1..Wq.
            if (c.fixture != BenchFixture::AppendixA)
                throw ConfigError("standard/extended methods require the appendixA fixture");
            const int q = c.appendix_q;
            VarSet z, w;
            for (int j = 1; j <= q; ++j) z.push_back(j);
            for (int j = q + 1; j <= 2 * q; ++j) w.push_back(j);
            EffectEstimate e = method == BenchMethod::StandardProxy
                                   ? standard_proxy_estimate(sigma, 0, z[0], w[0])
                                   : extended_proxy_estimate(sigma, 0, z, w);
            push(data.names[0], e.value, total_effect(scm, 0));
            break;
        }
    }
}

}  // namespace

BenchResult run_benchmark(const BenchConfig& config) {
    LinearScm custom;
    const LinearScm* custom_ptr = nullptr;
    if (config.fixture == BenchFixture::Custom) {
        if (config.custom_scm_path.empty()) throw ConfigError("custom fixture needs scm_path");
        custom = load_scm_json(config.custom_scm_path);
        custom_ptr = &custom;
    }

    const bool gin_requested =
        std::count(config.methods.begin(), config.methods.end(), BenchMethod::ProxyGin) > 0;
    for (long n : config.sample_sizes)
        if (gin_requested && n < kProxyGinMinSamples)
            throw ConfigError("insufficient samples for HSIC");

    std::vector<RepOutcome> outcomes(static_cast<size_t>(config.replications));
    const int threads = resolve_thread_count(config.threads);
    parallel_for(config.replications, threads, [&](long rep) {
        RepOutcome& out = outcomes[static_cast<size_t>(rep)];
        LinearScm scm = draw_fixture(config, custom_ptr, static_cast<int>(rep));
        for (long n : config.sample_sizes) {
            Dataset data = sample(scm, n,
                                  mix_seed(config.seed, static_cast<std::uint64_t>(rep + 1),
                                           static_cast<std::uint64_t>(n)));
            for (BenchMethod m : config.methods)
                run_one_method(config, m, scm, data, n, static_cast<int>(rep), out);
        }
    });

    BenchResult result;
    result.seed = config.seed;
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(bench_config_to_json(config))));
    result.config_hash = hash_buf;
    result.tool_version = kVersion;

    for (const auto& rep_out : outcomes)
        result.raw.insert(result.raw.end(), rep_out.records.begin(), rep_out.records.end());

    // aggregate over replications; grid rows cover method x treatment x n
    std::map<std::tuple<std::string, std::string, long>, std::vector<std::optional<double>>>
        biases;
    for (const auto& r : result.raw) {
        std::optional<double> b;
        if (r.estimate) b = *r.estimate - r.truth;
        biases[{r.method, r.treatment, r.n}].push_back(b);
    }
    for (const auto& [key, vals] : biases) {
        BenchCell cell;
        cell.method = std::get<0>(key);
        cell.treatment = std::get<1>(key);
        cell.n = std::get<2>(key);
        double sum = 0.0, sum_abs = 0.0;
        long found = 0;
        for (const auto& b : vals)
            if (b) {
                sum += *b;
                sum_abs += std::abs(*b);
                ++found;
            }
        cell.na_rate = 1.0 - static_cast<double>(found) / static_cast<double>(vals.size());
        if (found > 0) {
            cell.mean_bias = sum / static_cast<double>(found);
            cell.mean_abs_bias = sum_abs / static_cast<double>(found);
            double ss = 0.0;
            for (const auto& b : vals)
                if (b) ss += (*b - cell.mean_bias) * (*b - cell.mean_bias);
            cell.sd_bias = found > 1 ? std::sqrt(ss / static_cast<double>(found - 1)) : 0.0;
        }
        result.cells.push_back(std::move(cell));
    }
    std::sort(result.cells.begin(), result.cells.end(), [](const BenchCell& a, const BenchCell& b) {
        return std::tie(a.method, a.treatment, a.n) < std::tie(b.method, b.treatment, b.n);
    });
    return result;
}

namespace {

void write_double(std::ofstream& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

}  // namespace

void write_bench_csv(const BenchResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << "method,treatment,n,mean_bias,sd_bias,mean_abs_bias,na_rate,seed,config_hash,version\n";
    for (const auto& c : result.cells) {
        out << c.method << ',' << c.treatment << ',' << c.n << ',';
        write_double(out, c.mean_bias);
        out << ',';
        write_double(out, c.sd_bias);
        out << ',';
        write_double(out, c.mean_abs_bias);
        out << ',';
        write_double(out, c.na_rate);
        out << ',' << result.seed << ',' << result.config_hash << ',' << result.tool_version
            << '\n';
    }
}

void write_bench_raw_csv(const BenchResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << "method,treatment,n,rep,estimate,truth\n";
    for (const auto& r : result.raw) {
        out << r.method << ',' << r.treatment << ',' << r.n << ',' << r.rep << ',';
        if (r.estimate)
            write_double(out, *r.estimate);
        else
            out << "NA";
        out << ',';
        write_double(out, r.truth);
        out << '\n';
    }
}

}  // namespace proxysel
