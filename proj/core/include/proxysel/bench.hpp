#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proxysel/fixtures.hpp"
#include "proxysel/scm.hpp"

namespace proxysel {

enum class BenchMethod { ProxyRank, ProxyGin, Naive, StandardProxy, ExtendedProxy };
enum class BenchFixture { Gaussian, NonGaussian, Mixture, AppendixA, Custom };

std::string to_string(BenchMethod m);
BenchMethod bench_method_from_string(const std::string& s);
std::string to_string(BenchFixture f);
BenchFixture bench_fixture_from_string(const std::string& s);

/// Benchmark harness configuration. StandardProxy/ExtendedProxy apply only to
/// the AppendixA fixture, where the ground-truth proxy sets are known by
/// construction; the selection methods search for them.
struct BenchConfig {
    BenchFixture fixture = BenchFixture::Gaussian;
    int appendix_q = 1;              // AppendixA only
    std::string custom_scm_path;     // Custom only
    std::vector<long> sample_sizes = {1000, 3000, 5000};
    int replications = 100;
    std::vector<BenchMethod> methods = {BenchMethod::ProxyRank, BenchMethod::Naive};
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int q = 1;                       // confounder count passed to the selectors
    double min_abs_coef = 0.3;       // 0 disables coefficient rejection
    bool margin_rejection = true;
    std::string output_path;
    std::string raw_output_path;
    int threads = 0;
};

/// One aggregate grid cell.
struct BenchCell {
    std::string method;
    std::string treatment;
    long n = 0;
    double mean_bias = 0.0;      // signed mean(estimate - truth) over non-NA reps
    double sd_bias = 0.0;
    double mean_abs_bias = 0.0;  // mean |estimate - truth| over non-NA reps
    double na_rate = 0.0;
};

/// One raw replication record (emitted for re-aggregation).
struct BenchRawRecord {
    std::string method;
    std::string treatment;
    long n = 0;
    int rep = 0;
    std::optional<double> estimate;
    double truth = 0.0;
};

struct BenchResult {
    std::vector<BenchCell> cells;  // full |methods| x |treatments| x |sample_sizes| grid
    std::vector<BenchRawRecord> raw;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string tool_version;
};

BenchConfig bench_config_from_json_string(const std::string& text);
BenchConfig load_bench_config(const std::string& path);
std::string bench_config_to_json(const BenchConfig& config);

/// Run the harness: per replication draw fresh fixture coefficients, sample
/// each n, run each method, record estimate - truth. Fully reproducible from
/// config.seed.
BenchResult run_benchmark(const BenchConfig& config);

/// Flat RFC-4180 grid with provenance columns (seed, config hash, version).
void write_bench_csv(const BenchResult& result, const std::string& path);
void write_bench_raw_csv(const BenchResult& result, const std::string& path);

}  // namespace proxysel
