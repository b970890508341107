#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace proxysel {

enum class NoiseKind { Gaussian, Exponential, Uniform };

/// Zero-mean noise term. `scale` is the standard deviation for Gaussian, the
/// mean (= 1/rate, subtracted after sampling) for Exponential, and the
/// half-width for Uniform.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::Gaussian;
    double scale = 1.0;

    double variance() const;
    double draw(std::mt19937_64& rng) const;
};

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& s);

/// Linear acyclic causal model over p treatments X, q unmeasured confounders U
/// and one outcome Y:
///
///   X = B X + C U + eps_X,   Y = beta' X + delta' U + eps_Y.
///
/// B must be strictly lower triangular after permuting by `order`. In the
/// strict model every entry of C and delta is nonzero; `relaxed` lifts that
/// requirement (used by screening scenarios where U does not reach every
/// treatment).
struct LinearScm {
    Eigen::MatrixXd B;               // p x p treatment-to-treatment
    Eigen::MatrixXd C;               // p x q confounder-to-treatment
    Eigen::VectorXd beta;            // p treatment-to-outcome
    Eigen::VectorXd delta;           // q confounder-to-outcome
    std::vector<NoiseSpec> noise_x;  // p
    std::vector<NoiseSpec> noise_u;  // q
    NoiseSpec noise_y;
    std::vector<int> order;          // topological order of the p treatments
    std::vector<std::string> names;  // p treatment labels (outcome is "Y")
    bool relaxed = false;

    int p() const { return static_cast<int>(B.rows()); }
    int q() const { return static_cast<int>(C.cols()); }

    /// Throws ModelError when an invariant is violated.
    void validate() const;
};

/// Centered n x (p+1) observation matrix; columns are X1..Xp then Y.
struct Dataset {
    Eigen::MatrixXd values;
    std::vector<std::string> names;

    long n() const { return values.rows(); }
    int p() const { return static_cast<int>(values.cols()) - 1; }
    int y_index() const { return p(); }

    /// Centers every column and validates (n >= 2, finite entries).
    static Dataset from_raw(Eigen::MatrixXd vals, std::vector<std::string> names);
};

/// Sample n i.i.d. rows; deterministic given `seed`. Columns are centered.
Dataset sample(const LinearScm& scm, long n, std::uint64_t seed);

/// Debug variant exposing the confounder draws (for oracle tests only; U is
/// unmeasured and never part of a Dataset).
struct SampleDraw {
    Dataset data;
    Eigen::MatrixXd confounders;  // n x q, centered like the rest
};
SampleDraw sample_with_confounders(const LinearScm& scm, long n, std::uint64_t seed);

/// Exact (p+1)x(p+1) covariance of (X, Y) implied by the model. No sampling.
Eigen::MatrixXd population_covariance(const LinearScm& scm);

/// Noise-to-observed loading matrix L, (p+1) x (p+q+1): row i gives the
/// loadings of observed variable i (X1..Xp, Y) on the scaled noise vector
/// (eps_X1..eps_Xp, U1..Uq, eps_Y), so population_covariance == L * L'.
Eigen::MatrixXd noise_loadings(const LinearScm& scm);

/// Total causal effect of treatment k (0-based) on Y: beta' (I-B)^{-1} e_k,
/// i.e. the sum over all directed paths from X_k to Y of edge products.
double total_effect(const LinearScm& scm, int k);

/// JSON (de)serialization of the model, schema:
/// {p, q, B (row-major), C, beta, delta, noise:{x:[{kind,scale}...],u:[...],y:{...}},
///  order, names, relaxed}
std::string scm_to_json(const LinearScm& scm);
LinearScm scm_from_json_string(const std::string& text);
LinearScm load_scm_json(const std::string& path);
void save_scm_json(const LinearScm& scm, const std::string& path);

}  // namespace proxysel
