#include "proxysel/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "proxysel/errors.hpp"

namespace proxysel {

std::string to_string(EstimatorMethod m) {
    switch (m) {
        case EstimatorMethod::Standard:
            return "standard";
        case EstimatorMethod::Extended:
            return "extended";
        case EstimatorMethod::Naive:
            return "naive";
    }
    return "?";
}

namespace {

constexpr double kDegeneracyRel = 1e-10;

// Scale reference for the degeneracy decision: product of row 2-norms
// (Hadamard bound on the determinant).
double row_norm_scale(const Eigen::MatrixXd& m) {
    double s = 1.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) s *= m.row(i).norm();
    return s;
}

void check_index(int idx, Eigen::Index limit, const char* what) {
    if (idx < 0 || idx >= limit) throw ConfigError(std::string(what) + " index out of range");
}

}  // namespace

EffectEstimate extended_proxy_estimate(const Eigen::MatrixXd& sigma, int k, const VarSet& z,
                                       const VarSet& w) {
    const int y = static_cast<int>(sigma.cols()) - 1;
    check_index(k, y, "treatment");
    if (z.size() != w.size()) throw ConfigError("NCE and NCO sets must have equal size");
    if (z.empty()) throw ConfigError("proxy sets must be nonempty");
    for (int i : z) check_index(i, y, "NCE");
    for (int i : w) check_index(i, y, "NCO");

    VarSet rows{k};
    rows.insert(rows.end(), z.begin(), z.end());
    VarSet num_cols{y};
    num_cols.insert(num_cols.end(), w.begin(), w.end());
    VarSet den_cols{k};
    den_cols.insert(den_cols.end(), w.begin(), w.end());

    Eigen::MatrixXd den_m = cov_block(sigma, rows, den_cols);
    Eigen::MatrixXd num_m = cov_block(sigma, rows, num_cols);
    double den = den_m.determinant();
    double num = num_m.determinant();

    EffectEstimate e;
    e.method = EstimatorMethod::Extended;
    e.treatment = k;
    e.nce = z;
    e.nco = w;
    e.denominator_det = den;
    double scale = row_norm_scale(den_m);
    if (!(std::abs(den) >= kDegeneracyRel * scale) || scale == 0.0) {
        e.na_reason = "degenerate denominator";
        return e;
    }
    e.value = num / den;
    return e;
}

EffectEstimate extended_proxy_estimate(const Dataset& data, int k, const VarSet& z,
                                       const VarSet& w) {
    return extended_proxy_estimate(sample_covariance(data), k, z, w);
}

EffectEstimate standard_proxy_estimate(const Eigen::MatrixXd& sigma, int k, int z, int w) {
    const int y = static_cast<int>(sigma.cols()) - 1;
    check_index(k, y, "treatment");
    check_index(z, y, "NCE");
    check_index(w, y, "NCO");
    if (z == k || w == k || z == w) throw ConfigError("treatment, NCE and NCO must be distinct");

    const double num = sigma(k, y) * sigma(w, z) - sigma(k, w) * sigma(y, z);
    const double den = sigma(k, k) * sigma(w, z) - sigma(k, w) * sigma(k, z);

    EffectEstimate e;
    e.method = EstimatorMethod::Standard;
    e.treatment = k;
    e.nce = {z};
    e.nco = {w};
    e.denominator_det = den;
    Eigen::MatrixXd den_m(2, 2);
    den_m << sigma(k, k), sigma(k, w), sigma(z, k), sigma(z, w);
    double scale = row_norm_scale(den_m);
    if (!(std::abs(den) >= kDegeneracyRel * scale) || scale == 0.0) {
        e.na_reason = "degenerate denominator";
        return e;
    }
    e.value = num / den;
    return e;
}

EffectEstimate standard_proxy_estimate(const Dataset& data, int k, int z, int w) {
    return standard_proxy_estimate(sample_covariance(data), k, z, w);
}

EffectEstimate naive_ols(const Eigen::MatrixXd& sigma, int k) {
    const int y = static_cast<int>(sigma.cols()) - 1;
    check_index(k, y, "treatment");
    EffectEstimate e;
    e.method = EstimatorMethod::Naive;
    e.treatment = k;
    e.denominator_det = sigma(k, k);
    if (!(sigma(k, k) > 0)) {
        e.na_reason = "zero variance";
        return e;
    }
    e.value = sigma(k, y) / sigma(k, k);
    return e;
}

EffectEstimate naive_ols(const Dataset& data, int k) {
    return naive_ols(sample_covariance(data), k);
}

bool check_full_rank_preconditions(const Eigen::MatrixXd& sigma, long n, int k, const VarSet& z,
                                   const VarSet& w, double alpha) {
    const int y = static_cast<int>(sigma.cols()) - 1;
    check_index(k, y, "treatment");
    if (z.size() != w.size()) throw ConfigError("NCE and NCO sets must have equal size");
    const int q = static_cast<int>(z.size());

    VarSet rows{k};
    rows.insert(rows.end(), z.begin(), z.end());
    VarSet cols_y{y};
    cols_y.insert(cols_y.end(), w.begin(), w.end());
    VarSet cols_k{k};
    cols_k.insert(cols_k.end(), w.begin(), w.end());

    // full rank q+1 <=> "rank <= q" rejected for both matrices
    RankDecision d1 = cca_rank_test(sigma, n, rows, cols_y, q, alpha);
    if (d1.accepted) return false;
    RankDecision d2 = cca_rank_test(sigma, n, rows, cols_k, q, alpha);
    return !d2.accepted;
}

bool check_full_rank_preconditions(const Dataset& data, int k, const VarSet& z, const VarSet& w,
                                   double alpha) {
    return check_full_rank_preconditions(sample_covariance(data), data.n(), k, z, w, alpha);
}

}  // namespace proxysel
