#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "proxysel/covariance.hpp"
#include "proxysel/scm.hpp"

namespace proxysel {

/// Decision for one (Z, Y) pair: omega is the unit-norm left null vector of
/// the cross-covariance Sigma_{Y,Z}; holds is true iff independence of
/// omega'Y and Z is not rejected.
struct GinResult {
    Eigen::VectorXd omega;
    double hsic_statistic = 0.0;
    double p_value = 1.0;
    bool holds = false;
};

struct HsicOptions {
    /// 0 uses the gamma approximation to the null; N > 0 runs a permutation
    /// test with N shuffles (audit mode).
    int permutations = 0;
    /// Rows are subsampled (seeded, fixed) beyond this cap to bound the
    /// O(n^2) kernel cost.
    long subsample_cap = 3000;
    std::uint64_t subsample_seed = 0x51ef2c9153a9ULL;
    /// Rows used for the median-heuristic bandwidth.
    long median_cap = 1000;
};

/// Unit-norm left null vector of Sigma_{Ys,Zs} (requires |Ys| = |Zs| + 1),
/// sign fixed so the first nonzero entry is positive. Throws
/// DegenerateInputError when the null space has dimension > 1 within
/// tolerance.
Eigen::VectorXd estimate_omega(const Dataset& data, const VarSet& ys, const VarSet& zs);
Eigen::VectorXd estimate_omega(const Eigen::MatrixXd& sigma, const VarSet& ys, const VarSet& zs);

/// HSIC independence test of u against the columns of z: Gaussian kernels
/// with median-heuristic bandwidths, p-value from the moment-matched gamma
/// approximation (or permutations when configured). Requires n >= 50.
double hsic_pvalue(const Eigen::VectorXd& u, const Eigen::MatrixXd& z,
                   const HsicOptions& opts = {});

/// Full GIN decision for the ordered pair (Zs, Ys): estimate omega, test
/// omega'Y against the Z columns; holds iff p > alpha.
GinResult gin_holds(const Dataset& data, const VarSet& zs, const VarSet& ys, double alpha,
                    const HsicOptions& opts = {});

namespace detail {

/// Centered Gaussian gram matrix of the given rows (already subsampled).
Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& rows, long median_cap);

struct HsicOutcome {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// HSIC from precomputed (uncentered) gram matrices.
HsicOutcome hsic_from_grams(const Eigen::MatrixXd& ku, const Eigen::MatrixXd& kz,
                            const HsicOptions& opts);

/// Deterministic subsample row indices for HSIC (identity when n <= cap).
std::vector<long> hsic_subsample_rows(long n, const HsicOptions& opts);

}  // namespace detail

}  // namespace proxysel
