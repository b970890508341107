#pragma once

#include <Eigen/Dense>
#include <vector>

#include "proxysel/scm.hpp"

namespace proxysel {

/// Ordered list of 0-based column indices into a Dataset (treatments and/or
/// the outcome). Order matters for determinant conventions; duplicates are
/// tolerated by cross_cov (the covariance matrix just repeats rows/columns),
/// while rule preconditions enforce disjointness where required.
using VarSet = std::vector<int>;

/// Outcome of the canonical-correlation rank test of H0: rank <= r.
struct RankDecision {
    int tested_rank = 0;
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    bool accepted = false;  // true iff "rank <= r" is not rejected (p > alpha)
};

/// Full (p+1)x(p+1) sample covariance of a centered Dataset, divisor n.
Eigen::MatrixXd sample_covariance(const Dataset& data);

/// |A| x |B| cross-covariance with entry (i,j) = (1/n) sum_rows A_i * B_j.
Eigen::MatrixXd cross_cov(const Dataset& data, const VarSet& a, const VarSet& b);

/// Extract the |A| x |B| block of a precomputed covariance matrix.
Eigen::MatrixXd cov_block(const Eigen::MatrixXd& sigma, const VarSet& a, const VarSet& b);

/// Sample canonical correlations between the A-columns and B-columns, sorted
/// descending and clamped to [0, 1-1e-12]. Throws DegenerateInputError when a
/// within-set covariance is singular.
Eigen::VectorXd canonical_correlations(const Eigen::MatrixXd& sigma, const VarSet& a,
                                       const VarSet& b);

/// Bartlett-Lawley form of Anderson's CCA rank test of H0: rank(Sigma_AB) <= r.
/// statistic = -(n - (|A|+|B|+3)/2) * sum_{i>r} ln(1 - rho_i^2), chi-square
/// with (|A|-r)(|B|-r) dof. Overlapping A/B index sets are legal (shared
/// variables contribute unit canonical correlations, excluded for r >= 1).
RankDecision cca_rank_test(const Eigen::MatrixXd& sigma, long n, const VarSet& a,
                           const VarSet& b, int r, double alpha);
RankDecision cca_rank_test(const Dataset& data, const VarSet& a, const VarSet& b, int r,
                           double alpha);

/// Count of singular values above tol * sigma_max (population-oracle rank).
int numeric_rank(const Eigen::MatrixXd& m, double tol);

}  // namespace proxysel
