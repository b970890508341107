#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "proxysel/covariance.hpp"
#include "proxysel/scm.hpp"

namespace proxysel {

enum class EstimatorMethod { Standard, Extended, Naive };

std::string to_string(EstimatorMethod m);

/// A causal-effect estimate. `value` is empty iff estimation failed
/// (degenerate denominator) -- `na_reason` then says why.
struct EffectEstimate {
    std::optional<double> value;
    EstimatorMethod method = EstimatorMethod::Extended;
    int treatment = -1;
    VarSet nce;
    VarSet nco;
    double denominator_det = 0.0;
    std::string na_reason;
};

/// Single-proxy estimator
///   (s_{XkY} s_{WZ} - s_{XkW} s_{YZ}) / (s_{XkXk} s_{WZ} - s_{XkW} s_{XkZ}).
/// All estimators take either a Dataset (sample covariance) or a raw
/// covariance matrix whose last column is Y (oracle mode); both entries share
/// one code path.
EffectEstimate standard_proxy_estimate(const Eigen::MatrixXd& sigma, int k, int z, int w);
EffectEstimate standard_proxy_estimate(const Dataset& data, int k, int z, int w);

/// Determinant-ratio estimator for q confounders with |Z| = |W| = q:
///   det(Sigma_{{Xk}uZ, {Y}uW}) / det(Sigma_{{Xk}uZ, {Xk}uW}),
/// rows ordered Xk first then Z, columns Y (resp. Xk) first then W.
EffectEstimate extended_proxy_estimate(const Eigen::MatrixXd& sigma, int k, const VarSet& z,
                                       const VarSet& w);
EffectEstimate extended_proxy_estimate(const Dataset& data, int k, const VarSet& z,
                                       const VarSet& w);

/// Simple regression of Y on Xk alone: s_{XkY} / s_{XkXk}.
EffectEstimate naive_ols(const Eigen::MatrixXd& sigma, int k);
EffectEstimate naive_ols(const Dataset& data, int k);

/// Necessary-condition screen: true iff the rank test rejects "rank <= q" for
/// BOTH Sigma_{{Xk,Z},{Y,W}} and Sigma_{{Xk,Z},{Xk,W}} (statistically full
/// rank q+1).
bool check_full_rank_preconditions(const Eigen::MatrixXd& sigma, long n, int k, const VarSet& z,
                                   const VarSet& w, double alpha);
bool check_full_rank_preconditions(const Dataset& data, int k, const VarSet& z, const VarSet& w,
                                   double alpha);

}  // namespace proxysel
