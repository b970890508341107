#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proxysel/estimators.hpp"
#include "proxysel/gin.hpp"

namespace proxysel {

enum class SelectionRule { R1, R2, R3 };
enum class SelectionStatus { Found, NA };

std::string to_string(SelectionRule r);

/// Per-treatment outcome of a proxy search.
struct TreatmentSelection {
    int treatment = -1;
    std::string name;
    SelectionStatus status = SelectionStatus::NA;
    std::optional<SelectionRule> rule;
    VarSet nce;
    VarSet nco;
    std::optional<int> quad_nc;  // R1's Q
    EffectEstimate effect;
    long candidates_tested = 0;
    double elapsed_seconds = 0.0;
    std::string na_reason;
};

struct SelectionReport {
    std::vector<TreatmentSelection> treatments;
    int q = 1;
    double alpha = 0.05;
    std::string method;  // "rank", "gin" or "oracle-rank"
};

struct SelectionOptions {
    /// Require a statistically nonsingular estimator denominator before
    /// accepting a candidate ("rank <= q" rejected for Sigma_{{Xk,Z},{Xk,W}}).
    /// Keeps finite-sample searches away from near-singular denominators; a
    /// no-op at the population level where valid candidates are full rank.
    bool full_rank_screen = true;
    HsicOptions hsic;
    /// Worker threads for the per-treatment searches; 0 reads
    /// PROXYSEL_THREADS, falling back to the hardware count.
    int threads = 0;
};

/// Rule R1 (rank version, needs a quadruple-disconnected candidate Q):
/// accepts iff rank(Sigma_{{Xk,Q}uA,{Xk,Y}uB}) <= q+1 and
/// rank(Sigma_{{Xk}uA,{Q}uB}) <= q are both not rejected. |A| = |B| = q.
bool rule_r1(const Dataset& data, int k, const VarSet& a, const VarSet& b, int quad_nc, int q,
             double alpha);

/// Rule R2: rank(Sigma_{{Xk}uA,{Xk,Y}uB}) <= q+1 and rank(Sigma_{{Xk}uA,B}) <= q,
/// with |A| = |B| = q+1.
bool rule_r2(const Dataset& data, int k, const VarSet& a, const VarSet& b, int q, double alpha);

/// Rule R3 (GIN version, non-Gaussian data): ({Xk}uA, {Xk,Y}uB) and
/// (B, {Xk}uA) both follow the GIN condition. |A| = |B| = q.
bool rule_r3(const Dataset& data, int k, const VarSet& a, const VarSet& b, double alpha,
             const HsicOptions& opts = {});

/// Proxy search driven by the CCA rank test: for each treatment, R1
/// candidates (A, B, Q) in lexicographic order, first hit wins; R2 candidates
/// of size q+1 otherwise; NA when nothing passes.
SelectionReport proxy_rank(const Dataset& data, int q, double alpha,
                           const SelectionOptions& opts = {});

/// Proxy search driven by GIN constraints (rule R3), same enumeration scheme.
SelectionReport proxy_gin(const Dataset& data, int q, double alpha,
                          const SelectionOptions& opts = {});

/// Population-oracle variant of proxy_rank: rank decisions via numeric_rank
/// on an exact covariance matrix (last column Y), estimates evaluated on the
/// same matrix.
SelectionReport proxy_rank_oracle(const Eigen::MatrixXd& sigma, int q, double tol = 1e-8);

/// JSON serialization (schema documented in the README). Timing is omitted
/// unless requested so that identical inputs give byte-identical reports.
std::string report_to_json(const SelectionReport& report, bool include_timing = false);

/// Minimum rows required before proxy_gin will run (HSIC inside the search
/// loop needs calibrated tails; the per-call floor of hsic_pvalue is lower).
inline constexpr long kProxyGinMinSamples = 500;

}  // namespace proxysel
