#include "proxysel/fixtures.hpp"

#include <cmath>
#include <random>

#include "internal/subsets.hpp"
#include "proxysel/covariance.hpp"
#include "proxysel/errors.hpp"
#include "proxysel/estimators.hpp"
#include "proxysel/gin.hpp"
#include "proxysel/rng.hpp"

namespace proxysel {

using internal::cat;
using internal::cat2;
using internal::Combinations;
using internal::pick;
using internal::without;

std::string to_string(PaperCase c) {
    switch (c) {
        case PaperCase::Gaussian:
            return "gaussian";
        case PaperCase::NonGaussian:
            return "nongaussian";
        case PaperCase::Mixture:
            return "mixture";
        case PaperCase::AppendixA:
            return "appendixA";
    }
    return "?";
}

PaperCase paper_case_from_string(const std::string& s) {
    if (s == "gaussian") return PaperCase::Gaussian;
    if (s == "nongaussian") return PaperCase::NonGaussian;
    if (s == "mixture") return PaperCase::Mixture;
    if (s == "appendixA" || s == "appendixa") return PaperCase::AppendixA;
    throw ConfigError("unknown fixture case: " + s);
}

namespace {

double draw_coef(std::mt19937_64& rng, double min_abs) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (;;) {
        double v = unif(rng);
        if (std::abs(v) >= min_abs) return v;
    }
}

NoiseSpec pick_noise(PaperCase c, std::mt19937_64& rng, double scale) {
    switch (c) {
        case PaperCase::NonGaussian:
            return {NoiseKind::Exponential, scale};
        case PaperCase::Mixture: {
            std::uniform_int_distribution<int> coin(0, 1);
            return {coin(rng) ? NoiseKind::Exponential : NoiseKind::Gaussian, scale};
        }
        default:
            return {NoiseKind::Gaussian, scale};
    }
}

LinearScm build_fig3(PaperCase c, std::mt19937_64& rng, const FixtureOptions& opts) {
    const bool drop_x3 = c == PaperCase::NonGaussian;
    const int p = drop_x3 ? 5 : 6;
    LinearScm scm;
    scm.B = Eigen::MatrixXd::Zero(p, p);
    scm.C = Eigen::MatrixXd::Zero(p, 1);
    scm.beta = Eigen::VectorXd::Zero(p);
    scm.delta = Eigen::VectorXd::Zero(1);

    auto coef = [&] { return draw_coef(rng, opts.min_abs_coef); };

    // chain edges X1->X2, X4->X5, X5->X6 (labels shift left when X3 is absent)
    const int x2 = 1;
    const int x4 = drop_x3 ? 2 : 3;
    const int x5 = drop_x3 ? 3 : 4;
    const int x6 = drop_x3 ? 4 : 5;
    scm.B(x2, 0) = coef();
    scm.B(x5, x4) = coef();
    scm.B(x6, x5) = coef();
    for (int i = 0; i < p; ++i) scm.C(i, 0) = coef();
    scm.beta(x2) = coef();
    scm.beta(x6) = coef();
    scm.delta(0) = coef();

    for (int i = 0; i < p; ++i) scm.noise_x.push_back(pick_noise(c, rng, 1.0));
    scm.noise_u.push_back(pick_noise(c, rng, opts.confounder_scale));
    scm.noise_y = pick_noise(c, rng, 1.0);

    for (int i = 0; i < p; ++i) scm.order.push_back(i);
    if (drop_x3)
        scm.names = {"X1", "X2", "X4", "X5", "X6"};
    else
        scm.names = {"X1", "X2", "X3", "X4", "X5", "X6"};
    return scm;
}

LinearScm build_appendix_a(std::mt19937_64& rng, const FixtureOptions& opts) {
    const int q = opts.appendix_q;
    if (q < 1 || q > 4) throw ConfigError("appendixA needs 1 <= q <= 4");
    const int p = 2 * q + 1;  // Xk, Z1..Zq, W1..Wq
    LinearScm scm;
    scm.B = Eigen::MatrixXd::Zero(p, p);
    scm.C = Eigen::MatrixXd::Zero(p, q);
    scm.beta = Eigen::VectorXd::Zero(p);
    scm.delta = Eigen::VectorXd::Zero(q);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) scm.C(i, j) = draw_coef(rng, opts.min_abs_coef);
    scm.beta(0) = draw_coef(rng, opts.min_abs_coef);
    for (int j = 0; j < q; ++j) scm.delta(j) = draw_coef(rng, opts.min_abs_coef);
    for (int i = 0; i < p; ++i) scm.noise_x.push_back({NoiseKind::Gaussian, 1.0});
    for (int j = 0; j < q; ++j) scm.noise_u.push_back({NoiseKind::Gaussian, opts.confounder_scale});
    scm.noise_y = {NoiseKind::Gaussian, 1.0};
    for (int i = 0; i < p; ++i) scm.order.push_back(i);
    scm.names.push_back("X1");
    for (int j = 1; j <= q; ++j) scm.names.push_back("Z" + std::to_string(j));
    for (int j = 1; j <= q; ++j) scm.names.push_back("W" + std::to_string(j));
    return scm;
}

// ---------------------------------------------------------------------------
// Strong-rank-faithfulness margin.
//
// The benchmark fixtures are redrawn until the covariance (and, for the
// non-Gaussian case, shared-noise) constraints probed by the first-hit
// searches keep a detectable margin for the treatments the synthetic
// experiments track. Without this, coefficient draws routinely land near a
// rank deficiency the graph does not entail; the finite-sample tests then
// accept invalid candidates or meet ill-conditioned determinant denominators,
// and first-hit selection returns arbitrarily wrong effects. Per-coefficient
// rejection alone cannot prevent that: products and determinant combinations
// of perfectly healthy coefficients still cancel.
// ---------------------------------------------------------------------------

constexpr double kEntailedTol = 1e-7;      // population cca below this = entailed zero
constexpr double kViolationMargin = 0.10;  // cca above this = reliably rejectable
constexpr double kRejectOnlyMargin = 0.05; // floor for treatments that must stay NA
constexpr double kScreenMargin = 0.10;     // denominator conditioning for usable hits
constexpr double kBenignEstTol = 0.02;     // gray candidates must estimate this close
constexpr double kGinMargin = 0.10;        // shared-noise loading margin for GIN pairs
constexpr double kOracleTol = 1e-9;

struct MarginContext {
    Eigen::MatrixXd sigma;
    Eigen::MatrixXd loadings;  // (p+1) x (p+q+1)
    std::vector<bool> noise_nongaussian;
    std::vector<double> truths;
    int p = 0;
    int y = 0;
};

MarginContext make_margin_context(const LinearScm& scm) {
    MarginContext ctx;
    ctx.sigma = population_covariance(scm);
    ctx.loadings = noise_loadings(scm);
    ctx.p = scm.p();
    ctx.y = scm.p();
    for (int i = 0; i < scm.p(); ++i)
        ctx.noise_nongaussian.push_back(scm.noise_x[i].kind != NoiseKind::Gaussian);
    for (int j = 0; j < scm.q(); ++j)
        ctx.noise_nongaussian.push_back(scm.noise_u[j].kind != NoiseKind::Gaussian);
    ctx.noise_nongaussian.push_back(scm.noise_y.kind != NoiseKind::Gaussian);
    for (int k = 0; k < scm.p(); ++k) ctx.truths.push_back(total_effect(scm, k));
    return ctx;
}

double pop_cca_at(const MarginContext& ctx, const VarSet& rows, const VarSet& cols, int r) {
    Eigen::VectorXd rho = canonical_correlations(ctx.sigma, rows, cols);
    return r < rho.size() ? rho(r) : 0.0;
}

// Conditioned denominator plus a population estimate close to the truth: a
// hit on such a candidate stays harmless.
bool candidate_benign(const MarginContext& ctx, int k, const VarSet& z, const VarSet& w,
                      double est_tol) {
    const int q = static_cast<int>(z.size());
    if (pop_cca_at(ctx, cat(k, z), cat(k, w), q) < kScreenMargin) return false;
    EffectEstimate est = extended_proxy_estimate(ctx.sigma, k, z, w);
    return est.value && std::abs(*est.value - ctx.truths[static_cast<size_t>(k)]) <= est_tol;
}

// Mirrors the first-hit R1/R2 scan of proxy_rank at the population level for
// one treatment. In hit mode, every candidate reached before the entailed hit
// must be reliably rejectable or benign and the hit itself exact and well
// conditioned. In reject mode (treatments that must come out NA), every
// candidate must carry a clear violation.
bool rank_margin_one(const MarginContext& ctx, int k, int q, bool must_hit) {
    VarSet others;
    for (int i = 0; i < ctx.p; ++i)
        if (i != k) others.push_back(i);
    const int m = static_cast<int>(others.size());
    bool hit = false;

    if (m >= 2 * q + 1) {
        for (Combinations ac(m, q); !ac.done() && !hit; ac.advance()) {
            VarSet a = pick(others, ac.positions());
            VarSet rest = without(others, a);
            for (Combinations bc(static_cast<int>(rest.size()), q); !bc.done() && !hit;
                 bc.advance()) {
                VarSet b = pick(rest, bc.positions());
                for (int quad : without(rest, b)) {
                    double c1 = pop_cca_at(ctx, cat2(k, quad, a), cat2(k, ctx.y, b), q + 1);
                    double c2 = pop_cca_at(ctx, cat(k, a), cat(quad, b), q);
                    if (!must_hit) {
                        if (std::max(c1, c2) < kRejectOnlyMargin) return false;
                        continue;
                    }
                    if (c1 <= kEntailedTol && c2 <= kEntailedTol) {
                        if (!candidate_benign(ctx, k, a, b, kOracleTol)) return false;
                        hit = true;
                        break;
                    }
                    if (c1 >= kViolationMargin || c2 >= kViolationMargin) continue;
                    if (!candidate_benign(ctx, k, a, b, kBenignEstTol)) return false;
                }
            }
        }
    }
    if (!hit && m >= 2 * q + 2) {
        for (Combinations ac(m, q + 1); !ac.done() && !hit; ac.advance()) {
            VarSet a = pick(others, ac.positions());
            VarSet rest = without(others, a);
            for (Combinations bc(static_cast<int>(rest.size()), q + 1); !bc.done(); bc.advance()) {
                VarSet b = pick(rest, bc.positions());
                double c1 = pop_cca_at(ctx, cat(k, a), cat2(k, ctx.y, b), q + 1);
                double c2 = pop_cca_at(ctx, cat(k, a), b, q);
                if (!must_hit) {
                    if (std::max(c1, c2) < kRejectOnlyMargin) return false;
                    continue;
                }
                VarSet aq(a.begin(), a.begin() + q);
                VarSet bq(b.begin(), b.begin() + q);
                if (c1 <= kEntailedTol && c2 <= kEntailedTol) {
                    if (!candidate_benign(ctx, k, aq, bq, kOracleTol)) return false;
                    hit = true;
                    break;
                }
                if (c1 >= kViolationMargin || c2 >= kViolationMargin) continue;
                if (!candidate_benign(ctx, k, aq, bq, kBenignEstTol)) return false;
            }
        }
    }
    return must_hit ? hit : true;
}

// Shared non-Gaussian noise margin for one GIN pair (zs, ys): 0 when omega'Y
// and Z share no non-Gaussian noise (GIN holds), otherwise the strength the
// HSIC test has to work with.
double gin_violation_margin(const MarginContext& ctx, const VarSet& zs, const VarSet& ys) {
    Eigen::VectorXd omega = estimate_omega(ctx.sigma, ys, zs);
    Eigen::RowVectorXd u_load = Eigen::RowVectorXd::Zero(ctx.loadings.cols());
    for (size_t i = 0; i < ys.size(); ++i)
        u_load += omega(static_cast<Eigen::Index>(i)) * ctx.loadings.row(ys[i]);
    const double u_norm = u_load.norm();
    double z_total = 0.0;
    for (int zi : zs) z_total += ctx.loadings.row(zi).squaredNorm();
    z_total = std::sqrt(z_total);
    if (u_norm <= 0 || z_total <= 0) return 1.0;

    double worst = 0.0;
    for (Eigen::Index e = 0; e < ctx.loadings.cols(); ++e) {
        if (!ctx.noise_nongaussian[static_cast<size_t>(e)]) continue;
        double zmag = 0.0;
        for (int zi : zs) zmag += ctx.loadings(zi, e) * ctx.loadings(zi, e);
        zmag = std::sqrt(zmag);
        worst = std::max(worst, std::abs(u_load(e)) / u_norm * zmag / z_total);
    }
    return worst;
}

// Mirrors the first-hit R3 scan of proxy_gin for one treatment (hit mode).
bool gin_margin_one(const MarginContext& ctx, int k, int q) {
    VarSet others;
    for (int i = 0; i < ctx.p; ++i)
        if (i != k) others.push_back(i);
    const int m = static_cast<int>(others.size());
    if (m < 2 * q) return false;
    for (Combinations ac(m, q); !ac.done(); ac.advance()) {
        VarSet a = pick(others, ac.positions());
        VarSet rest = without(others, a);
        for (Combinations bc(static_cast<int>(rest.size()), q); !bc.done(); bc.advance()) {
            VarSet b = pick(rest, bc.positions());
            double g1, g2;
            try {
                g1 = gin_violation_margin(ctx, cat(k, a), cat2(k, ctx.y, b));
                g2 = gin_violation_margin(ctx, b, cat(k, a));
            } catch (const DegenerateInputError&) {
                return false;  // ambiguous omega: unstable decisions
            }
            if (g1 <= kEntailedTol && g2 <= kEntailedTol) {
                if (!candidate_benign(ctx, k, a, b, kOracleTol)) return false;
                return true;
            }
            if (g1 >= kGinMargin || g2 >= kGinMargin) continue;
            if (!candidate_benign(ctx, k, a, b, kBenignEstTol)) return false;
        }
    }
    return false;
}

// The synthetic experiments track X2, X5 and X6; the margins are enforced for
// those treatments only (column indices shift when X3 is absent).
bool fig3_margin_ok(const MarginContext& ctx, PaperCase c) {
    if (c == PaperCase::NonGaussian) {
        // no valid rank configuration exists for X2 and X5: the rank search
        // must keep rejecting; X6 and the GIN search must keep working
        if (!rank_margin_one(ctx, 1, 1, /*must_hit=*/false)) return false;
        if (!rank_margin_one(ctx, 3, 1, /*must_hit=*/false)) return false;
        if (!rank_margin_one(ctx, 4, 1, /*must_hit=*/true)) return false;
        return gin_margin_one(ctx, 1, 1) && gin_margin_one(ctx, 3, 1) &&
               gin_margin_one(ctx, 4, 1);
    }
    return rank_margin_one(ctx, 1, 1, true) && rank_margin_one(ctx, 4, 1, true) &&
           rank_margin_one(ctx, 5, 1, true);
}

// AppendixA: the proxy sets are fixed by construction; the margin only has to
// keep the determinant denominators of both estimators well conditioned.
bool appendix_margin_ok(const MarginContext& ctx, int q) {
    VarSet z, w;
    for (int j = 1; j <= q; ++j) z.push_back(j);
    for (int j = q + 1; j <= 2 * q; ++j) w.push_back(j);
    if (pop_cca_at(ctx, cat(0, z), cat(0, w), q) < kScreenMargin) return false;
    // single-proxy denominator of the standard estimator
    VarSet z1{z[0]}, w1{w[0]};
    return pop_cca_at(ctx, cat(0, z1), cat(0, w1), 1) >= kScreenMargin;
}

}  // namespace

LinearScm paper_graph(PaperCase c, std::uint64_t seed, const FixtureOptions& opts) {
    auto rng = make_engine(mix_seed(seed, 0xf1c7u, static_cast<std::uint64_t>(c)));
    const int max_attempts = 20000;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        LinearScm scm = c == PaperCase::AppendixA ? build_appendix_a(rng, opts)
                                                  : build_fig3(c, rng, opts);
        if (!opts.margin_rejection) return scm;
        MarginContext ctx = make_margin_context(scm);
        bool ok = c == PaperCase::AppendixA ? appendix_margin_ok(ctx, opts.appendix_q)
                                            : fig3_margin_ok(ctx, c);
        if (ok) return scm;
    }
    throw ModelError("could not draw a fixture with the required faithfulness margin");
}

}  // namespace proxysel
