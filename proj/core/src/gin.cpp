#include "proxysel/gin.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <random>

#include "proxysel/errors.hpp"
#include "proxysel/rng.hpp"

namespace proxysel {

namespace {

Eigen::VectorXd omega_from_cross_cov(const Eigen::MatrixXd& syz) {
    const Eigen::Index ny = syz.rows();
    const Eigen::Index nz = syz.cols();
    if (ny != nz + 1) throw ConfigError("estimate_omega needs |Ys| = |Zs| + 1");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(syz, Eigen::ComputeFullU);
    const Eigen::VectorXd& s = svd.singularValues();
    const double smax = s(0);
    if (!(smax > 0.0) || (nz >= 2 && s(nz - 1) < 1e-10 * smax))
        throw DegenerateInputError("degenerate model: null space dimension > 1 in omega estimate");

    // left singular vectors beyond the column count span the exact null space
    Eigen::VectorXd omega = svd.matrixU().col(ny - 1);
    omega.normalize();
    for (Eigen::Index i = 0; i < omega.size(); ++i) {
        if (std::abs(omega(i)) > 1e-9) {
            if (omega(i) < 0) omega = -omega;
            break;
        }
    }
    return omega;
}

}  // namespace

Eigen::VectorXd estimate_omega(const Eigen::MatrixXd& sigma, const VarSet& ys, const VarSet& zs) {
    return omega_from_cross_cov(cov_block(sigma, ys, zs));
}

Eigen::VectorXd estimate_omega(const Dataset& data, const VarSet& ys, const VarSet& zs) {
    return omega_from_cross_cov(cross_cov(data, ys, zs));
}

namespace detail {

std::vector<long> hsic_subsample_rows(long n, const HsicOptions& opts) {
    std::vector<long> rows(n);
    std::iota(rows.begin(), rows.end(), 0L);
    if (opts.subsample_cap > 0 && n > opts.subsample_cap) {
        auto rng = make_engine(mix_seed(opts.subsample_seed, static_cast<std::uint64_t>(n)));
        std::shuffle(rows.begin(), rows.end(), rng);
        rows.resize(opts.subsample_cap);
        std::sort(rows.begin(), rows.end());
    }
    return rows;
}

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& rows, long median_cap) {
    const long n = rows.rows();
    // median heuristic on a prefix of the (already subsampled) rows
    const long m = std::min<long>(n, std::max<long>(median_cap, 2));
    std::vector<double> dists;
    dists.reserve(static_cast<size_t>(m) * (m - 1) / 2);
    for (long i = 0; i < m; ++i)
        for (long j = i + 1; j < m; ++j) {
            double d2 = (rows.row(i) - rows.row(j)).squaredNorm();
            if (d2 > 0) dists.push_back(d2);
        }
    if (dists.empty()) throw DegenerateInputError("constant input in HSIC kernel");
    auto mid = dists.begin() + dists.size() / 2;
    std::nth_element(dists.begin(), mid, dists.end());
    const double bandwidth2 = *mid;  // equals 2*sigma^2 of the Gaussian kernel

    Eigen::VectorXd sq = rows.rowwise().squaredNorm();
    Eigen::MatrixXd k = rows * rows.transpose();
    k *= -2.0;
    k.colwise() += sq;
    k.rowwise() += sq.transpose();
    k = (-k / bandwidth2).array().exp().matrix();
    return k;
}

namespace {

struct CenteredSums {
    double stat_sum = 0.0;      // sum over all entries of Kc .* Lc
    double var_offdiag = 0.0;   // sum over i != j of (Kc_ij * Lc_ij / 6)^2
};

// Single O(n^2) pass; the centered matrices are never materialized.
CenteredSums centered_sums(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l) {
    const long n = k.rows();
    Eigen::VectorXd ka = k.rowwise().mean();
    Eigen::VectorXd la = l.rowwise().mean();
    const double km = ka.mean();
    const double lm = la.mean();
    CenteredSums out;
    for (long i = 0; i < n; ++i) {
        const double kai = ka(i) - km;
        const double lai = la(i) - lm;
        for (long j = 0; j < i; ++j) {
            const double kc = k(i, j) - kai - ka(j);
            const double lc = l(i, j) - lai - la(j);
            const double prod = kc * lc;
            out.stat_sum += 2.0 * prod;
            const double h = prod / 6.0;
            out.var_offdiag += 2.0 * h * h;
        }
        const double kc = k(i, i) - kai - ka(i);
        const double lc = l(i, i) - lai - la(i);
        out.stat_sum += kc * lc;
    }
    return out;
}

double gamma_upper_p(double shape, double scale, double x) {
    if (!(shape > 0.0) || !(scale > 0.0)) return 1.0;
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(shape, x / scale);
}

}  // namespace

HsicOutcome hsic_from_grams(const Eigen::MatrixXd& ku, const Eigen::MatrixXd& kz,
                            const HsicOptions& opts) {
    const long n = ku.rows();
    CenteredSums s = centered_sums(ku, kz);
    HsicOutcome out;
    out.statistic = s.stat_sum / static_cast<double>(n);

    if (opts.permutations > 0) {
        // permutation null: shuffle the u-side rows/columns
        auto rng = make_engine(mix_seed(opts.subsample_seed, 0x7e37ULL,
                                        static_cast<std::uint64_t>(opts.permutations)));
        std::vector<long> perm(n);
        std::iota(perm.begin(), perm.end(), 0L);
        Eigen::MatrixXd kup(n, n);
        int ge = 0;
        for (int t = 0; t < opts.permutations; ++t) {
            std::shuffle(perm.begin(), perm.end(), rng);
            for (long i = 0; i < n; ++i)
                for (long j = 0; j < n; ++j) kup(i, j) = ku(perm[i], perm[j]);
            CenteredSums sp = centered_sums(kup, kz);
            if (sp.stat_sum / static_cast<double>(n) >= out.statistic) ++ge;
        }
        out.p_value = (1.0 + ge) / (1.0 + opts.permutations);
        return out;
    }

    // moment-matched gamma approximation to the null distribution
    const double dn = static_cast<double>(n);
    double var_hsic = s.var_offdiag / dn / (dn - 1.0);
    var_hsic *= 72.0 * (dn - 4.0) * (dn - 5.0) / (dn * (dn - 1.0) * (dn - 2.0) * (dn - 3.0));
    const double mu_u = (ku.sum() - ku.trace()) / (dn * (dn - 1.0));
    const double mu_z = (kz.sum() - kz.trace()) / (dn * (dn - 1.0));
    const double m_hsic = (1.0 + mu_u * mu_z - mu_u - mu_z) / dn;
    if (!(var_hsic > 0.0) || !(m_hsic > 0.0))
        throw DegenerateInputError("degenerate HSIC null moments");
    const double shape = m_hsic * m_hsic / var_hsic;
    const double scale = var_hsic * dn / m_hsic;
    out.p_value = gamma_upper_p(shape, scale, out.statistic);
    return out;
}

}  // namespace detail

double hsic_pvalue(const Eigen::VectorXd& u, const Eigen::MatrixXd& z, const HsicOptions& opts) {
    if (u.size() != z.rows()) throw ConfigError("hsic_pvalue: row count mismatch");
    const long n = u.size();
    if (n < 50) throw ConfigError("insufficient samples for HSIC");
    if ((u.array() - u(0)).abs().maxCoeff() == 0.0)
        throw DegenerateInputError("constant residual in HSIC");
    for (Eigen::Index c = 0; c < z.cols(); ++c)
        if ((z.col(c).array() - z(0, c)).abs().maxCoeff() == 0.0)
            throw DegenerateInputError("constant column in HSIC");

    auto rows = detail::hsic_subsample_rows(n, opts);
    const long m = static_cast<long>(rows.size());
    Eigen::MatrixXd usub(m, 1);
    Eigen::MatrixXd zsub(m, z.cols());
    for (long i = 0; i < m; ++i) {
        usub(i, 0) = u(rows[i]);
        zsub.row(i) = z.row(rows[i]);
    }
    Eigen::MatrixXd ku = detail::rbf_gram(usub, opts.median_cap);
    Eigen::MatrixXd kz = detail::rbf_gram(zsub, opts.median_cap);
    return detail::hsic_from_grams(ku, kz, opts).p_value;
}

GinResult gin_holds(const Dataset& data, const VarSet& zs, const VarSet& ys, double alpha,
                    const HsicOptions& opts) {
    GinResult r;
    r.omega = estimate_omega(data, ys, zs);

    const long n = data.n();
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    for (size_t i = 0; i < ys.size(); ++i) u += r.omega(static_cast<Eigen::Index>(i)) * data.values.col(ys[i]);

    if (n < 50) throw ConfigError("insufficient samples for HSIC");
    auto rows = detail::hsic_subsample_rows(n, opts);
    const long m = static_cast<long>(rows.size());
    Eigen::MatrixXd usub(m, 1);
    Eigen::MatrixXd zsub(m, static_cast<Eigen::Index>(zs.size()));
    for (long i = 0; i < m; ++i) {
        usub(i, 0) = u(rows[i]);
        for (size_t c = 0; c < zs.size(); ++c) zsub(i, static_cast<Eigen::Index>(c)) = data.values(rows[i], zs[c]);
    }
    Eigen::MatrixXd ku = detail::rbf_gram(usub, opts.median_cap);
    Eigen::MatrixXd kz = detail::rbf_gram(zsub, opts.median_cap);
    auto outcome = detail::hsic_from_grams(ku, kz, opts);
    r.hsic_statistic = outcome.statistic;
    r.p_value = outcome.p_value;
    r.holds = outcome.p_value > alpha;
    return r;
}

}  // namespace proxysel
