#include "proxysel/covariance.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "proxysel/errors.hpp"

namespace proxysel {

Eigen::MatrixXd sample_covariance(const Dataset& data) {
    const double n = static_cast<double>(data.n());
    return (data.values.transpose() * data.values) / n;  // columns are centered
}

namespace {

void check_varset(const VarSet& v, Eigen::Index limit) {
    if (v.empty()) throw ConfigError("variable set is empty");
    for (int idx : v)
        if (idx < 0 || idx >= limit) throw ConfigError("variable index out of range");
}

}  // namespace

Eigen::MatrixXd cov_block(const Eigen::MatrixXd& sigma, const VarSet& a, const VarSet& b) {
    check_varset(a, sigma.rows());
    check_varset(b, sigma.cols());
    Eigen::MatrixXd out(a.size(), b.size());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) out(i, j) = sigma(a[i], b[j]);
    return out;
}

Eigen::MatrixXd cross_cov(const Dataset& data, const VarSet& a, const VarSet& b) {
    check_varset(a, data.values.cols());
    check_varset(b, data.values.cols());
    const double n = static_cast<double>(data.n());
    Eigen::MatrixXd out(a.size(), b.size());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            out(i, j) = data.values.col(a[i]).dot(data.values.col(b[j])) / n;
    return out;
}

namespace {

// V^{-1/2} via eigendecomposition; throws on a (near) singular within-set block.
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& v) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
    if (es.info() != Eigen::Success) throw DegenerateInputError("eigendecomposition failed");
    const Eigen::VectorXd& w = es.eigenvalues();
    double wmax = w.maxCoeff();
    if (!(wmax > 0) || w.minCoeff() < 1e-12 * wmax)
        throw DegenerateInputError("degenerate input: collinear columns in canonical correlation");
    Eigen::VectorXd inv = w.array().rsqrt();
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Eigen::VectorXd canonical_correlations(const Eigen::MatrixXd& sigma, const VarSet& a,
                                       const VarSet& b) {
    Eigen::MatrixXd saa = cov_block(sigma, a, a);
    Eigen::MatrixXd sbb = cov_block(sigma, b, b);
    Eigen::MatrixXd sab = cov_block(sigma, a, b);
    Eigen::MatrixXd m = inverse_sqrt(saa) * sab * inverse_sqrt(sbb);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    Eigen::VectorXd rho = svd.singularValues();
    for (Eigen::Index i = 0; i < rho.size(); ++i)
        rho(i) = std::min(std::max(rho(i), 0.0), 1.0 - 1e-12);
    return rho;
}

RankDecision cca_rank_test(const Eigen::MatrixXd& sigma, long n, const VarSet& a, const VarSet& b,
                           int r, double alpha) {
    const int pa = static_cast<int>(a.size());
    const int pb = static_cast<int>(b.size());
    const int m = std::min(pa, pb);
    if (r < 0 || r >= m) throw ConfigError("tested rank out of range");
    if (n <= pa + pb + 2) throw ConfigError("rank test needs n > |A| + |B| + 2");

    Eigen::VectorXd rho = canonical_correlations(sigma, a, b);
    double sum = 0.0;
    for (int i = r; i < m; ++i) sum += std::log1p(-rho(i) * rho(i));
    const double factor = static_cast<double>(n) - (pa + pb + 3) / 2.0;
    RankDecision d;
    d.tested_rank = r;
    d.statistic = -factor * sum;
    d.dof = (pa - r) * (pb - r);
    boost::math::chi_squared chi2(d.dof);
    d.p_value = boost::math::cdf(boost::math::complement(chi2, std::max(d.statistic, 0.0)));
    d.accepted = d.p_value > alpha;
    return d;
}

RankDecision cca_rank_test(const Dataset& data, const VarSet& a, const VarSet& b, int r,
                           double alpha) {
    return cca_rank_test(sample_covariance(data), data.n(), a, b, r, alpha);
}

int numeric_rank(const Eigen::MatrixXd& m, double tol) {
    if (m.size() == 0) throw ConfigError("numeric_rank of an empty matrix");
    if (!(tol > 0)) throw ConfigError("numeric_rank needs tol > 0");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const Eigen::VectorXd& s = svd.singularValues();
    double smax = s.size() ? s(0) : 0.0;
    if (smax == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * smax) ++r;
    return r;
}

}  // namespace proxysel
