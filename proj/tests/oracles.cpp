#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>

#include "proxysel/rng.hpp"
#include "testutil.hpp"

namespace oracles {

using proxysel::LinearScm;
using proxysel::NoiseKind;
using proxysel::VarSet;

double path_total_effect(const LinearScm& scm, int k) {
    const int p = scm.p();
    // DFS over children edges B(child, parent) != 0, accumulating products.
    double total = scm.beta(k);
    std::vector<std::pair<int, double>> stack{{k, 1.0}};
    stack.pop_back();
    for (int child = 0; child < p; ++child)
        if (scm.B(child, k) != 0.0) stack.push_back({child, scm.B(child, k)});
    while (!stack.empty()) {
        auto [node, prod] = stack.back();
        stack.pop_back();
        total += prod * scm.beta(node);
        for (int child = 0; child < p; ++child)
            if (scm.B(child, node) != 0.0) stack.push_back({child, prod * scm.B(child, node)});
    }
    return total;
}

FullGraph FullGraph::from_scm(const LinearScm& scm) {
    FullGraph g;
    g.p = scm.p();
    g.q = scm.q();
    g.parents.assign(g.p + g.q + 1, {});
    for (int i = 0; i < g.p; ++i) {
        for (int j = 0; j < g.p; ++j)
            if (scm.B(i, j) != 0.0) g.parents[i].push_back(j);
        for (int j = 0; j < g.q; ++j)
            if (scm.C(i, j) != 0.0) g.parents[i].push_back(g.u(j));
    }
    for (int j = 0; j < g.p; ++j)
        if (scm.beta(j) != 0.0) g.parents[g.y()].push_back(j);
    for (int j = 0; j < g.q; ++j)
        if (scm.delta(j) != 0.0) g.parents[g.y()].push_back(g.u(j));
    return g;
}

namespace {

std::vector<std::vector<int>> children_of(const FullGraph& g) {
    std::vector<std::vector<int>> ch(g.parents.size());
    for (size_t v = 0; v < g.parents.size(); ++v)
        for (int par : g.parents[v]) ch[static_cast<size_t>(par)].push_back(static_cast<int>(v));
    return ch;
}

}  // namespace

bool d_separated(const FullGraph& g, int x, int y, const std::vector<int>& cond) {
    if (x == y) return false;
    const int n = static_cast<int>(g.parents.size());
    std::vector<bool> in_cond(n, false);
    for (int c : cond) in_cond[static_cast<size_t>(c)] = true;
    if (in_cond[static_cast<size_t>(x)] || in_cond[static_cast<size_t>(y)]) return true;

    // colliders open iff they are in the conditioning set or have a
    // conditioned descendant: mark ancestors of cond (including cond)
    auto children = children_of(g);
    std::vector<bool> anc_of_cond(n, false);
    std::deque<int> queue;
    for (int c : cond) {
        anc_of_cond[static_cast<size_t>(c)] = true;
        queue.push_back(c);
    }
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int par : g.parents[static_cast<size_t>(v)])
            if (!anc_of_cond[static_cast<size_t>(par)]) {
                anc_of_cond[static_cast<size_t>(par)] = true;
                queue.push_back(par);
            }
    }

    // Reachability over active trails. State (v, into): into is true when the
    // last edge pointed at v. Moving to a child c is legal iff v is not
    // conditioned; moving to a parent is legal iff v is an open collider
    // (into && anc_of_cond) or an unconditioned pass-through (!into).
    std::set<std::pair<int, bool>> seen;
    std::deque<std::pair<int, bool>> frontier;
    for (int c : children[static_cast<size_t>(x)]) frontier.push_back({c, true});
    for (int par : g.parents[static_cast<size_t>(x)]) frontier.push_back({par, false});
    while (!frontier.empty()) {
        auto [v, into] = frontier.front();
        frontier.pop_front();
        if (v == y) return false;
        if (!seen.insert({v, into}).second) continue;

        if (!in_cond[static_cast<size_t>(v)])
            for (int c : children[static_cast<size_t>(v)]) frontier.push_back({c, true});
        const bool to_parents =
            into ? anc_of_cond[static_cast<size_t>(v)] : !in_cond[static_cast<size_t>(v)];
        if (to_parents)
            for (int par : g.parents[static_cast<size_t>(v)]) frontier.push_back({par, false});
    }
    return true;
}

bool valid_nce_nco(const FullGraph& g, int k, const VarSet& z, const VarSet& w) {
    std::vector<int> cond_ukx{k};
    for (int j = 0; j < g.q; ++j) cond_ukx.push_back(g.u(j));
    for (int zi : z) {
        if (zi == k) return false;
        if (!d_separated(g, zi, g.y(), cond_ukx)) return false;
    }
    std::vector<int> cond_u;
    for (int j = 0; j < g.q; ++j) cond_u.push_back(g.u(j));
    for (int wi : w) {
        if (wi == k) return false;
        if (!d_separated(g, wi, k, cond_u)) return false;
        for (int zi : z)
            if (!d_separated(g, wi, zi, cond_u)) return false;
    }
    return true;
}

bool quadruple_disconnected(const FullGraph& g, int k, int quad, const VarSet& z,
                            const VarSet& w) {
    std::vector<int> cond_u;
    for (int j = 0; j < g.q; ++j) cond_u.push_back(g.u(j));
    if (!d_separated(g, quad, k, cond_u)) return false;
    if (!d_separated(g, quad, g.y(), cond_u)) return false;
    for (int zi : z)
        if (!d_separated(g, quad, zi, cond_u)) return false;
    for (int wi : w)
        if (!d_separated(g, quad, wi, cond_u)) return false;
    return true;
}

bool assumption2_holds(const FullGraph& g, int k, int q) {
    VarSet others;
    for (int i = 0; i < g.p; ++i)
        if (i != k) others.push_back(i);
    const int m = static_cast<int>(others.size());
    if (m < 2 * q + 1) return false;
    for (testutil::Combinations ac(m, q); !ac.done(); ac.advance()) {
        VarSet a = testutil::pick(others, ac.positions());
        VarSet rest = testutil::without(others, a);
        for (testutil::Combinations bc(static_cast<int>(rest.size()), q); !bc.done();
             bc.advance()) {
            VarSet b = testutil::pick(rest, bc.positions());
            if (!valid_nce_nco(g, k, a, b)) continue;
            for (int quad : testutil::without(rest, b))
                if (quadruple_disconnected(g, k, quad, a, b)) return true;
        }
    }
    return false;
}

bool assumption3_holds(const FullGraph& g, int k, int q) {
    VarSet others;
    for (int i = 0; i < g.p; ++i)
        if (i != k) others.push_back(i);
    const int m = static_cast<int>(others.size());
    if (m < 2 * q + 2) return false;
    for (testutil::Combinations ac(m, q + 1); !ac.done(); ac.advance()) {
        VarSet a = testutil::pick(others, ac.positions());
        VarSet rest = testutil::without(others, a);
        for (testutil::Combinations bc(static_cast<int>(rest.size()), q + 1); !bc.done();
             bc.advance()) {
            VarSet b = testutil::pick(rest, bc.positions());
            if (valid_nce_nco(g, k, a, b)) return true;
        }
    }
    return false;
}

proxysel::LinearScm random_scm(int p, int q, double edge_prob, std::uint64_t seed,
                               double min_abs) {
    auto rng = proxysel::make_engine(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> prob(0.0, 1.0);
    auto coef = [&] {
        for (;;) {
            double v = unif(rng);
            if (std::abs(v) >= min_abs) return v;
        }
    };

    LinearScm scm;
    scm.B = Eigen::MatrixXd::Zero(p, p);
    scm.C = Eigen::MatrixXd::Zero(p, q);
    scm.beta = Eigen::VectorXd::Zero(p);
    scm.delta = Eigen::VectorXd::Zero(q);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < i; ++j)
            if (prob(rng) < edge_prob) scm.B(i, j) = coef();
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) scm.C(i, j) = coef();
    for (int i = 0; i < p; ++i)
        if (prob(rng) < 0.5) scm.beta(i) = coef();
    for (int j = 0; j < q; ++j) scm.delta(j) = coef();
    for (int i = 0; i < p; ++i) {
        scm.noise_x.push_back({NoiseKind::Gaussian, 1.0});
        scm.order.push_back(i);
    }
    for (int j = 0; j < q; ++j) scm.noise_u.push_back({NoiseKind::Gaussian, 1.0});
    scm.noise_y = {NoiseKind::Gaussian, 1.0};
    return scm;
}

proxysel::LinearScm chain6_fixture(double beta1) {
    // c = (0.8, 0.7, 0.9, 0.6, 0.8, 0.7), b21 = 0.5, b54 = 0.6, b65 = 0.7,
    // beta2 = 0.8, beta6 = 0.9, delta = 0.8
    LinearScm scm;
    scm.B = Eigen::MatrixXd::Zero(6, 6);
    scm.C = Eigen::MatrixXd::Zero(6, 1);
    scm.beta = Eigen::VectorXd::Zero(6);
    scm.delta = Eigen::VectorXd::Zero(1);
    scm.B(1, 0) = 0.5;
    scm.B(4, 3) = 0.6;
    scm.B(5, 4) = 0.7;
    scm.C << 0.8, 0.7, 0.9, 0.6, 0.8, 0.7;
    scm.beta(1) = 0.8;
    scm.beta(5) = 0.9;
    scm.beta(0) = beta1;
    scm.delta(0) = 0.8;
    for (int i = 0; i < 6; ++i) {
        scm.noise_x.push_back({NoiseKind::Gaussian, 1.0});
        scm.order.push_back(i);
    }
    scm.noise_u.push_back({NoiseKind::Gaussian, 1.0});
    scm.noise_y = {NoiseKind::Gaussian, 1.0};
    scm.names = {"X1", "X2", "X3", "X4", "X5", "X6"};
    return scm;
}

proxysel::LinearScm square_fixture(SquareVariant v, double a, double b, double c, double d,
                                   double e, double f, double beta, double g) {
    // treatment columns: 0 = Z, 1 = Xk, 2 = W
    LinearScm scm;
    scm.B = Eigen::MatrixXd::Zero(3, 3);
    scm.C = Eigen::MatrixXd::Zero(3, 1);
    scm.beta = Eigen::VectorXd::Zero(3);
    scm.delta = Eigen::VectorXd::Zero(1);
    scm.C << a, b, d;
    scm.B(1, 0) = e;  // Z -> Xk
    scm.beta(1) = beta;
    scm.beta(2) = f;  // W -> Y
    scm.delta(0) = c;
    switch (v) {
        case SquareVariant::Valid:
            break;
        case SquareVariant::NceToOutcome:
            scm.beta(0) = g;  // Z -> Y
            break;
        case SquareVariant::NcoToTreatment:
            scm.B(1, 2) = g;  // W -> Xk
            break;
    }
    for (int i = 0; i < 3; ++i) {
        scm.noise_x.push_back({NoiseKind::Exponential, 1.0});
        scm.order.push_back(i);
    }
    scm.noise_u.push_back({NoiseKind::Exponential, 1.0});
    scm.noise_y = {NoiseKind::Exponential, 1.0};
    scm.names = {"Z", "Xk", "W"};
    return scm;
}

}  // namespace oracles
