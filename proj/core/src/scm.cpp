#include "proxysel/scm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "proxysel/errors.hpp"
#include "proxysel/rng.hpp"

#include <nlohmann/json.hpp>

namespace proxysel {

double NoiseSpec::variance() const {
    switch (kind) {
        case NoiseKind::Gaussian:
            return scale * scale;
        case NoiseKind::Exponential:
            return scale * scale;  // Exp(1/scale) has sd == mean == scale
        case NoiseKind::Uniform:
            return scale * scale / 3.0;
    }
    return 0.0;
}

double NoiseSpec::draw(std::mt19937_64& rng) const {
    switch (kind) {
        case NoiseKind::Gaussian: {
            std::normal_distribution<double> d(0.0, scale);
            return d(rng);
        }
        case NoiseKind::Exponential: {
            std::exponential_distribution<double> d(1.0 / scale);
            return d(rng) - scale;  // centered: theoretical mean subtracted
        }
        case NoiseKind::Uniform: {
            std::uniform_real_distribution<double> d(-scale, scale);
            return d(rng);
        }
    }
    return 0.0;
}

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::Gaussian:
            return "gaussian";
        case NoiseKind::Exponential:
            return "exponential";
        case NoiseKind::Uniform:
            return "uniform";
    }
    return "?";
}

NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "gaussian") return NoiseKind::Gaussian;
    if (s == "exponential") return NoiseKind::Exponential;
    if (s == "uniform") return NoiseKind::Uniform;
    throw ConfigError("unknown noise kind: " + s);
}

void LinearScm::validate() const {
    const int np = p();
    const int nq = q();
    if (np <= 0 || nq <= 0) throw ModelError("model needs p >= 1 treatments and q >= 1 confounders");
    if (B.rows() != np || B.cols() != np) throw ModelError("B must be p x p");
    if (C.rows() != np) throw ModelError("C must be p x q");
    if (beta.size() != np) throw ModelError("beta must have length p");
    if (delta.size() != nq) throw ModelError("delta must have length q");
    if (noise_x.size() != static_cast<size_t>(np) || noise_u.size() != static_cast<size_t>(nq))
        throw ModelError("noise spec counts must match p and q");
    if (order.size() != static_cast<size_t>(np)) throw ModelError("order must list all p treatments");
    if (!names.empty() && names.size() != static_cast<size_t>(np))
        throw ModelError("names must be empty or list all p treatments");

    std::vector<int> pos(np, -1);
    for (int i = 0; i < np; ++i) {
        int v = order[i];
        if (v < 0 || v >= np || pos[v] != -1) throw ModelError("order is not a permutation");
        pos[v] = i;
    }
    // acyclicity: B[i][j] != 0 requires j earlier than i in the ordering
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j)
            if (B(i, j) != 0.0 && pos[j] >= pos[i])
                throw ModelError("B is not strictly lower triangular under the given order");

    for (const auto& s : noise_x)
        if (!(s.scale > 0)) throw ModelError("noise scales must be positive");
    for (const auto& s : noise_u)
        if (!(s.scale > 0)) throw ModelError("noise scales must be positive");
    if (!(noise_y.scale > 0)) throw ModelError("noise scales must be positive");

    if (!relaxed) {
        if ((C.array() == 0.0).any()) throw ModelError("strict model requires all C entries nonzero");
        if ((delta.array() == 0.0).any())
            throw ModelError("strict model requires all delta entries nonzero");
    }
}

Dataset Dataset::from_raw(Eigen::MatrixXd vals, std::vector<std::string> colnames) {
    if (vals.rows() < 2) throw ModelError("dataset needs n >= 2 rows");
    if (vals.cols() < 2) throw ModelError("dataset needs at least one treatment and the outcome");
    if (colnames.size() != static_cast<size_t>(vals.cols()))
        throw ModelError("column name count mismatch");
    if (!vals.allFinite()) throw GenerationError("dataset contains non-finite values");
    vals.rowwise() -= vals.colwise().mean();
    return Dataset{std::move(vals), std::move(colnames)};
}

SampleDraw sample_with_confounders(const LinearScm& scm, long n, std::uint64_t seed) {
    scm.validate();
    if (n < 2) throw ModelError("sample needs n >= 2");
    const int p = scm.p();
    const int q = scm.q();

    auto rng = make_engine(seed);
    Eigen::MatrixXd u(n, q);
    for (long r = 0; r < n; ++r)
        for (int j = 0; j < q; ++j) u(r, j) = scm.noise_u[j].draw(rng);

    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd y(n);
    std::vector<double> xrow(p);
    for (long r = 0; r < n; ++r) {
        // realize the recursion X = BX + CU + eps in topological order
        for (int idx : scm.order) {
            double v = scm.noise_x[idx].draw(rng);
            for (int j = 0; j < q; ++j) v += scm.C(idx, j) * u(r, j);
            for (int j = 0; j < p; ++j)
                if (scm.B(idx, j) != 0.0) v += scm.B(idx, j) * xrow[j];
            xrow[idx] = v;
        }
        for (int j = 0; j < p; ++j) x(r, j) = xrow[j];
        double ypart = scm.noise_y.draw(rng);
        for (int j = 0; j < p; ++j) ypart += scm.beta(j) * xrow[j];
        for (int j = 0; j < q; ++j) ypart += scm.delta(j) * u(r, j);
        y(r) = ypart;
    }

    std::vector<std::string> names = scm.names;
    if (names.empty())
        for (int j = 1; j <= p; ++j) names.push_back("X" + std::to_string(j));
    for (int j = 0; j < p; ++j)
        if (!x.col(j).allFinite())
            throw GenerationError("sampling produced non-finite values for " + names[j]);
    if (!y.allFinite()) throw GenerationError("sampling produced non-finite values for Y");

    Eigen::MatrixXd all(n, p + 1);
    all.leftCols(p) = x;
    all.col(p) = y;
    names.push_back("Y");

    u.rowwise() -= u.colwise().mean();
    return SampleDraw{Dataset::from_raw(std::move(all), std::move(names)), std::move(u)};
}

Dataset sample(const LinearScm& scm, long n, std::uint64_t seed) {
    return sample_with_confounders(scm, n, seed).data;
}

Eigen::MatrixXd noise_loadings(const LinearScm& scm) {
    scm.validate();
    const int p = scm.p();
    const int q = scm.q();

    Eigen::MatrixXd ib = Eigen::MatrixXd::Identity(p, p) - scm.B;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(ib);
    if (!lu.isInvertible()) throw ModelError("(I - B) is singular");
    Eigen::MatrixXd inv = lu.inverse();

    // mixing of the noise vector (eps_X, U, eps_Y) into (X, Y)
    Eigen::MatrixXd m(p + 1, p + q + 1);
    m.setZero();
    m.block(0, 0, p, p) = inv;
    m.block(0, p, p, q) = inv * scm.C;
    m.block(p, 0, 1, p) = scm.beta.transpose() * inv;
    m.block(p, p, 1, q) = scm.beta.transpose() * inv * scm.C + scm.delta.transpose();
    m(p, p + q) = 1.0;

    Eigen::VectorXd sd(p + q + 1);
    for (int i = 0; i < p; ++i) sd(i) = std::sqrt(scm.noise_x[i].variance());
    for (int j = 0; j < q; ++j) sd(p + j) = std::sqrt(scm.noise_u[j].variance());
    sd(p + q) = std::sqrt(scm.noise_y.variance());
    return m * sd.asDiagonal();
}

Eigen::MatrixXd population_covariance(const LinearScm& scm) {
    Eigen::MatrixXd l = noise_loadings(scm);
    return l * l.transpose();
}

double total_effect(const LinearScm& scm, int k) {
    scm.validate();
    const int p = scm.p();
    if (k < 0 || k >= p) throw ConfigError("treatment index out of range");
    Eigen::MatrixXd ib = Eigen::MatrixXd::Identity(p, p) - scm.B;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(ib);
    if (!lu.isInvertible()) throw ModelError("(I - B) is singular");
    Eigen::VectorXd col = lu.inverse().col(k);
    return scm.beta.dot(col);
}

namespace {

nlohmann::json noise_to_json(const NoiseSpec& s) {
    return nlohmann::json{{"kind", to_string(s.kind)}, {"scale", s.scale}};
}

NoiseSpec noise_from_json(const nlohmann::json& j) {
    NoiseSpec s;
    s.kind = noise_kind_from_string(j.at("kind").get<std::string>());
    s.scale = j.at("scale").get<double>();
    return s;
}

std::vector<double> row_major(const Eigen::MatrixXd& m) {
    std::vector<double> out;
    out.reserve(m.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
    return out;
}

}  // namespace

std::string scm_to_json(const LinearScm& scm) {
    nlohmann::json j;
    j["p"] = scm.p();
    j["q"] = scm.q();
    j["B"] = row_major(scm.B);
    j["C"] = row_major(scm.C);
    j["beta"] = std::vector<double>(scm.beta.data(), scm.beta.data() + scm.beta.size());
    j["delta"] = std::vector<double>(scm.delta.data(), scm.delta.data() + scm.delta.size());
    nlohmann::json nx = nlohmann::json::array();
    for (const auto& s : scm.noise_x) nx.push_back(noise_to_json(s));
    nlohmann::json nu = nlohmann::json::array();
    for (const auto& s : scm.noise_u) nu.push_back(noise_to_json(s));
    j["noise"] = {{"x", nx}, {"u", nu}, {"y", noise_to_json(scm.noise_y)}};
    j["order"] = scm.order;
    j["names"] = scm.names;
    j["relaxed"] = scm.relaxed;
    return j.dump(2);
}

LinearScm scm_from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid SCM JSON: ") + e.what());
    }
    try {
        const int p = j.at("p").get<int>();
        const int q = j.at("q").get<int>();
        LinearScm scm;
        auto fill = [](Eigen::MatrixXd& m, const std::vector<double>& v, int rows, int cols) {
            if (v.size() != static_cast<size_t>(rows) * cols)
                throw ParseError("matrix size mismatch in SCM JSON");
            m.resize(rows, cols);
            for (int i = 0; i < rows; ++i)
                for (int c = 0; c < cols; ++c) m(i, c) = v[static_cast<size_t>(i) * cols + c];
        };
        fill(scm.B, j.at("B").get<std::vector<double>>(), p, p);
        fill(scm.C, j.at("C").get<std::vector<double>>(), p, q);
        auto bv = j.at("beta").get<std::vector<double>>();
        auto dv = j.at("delta").get<std::vector<double>>();
        scm.beta = Eigen::Map<Eigen::VectorXd>(bv.data(), static_cast<Eigen::Index>(bv.size()));
        scm.delta = Eigen::Map<Eigen::VectorXd>(dv.data(), static_cast<Eigen::Index>(dv.size()));
        for (const auto& s : j.at("noise").at("x")) scm.noise_x.push_back(noise_from_json(s));
        for (const auto& s : j.at("noise").at("u")) scm.noise_u.push_back(noise_from_json(s));
        scm.noise_y = noise_from_json(j.at("noise").at("y"));
        scm.order = j.at("order").get<std::vector<int>>();
        if (j.contains("names")) scm.names = j.at("names").get<std::vector<std::string>>();
        if (j.contains("relaxed")) scm.relaxed = j.at("relaxed").get<bool>();
        scm.validate();
        return scm;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid SCM JSON: ") + e.what());
    }
}

LinearScm load_scm_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return scm_from_json_string(ss.str());
}

void save_scm_json(const LinearScm& scm, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << scm_to_json(scm) << '\n';
}

}  // namespace proxysel
