#include "proxysel/selection.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include "internal/subsets.hpp"
#include "proxysel/errors.hpp"
#include "proxysel/parallel.hpp"

#include <nlohmann/json.hpp>

namespace proxysel {

using internal::cat;
using internal::cat2;
using internal::Combinations;
using internal::pick;
using internal::without;

std::string to_string(SelectionRule r) {
    switch (r) {
        case SelectionRule::R1:
            return "R1";
        case SelectionRule::R2:
            return "R2";
        case SelectionRule::R3:
            return "R3";
    }
    return "?";
}

namespace {

void require_disjoint(int k, const VarSet& a, const VarSet& b, const int* quad_nc) {
    auto contains = [](const VarSet& s, int v) {
        return std::find(s.begin(), s.end(), v) != s.end();
    };
    if (contains(a, k) || contains(b, k)) throw ConfigError("treatment overlaps a proxy set");
    for (int v : a)
        if (contains(b, v)) throw ConfigError("NCE and NCO candidate sets overlap");
    if (quad_nc) {
        if (*quad_nc == k || contains(a, *quad_nc) || contains(b, *quad_nc))
            throw ConfigError("quadruple-disconnected candidate overlaps");
    }
}

// Decision backend: rank tests (statistical or oracle) plus the optional
// Remark-3 screen and the estimator, all over one covariance source.
struct SearchBackend {
    int p = 0;
    int y = 0;
    std::function<bool(const VarSet& rows, const VarSet& cols, int r)> rank_accepts;
    std::function<bool(const VarSet& zs, const VarSet& ys)> gin_accepts;  // R3 only
    std::function<bool(int k, const VarSet& z, const VarSet& w)> screen;
    std::function<EffectEstimate(int k, const VarSet& z, const VarSet& w)> estimate;
};

TreatmentSelection search_rank_one(const SearchBackend& be, int k, int q) {
    TreatmentSelection sel;
    sel.treatment = k;
    auto t0 = std::chrono::steady_clock::now();

    VarSet others;
    for (int i = 0; i < be.p; ++i)
        if (i != k) others.push_back(i);
    const int m = static_cast<int>(others.size());

    const bool r1_possible = m >= 2 * q + 1;
    const bool r2_possible = m >= 2 * q + 2;

    if (r1_possible) {
        for (Combinations ac(m, q); !ac.done() && sel.status == SelectionStatus::NA; ac.advance()) {
            VarSet a = pick(others, ac.positions());
            VarSet rest = without(others, a);
            const int mr = static_cast<int>(rest.size());
            for (Combinations bc(mr, q); !bc.done() && sel.status == SelectionStatus::NA;
                 bc.advance()) {
                VarSet b = pick(rest, bc.positions());
                for (int quad : without(rest, b)) {
                    ++sel.candidates_tested;
                    if (!be.rank_accepts(cat2(k, quad, a), cat2(k, be.y, b), q + 1)) continue;
                    if (!be.rank_accepts(cat(k, a), cat(quad, b), q)) continue;
                    if (be.screen && !be.screen(k, a, b)) continue;
                    EffectEstimate est = be.estimate(k, a, b);
                    if (!est.value) continue;  // degenerate denominator: keep searching
                    sel.status = SelectionStatus::Found;
                    sel.rule = SelectionRule::R1;
                    sel.nce = a;
                    sel.nco = b;
                    sel.quad_nc = quad;
                    sel.effect = std::move(est);
                    break;
                }
            }
        }
    }

    if (sel.status == SelectionStatus::NA && r2_possible) {
        for (Combinations ac(m, q + 1); !ac.done() && sel.status == SelectionStatus::NA;
             ac.advance()) {
            VarSet a = pick(others, ac.positions());
            VarSet rest = without(others, a);
            const int mr = static_cast<int>(rest.size());
            for (Combinations bc(mr, q + 1); !bc.done(); bc.advance()) {
                VarSet b = pick(rest, bc.positions());
                ++sel.candidates_tested;
                if (!be.rank_accepts(cat(k, a), cat2(k, be.y, b), q + 1)) continue;
                if (!be.rank_accepts(cat(k, a), b, q)) continue;
                // R2 certifies sets of size q+1; the estimator consumes the
                // first q elements (subsets of valid proxy sets stay valid).
                VarSet aq(a.begin(), a.begin() + q);
                VarSet bq(b.begin(), b.begin() + q);
                if (be.screen && !be.screen(k, aq, bq)) continue;
                EffectEstimate est = be.estimate(k, aq, bq);
                if (!est.value) continue;
                sel.status = SelectionStatus::Found;
                sel.rule = SelectionRule::R2;
                sel.nce = a;
                sel.nco = b;
                sel.effect = std::move(est);
                break;
            }
        }
    }

    if (sel.status == SelectionStatus::NA) {
        sel.effect.treatment = k;
        sel.na_reason = (!r1_possible && !r2_possible) ? "insufficient treatments"
                                                       : "no candidate passed";
        sel.effect.na_reason = sel.na_reason;
    }
    sel.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sel;
}

TreatmentSelection search_gin_one(const SearchBackend& be, int k, int q) {
    TreatmentSelection sel;
    sel.treatment = k;
    auto t0 = std::chrono::steady_clock::now();

    VarSet others;
    for (int i = 0; i < be.p; ++i)
        if (i != k) others.push_back(i);
    const int m = static_cast<int>(others.size());

    if (m >= 2 * q) {
        for (Combinations ac(m, q); !ac.done() && sel.status == SelectionStatus::NA; ac.advance()) {
            VarSet a = pick(others, ac.positions());
            VarSet rest = without(others, a);
            const int mr = static_cast<int>(rest.size());
            for (Combinations bc(mr, q); !bc.done(); bc.advance()) {
                VarSet b = pick(rest, bc.positions());
                ++sel.candidates_tested;
                if (!be.gin_accepts(cat(k, a), cat2(k, be.y, b))) continue;
                if (!be.gin_accepts(b, cat(k, a))) continue;
                if (be.screen && !be.screen(k, a, b)) continue;
                EffectEstimate est = be.estimate(k, a, b);
                if (!est.value) continue;
                sel.status = SelectionStatus::Found;
                sel.rule = SelectionRule::R3;
                sel.nce = a;
                sel.nco = b;
                sel.effect = std::move(est);
                break;
            }
        }
        if (sel.status == SelectionStatus::NA) sel.na_reason = "no candidate passed";
    } else {
        sel.na_reason = "insufficient treatments";
    }

    if (sel.status == SelectionStatus::NA) {
        sel.effect.treatment = k;
        sel.effect.na_reason = sel.na_reason;
    }
    sel.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sel;
}

// Per-treatment gram cache for the GIN search: the Z-side kernel depends only
// on the column set, so it is shared across candidate pairs.
struct GinEvaluator {
    const Dataset& data;
    const Eigen::MatrixXd& sigma;
    double alpha;
    HsicOptions opts;
    std::vector<long> rows;
    std::map<VarSet, Eigen::MatrixXd> z_cache;

    GinEvaluator(const Dataset& d, const Eigen::MatrixXd& s, double al, const HsicOptions& o)
        : data(d), sigma(s), alpha(al), opts(o), rows(detail::hsic_subsample_rows(d.n(), o)) {}

    Eigen::MatrixXd subcols(const VarSet& cols) const {
        Eigen::MatrixXd out(rows.size(), cols.size());
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t c = 0; c < cols.size(); ++c) out(i, c) = data.values(rows[i], cols[c]);
        return out;
    }

    const Eigen::MatrixXd& z_gram(const VarSet& cols) {
        VarSet key = cols;
        std::sort(key.begin(), key.end());
        auto it = z_cache.find(key);
        if (it != z_cache.end()) return it->second;
        if (z_cache.size() >= 6) z_cache.clear();  // bound kernel memory
        return z_cache.emplace(key, detail::rbf_gram(subcols(key), opts.median_cap)).first->second;
    }

    bool accepts(const VarSet& zs, const VarSet& ys) {
        Eigen::VectorXd omega = estimate_omega(sigma, ys, zs);
        Eigen::MatrixXd ymat = subcols(ys);
        Eigen::MatrixXd u = ymat * omega;
        Eigen::MatrixXd ku = detail::rbf_gram(u, opts.median_cap);
        auto outcome = detail::hsic_from_grams(ku, z_gram(zs), opts);
        return outcome.p_value > alpha;
    }
};

SelectionReport run_search(const Dataset& data, int q, double alpha, const SelectionOptions& opts,
                           bool gin_mode) {
    if (q < 1) throw ConfigError("selection needs q >= 1");
    if (data.p() < 1) throw ConfigError("dataset has no treatments");
    if (gin_mode && data.n() < kProxyGinMinSamples)
        throw ConfigError("insufficient samples for HSIC");

    const Eigen::MatrixXd sigma = sample_covariance(data);
    const long n = data.n();
    const int p = data.p();
    const int y = data.y_index();

    SelectionReport report;
    report.q = q;
    report.alpha = alpha;
    report.method = gin_mode ? "gin" : "rank";
    report.treatments.resize(p);

    const int threads = resolve_thread_count(opts.threads);
    parallel_for(p, threads, [&](long k) {
        SearchBackend be;
        be.p = p;
        be.y = y;
        be.rank_accepts = [&](const VarSet& rows, const VarSet& cols, int r) {
            return cca_rank_test(sigma, n, rows, cols, r, alpha).accepted;
        };
        be.estimate = [&](int kk, const VarSet& z, const VarSet& w) {
            return extended_proxy_estimate(sigma, kk, z, w);
        };
        if (opts.full_rank_screen)
            be.screen = [&](int kk, const VarSet& z, const VarSet& w) {
                // statistically nonsingular denominator: "rank <= q" rejected
                // for Sigma_{{Xk,Z},{Xk,W}} (the numerator determinant is
                // proportional to the effect itself and may legitimately
                // vanish, so only the denominator is screened here)
                const int qq = static_cast<int>(z.size());
                return !cca_rank_test(sigma, n, cat(kk, z), cat(kk, w), qq, alpha).accepted;
            };
        TreatmentSelection sel;
        if (gin_mode) {
            GinEvaluator ge(data, sigma, alpha, opts.hsic);
            be.gin_accepts = [&ge](const VarSet& zs, const VarSet& ys) {
                return ge.accepts(zs, ys);
            };
            sel = search_gin_one(be, static_cast<int>(k), q);
        } else {
            sel = search_rank_one(be, static_cast<int>(k), q);
        }
        sel.name = data.names[static_cast<size_t>(k)];
        report.treatments[static_cast<size_t>(k)] = std::move(sel);
    });
    return report;
}

}  // namespace

bool rule_r1(const Dataset& data, int k, const VarSet& a, const VarSet& b, int quad_nc, int q,
             double alpha) {
    if (static_cast<int>(a.size()) != q || static_cast<int>(b.size()) != q)
        throw ConfigError("rule R1 needs |A| = |B| = q");
    require_disjoint(k, a, b, &quad_nc);
    const int y = data.y_index();
    if (!cca_rank_test(data, cat2(k, quad_nc, a), cat2(k, y, b), q + 1, alpha).accepted)
        return false;
    return cca_rank_test(data, cat(k, a), cat(quad_nc, b), q, alpha).accepted;
}

bool rule_r2(const Dataset& data, int k, const VarSet& a, const VarSet& b, int q, double alpha) {
    if (q < 1) throw ConfigError("rule R2 needs q >= 1");
    if (static_cast<int>(a.size()) != q + 1 || static_cast<int>(b.size()) != q + 1)
        throw ConfigError("rule R2 needs |A| = |B| = q + 1");
    require_disjoint(k, a, b, nullptr);
    const int y = data.y_index();
    if (!cca_rank_test(data, cat(k, a), cat2(k, y, b), q + 1, alpha).accepted) return false;
    return cca_rank_test(data, cat(k, a), b, q, alpha).accepted;
}

bool rule_r3(const Dataset& data, int k, const VarSet& a, const VarSet& b, double alpha,
             const HsicOptions& opts) {
    if (a.size() != b.size() || a.empty()) throw ConfigError("rule R3 needs |A| = |B| = q >= 1");
    require_disjoint(k, a, b, nullptr);
    const int y = data.y_index();
    GinResult g1 = gin_holds(data, cat(k, a), cat2(k, y, b), alpha, opts);
    if (!g1.holds) return false;
    GinResult g2 = gin_holds(data, b, cat(k, a), alpha, opts);
    return g2.holds;
}

SelectionReport proxy_rank(const Dataset& data, int q, double alpha, const SelectionOptions& opts) {
    return run_search(data, q, alpha, opts, /*gin_mode=*/false);
}

SelectionReport proxy_gin(const Dataset& data, int q, double alpha, const SelectionOptions& opts) {
    return run_search(data, q, alpha, opts, /*gin_mode=*/true);
}

SelectionReport proxy_rank_oracle(const Eigen::MatrixXd& sigma, int q, double tol) {
    if (q < 1) throw ConfigError("selection needs q >= 1");
    const int p = static_cast<int>(sigma.cols()) - 1;
    const int y = p;

    SelectionReport report;
    report.q = q;
    report.alpha = 0.0;
    report.method = "oracle-rank";
    report.treatments.resize(p);

    SearchBackend be;
    be.p = p;
    be.y = y;
    be.rank_accepts = [&](const VarSet& rows, const VarSet& cols, int r) {
        return numeric_rank(cov_block(sigma, rows, cols), tol) <= r;
    };
    be.screen = [&](int k, const VarSet& z, const VarSet& w) {
        const int qq = static_cast<int>(z.size());
        return numeric_rank(cov_block(sigma, cat(k, z), cat(k, w)), tol) == qq + 1;
    };
    be.estimate = [&](int k, const VarSet& z, const VarSet& w) {
        return extended_proxy_estimate(sigma, k, z, w);
    };

    for (int k = 0; k < p; ++k) {
        TreatmentSelection sel = search_rank_one(be, k, q);
        sel.name = "X" + std::to_string(k + 1);
        report.treatments[static_cast<size_t>(k)] = std::move(sel);
    }
    return report;
}

std::string report_to_json(const SelectionReport& report, bool include_timing) {
    nlohmann::json j;
    j["method"] = report.method;
    j["q"] = report.q;
    j["alpha"] = report.alpha;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : report.treatments) {
        nlohmann::json tj;
        tj["index"] = t.treatment;
        tj["name"] = t.name;
        tj["status"] = t.status == SelectionStatus::Found ? "found" : "na";
        tj["rule"] = t.rule ? nlohmann::json(to_string(*t.rule)) : nlohmann::json(nullptr);
        tj["nce"] = t.nce;
        tj["nco"] = t.nco;
        tj["quad_nc"] = t.quad_nc ? nlohmann::json(*t.quad_nc) : nlohmann::json(nullptr);
        nlohmann::json ej;
        ej["value"] = t.effect.value ? nlohmann::json(*t.effect.value) : nlohmann::json(nullptr);
        ej["method"] = to_string(t.effect.method);
        ej["nce"] = t.effect.nce;
        ej["nco"] = t.effect.nco;
        ej["denominator_det"] = t.effect.denominator_det;
        if (!t.effect.na_reason.empty()) ej["na_reason"] = t.effect.na_reason;
        tj["effect"] = ej;
        tj["candidates_tested"] = t.candidates_tested;
        if (include_timing) tj["elapsed_seconds"] = t.elapsed_seconds;
        if (!t.na_reason.empty()) tj["na_reason"] = t.na_reason;
        arr.push_back(tj);
    }
    j["treatments"] = arr;
    return j.dump(2);
}

}  // namespace proxysel
