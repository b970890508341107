#pragma once

#include <algorithm>
#include <vector>

#include "proxysel/covariance.hpp"

namespace proxysel::internal {

/// k-subsets of an n-element pool in lexicographic order, as positions.
class Combinations {
public:
    Combinations(int pool_size, int k) : n_(pool_size), k_(k), pos_(k) {
        for (int i = 0; i < k; ++i) pos_[i] = i;
        done_ = k > pool_size || k <= 0;
    }
    bool done() const { return done_; }
    const std::vector<int>& positions() const { return pos_; }
    void advance() {
        int i = k_ - 1;
        while (i >= 0 && pos_[i] == n_ - k_ + i) --i;
        if (i < 0) {
            done_ = true;
            return;
        }
        ++pos_[i];
        for (int j = i + 1; j < k_; ++j) pos_[j] = pos_[j - 1] + 1;
    }

private:
    int n_, k_;
    std::vector<int> pos_;
    bool done_ = false;
};

inline VarSet pick(const VarSet& pool, const std::vector<int>& positions) {
    VarSet out;
    out.reserve(positions.size());
    for (int p : positions) out.push_back(pool[p]);
    return out;
}

inline VarSet without(const VarSet& pool, const VarSet& removed) {
    VarSet out;
    out.reserve(pool.size());
    for (int v : pool)
        if (std::find(removed.begin(), removed.end(), v) == removed.end()) out.push_back(v);
    return out;
}

inline VarSet cat(int first, const VarSet& rest) {
    VarSet out{first};
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

inline VarSet cat2(int first, int second, const VarSet& rest) {
    VarSet out{first, second};
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

}  // namespace proxysel::internal
