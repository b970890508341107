#pragma once

#include <algorithm>
#include <vector>

#include "proxysel/covariance.hpp"

namespace testutil {

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

inline proxysel::VarSet pick(const proxysel::VarSet& pool, const std::vector<int>& positions) {
    proxysel::VarSet out;
    for (int p : positions) out.push_back(pool[p]);
    return out;
}

inline proxysel::VarSet without(const proxysel::VarSet& pool, const proxysel::VarSet& removed) {
    proxysel::VarSet out;
    for (int v : pool)
        if (std::find(removed.begin(), removed.end(), v) == removed.end()) out.push_back(v);
    return out;
}

}  // namespace testutil
