// Test-only oracles, independent of the library's estimation paths: directed
// path enumeration for total effects, d-separation on the full DAG (including
// confounders), graphical proxy-validity checks, and random model generators.
#pragma once

#include <cstdint>
#include <vector>

#include "proxysel/covariance.hpp"
#include "proxysel/scm.hpp"

namespace oracles {

// Sum over all directed paths k -> ... -> Y of edge-coefficient products,
// by explicit DFS over the B edges (no matrix inversion).
double path_total_effect(const proxysel::LinearScm& scm, int k);

// Full-graph view: nodes 0..p-1 are treatments, p..p+q-1 confounders, p+q is Y.
struct FullGraph {
    int p = 0;
    int q = 0;
    std::vector<std::vector<int>> parents;  // parents[node]

    int y() const { return p + q; }
    int u(int j) const { return p + j; }
    static FullGraph from_scm(const proxysel::LinearScm& scm);
};

// d-separation of x and y given the conditioning set, via backward
// reachability over active paths.
bool d_separated(const FullGraph& g, int x, int y, const std::vector<int>& cond);

// Def.-1 proxy validity for the causal relationship Xk -> Y:
//   every z in Z satisfies Z _||_ Y | (U, Xk), and
//   every w in W satisfies W _||_ (Xk, Z) | U.
bool valid_nce_nco(const FullGraph& g, int k, const proxysel::VarSet& z,
                   const proxysel::VarSet& w);

// Quadruple-disconnected test: Q _||_ {Xk, Y, Z, W} | U elementwise.
bool quadruple_disconnected(const FullGraph& g, int k, int quad, const proxysel::VarSet& z,
                            const proxysel::VarSet& w);

// Does treatment k admit rule R1 (Assumption 2) or R2 (Assumption 3) inputs?
bool assumption2_holds(const FullGraph& g, int k, int q);
bool assumption3_holds(const FullGraph& g, int k, int q);

// Random acyclic model: q confounders (all loading every treatment), random
// B edges with probability edge_prob, coefficient magnitudes in
// [min_abs, 1]. Every treatment may or may not affect Y.
proxysel::LinearScm random_scm(int p, int q, double edge_prob, std::uint64_t seed,
                               double min_abs = 0.3);

// Fixed-coefficient 6-treatment chain graph used throughout the unit tests
// (the two variants differ by the X1 -> Y edge with coefficient beta1).
proxysel::LinearScm chain6_fixture(double beta1 = 0.0);

// Square proxy diagram: treatments (Z, Xk, W), one confounder, with edges
// U->{Z,Xk,W,Y}, Z->Xk (e), W->Y (f), Xk->Y (beta); optionally Z->Y (g, "b")
// or W->Xk (g, "c") for the violated variants.
enum class SquareVariant { Valid, NceToOutcome, NcoToTreatment };
proxysel::LinearScm square_fixture(SquareVariant v, double a, double b, double c, double d,
                                   double e, double f, double beta, double g);

}  // namespace oracles
