#pragma once

#include <cstdint>

#include "proxysel/scm.hpp"

namespace proxysel {

/// Synthetic-experiment fixtures.
///
/// Gaussian:    the 6-treatment, 1-confounder graph with standard normal
///              noises (edges U->X1..X6, U->Y, X1->X2, X4->X5, X5->X6,
///              X2->Y, X6->Y).
/// NonGaussian: the same graph with X3 removed and standard exponential
///              noises; treatment labels keep their original names
///              (X1, X2, X4, X5, X6).
/// Mixture:     the Gaussian graph with each noise kind drawn at random
///              from {Gaussian, Exponential}.
/// AppendixA:   one treatment of interest plus q NCE proxies Z1..Zq and q NCO
///              proxies W1..Wq, all loaded by q confounders; Gaussian noise.
enum class PaperCase { Gaussian, NonGaussian, Mixture, AppendixA };

std::string to_string(PaperCase c);
PaperCase paper_case_from_string(const std::string& s);

struct FixtureOptions {
    /// Coefficients are drawn Uniform[-1,1]; draws with |value| below this
    /// threshold are rejected and redrawn. 0 disables the rejection.
    double min_abs_coef = 0.3;

    /// Redraw the whole coefficient set until the model keeps a
    /// strong-rank-faithfulness margin: every rank (or loading) deficiency
    /// probed by the selection rules is either exactly entailed by the graph
    /// or bounded away from zero, so finite-sample tests at the benchmark
    /// sample sizes see a detectable signal. Disabled together with
    /// min_abs_coef when fidelity to raw Uniform[-1,1] draws is wanted.
    bool margin_rejection = true;

    /// Confounder standard deviation (all confounders).
    double confounder_scale = 1.0;

    /// Number of confounders for the AppendixA case (1..4).
    int appendix_q = 1;
};

/// Build the named fixture with freshly drawn coefficients. Deterministic
/// given `seed`.
LinearScm paper_graph(PaperCase c, std::uint64_t seed, const FixtureOptions& opts = {});

}  // namespace proxysel
