// counterfactual.hpp
// Total probability of an intermediate outcome reassembled from ABL
// conditionals over the possible final outcomes, under two weightings:
//
//   undisturbed  sum_l |<b_l|a>|^2               * P(c | a, b_l)
//   disturbed    sum_l sum_j Tr(P_bl P_j P_a P_j) * P(c | a, b_l)
//
// Only the second always reproduces the Born probability Tr(P_c P_a). The
// search routine looks for inputs where the first one misses it.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "ablkit/linalg.hpp"

namespace ablkit {

struct MixingReport {
    double born_total = 0.0;     // Tr(P_c P_a)
    double ss_total = 0.0;       // undisturbed weighting
    double vaidman_total = 0.0;  // disturbed weighting
    double ss_gap = 0.0;         // |born_total - ss_total|
};

// Undisturbed weighting. Final branches whose weight |<b_l|a>|^2 is at most
// tol::div contribute zero. Throws UndefinedTerm when a branch has nonzero
// weight but cannot be postselected through the observable.
double sharp_shanks_total(const Ket& a, const ObservableDecomposition& final_basis,
                          const ObservableDecomposition& observable, std::size_t branch);

// Disturbed weighting. Final branches that cannot be postselected through the
// observable contribute zero.
double vaidman_total(const Ket& a, const ObservableDecomposition& final_basis,
                     const ObservableDecomposition& observable, std::size_t branch);

MixingReport mixing_report(const Ket& a, const ObservableDecomposition& final_basis,
                           const ObservableDecomposition& observable, std::size_t branch);

struct Counterexample {
    Ket a;
    ObservableDecomposition final_basis;
    ObservableDecomposition observable;
    std::size_t branch;
    MixingReport report;
    std::uint64_t attempt;  // zero-based try index that produced it
};

struct CounterexampleSearch {
    std::size_t dim = 2;
    std::uint64_t seed = 0;
    double gap_min = 0.01;
    std::uint64_t max_tries = 1000;
    unsigned threads = 1;
    // Use the final basis itself as the intermediate observable. No
    // counterexample exists under this constraint.
    bool observable_is_final_basis = false;
};

// Draws, for try t, a Haar ket, a Haar final basis and a Haar observable basis
// from SplitMix64::substream(seed, t), and returns the result for the lowest t
// at which some branch has ss_gap > gap_min. The result does not depend on
// `threads`. Throws InvalidArgument for dim outside 2..6 or gap_min <= 0, and
// NotFound when none of the max_tries tries succeeds.
Counterexample find_counterexample(const CounterexampleSearch& params);

struct HitRate {
    std::uint64_t tries = 0;
    std::uint64_t hits = 0;
    double rate() const noexcept { return tries ? static_cast<double>(hits) / tries : 0.0; }
};

// Evaluates all max_tries tries and counts the successful ones.
HitRate counterexample_hit_rate(const CounterexampleSearch& params);

// Evaluates try t of the search in isolation.
std::optional<Counterexample> counterexample_attempt(const CounterexampleSearch& params,
                                                     std::uint64_t attempt);

}  // namespace ablkit
