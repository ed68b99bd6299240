// simulator.hpp
// Seeded Monte Carlo of the measurement sequence
//
//   prepare |a>  ->  [measure the observable, Lueders collapse]  ->
//   measure in the basis {|b>, completion}  ->  keep the run iff the result is b
//
// Trial k draws from SplitMix64::substream(seed, k), so statistics are
// bit-identical for any number of worker threads.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ablkit/abl.hpp"
#include "ablkit/linalg.hpp"
#include "ablkit/random.hpp"

namespace ablkit {

struct TrialRecord {
    std::optional<std::size_t> intermediate_branch;
    std::size_t final_branch = 0;  // 0 is |b>
    bool postselected = false;
};

// The prepare/measure/postselect pipeline for one context. Born weights and
// collapsed states are computed once at construction.
class MeasurementChain {
public:
    MeasurementChain(PrePostContext ctx, std::optional<ObservableDecomposition> observable);

    const PrePostContext& context() const noexcept { return ctx_; }
    const std::optional<ObservableDecomposition>& observable() const noexcept { return obs_; }
    // {|b>, completion...}; completion by Gram-Schmidt over canonical vectors.
    const std::vector<Ket>& final_basis() const noexcept { return final_basis_; }

    TrialRecord run_trial(SplitMix64& rng) const;

private:
    PrePostContext ctx_;
    std::optional<ObservableDecomposition> obs_;
    std::vector<Ket> final_basis_;
    std::vector<double> intermediate_weights_;
    // Final-basis Born weights for each intermediate branch (or a single row
    // when nothing is measured in between).
    std::vector<std::vector<double>> final_weights_;
};

TrialRecord run_trial(const PrePostContext& ctx, const std::optional<ObservableDecomposition>& observable,
                      SplitMix64& rng);

struct EnsembleStats {
    std::uint64_t trials = 0;
    std::uint64_t postselected_count = 0;
    std::vector<std::uint64_t> counts;   // postselected runs per branch
    std::vector<double> conditional_freq;
    std::vector<double> std_error;       // sqrt(f (1 - f) / postselected_count)

    bool operator==(const EnsembleStats&) const = default;
};

struct PostselectionEstimate {
    std::uint64_t trials = 0;
    std::uint64_t postselected_count = 0;
    double fraction = 0.0;
    double std_error = 0.0;  // sqrt(f (1 - f) / trials)

    bool operator==(const PostselectionEstimate&) const = default;
};

// Throws InvalidArgument for trials == 0 and NoPostselectedTrials when no run
// survives postselection.
EnsembleStats estimate_abl(const PrePostContext& ctx, const ObservableDecomposition& observable,
                           std::uint64_t trials, std::uint64_t seed, unsigned threads = 1);

// Throws InvalidArgument for trials == 0.
PostselectionEstimate estimate_final_probability(
    const PrePostContext& ctx, const std::optional<ObservableDecomposition>& observable,
    std::uint64_t trials, std::uint64_t seed, unsigned threads = 1);

// (freq - target) / stderr, or 0 when both the deviation and stderr vanish.
double z_score(double freq, double target, double std_error);

}  // namespace ablkit
