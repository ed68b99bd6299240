#include "ablkit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "ablkit/errors.hpp"

namespace ablkit {

namespace {

std::vector<double> weights_over(const std::vector<Ket>& basis, const Ket& state) {
    std::vector<double> w;
    w.reserve(basis.size());
    for (const auto& e : basis) {
        // Rounding residue on orthogonal directions is not a possible outcome.
        const double p = std::norm(inner(e, state));
        w.push_back(p > tol::div ? p : 0.0);
    }
    return w;
}

// Runs trials [0, trials) split into contiguous chunks, one per worker, and
// sums the per-worker tallies. Tally must be default-constructible and
// support +=.
template <typename Tally, typename Body>
Tally parallel_tally(std::uint64_t trials, unsigned threads, const Tally& zero, Body body) {
    const unsigned workers =
        static_cast<unsigned>(std::clamp<std::uint64_t>(threads, 1, std::max<std::uint64_t>(trials, 1)));
    std::vector<Tally> partial(workers, zero);
    auto run = [&](unsigned w) {
        const std::uint64_t begin = trials * w / workers;
        const std::uint64_t end = trials * (w + 1) / workers;
        for (std::uint64_t t = begin; t < end; ++t) body(t, partial[w]);
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }
    Tally total = zero;
    for (const auto& p : partial) total += p;
    return total;
}

struct BranchTally {
    std::uint64_t postselected = 0;
    std::vector<std::uint64_t> counts;

    BranchTally& operator+=(const BranchTally& o) {
        postselected += o.postselected;
        for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += o.counts[k];
        return *this;
    }
};

}  // namespace

MeasurementChain::MeasurementChain(PrePostContext ctx, std::optional<ObservableDecomposition> observable)
    : ctx_(std::move(ctx)), obs_(std::move(observable)) {
    const Ket seed[] = {ctx_.post()};
    final_basis_ = complete_basis(seed);

    if (!obs_) {
        final_weights_.push_back(weights_over(final_basis_, ctx_.pre()));
        return;
    }
    if (obs_->dim() != ctx_.dim()) {
        throw DimensionMismatch("context has dimension " + std::to_string(ctx_.dim()) +
                                ", observable has " + std::to_string(obs_->dim()));
    }
    intermediate_weights_ = born_distribution(ctx_.pre(), *obs_);
    for (std::size_t j = 0; j < obs_->size(); ++j) {
        // Branches that never occur get an empty row; sample_index skips them.
        if (!(intermediate_weights_[j] > tol::div)) {
            intermediate_weights_[j] = 0.0;
            final_weights_.emplace_back();
            continue;
        }
        try {
            const Ket collapsed = luders_update(ctx_.pre(), (*obs_)[j].projector);
            final_weights_.push_back(weights_over(final_basis_, collapsed));
        } catch (const ZeroProjection&) {
            intermediate_weights_[j] = 0.0;
            final_weights_.emplace_back();
        }
    }
}

TrialRecord MeasurementChain::run_trial(SplitMix64& rng) const {
    TrialRecord rec;
    std::size_t row = 0;
    if (obs_) {
        row = sample_index(intermediate_weights_, rng.uniform());
        rec.intermediate_branch = row;
    }
    rec.final_branch = sample_index(final_weights_[row], rng.uniform());
    rec.postselected = rec.final_branch == 0;
    return rec;
}

TrialRecord run_trial(const PrePostContext& ctx, const std::optional<ObservableDecomposition>& observable,
                      SplitMix64& rng) {
    return MeasurementChain(ctx, observable).run_trial(rng);
}

EnsembleStats estimate_abl(const PrePostContext& ctx, const ObservableDecomposition& observable,
                           std::uint64_t trials, std::uint64_t seed, unsigned threads) {
    if (trials == 0) throw InvalidArgument("trials must be at least 1");
    const MeasurementChain chain(ctx, observable);
    const BranchTally zero{0, std::vector<std::uint64_t>(observable.size(), 0)};
    const BranchTally tally = parallel_tally(trials, threads, zero, [&](std::uint64_t t, BranchTally& acc) {
        auto rng = SplitMix64::substream(seed, t);
        const TrialRecord rec = chain.run_trial(rng);
        if (!rec.postselected) return;
        ++acc.postselected;
        ++acc.counts[*rec.intermediate_branch];
    });

    if (tally.postselected == 0) {
        throw NoPostselectedTrials("none of " + std::to_string(trials) +
                                   " trials ended in the postselected state");
    }
    EnsembleStats s;
    s.trials = trials;
    s.postselected_count = tally.postselected;
    s.counts = tally.counts;
    const double n = static_cast<double>(tally.postselected);
    for (auto c : tally.counts) {
        const double f = static_cast<double>(c) / n;
        s.conditional_freq.push_back(f);
        s.std_error.push_back(std::sqrt(f * (1.0 - f) / n));
    }
    return s;
}

PostselectionEstimate estimate_final_probability(
    const PrePostContext& ctx, const std::optional<ObservableDecomposition>& observable,
    std::uint64_t trials, std::uint64_t seed, unsigned threads) {
    if (trials == 0) throw InvalidArgument("trials must be at least 1");
    const MeasurementChain chain(ctx, observable);
    const std::uint64_t hits = parallel_tally(trials, threads, std::uint64_t{0},
                                              [&](std::uint64_t t, std::uint64_t& acc) {
                                                  auto rng = SplitMix64::substream(seed, t);
                                                  if (chain.run_trial(rng).postselected) ++acc;
                                              });
    PostselectionEstimate e;
    e.trials = trials;
    e.postselected_count = hits;
    e.fraction = static_cast<double>(hits) / static_cast<double>(trials);
    e.std_error = std::sqrt(e.fraction * (1.0 - e.fraction) / static_cast<double>(trials));
    return e;
}

double z_score(double freq, double target, double std_error) {
    const double dev = freq - target;
    if (std_error > 0.0) return dev / std_error;
    if (dev == 0.0) return 0.0;
    return dev > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

}  // namespace ablkit
