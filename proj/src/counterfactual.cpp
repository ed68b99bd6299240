#include "ablkit/counterfactual.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "ablkit/abl.hpp"
#include "ablkit/errors.hpp"
#include "ablkit/random.hpp"

namespace ablkit {

namespace {

void require_inputs(const Ket& a, const ObservableDecomposition& final_basis,
                    const ObservableDecomposition& observable, std::size_t branch) {
    if (a.dim() != final_basis.dim() || a.dim() != observable.dim()) {
        throw DimensionMismatch("state, final basis and observable must share a dimension");
    }
    if (branch >= observable.size()) {
        throw IndexOutOfRange("branch " + std::to_string(branch) + " of an observable with " +
                              std::to_string(observable.size()) + " branches");
    }
}

void validate(const CounterexampleSearch& p) {
    if (p.dim < 2 || p.dim > 6) {
        throw InvalidArgument("counterexample search dimension must be in 2..6, got " +
                              std::to_string(p.dim));
    }
    if (!(p.gap_min > 0.0)) throw InvalidArgument("gap_min must be positive");
}

}  // namespace

double sharp_shanks_total(const Ket& a, const ObservableDecomposition& final_basis,
                          const ObservableDecomposition& observable, std::size_t branch) {
    require_inputs(a, final_basis, observable, branch);
    const Projector pa = Projector::onto(a);
    double total = 0.0;
    for (std::size_t l = 0; l < final_basis.size(); ++l) {
        const Projector& pb = final_basis[l].projector;
        const double weight = trace_product({pb.op(), pa.op()}).real();
        if (!(weight > tol::div)) continue;
        try {
            total += weight * abl_distribution(pa, pb, observable).probabilities[branch];
        } catch (const ImpossiblePostselection&) {
            throw UndefinedTerm("final branch " + std::to_string(l) +
                                " has nonzero weight but an undefined ABL conditional");
        }
    }
    return total;
}

double vaidman_total(const Ket& a, const ObservableDecomposition& final_basis,
                     const ObservableDecomposition& observable, std::size_t branch) {
    require_inputs(a, final_basis, observable, branch);
    const Projector pa = Projector::onto(a);
    double total = 0.0;
    for (std::size_t l = 0; l < final_basis.size(); ++l) {
        const Projector& pb = final_basis[l].projector;
        try {
            const auto dist = abl_distribution(pa, pb, observable);
            total += dist.denominator * dist.probabilities[branch];
        } catch (const ImpossiblePostselection&) {
            // The weight is the (vanishing) denominator itself.
        }
    }
    return total;
}

MixingReport mixing_report(const Ket& a, const ObservableDecomposition& final_basis,
                           const ObservableDecomposition& observable, std::size_t branch) {
    MixingReport r;
    r.born_total = born_distribution(a, observable).at(branch);
    r.ss_total = sharp_shanks_total(a, final_basis, observable, branch);
    r.vaidman_total = vaidman_total(a, final_basis, observable, branch);
    r.ss_gap = std::abs(r.born_total - r.ss_total);
    return r;
}

std::optional<Counterexample> counterexample_attempt(const CounterexampleSearch& params,
                                                     std::uint64_t attempt) {
    validate(params);
    auto rng = SplitMix64::substream(params.seed, attempt);
    Ket a = haar_ket(params.dim, rng);
    auto final_basis = ObservableDecomposition::from_basis(haar_basis(params.dim, rng));
    auto observable = params.observable_is_final_basis
                          ? final_basis
                          : ObservableDecomposition::from_basis(haar_basis(params.dim, rng));
    for (std::size_t c = 0; c < observable.size(); ++c) {
        MixingReport report;
        try {
            report = mixing_report(a, final_basis, observable, c);
        } catch (const UndefinedTerm&) {
            continue;
        }
        if (report.ss_gap > params.gap_min) {
            return Counterexample{std::move(a), std::move(final_basis), std::move(observable), c,
                                  report, attempt};
        }
    }
    return std::nullopt;
}

Counterexample find_counterexample(const CounterexampleSearch& params) {
    validate(params);
    const unsigned workers = std::max(1u, params.threads);
    constexpr auto none = std::numeric_limits<std::uint64_t>::max();
    std::atomic<std::uint64_t> best{none};

    // Worker w scans tries w, w + workers, ... and stops once it passes the
    // lowest success seen so far; the lowest index wins regardless of timing.
    auto scan = [&](unsigned w) {
        for (std::uint64_t t = w; t < params.max_tries; t += workers) {
            if (t >= best.load(std::memory_order_relaxed)) return;
            if (counterexample_attempt(params, t)) {
                auto cur = best.load();
                while (t < cur && !best.compare_exchange_weak(cur, t)) {
                }
                return;
            }
        }
    };
    if (workers == 1) {
        scan(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(scan, w);
    }

    if (best.load() == none) {
        throw NotFound("no counterexample with gap > " + std::to_string(params.gap_min) + " in " +
                       std::to_string(params.max_tries) + " tries");
    }
    return *counterexample_attempt(params, best.load());
}

HitRate counterexample_hit_rate(const CounterexampleSearch& params) {
    validate(params);
    const unsigned workers = std::max(1u, params.threads);
    std::atomic<std::uint64_t> hits{0};
    auto scan = [&](unsigned w) {
        std::uint64_t local = 0;
        for (std::uint64_t t = w; t < params.max_tries; t += workers) {
            if (counterexample_attempt(params, t)) ++local;
        }
        hits += local;
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(scan, w);
    }
    return {params.max_tries, hits.load()};
}

}  // namespace ablkit
