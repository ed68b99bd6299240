#include "ablkit/histories.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ablkit/errors.hpp"

namespace ablkit {

HistoryFamily::HistoryFamily(Projector initial, ObservableDecomposition intermediate,
                             Projector terminal)
    : initial_(std::move(initial)), intermediate_(std::move(intermediate)), final_(std::move(terminal)) {
    if (initial_.dim() != intermediate_.dim() || final_.dim() != intermediate_.dim()) {
        throw DimensionMismatch("history family projectors have different dimensions");
    }
    if (initial_.rank() != 1 || final_.rank() != 1) {
        throw InvalidArgument("initial and final projectors of a history family must have rank 1");
    }
}

HistoryFamily::HistoryFamily(const PrePostContext& ctx, ObservableDecomposition intermediate)
    : HistoryFamily(ctx.pre_projector(), std::move(intermediate), ctx.post_projector()) {}

Complex decoherence_functional(const HistoryFamily& family, std::size_t i, std::size_t j) {
    const auto n = family.size();
    if (i >= n || j >= n) {
        throw IndexOutOfRange("history index (" + std::to_string(i) + ", " + std::to_string(j) +
                              ") in a family of " + std::to_string(n));
    }
    const auto& c = family.intermediate();
    return trace_product({family.final().op(), c[i].projector.op(), family.initial().op(),
                          c[j].projector.op()});
}

ConsistencyReport is_consistent(const HistoryFamily& family, ConsistencyOptions options) {
    ConsistencyReport r;
    r.size = family.size();
    r.options = options;
    r.functional.resize(r.size * r.size);
    for (std::size_t i = 0; i < r.size; ++i) {
        for (std::size_t j = 0; j < r.size; ++j) {
            const Complex d = decoherence_functional(family, i, j);
            r.functional[i * r.size + j] = d;
            if (i == j) continue;
            const double v = options.criterion == ConsistencyCriterion::medium ? std::abs(d)
                                                                               : std::abs(d.real());
            r.max_violation = std::max(r.max_violation, v);
        }
    }
    r.consistent = r.max_violation <= options.tolerance;
    return r;
}

FinalProbabilityCheck bcac_check(const HistoryFamily& family, double tolerance) {
    FinalProbabilityCheck out;
    const Operator& pa = family.initial().op();
    const Operator& pb = family.final().op();
    out.lhs = trace_product({pb, pa}).real();
    for (const auto& br : family.intermediate().branches()) {
        out.rhs += trace_product({pb, br.projector.op(), pa, br.projector.op()}).real();
    }
    out.holds = std::abs(out.lhs - out.rhs) <= tolerance;
    return out;
}

namespace {

// Restricted growth strings: s[0] = 0, s[k] <= max(s[0..k-1]) + 1.
void grow(std::size_t k, std::size_t prefix_max, std::vector<std::size_t>& s,
          std::vector<std::vector<std::size_t>>& out) {
    if (k == s.size()) {
        out.push_back(s);
        return;
    }
    for (std::size_t v = 0; v <= prefix_max + 1; ++v) {
        s[k] = v;
        grow(k + 1, std::max(prefix_max, v), s, out);
    }
}

}  // namespace

std::vector<std::vector<std::size_t>> set_partitions(std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    if (n == 0) return out;
    std::vector<std::size_t> s(n, 0);
    grow(1, 0, s, out);
    return out;
}

std::vector<ObservableDecomposition> enumerate_coarse_grainings(const ObservableDecomposition& base) {
    if (base.size() > max_coarse_graining_branches) {
        throw TooManyBranches("coarse-graining enumeration supports at most " +
                              std::to_string(max_coarse_graining_branches) + " branches, got " +
                              std::to_string(base.size()));
    }
    std::vector<ObservableDecomposition> out;
    for (const auto& blocks : set_partitions(base.size())) {
        const std::size_t nblocks = *std::max_element(blocks.begin(), blocks.end()) + 1;
        std::vector<std::vector<Projector>> members(nblocks);
        for (std::size_t k = 0; k < blocks.size(); ++k) members[blocks[k]].push_back(base[k].projector);
        std::vector<Branch> branches;
        branches.reserve(nblocks);
        for (std::size_t b = 0; b < nblocks; ++b) {
            branches.push_back({static_cast<double>(b + 1), Projector::sum(members[b])});
        }
        out.emplace_back(std::move(branches));
    }
    return out;
}

}  // namespace ablkit
