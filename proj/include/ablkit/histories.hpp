// histories.hpp
// Families of two-time histories (P_a, {P_j}, P_b), their decoherence
// functional D(i,j) = Tr(P_b P_i P_a P_j), and the consistency test.

#pragma once

#include <cstddef>
#include <vector>

#include "ablkit/abl.hpp"
#include "ablkit/linalg.hpp"

namespace ablkit {

namespace tol {
// Threshold on |D(i,j)| (i != j) and on the gap of the final-probability
// equality.
inline constexpr double cons = 1e-9;
}  // namespace tol

class HistoryFamily {
public:
    // `initial` and `terminal` must be rank 1 and share the dimension of
    // `intermediate`.
    HistoryFamily(Projector initial, ObservableDecomposition intermediate, Projector terminal);
    HistoryFamily(const PrePostContext& ctx, ObservableDecomposition intermediate);

    const Projector& initial() const noexcept { return initial_; }
    const ObservableDecomposition& intermediate() const noexcept { return intermediate_; }
    const Projector& final() const noexcept { return final_; }
    std::size_t dim() const noexcept { return intermediate_.dim(); }
    std::size_t size() const noexcept { return intermediate_.size(); }

private:
    Projector initial_;
    ObservableDecomposition intermediate_;
    Projector final_;
};

enum class ConsistencyCriterion {
    medium,  // D(i,j) = 0 for i != j
    weak,    // Re D(i,j) = 0 for i != j
};

struct ConsistencyOptions {
    ConsistencyCriterion criterion = ConsistencyCriterion::medium;
    double tolerance = tol::cons;
};

struct ConsistencyReport {
    bool consistent = false;
    // Full decoherence matrix, row-major size() x size(); the diagonal holds
    // the joint probabilities.
    std::vector<Complex> functional;
    std::size_t size = 0;
    // Largest |D(i,j)| (medium) or |Re D(i,j)| (weak) over i != j.
    double max_violation = 0.0;
    ConsistencyOptions options;

    Complex at(std::size_t i, std::size_t j) const { return functional.at(i * size + j); }
};

struct FinalProbabilityCheck {
    double lhs = 0.0;  // |<b|a>|^2
    double rhs = 0.0;  // sum_j Tr(P_b P_j P_a P_j)
    bool holds = false;
};

Complex decoherence_functional(const HistoryFamily& family, std::size_t i, std::size_t j);

ConsistencyReport is_consistent(const HistoryFamily& family, ConsistencyOptions options = {});

// Compares the postselection probability without and with the intermediate
// measurement; they agree whenever the family is consistent.
FinalProbabilityCheck bcac_check(const HistoryFamily& family, double tolerance = tol::cons);

inline constexpr std::size_t max_coarse_graining_branches = 6;

// Every set partition of the base branches, each block replaced by the sum of
// its projectors and labelled 1..k in order of first member. Partitions are
// listed in lexicographic restricted-growth-string order: the single-block
// partition first, the finest one last. Throws TooManyBranches above
// max_coarse_graining_branches.
std::vector<ObservableDecomposition> enumerate_coarse_grainings(const ObservableDecomposition& base);

// Block assignment (restricted growth string) for each entry of
// enumerate_coarse_grainings, in the same order.
std::vector<std::vector<std::size_t>> set_partitions(std::size_t n);

}  // namespace ablkit
