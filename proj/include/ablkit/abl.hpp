// abl.hpp
// Born, joint and ABL probabilities for one intermediate projective
// measurement between a preselected and a postselected pure state, plus the
// Lueders post-measurement update.
//
// Conventions: P_a = |a><a|, P_b = |b><b|, and the intermediate observable is
// given by its spectral projectors {P_j}. Degenerate outcomes are simply
// higher-rank projectors; there is no separate code path for them.

#pragma once

#include <cstddef>
#include <vector>

#include "ablkit/linalg.hpp"

namespace ablkit {

// Preselection |a> (earliest time) and postselection |b> (latest time).
class PrePostContext {
public:
    PrePostContext(Ket pre, Ket post);

    const Ket& pre() const noexcept { return pre_; }
    const Ket& post() const noexcept { return post_; }
    const Projector& pre_projector() const noexcept { return pa_; }
    const Projector& post_projector() const noexcept { return pb_; }
    std::size_t dim() const noexcept { return pre_.dim(); }

    // |<b|a>|^2: probability of the postselection with nothing measured in
    // between.
    double undisturbed_final_probability() const;

private:
    Ket pre_;
    Ket post_;
    Projector pa_;
    Projector pb_;
};

struct AblDistribution {
    std::vector<double> probabilities;  // aligned with observable branches
    std::vector<double> joint;          // Tr(P_b P_j P_a P_j) per branch
    double denominator = 0.0;           // sum of `joint`
};

// Tr(P_j P_a) for every branch j.
std::vector<double> born_distribution(const Ket& a, const ObservableDecomposition& observable);

// Tr(P_b P_j P_a P_j) for branch j. Throws IndexOutOfRange.
double joint_probability(const PrePostContext& ctx, const ObservableDecomposition& observable,
                         std::size_t branch);

// Probability of postselecting |b> when the observable is measured in
// between: sum_j Tr(P_b P_j P_a P_j).
double disturbed_final_probability(const PrePostContext& ctx,
                                   const ObservableDecomposition& observable);

// P(c_j | a, b) = Tr(P_b P_j P_a P_j) / sum_k Tr(P_b P_k P_a P_k).
// Throws ImpossiblePostselection when the denominator is <= tol::div.
AblDistribution abl_distribution(const PrePostContext& ctx,
                                 const ObservableDecomposition& observable);

// Projector form of the above; the selections may have any rank.
AblDistribution abl_distribution(const Projector& pre, const Projector& post,
                                 const ObservableDecomposition& observable);

// Normalized P|state>. Throws ZeroProjection when ||P state|| <= tol::div.
Ket luders_update(const Ket& state, const Projector& projector);

}  // namespace ablkit
