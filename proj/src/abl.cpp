#include "ablkit/abl.hpp"

#include <algorithm>
#include <string>

#include "ablkit/errors.hpp"

namespace ablkit {

namespace {

void require_dims(const PrePostContext& ctx, const ObservableDecomposition& obs) {
    if (ctx.dim() != obs.dim()) {
        throw DimensionMismatch("context has dimension " + std::to_string(ctx.dim()) +
                                ", observable has " + std::to_string(obs.dim()));
    }
}

double joint_unchecked(const Projector& pre, const Projector& post, const Projector& pj) {
    const Operator& p = pj.op();
    return trace_product({post.op(), p, pre.op(), p}).real();
}

}  // namespace

PrePostContext::PrePostContext(Ket pre, Ket post)
    : pre_(std::move(pre)),
      post_(std::move(post)),
      pa_(Projector::onto(pre_)),
      pb_(Projector::onto(post_)) {
    if (pre_.dim() != post_.dim()) {
        throw DimensionMismatch("preselection has dimension " + std::to_string(pre_.dim()) +
                                ", postselection has " + std::to_string(post_.dim()));
    }
}

double PrePostContext::undisturbed_final_probability() const {
    return trace_product({pb_.op(), pa_.op()}).real();
}

std::vector<double> born_distribution(const Ket& a, const ObservableDecomposition& observable) {
    if (a.dim() != observable.dim()) {
        throw DimensionMismatch("state has dimension " + std::to_string(a.dim()) +
                                ", observable has " + std::to_string(observable.dim()));
    }
    const Projector pa = Projector::onto(a);
    std::vector<double> p;
    p.reserve(observable.size());
    for (const auto& b : observable.branches()) {
        p.push_back(trace_product({b.projector.op(), pa.op()}).real());
    }
    return p;
}

double joint_probability(const PrePostContext& ctx, const ObservableDecomposition& observable,
                         std::size_t branch) {
    require_dims(ctx, observable);
    if (branch >= observable.size()) {
        throw IndexOutOfRange("branch " + std::to_string(branch) + " of an observable with " +
                              std::to_string(observable.size()) + " branches");
    }
    return joint_unchecked(ctx.pre_projector(), ctx.post_projector(), observable[branch].projector);
}

double disturbed_final_probability(const PrePostContext& ctx,
                                   const ObservableDecomposition& observable) {
    require_dims(ctx, observable);
    double total = 0.0;
    for (std::size_t j = 0; j < observable.size(); ++j) total += joint_probability(ctx, observable, j);
    return total;
}

AblDistribution abl_distribution(const PrePostContext& ctx,
                                 const ObservableDecomposition& observable) {
    require_dims(ctx, observable);
    return abl_distribution(ctx.pre_projector(), ctx.post_projector(), observable);
}

AblDistribution abl_distribution(const Projector& pre, const Projector& post,
                                 const ObservableDecomposition& observable) {
    if (pre.dim() != observable.dim() || post.dim() != observable.dim()) {
        throw DimensionMismatch("selection projectors and observable have different dimensions");
    }
    AblDistribution out;
    out.joint.reserve(observable.size());
    for (const auto& b : observable.branches()) {
        out.joint.push_back(joint_unchecked(pre, post, b.projector));
        out.denominator += out.joint.back();
    }
    if (!(out.denominator > tol::div)) {
        throw ImpossiblePostselection(
            "postselection cannot succeed through this measurement (denominator " +
            std::to_string(out.denominator) + ")");
    }
    out.probabilities.reserve(out.joint.size());
    for (double j : out.joint) out.probabilities.push_back(j / out.denominator);
    return out;
}

Ket luders_update(const Ket& state, const Projector& projector) {
    auto v = apply(projector.op(), state);
    const double n = v.norm();
    if (!(n > tol::div)) throw ZeroProjection("state is orthogonal to the projected subspace");
    for (auto& z : v.amplitudes) z /= n;
    return Ket(std::move(v.amplitudes));
}

}  // namespace ablkit
