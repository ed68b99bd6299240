#include "ablkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ablkit/errors.hpp"

namespace ablkit {

namespace {

double norm2(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return s;
}

bool all_finite(std::span<const Complex> v) {
    return std::all_of(v.begin(), v.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

void require_same_dim(std::size_t x, std::size_t y, const char* what) {
    if (x != y) {
        throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(x) +
                                " vs " + std::to_string(y));
    }
}

// One modified Gram-Schmidt sweep of v against the orthonormal set q.
void project_out(std::vector<Complex>& v, std::span<const Ket> q) {
    for (const auto& e : q) {
        const Complex c = inner(e.amplitudes(), v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * e[i];
    }
}

// Orthogonalizes v against q twice and returns the residual norm after the
// first sweep (the one compared against the dependence cutoff).
double reduce(std::vector<Complex>& v, std::span<const Ket> q) {
    project_out(v, q);
    const double residual = std::sqrt(norm2(v));
    project_out(v, q);
    return residual;
}

}  // namespace

double UnnormalizedVector::norm() const { return std::sqrt(norm2(amplitudes)); }

// ---------------------------------------------------------------- Ket

Ket::Ket(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.empty()) throw InvalidArgument("ket must have positive dimension");
    if (!all_finite(amps_)) throw InvalidArgument("ket has non-finite amplitude");
    const double n2 = norm2(amps_);
    if (std::abs(n2 - 1.0) > tol::norm) {
        throw InvalidArgument("ket is not normalized (norm^2 = " + std::to_string(n2) + ")");
    }
}

Ket Ket::normalized(std::vector<Complex> amplitudes) {
    if (!all_finite(amplitudes)) throw InvalidArgument("vector has non-finite amplitude");
    const double n = std::sqrt(norm2(amplitudes));
    if (!(n > 0.0)) throw InvalidArgument("cannot normalize the zero vector");
    for (auto& z : amplitudes) z /= n;
    return Ket(std::move(amplitudes));
}

Ket Ket::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw IndexOutOfRange("basis index out of range");
    std::vector<Complex> v(dim);
    v[index] = 1.0;
    return Ket(std::move(v));
}

// ----------------------------------------------------------- Operator

Operator::Operator(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), entries_(std::move(entries)) {
    if (dim_ == 0) throw InvalidArgument("operator must have positive dimension");
    if (entries_.size() != dim_ * dim_) {
        throw DimensionMismatch("operator of dimension " + std::to_string(dim_) + " needs " +
                                std::to_string(dim_ * dim_) + " entries, got " +
                                std::to_string(entries_.size()));
    }
    if (!all_finite(entries_)) throw InvalidArgument("operator has non-finite entry");
}

Operator Operator::zero(std::size_t dim) { return Operator(dim, std::vector<Complex>(dim * dim)); }

Operator Operator::identity(std::size_t dim) {
    std::vector<Complex> e(dim * dim);
    for (std::size_t i = 0; i < dim; ++i) e[i * dim + i] = 1.0;
    return Operator(dim, std::move(e));
}

Operator Operator::outer(std::span<const Complex> x, std::span<const Complex> y) {
    require_same_dim(x.size(), y.size(), "outer product");
    const std::size_t d = x.size();
    std::vector<Complex> e(d * d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) e[r * d + c] = x[r] * std::conj(y[c]);
    return Operator(d, std::move(e));
}

Operator Operator::adjoint() const {
    std::vector<Complex> e(entries_.size());
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) e[c * dim_ + r] = std::conj((*this)(r, c));
    return Operator(dim_, std::move(e));
}

Complex Operator::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double Operator::max_abs_diff(const Operator& other) const {
    require_same_dim(dim_, other.dim_, "operator comparison");
    double m = 0.0;
    for (std::size_t k = 0; k < entries_.size(); ++k)
        m = std::max(m, std::abs(entries_[k] - other.entries_[k]));
    return m;
}

Operator operator+(const Operator& x, const Operator& y) {
    require_same_dim(x.dim_, y.dim_, "operator sum");
    std::vector<Complex> e(x.entries_);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] += y.entries_[k];
    return Operator(x.dim_, std::move(e));
}

Operator operator-(const Operator& x, const Operator& y) {
    require_same_dim(x.dim_, y.dim_, "operator difference");
    std::vector<Complex> e(x.entries_);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] -= y.entries_[k];
    return Operator(x.dim_, std::move(e));
}

Operator operator*(const Operator& x, const Operator& y) {
    require_same_dim(x.dim_, y.dim_, "operator product");
    const std::size_t d = x.dim_;
    std::vector<Complex> e(d * d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t k = 0; k < d; ++k) {
            const Complex xrk = x(r, k);
            if (xrk == Complex{}) continue;
            for (std::size_t c = 0; c < d; ++c) e[r * d + c] += xrk * y(k, c);
        }
    return Operator(d, std::move(e));
}

Operator operator*(Complex s, const Operator& x) {
    std::vector<Complex> e(x.entries_);
    for (auto& z : e) z *= s;
    return Operator(x.dim_, std::move(e));
}

// ---------------------------------------------------------- Projector

Projector::Projector(Operator op) : op_(std::move(op)), rank_(0) {
    if (op_.max_abs_diff(op_.adjoint()) > tol::alg) throw InvalidProjector("operator is not Hermitian");
    if (op_.max_abs_diff(op_ * op_) > tol::alg) throw InvalidProjector("operator is not idempotent");
    const Complex t = op_.trace();
    const double r = std::round(t.real());
    if (std::abs(t - Complex(r, 0.0)) > tol::alg) {
        throw InvalidProjector("projector trace is not an integer");
    }
    if (r < 1.0) throw InvalidProjector("projector has rank 0");
    rank_ = static_cast<std::size_t>(r);
}

Projector Projector::onto(const Ket& x) {
    return Projector(Operator::outer(x.amplitudes(), x.amplitudes()));
}

Projector Projector::complement(const Projector& p) {
    return Projector(Operator::identity(p.dim()) - p.op());
}

Projector Projector::sum(std::span<const Projector> parts) {
    if (parts.empty()) throw InvalidArgument("sum of no projectors");
    Operator acc = parts.front().op();
    for (std::size_t k = 1; k < parts.size(); ++k) acc = acc + parts[k].op();
    return Projector(std::move(acc));
}

bool Projector::approx_equal(const Projector& other, double tolerance) const {
    return dim() == other.dim() && op_.max_abs_diff(other.op_) <= tolerance;
}

// --------------------------------------------- ObservableDecomposition

ObservableDecomposition::ObservableDecomposition(std::vector<Branch> branches)
    : dim_(0), branches_(std::move(branches)) {
    if (branches_.empty()) throw InvalidDecomposition("observable has no branches");
    dim_ = branches_.front().projector.dim();
    for (const auto& b : branches_) require_same_dim(dim_, b.projector.dim(), "observable branch");

    for (std::size_t i = 0; i < branches_.size(); ++i) {
        if (!std::isfinite(branches_[i].eigenvalue)) {
            throw InvalidDecomposition("eigenvalue label is not finite");
        }
        for (std::size_t j = i + 1; j < branches_.size(); ++j) {
            if (branches_[i].eigenvalue == branches_[j].eigenvalue) {
                throw InvalidDecomposition("eigenvalue " + std::to_string(branches_[i].eigenvalue) +
                                           " appears more than once");
            }
            const Operator prod = branches_[i].projector.op() * branches_[j].projector.op();
            if (prod.max_abs_diff(Operator::zero(dim_)) > tol::alg) {
                throw InvalidDecomposition("projectors of branches " + std::to_string(i) + " and " +
                                           std::to_string(j) + " are not orthogonal");
            }
        }
    }

    Operator total = Operator::zero(dim_);
    for (const auto& b : branches_) total = total + b.projector.op();
    if (total.max_abs_diff(Operator::identity(dim_)) > tol::alg) {
        throw InvalidDecomposition("projectors do not sum to the identity");
    }
}

ObservableDecomposition ObservableDecomposition::from_basis(std::span<const Ket> basis) {
    std::vector<Branch> branches;
    branches.reserve(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) {
        branches.push_back({static_cast<double>(k + 1), Projector::onto(basis[k])});
    }
    return ObservableDecomposition(std::move(branches));
}

ObservableDecomposition ObservableDecomposition::basis_containing(const Ket& first) {
    const Ket seed[] = {first};
    return from_basis(complete_basis(seed));
}

ObservableDecomposition ObservableDecomposition::binary(const Projector& p) {
    return ObservableDecomposition({{1.0, p}, {2.0, Projector::complement(p)}});
}

bool ObservableDecomposition::same_projectors(const ObservableDecomposition& other,
                                              double tolerance) const {
    if (dim_ != other.dim_ || size() != other.size()) return false;
    std::vector<bool> used(other.size(), false);
    for (const auto& b : branches_) {
        bool matched = false;
        for (std::size_t k = 0; k < other.size(); ++k) {
            if (!used[k] && b.projector.approx_equal(other.branches_[k].projector, tolerance)) {
                used[k] = matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

// -------------------------------------------------------- free functions

Complex inner(std::span<const Complex> x, std::span<const Complex> y) {
    require_same_dim(x.size(), y.size(), "inner product");
    Complex s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

Complex inner(const Ket& x, const Ket& y) { return inner(x.amplitudes(), y.amplitudes()); }

Complex trace_product(std::span<const Operator> ops) {
    if (ops.empty()) throw InvalidArgument("trace of an empty product");
    Operator acc = ops.front();
    for (std::size_t k = 1; k < ops.size(); ++k) acc = acc * ops[k];
    return acc.trace();
}

Complex trace_product(std::initializer_list<Operator> ops) {
    return trace_product(std::span<const Operator>(ops.begin(), ops.size()));
}

UnnormalizedVector apply(const Operator& op, std::span<const Complex> x) {
    require_same_dim(op.dim(), x.size(), "operator application");
    UnnormalizedVector out{std::vector<Complex>(x.size())};
    for (std::size_t r = 0; r < op.dim(); ++r) {
        Complex s = 0.0;
        for (std::size_t c = 0; c < op.dim(); ++c) s += op(r, c) * x[c];
        out.amplitudes[r] = s;
    }
    return out;
}

UnnormalizedVector apply(const Operator& op, const Ket& x) { return apply(op, x.amplitudes()); }

std::vector<Ket> orthonormalize(std::span<const std::vector<Complex>> vectors) {
    std::vector<Ket> q;
    if (vectors.empty()) return q;
    const std::size_t d = vectors.front().size();
    for (std::size_t k = 0; k < vectors.size(); ++k) {
        require_same_dim(d, vectors[k].size(), "spanning vector");
        const double n = std::sqrt(norm2(vectors[k]));
        if (!(n > 0.0) || !all_finite(vectors[k])) {
            throw DegenerateSpan("spanning vector " + std::to_string(k) + " is zero or non-finite");
        }
        std::vector<Complex> v(vectors[k]);
        for (auto& z : v) z /= n;
        const double residual = reduce(v, q);
        if (residual < tol::span) {
            throw DegenerateSpan("spanning vector " + std::to_string(k) +
                                 " is linearly dependent on the previous ones");
        }
        q.push_back(Ket::normalized(std::move(v)));
    }
    return q;
}

Projector projector_from_vectors(std::span<const std::vector<Complex>> vectors) {
    if (vectors.empty()) throw InvalidArgument("projector needs at least one spanning vector");
    const auto q = orthonormalize(vectors);
    Operator acc = Operator::outer(q.front().amplitudes(), q.front().amplitudes());
    for (std::size_t k = 1; k < q.size(); ++k) {
        acc = acc + Operator::outer(q[k].amplitudes(), q[k].amplitudes());
    }
    return Projector(std::move(acc));
}

Projector projector_from_kets(std::span<const Ket> kets) {
    std::vector<std::vector<Complex>> v;
    v.reserve(kets.size());
    for (const auto& k : kets) v.emplace_back(k.amplitudes().begin(), k.amplitudes().end());
    return projector_from_vectors(v);
}

Projector projector_from_kets(std::initializer_list<Ket> kets) {
    return projector_from_kets(std::span<const Ket>(kets.begin(), kets.size()));
}

Ket ket_of(const Projector& rank_one) {
    if (rank_one.rank() != 1) throw InvalidArgument("projector does not have rank 1");
    const Operator& p = rank_one.op();
    const std::size_t d = p.dim();
    std::size_t best = 0;
    for (std::size_t c = 1; c < d; ++c) {
        if (std::norm(p(c, c)) > std::norm(p(best, best))) best = c;
    }
    std::vector<Complex> v(d);
    for (std::size_t r = 0; r < d; ++r) v[r] = p(r, best);
    return Ket::normalized(std::move(v));
}

std::vector<Ket> complete_basis(std::span<const Ket> seed) {
    std::vector<std::vector<Complex>> raw;
    for (const auto& k : seed) raw.emplace_back(k.amplitudes().begin(), k.amplitudes().end());
    std::vector<Ket> q = orthonormalize(raw);
    const std::size_t d = seed.empty() ? 0 : seed.front().dim();
    for (std::size_t i = 0; i < d && q.size() < d; ++i) {
        std::vector<Complex> v(d);
        v[i] = 1.0;
        if (reduce(v, q) < tol::span) continue;
        q.push_back(Ket::normalized(std::move(v)));
    }
    return q;
}

}  // namespace ablkit
