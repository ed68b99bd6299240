// linalg.hpp
// Dense finite-dimensional complex linear algebra for small Hilbert spaces:
// kets, operators, projectors and projective decompositions of observables.
//
// Every type here validates its invariants at construction and is immutable
// afterwards, so values can be shared freely between threads.

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ablkit {

using Complex = std::complex<double>;

namespace tol {
// Algebraic identities on exact inputs (hermiticity, idempotence, completeness).
inline constexpr double alg = 1e-10;
// Ket normalization.
inline constexpr double norm = 1e-9;
// Denominator / projection-norm cutoff below which a quantity counts as zero.
inline constexpr double div = 1e-12;
// Residual-norm cutoff for linear dependence in Gram-Schmidt.
inline constexpr double span = 1e-8;
}  // namespace tol

// A raw amplitude vector with no normalization guarantee, e.g. the result of
// applying a projector to a ket.
struct UnnormalizedVector {
    std::vector<Complex> amplitudes;

    std::size_t dim() const noexcept { return amplitudes.size(); }
    double norm() const;
};

// Unit-norm state vector.
class Ket {
public:
    // Throws InvalidArgument unless |norm^2 - 1| <= tol::norm and every
    // amplitude is finite. The amplitudes are stored as given.
    explicit Ket(std::vector<Complex> amplitudes);

    // Scales a nonzero vector to unit norm.
    static Ket normalized(std::vector<Complex> amplitudes);
    static Ket basis(std::size_t dim, std::size_t index);

    std::size_t dim() const noexcept { return amps_.size(); }
    const Complex& operator[](std::size_t i) const { return amps_[i]; }
    std::span<const Complex> amplitudes() const noexcept { return amps_; }

private:
    std::vector<Complex> amps_;
};

// Square complex matrix, row-major.
class Operator {
public:
    Operator(std::size_t dim, std::vector<Complex> entries);

    static Operator zero(std::size_t dim);
    static Operator identity(std::size_t dim);
    // |x><y|
    static Operator outer(std::span<const Complex> x, std::span<const Complex> y);

    std::size_t dim() const noexcept { return dim_; }
    const Complex& operator()(std::size_t row, std::size_t col) const {
        return entries_[row * dim_ + col];
    }
    std::span<const Complex> entries() const noexcept { return entries_; }

    Operator adjoint() const;
    Complex trace() const;

    // Largest entrywise modulus of (*this - other).
    double max_abs_diff(const Operator& other) const;

    friend Operator operator+(const Operator& x, const Operator& y);
    friend Operator operator-(const Operator& x, const Operator& y);
    friend Operator operator*(const Operator& x, const Operator& y);
    friend Operator operator*(Complex s, const Operator& x);

private:
    std::size_t dim_;
    std::vector<Complex> entries_;
};

// Orthogonal projector of rank >= 1.
class Projector {
public:
    // Validates P = P^dagger, P^2 = P and trace(P) = rank (a positive
    // integer), all within tol::alg. Throws InvalidProjector otherwise.
    explicit Projector(Operator op);

    // |x><x|
    static Projector onto(const Ket& x);
    // I - P. Throws InvalidProjector when P is the identity.
    static Projector complement(const Projector& p);
    // Sum of mutually orthogonal projectors.
    static Projector sum(std::span<const Projector> parts);

    std::size_t dim() const noexcept { return op_.dim(); }
    std::size_t rank() const noexcept { return rank_; }
    const Operator& op() const noexcept { return op_; }

    bool approx_equal(const Projector& other, double tolerance = tol::alg) const;

private:
    Operator op_;
    std::size_t rank_;
};

struct Branch {
    double eigenvalue;
    Projector projector;
};

// Observable given by its spectral projectors. Eigenvalues are labels only.
class ObservableDecomposition {
public:
    // Throws InvalidDecomposition on repeated eigenvalues, incomplete or
    // non-orthogonal projectors; DimensionMismatch on mixed dimensions.
    explicit ObservableDecomposition(std::vector<Branch> branches);

    // Rank-1 decomposition of an orthonormal basis, labels 1..n.
    static ObservableDecomposition from_basis(std::span<const Ket> basis);
    // Basis whose first element is `first`, completed in canonical order.
    static ObservableDecomposition basis_containing(const Ket& first);
    // {P, I - P}, labelled 1 and 2.
    static ObservableDecomposition binary(const Projector& p);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return branches_.size(); }
    const Branch& operator[](std::size_t i) const { return branches_.at(i); }
    std::span<const Branch> branches() const noexcept { return branches_; }

    // Same multiset of projectors (within tolerance), irrespective of labels
    // and order.
    bool same_projectors(const ObservableDecomposition& other,
                         double tolerance = tol::alg) const;

private:
    std::size_t dim_;
    std::vector<Branch> branches_;
};

// <x|y>, conjugate-linear in x.
Complex inner(const Ket& x, const Ket& y);
Complex inner(std::span<const Complex> x, std::span<const Complex> y);

// Trace of the ordered product ops[0] * ops[1] * ... .
Complex trace_product(std::span<const Operator> ops);
Complex trace_product(std::initializer_list<Operator> ops);

UnnormalizedVector apply(const Operator& op, const Ket& x);
UnnormalizedVector apply(const Operator& op, std::span<const Complex> x);

// Orthogonal projector onto span(kets). Throws DimensionMismatch on mixed
// dimensions and DegenerateSpan when a ket is linearly dependent on the
// previous ones (modified Gram-Schmidt residual below tol::span).
Projector projector_from_kets(std::span<const Ket> kets);
Projector projector_from_kets(std::initializer_list<Ket> kets);

// Same as projector_from_kets but accepts vectors of any nonzero norm.
Projector projector_from_vectors(std::span<const std::vector<Complex>> vectors);

// Orthonormal basis of the whole space whose leading elements span `seed`
// (in order); the remainder is filled by Gram-Schmidt over canonical basis
// vectors in index order.
std::vector<Ket> complete_basis(std::span<const Ket> seed);

// A unit vector spanning the range of a rank-1 projector (global phase chosen
// so that its largest-norm column is used). Throws InvalidArgument otherwise.
Ket ket_of(const Projector& rank_one);

// Modified Gram-Schmidt; throws DegenerateSpan on dependence.
std::vector<Ket> orthonormalize(std::span<const std::vector<Complex>> vectors);

}  // namespace ablkit
