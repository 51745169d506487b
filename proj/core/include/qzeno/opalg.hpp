// opalg.hpp — dense complex operator algebra: weight operators, projectors,
// tensor products, partial traces and validity checks.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace qzeno {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double validity = 1e-10;
inline constexpr double conservation = 1e-12;
} // namespace tol

// ----------------------------------------------------------------------------
// Basic helpers
// ----------------------------------------------------------------------------

ComplexMatrix identity(std::size_t dim);

/// |i><j| in a dim-dimensional space.
ComplexMatrix basis_op(std::size_t dim, std::size_t i, std::size_t j);

ComplexMatrix sigma_x();
ComplexMatrix sigma_y();
ComplexMatrix sigma_z();

/// Largest entry magnitude, ‖M‖_max.
double max_abs(const ComplexMatrix& m);

/// ‖M − M†‖_max; +inf for a non-square matrix.
double hermiticity_defect(const ComplexMatrix& m);

/// Ascending eigenvalues of the Hermitian part (M + M†)/2.
RealVector hermitian_eigenvalues(const ComplexMatrix& m);

/// Kronecker product, factor `a` first (slow index).
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

// ----------------------------------------------------------------------------
// Validation
// ----------------------------------------------------------------------------

struct ValidationReport {
    bool square = false;
    std::size_t dim = 0;
    double hermiticity_defect = 0.0;
    double min_eigenvalue = 0.0;
    Complex trace{0.0, 0.0};
    bool passed = false;
    std::string failure; // empty when passed
};

/// Checks the weight-operator invariants (Hermitian, PSD, real positive trace)
/// and reports the measured defects. Never throws, never repairs.
ValidationReport validate_weight_operator(const ComplexMatrix& m);

// ----------------------------------------------------------------------------
// WeightOperator
// ----------------------------------------------------------------------------

/// Unnormalized positive Hermitian operator S. S / Tr S is the density matrix.
class WeightOperator {
public:
    /// Validates `m`; throws ValidationError carrying the report on failure.
    explicit WeightOperator(ComplexMatrix m);

    /// Wraps `m` without running the eigenvalue check. For results of
    /// operations that preserve the invariants by construction.
    static WeightOperator assume_valid(ComplexMatrix m);

    static WeightOperator pure(const ComplexVector& psi);
    static WeightOperator basis_state(std::size_t dim, std::size_t index);
    static WeightOperator diagonal(const RealVector& weights);

    const ComplexMatrix& matrix() const noexcept { return m_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    double trace() const { return m_.trace().real(); }

    /// S / Tr S. Throws InvalidStateError if Tr S <= 0.
    WeightOperator normalized() const;

    WeightOperator scaled(double c) const;

private:
    struct Unchecked {};
    WeightOperator(ComplexMatrix m, Unchecked) : m_(std::move(m)) {}

    ComplexMatrix m_;
};

// ----------------------------------------------------------------------------
// Projector
// ----------------------------------------------------------------------------

/// Hermitian idempotent P(E) tagged with the label of its experience E.
class Projector {
public:
    /// Validates Hermiticity and idempotence within tol::validity.
    Projector(ComplexMatrix m, std::string label);

    /// Projector onto span{|i> : i in indices}.
    static Projector onto_basis(std::size_t dim, const std::vector<std::size_t>& indices,
                                std::string label);

    /// Projector onto the span of the given (not necessarily orthonormal) columns.
    static Projector onto_span(const ComplexMatrix& columns, std::string label);

    const ComplexMatrix& matrix() const noexcept { return m_; }
    const std::string& label() const noexcept { return label_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    double rank() const { return m_.trace().real(); }

    /// 1 − P, labelled "not <label>".
    Projector complement() const;

private:
    ComplexMatrix m_;
    std::string label_;
};

// ----------------------------------------------------------------------------
// Composite systems
// ----------------------------------------------------------------------------

/// Tensor-factor layout of the full space plus the kept (brain) factors.
class FactorSpace {
public:
    /// Throws ValidationError if a dimension is zero, `kept` is empty, out of
    /// range or has duplicates. `kept` is stored sorted.
    FactorSpace(std::vector<std::size_t> factor_dims, std::vector<std::size_t> kept);

    const std::vector<std::size_t>& factor_dims() const noexcept { return dims_; }
    const std::vector<std::size_t>& kept() const noexcept { return kept_; }
    std::size_t full_dim() const noexcept { return full_; }
    std::size_t kept_dim() const noexcept { return kept_dim_; }

private:
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> kept_;
    std::size_t full_ = 1;
    std::size_t kept_dim_ = 1;
};

/// S_b: trace over every factor not in `space.kept()`. Kept factors retain
/// their relative order.
WeightOperator partial_trace(const WeightOperator& s, const FactorSpace& space);

/// Extends an operator on the kept factors to the full space (identity on the
/// traced factors), the P' of a projector defined on the subsystem.
ComplexMatrix extend_to_full(const ComplexMatrix& op, const FactorSpace& space);

Projector extend_to_full(const Projector& p, const FactorSpace& space);

/// Tr(S A) / Tr(S).
Complex expectation_value(const WeightOperator& s, const ComplexMatrix& a);

} // namespace qzeno
