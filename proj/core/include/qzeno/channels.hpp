// channels.hpp — state propagation between events: unitary steps, pointer-basis
// dephasing, and the synaptic release branch generator.

#pragma once

#include "qzeno/opalg.hpp"

#include <cstddef>
#include <cstdint>

namespace qzeno {

/// Hermitian generator H (ħ = 1, radians per unit simulation time).
/// The eigendecomposition is computed once at construction.
class HamiltonianSpec {
public:
    explicit HamiltonianSpec(ComplexMatrix h);

    /// (ω/2)σ_x on a two-level system: Rabi oscillation at angular frequency ω.
    static HamiltonianSpec rabi(double omega);

    /// (ω/2)(|i><j| + |j><i|) embedded in a dim-dimensional space.
    static HamiltonianSpec coupling(std::size_t dim, std::size_t i, std::size_t j, double omega);

    /// Random Hermitian matrix with entries of order `scale`, reproducible from `seed`.
    static HamiltonianSpec random(std::uint64_t seed, std::size_t dim, double scale = 1.0);

    const ComplexMatrix& matrix() const noexcept { return h_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(h_.rows()); }
    const RealVector& eigenvalues() const noexcept { return evals_; }

    /// λ_max − λ_min.
    double spectral_width() const;

    /// exp(−iHd) via the cached eigendecomposition.
    ComplexMatrix propagator(double d) const;

private:
    ComplexMatrix h_;
    RealVector evals_;
    ComplexMatrix evecs_;
};

/// Exponential decay of coherences in a pointer basis (columns of a unitary).
class DephasingChannel {
public:
    DephasingChannel(ComplexMatrix pointer_basis, double rate);

    static DephasingChannel computational(std::size_t dim, double rate);

    const ComplexMatrix& pointer_basis() const noexcept { return basis_; }
    double rate() const noexcept { return rate_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(basis_.rows()); }
    bool is_computational() const noexcept { return computational_; }

    /// Multiplier applied to pointer-basis coherences over duration d.
    /// Exactly 0 once rate·d exceeds 700.
    double coherence_factor(double d) const;

private:
    ComplexMatrix basis_;
    double rate_;
    bool computational_ = false;
};

WeightOperator evolve_unitary(const WeightOperator& s, const HamiltonianSpec& h, double d);

/// U S U† for a precomputed propagator U.
WeightOperator apply_propagator(const WeightOperator& s, const ComplexMatrix& u);

WeightOperator apply_dephasing(const WeightOperator& s, const DephasingChannel& ch, double d);

// ----------------------------------------------------------------------------
// Release branching
// ----------------------------------------------------------------------------

struct BranchConfig {
    std::size_t terminal_count = 1;
    double release_probability = 0.5;

    static constexpr std::size_t max_terminals = 20;

    void validate() const;
};

/// Diagonal weight operator on 2^n release patterns. Bit j of the basis
/// index is set when terminal j releases; index 0 is "nothing released".
/// Stored as its diagonal so that n up to 20 fits in memory.
class BranchMixture {
public:
    explicit BranchMixture(RealVector weights, std::size_t terminal_count);

    const RealVector& weights() const noexcept { return w_; }
    std::size_t terminal_count() const noexcept { return n_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(w_.size()); }
    double trace() const { return w_.sum(); }

    /// Largest dim accepted by to_weight_operator().
    static constexpr std::size_t max_dense_dim = 4096;

    /// Dense form; throws CapacityError above max_dense_dim.
    WeightOperator to_weight_operator() const;

private:
    RealVector w_;
    std::size_t n_;
};

BranchMixture release_branch_mixture(const BranchConfig& cfg);

} // namespace qzeno
