#include "qzeno/channels.hpp"

#include "qzeno/errors.hpp"
#include "qzeno/random.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace qzeno {

namespace {

constexpr double kFullDecoherence = 700.0;

void require_dim(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        std::ostringstream os;
        os << what << ": dimension mismatch (" << got << " vs " << want << ")";
        throw DimensionError(os.str());
    }
}

} // namespace

// ----------------------------------------------------------------------------

HamiltonianSpec::HamiltonianSpec(ComplexMatrix h) : h_(std::move(h)) {
    if (h_.rows() == 0 || h_.rows() != h_.cols())
        throw DimensionError("HamiltonianSpec: expected a non-empty square matrix");
    const double defect = hermiticity_defect(h_);
    if (defect > tol::validity) {
        std::ostringstream os;
        os << "HamiltonianSpec: H is not Hermitian (defect " << defect << ")";
        throw ValidationError(os.str());
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h_ + h_.adjoint()));
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
}

HamiltonianSpec HamiltonianSpec::rabi(double omega) {
    return HamiltonianSpec(0.5 * omega * sigma_x());
}

HamiltonianSpec HamiltonianSpec::coupling(std::size_t dim, std::size_t i, std::size_t j, double omega) {
    if (i == j) throw ValidationError("HamiltonianSpec::coupling: i and j must differ");
    return HamiltonianSpec(0.5 * omega * (basis_op(dim, i, j) + basis_op(dim, j, i)));
}

HamiltonianSpec HamiltonianSpec::random(std::uint64_t seed, std::size_t dim, double scale) {
    if (dim == 0) throw DimensionError("HamiltonianSpec::random: dim must be >= 1");
    Rng rng(splitmix64(seed));
    const auto n = static_cast<Eigen::Index>(dim);
    ComplexMatrix a(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            const double re = 2.0 * uniform01(rng) - 1.0;
            const double im = 2.0 * uniform01(rng) - 1.0;
            a(r, c) = Complex(re, im);
        }
    return HamiltonianSpec(0.5 * scale * (a + a.adjoint()));
}

double HamiltonianSpec::spectral_width() const {
    return evals_.maxCoeff() - evals_.minCoeff();
}

ComplexMatrix HamiltonianSpec::propagator(double d) const {
    ComplexVector phases(evals_.size());
    for (Eigen::Index k = 0; k < evals_.size(); ++k) phases(k) = std::polar(1.0, -evals_(k) * d);
    return evecs_ * phases.asDiagonal() * evecs_.adjoint();
}

// ----------------------------------------------------------------------------

DephasingChannel::DephasingChannel(ComplexMatrix pointer_basis, double rate)
    : basis_(std::move(pointer_basis)), rate_(rate) {
    if (basis_.rows() == 0 || basis_.rows() != basis_.cols())
        throw DimensionError("DephasingChannel: pointer basis must be a non-empty square matrix");
    if (!(rate_ >= 0.0) || !std::isfinite(rate_))
        throw ValidationError("DephasingChannel: rate must be finite and >= 0");
    const auto n = basis_.rows();
    const double defect = max_abs(basis_.adjoint() * basis_ - ComplexMatrix::Identity(n, n));
    if (defect > tol::validity) {
        std::ostringstream os;
        os << "DephasingChannel: pointer basis is not unitary (‖U†U − I‖ = " << defect << ")";
        throw ValidationError(os.str());
    }
    computational_ = basis_ == ComplexMatrix::Identity(n, n);
}

DephasingChannel DephasingChannel::computational(std::size_t dim, double rate) {
    return DephasingChannel(identity(dim), rate);
}

double DephasingChannel::coherence_factor(double d) const {
    const double x = rate_ * d;
    if (x > kFullDecoherence) return 0.0;
    return std::exp(-x);
}

// ----------------------------------------------------------------------------

WeightOperator apply_propagator(const WeightOperator& s, const ComplexMatrix& u) {
    require_dim(static_cast<std::size_t>(u.rows()), s.dim(), "apply_propagator");
    ComplexMatrix out = u * s.matrix() * u.adjoint();
    out = 0.5 * (out + out.adjoint());
    return WeightOperator::assume_valid(std::move(out));
}

WeightOperator evolve_unitary(const WeightOperator& s, const HamiltonianSpec& h, double d) {
    if (!(d >= 0.0)) throw PreconditionError("evolve_unitary: duration must be >= 0");
    require_dim(h.dim(), s.dim(), "evolve_unitary");
    if (d == 0.0) return s;
    return apply_propagator(s, h.propagator(d));
}

WeightOperator apply_dephasing(const WeightOperator& s, const DephasingChannel& ch, double d) {
    if (!(d >= 0.0)) throw PreconditionError("apply_dephasing: duration must be >= 0");
    require_dim(ch.dim(), s.dim(), "apply_dephasing");
    const double f = ch.coherence_factor(d);
    if (f == 1.0) return s;

    const ComplexMatrix& u = ch.pointer_basis();
    ComplexMatrix m = ch.is_computational() ? s.matrix() : ComplexMatrix(u.adjoint() * s.matrix() * u);
    const auto n = m.rows();
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            if (r != c) m(r, c) *= f;
    if (!ch.is_computational()) m = u * m * u.adjoint();
    return WeightOperator::assume_valid(std::move(m));
}

// ----------------------------------------------------------------------------

void BranchConfig::validate() const {
    if (terminal_count < 1 || terminal_count > max_terminals) {
        std::ostringstream os;
        os << "terminal_count must be in [1, " << max_terminals << "], got " << terminal_count;
        throw CapacityError(os.str());
    }
    if (!(release_probability >= 0.0 && release_probability <= 1.0))
        throw ValidationError("release_probability must be in [0, 1]");
}

BranchMixture::BranchMixture(RealVector weights, std::size_t terminal_count)
    : w_(std::move(weights)), n_(terminal_count) {
    if (n_ > BranchConfig::max_terminals || w_.size() != (Eigen::Index{1} << n_))
        throw DimensionError("BranchMixture: weight count must equal 2^terminal_count");
}

WeightOperator BranchMixture::to_weight_operator() const {
    if (dim() > max_dense_dim) {
        std::ostringstream os;
        os << "BranchMixture: dense form limited to dim " << max_dense_dim << ", got " << dim();
        throw CapacityError(os.str());
    }
    return WeightOperator::diagonal(w_);
}

BranchMixture release_branch_mixture(const BranchConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.terminal_count;
    const double p = cfg.release_probability;
    const std::size_t dim = std::size_t{1} << n;

    // weight by number of releases k: p^k (1-p)^(n-k)
    std::vector<double> by_releases(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        by_releases[k] = std::pow(p, static_cast<double>(k)) * std::pow(1.0 - p, static_cast<double>(n - k));

    RealVector w(static_cast<Eigen::Index>(dim));
    for (std::size_t pattern = 0; pattern < dim; ++pattern)
        w(static_cast<Eigen::Index>(pattern)) = by_releases[static_cast<std::size_t>(std::popcount(pattern))];
    return BranchMixture(std::move(w), n);
}

} // namespace qzeno
