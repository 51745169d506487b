#include "qzeno/opalg.hpp"

#include "qzeno/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qzeno {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        std::ostringstream os;
        os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
        throw DimensionError(os.str());
    }
}

// Splits every full-space index into (kept compound index, traced compound
// index). Factor 0 is the slowest-varying digit.
struct IndexSplit {
    std::vector<std::size_t> kept;
    std::vector<std::size_t> traced;
    std::size_t traced_dim = 1;
};

IndexSplit split_indices(const FactorSpace& space) {
    const auto& dims = space.factor_dims();
    const auto& kept = space.kept();
    std::vector<bool> is_kept(dims.size(), false);
    for (auto k : kept) is_kept[k] = true;

    IndexSplit out;
    out.traced_dim = space.full_dim() / space.kept_dim();
    out.kept.resize(space.full_dim());
    out.traced.resize(space.full_dim());

    std::vector<std::size_t> digits(dims.size(), 0);
    for (std::size_t i = 0; i < space.full_dim(); ++i) {
        std::size_t rem = i;
        for (std::size_t f = dims.size(); f-- > 0;) {
            digits[f] = rem % dims[f];
            rem /= dims[f];
        }
        std::size_t k = 0;
        std::size_t t = 0;
        for (std::size_t f = 0; f < dims.size(); ++f) {
            if (is_kept[f]) k = k * dims[f] + digits[f];
            else t = t * dims[f] + digits[f];
        }
        out.kept[i] = k;
        out.traced[i] = t;
    }
    return out;
}

} // namespace

// ----------------------------------------------------------------------------

ComplexMatrix identity(std::size_t dim) {
    if (dim == 0) throw DimensionError("identity: dim must be >= 1");
    return ComplexMatrix::Identity(idx(dim), idx(dim));
}

ComplexMatrix basis_op(std::size_t dim, std::size_t i, std::size_t j) {
    if (dim == 0) throw DimensionError("basis_op: dim must be >= 1");
    if (i >= dim || j >= dim) throw DimensionError("basis_op: index out of range");
    ComplexMatrix m = ComplexMatrix::Zero(idx(dim), idx(dim));
    m(idx(i), idx(j)) = 1.0;
    return m;
}

ComplexMatrix sigma_x() {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}

ComplexMatrix sigma_y() {
    ComplexMatrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0),
         Complex(0.0, 1.0), 0.0;
    return m;
}

ComplexMatrix sigma_z() {
    ComplexMatrix m(2, 2);
    m << 1.0, 0.0,
         0.0, -1.0;
    return m;
}

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    return max_abs(m - m.adjoint());
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
    require_square(m, "hermitian_eigenvalues");
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// ----------------------------------------------------------------------------

ValidationReport validate_weight_operator(const ComplexMatrix& m) {
    ValidationReport r;
    r.square = m.rows() > 0 && m.rows() == m.cols();
    if (!r.square) {
        r.hermiticity_defect = std::numeric_limits<double>::infinity();
        r.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
        r.failure = "not a non-empty square matrix";
        return r;
    }
    r.dim = static_cast<std::size_t>(m.rows());
    r.hermiticity_defect = hermiticity_defect(m);
    r.min_eigenvalue = hermitian_eigenvalues(m).minCoeff();
    r.trace = m.trace();

    std::ostringstream why;
    if (!(r.hermiticity_defect <= tol::validity)) {
        why << "non-Hermitian (defect " << r.hermiticity_defect << ")";
    } else if (!(r.min_eigenvalue >= -tol::validity)) {
        why << "not positive semidefinite (min eigenvalue " << r.min_eigenvalue << ")";
    } else if (std::abs(r.trace.imag()) > tol::validity || !(r.trace.real() > 0.0)) {
        why << "trace must be real and > 0 (got " << r.trace.real() << (r.trace.imag() < 0 ? "" : "+")
            << r.trace.imag() << "i)";
    }
    r.failure = why.str();
    r.passed = r.failure.empty();
    return r;
}

// ----------------------------------------------------------------------------

WeightOperator::WeightOperator(ComplexMatrix m) : m_(std::move(m)) {
    const auto report = validate_weight_operator(m_);
    if (!report.passed) throw ValidationError("invalid weight operator: " + report.failure);
}

WeightOperator WeightOperator::assume_valid(ComplexMatrix m) {
    require_square(m, "WeightOperator");
    return WeightOperator(std::move(m), Unchecked{});
}

WeightOperator WeightOperator::pure(const ComplexVector& psi) {
    if (psi.size() == 0) throw DimensionError("WeightOperator::pure: empty vector");
    if (psi.squaredNorm() <= 0.0) throw ValidationError("WeightOperator::pure: zero vector");
    return WeightOperator(psi * psi.adjoint(), Unchecked{});
}

WeightOperator WeightOperator::basis_state(std::size_t dim, std::size_t index) {
    return WeightOperator(basis_op(dim, index, index), Unchecked{});
}

WeightOperator WeightOperator::diagonal(const RealVector& weights) {
    if (weights.size() == 0) throw DimensionError("WeightOperator::diagonal: empty weights");
    if (weights.minCoeff() < 0.0) throw ValidationError("WeightOperator::diagonal: negative weight");
    if (!(weights.sum() > 0.0)) throw ValidationError("WeightOperator::diagonal: zero total weight");
    ComplexMatrix m = weights.cast<Complex>().asDiagonal();
    return WeightOperator(std::move(m), Unchecked{});
}

WeightOperator WeightOperator::normalized() const {
    const double t = trace();
    if (!(t > 0.0)) throw InvalidStateError("cannot normalize a weight operator with trace <= 0");
    return WeightOperator(m_ / t, Unchecked{});
}

WeightOperator WeightOperator::scaled(double c) const {
    if (!(c > 0.0)) throw ValidationError("WeightOperator::scaled: factor must be > 0");
    return WeightOperator(m_ * c, Unchecked{});
}

// ----------------------------------------------------------------------------

Projector::Projector(ComplexMatrix m, std::string label) : m_(std::move(m)), label_(std::move(label)) {
    require_square(m_, "Projector");
    const double herm = hermiticity_defect(m_);
    if (herm > tol::validity) {
        std::ostringstream os;
        os << "projector '" << label_ << "' is not Hermitian (defect " << herm << ")";
        throw ValidationError(os.str());
    }
    const double idem = max_abs(m_ * m_ - m_);
    if (idem > tol::validity) {
        std::ostringstream os;
        os << "projector '" << label_ << "' is not idempotent (‖P²−P‖ = " << idem << ")";
        throw ValidationError(os.str());
    }
}

Projector Projector::onto_basis(std::size_t dim, const std::vector<std::size_t>& indices,
                                std::string label) {
    ComplexMatrix m = ComplexMatrix::Zero(idx(dim), idx(dim));
    for (auto i : indices) {
        if (i >= dim) throw DimensionError("Projector::onto_basis: index out of range");
        m(idx(i), idx(i)) = 1.0;
    }
    return Projector(std::move(m), std::move(label));
}

Projector Projector::onto_span(const ComplexMatrix& columns, std::string label) {
    if (columns.rows() == 0) throw DimensionError("Projector::onto_span: empty column set");
    Eigen::ColPivHouseholderQR<ComplexMatrix> piv(columns);
    const Eigen::Index rank = piv.rank();
    const ComplexMatrix q = piv.householderQ() * ComplexMatrix::Identity(columns.rows(), rank);
    ComplexMatrix p = q * q.adjoint();
    p = 0.5 * (p + p.adjoint());
    return Projector(std::move(p), std::move(label));
}

Projector Projector::complement() const {
    ComplexMatrix c = ComplexMatrix::Identity(m_.rows(), m_.cols()) - m_;
    return Projector(std::move(c), "not " + label_);
}

// ----------------------------------------------------------------------------

FactorSpace::FactorSpace(std::vector<std::size_t> factor_dims, std::vector<std::size_t> kept)
    : dims_(std::move(factor_dims)), kept_(std::move(kept)) {
    if (dims_.empty()) throw ValidationError("FactorSpace: factor_dims must be non-empty");
    for (auto d : dims_) {
        if (d == 0) throw ValidationError("FactorSpace: factor dimensions must be positive");
        full_ *= d;
    }
    if (kept_.empty()) throw ValidationError("FactorSpace: kept_indices must be non-empty");
    std::sort(kept_.begin(), kept_.end());
    if (std::adjacent_find(kept_.begin(), kept_.end()) != kept_.end())
        throw ValidationError("FactorSpace: kept_indices contain duplicates");
    if (kept_.back() >= dims_.size()) throw ValidationError("FactorSpace: kept index out of range");
    for (auto k : kept_) kept_dim_ *= dims_[k];
}

WeightOperator partial_trace(const WeightOperator& s, const FactorSpace& space) {
    if (s.dim() != space.full_dim()) {
        std::ostringstream os;
        os << "partial_trace: factor_dims (product " << space.full_dim()
           << ") inconsistent with operator dim " << s.dim();
        throw DimensionError(os.str());
    }
    const auto split = split_indices(space);
    const std::size_t kd = space.kept_dim();
    const std::size_t td = split.traced_dim;

    // full[k * td + t] = full-space index with kept part k and traced part t
    std::vector<std::size_t> full(space.full_dim());
    for (std::size_t i = 0; i < space.full_dim(); ++i) full[split.kept[i] * td + split.traced[i]] = i;

    const ComplexMatrix& m = s.matrix();
    ComplexMatrix out = ComplexMatrix::Zero(idx(kd), idx(kd));
    for (std::size_t r = 0; r < kd; ++r)
        for (std::size_t c = 0; c < kd; ++c) {
            Complex acc{0.0, 0.0};
            for (std::size_t t = 0; t < td; ++t) acc += m(idx(full[r * td + t]), idx(full[c * td + t]));
            out(idx(r), idx(c)) = acc;
        }
    return WeightOperator::assume_valid(std::move(out));
}

ComplexMatrix extend_to_full(const ComplexMatrix& op, const FactorSpace& space) {
    if (op.rows() != op.cols() || static_cast<std::size_t>(op.rows()) != space.kept_dim())
        throw DimensionError("extend_to_full: operator dim does not match kept factors");
    const auto split = split_indices(space);
    const std::size_t n = space.full_dim();
    ComplexMatrix out = ComplexMatrix::Zero(idx(n), idx(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (split.traced[i] == split.traced[j]) out(idx(i), idx(j)) = op(idx(split.kept[i]), idx(split.kept[j]));
    return out;
}

Projector extend_to_full(const Projector& p, const FactorSpace& space) {
    return Projector(extend_to_full(p.matrix(), space), p.label());
}

Complex expectation_value(const WeightOperator& s, const ComplexMatrix& a) {
    if (a.rows() != a.cols() || static_cast<std::size_t>(a.rows()) != s.dim())
        throw DimensionError("expectation_value: observable dim does not match state dim");
    const double t = s.trace();
    if (!(t > 0.0)) throw InvalidStateError("expectation_value: Tr S must be > 0");
    // Tr(S A) without forming the product
    const Complex tr = (s.matrix().transpose().cwiseProduct(a)).sum();
    return tr / t;
}

} // namespace qzeno
