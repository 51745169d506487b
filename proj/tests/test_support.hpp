// Random instance generators and independent oracles shared by the tests.

#pragma once

#include "qzeno/channels.hpp"
#include "qzeno/opalg.hpp"
#include "qzeno/random.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace qzeno::testing {

inline double gauss(Rng& rng) {
    // Box–Muller; u1 kept away from 0
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline ComplexMatrix random_complex(Rng& rng, std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    ComplexMatrix a(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) a(r, c) = Complex(gauss(rng), gauss(rng));
    return a;
}

/// Random positive weight operator A A† with trace scaled to `trace`.
inline WeightOperator random_state(Rng& rng, std::size_t dim, double trace = 1.0) {
    const ComplexMatrix a = random_complex(rng, dim);
    ComplexMatrix s = a * a.adjoint();
    s *= trace / s.trace().real();
    return WeightOperator(0.5 * (s + s.adjoint()));
}

/// Random rank-`rank` orthogonal projector.
inline Projector random_projector(Rng& rng, std::size_t dim, std::size_t rank) {
    const ComplexMatrix a = random_complex(rng, dim);
    Eigen::HouseholderQR<ComplexMatrix> qr(a);
    const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(static_cast<Eigen::Index>(dim),
                                                                        static_cast<Eigen::Index>(rank));
    ComplexMatrix p = q * q.adjoint();
    return Projector(0.5 * (p + p.adjoint()), "random");
}

inline ComplexMatrix random_hermitian(Rng& rng, std::size_t dim) {
    const ComplexMatrix a = random_complex(rng, dim);
    return 0.5 * (a + a.adjoint());
}

inline ComplexMatrix random_unitary(Rng& rng, std::size_t dim) {
    Eigen::HouseholderQR<ComplexMatrix> qr(random_complex(rng, dim));
    return qr.householderQ();
}

// ----------------------------------------------------------------------------
// Oracles
// ----------------------------------------------------------------------------

/// Two-factor partial trace by explicit index summation: keep factor 0 (dA)
/// or factor 1 (dB) of an operator on C^dA ⊗ C^dB.
inline ComplexMatrix brute_partial_trace(const ComplexMatrix& s, std::size_t da, std::size_t db, int keep) {
    const std::size_t kd = keep == 0 ? da : db;
    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(kd), static_cast<Eigen::Index>(kd));
    for (std::size_t a1 = 0; a1 < da; ++a1)
        for (std::size_t b1 = 0; b1 < db; ++b1)
            for (std::size_t a2 = 0; a2 < da; ++a2)
                for (std::size_t b2 = 0; b2 < db; ++b2) {
                    const bool traced_equal = keep == 0 ? b1 == b2 : a1 == a2;
                    if (!traced_equal) continue;
                    const std::size_t r = keep == 0 ? a1 : b1;
                    const std::size_t c = keep == 0 ? a2 : b2;
                    out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +=
                        s(static_cast<Eigen::Index>(a1 * db + b1), static_cast<Eigen::Index>(a2 * db + b2));
                }
    return out;
}

/// P-weight after N events for the two-level Rabi problem with total angle
/// ωT: process 1 leaves a diagonal state each step, whose population
/// difference shrinks by cos(ωd) per interval.
inline double rabi_recurrence_survival(std::size_t n, double omega_t) {
    return 0.5 + 0.5 * std::pow(std::cos(omega_t / static_cast<double>(n)), static_cast<double>(n));
}

/// Probability that every one of N events answers Yes: Π cos²(ωd/2).
inline double rabi_all_yes_probability(std::size_t n, double omega_t) {
    const double c = std::cos(0.5 * omega_t / static_cast<double>(n));
    return std::pow(c * c, static_cast<double>(n));
}

/// Pattern weights by multiplying one Bernoulli factor per terminal bit.
inline std::vector<double> enumerate_release_weights(std::size_t n, double p) {
    std::vector<double> w(std::size_t{1} << n, 1.0);
    for (std::size_t pattern = 0; pattern < w.size(); ++pattern)
        for (std::size_t bit = 0; bit < n; ++bit) w[pattern] *= ((pattern >> bit) & 1U) ? p : (1.0 - p);
    return w;
}

} // namespace qzeno::testing
