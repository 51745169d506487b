#include "qzeno/collapse.hpp"

#include "qzeno/errors.hpp"

#include <algorithm>
#include <sstream>

namespace qzeno {

namespace {

void require_same_dim(const WeightOperator& s, const Projector& p, const char* what) {
    if (s.dim() != p.dim()) {
        std::ostringstream os;
        os << what << ": projector '" << p.label() << "' dim " << p.dim() << " does not match state dim "
           << s.dim();
        throw DimensionError(os.str());
    }
}

ComplexMatrix sandwich(const ComplexMatrix& q, const ComplexMatrix& m) {
    ComplexMatrix out = q * m * q;
    return 0.5 * (out + out.adjoint());
}

} // namespace

const char* to_string(Answer a) noexcept { return a == Answer::Yes ? "yes" : "no"; }

double probability_yes(const WeightOperator& s, const Projector& p) {
    require_same_dim(s, p, "probability_yes");
    const double t = s.trace();
    if (!(t > 0.0)) throw InvalidStateError("probability_yes: Tr S must be > 0");
    const double tp = (s.matrix().transpose().cwiseProduct(p.matrix())).sum().real();
    return std::clamp(tp / t, 0.0, 1.0);
}

WeightOperator apply_answer(const WeightOperator& s, const Projector& p, Answer answer) {
    require_same_dim(s, p, "apply_answer");
    const ComplexMatrix q = answer == Answer::Yes
                                ? p.matrix()
                                : ComplexMatrix(ComplexMatrix::Identity(p.matrix().rows(), p.matrix().cols()) -
                                                p.matrix());
    ComplexMatrix out = sandwich(q, s.matrix());
    const double tr = out.trace().real();
    if (tr < kDegenerateBranchTrace) {
        std::ostringstream os;
        os << "apply_answer: answer '" << to_string(answer) << "' to '" << p.label()
           << "' leaves a branch of trace " << tr;
        throw DegenerateBranchError(os.str());
    }
    return WeightOperator::assume_valid(std::move(out));
}

WeightOperator process1(const WeightOperator& s, const Projector& p) {
    require_same_dim(s, p, "process1");
    const ComplexMatrix& pm = p.matrix();
    // PSP + QSQ = S - PS - SP + 2 PSP, with SP = (PS)† for Hermitian S, P
    const ComplexMatrix ps = pm * s.matrix();
    ComplexMatrix out = s.matrix() - ps - ps.adjoint() + 2.0 * (ps * pm);
    out = 0.5 * (out + out.adjoint());
    return WeightOperator::assume_valid(std::move(out));
}

std::size_t select_event_index(const WeightOperator& s, const std::vector<Projector>& candidates) {
    if (candidates.empty()) throw ConfigError("candidates", "select_event needs at least one candidate");
    std::size_t best = 0;
    double best_p = probability_yes(s, candidates[0]);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double pi = probability_yes(s, candidates[i]);
        if (pi > best_p) {
            best = i;
            best_p = pi;
        }
    }
    return best;
}

Projector select_event(const WeightOperator& s, const std::vector<Projector>& candidates) {
    return candidates[select_event_index(s, candidates)];
}

NatureAnswer sample_answer(const WeightOperator& s, const Projector& p, Rng& rng) {
    const double py = probability_yes(s, p);
    const double u = uniform01(rng);
    return NatureAnswer{u < py ? Answer::Yes : Answer::No, py};
}

} // namespace qzeno
