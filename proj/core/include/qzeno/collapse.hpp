// collapse.hpp — event dynamics: the probability rule, reduction on a Yes/No
// answer, von Neumann process 1, and selection of the candidate experience.

#pragma once

#include "qzeno/opalg.hpp"
#include "qzeno/random.hpp"

#include <cstddef>
#include <vector>

namespace qzeno {

enum class Answer { Yes, No };

const char* to_string(Answer a) noexcept;

struct NatureAnswer {
    Answer value = Answer::No;
    double probability_yes = 0.0;
};

struct ExperienceEvent {
    Projector projector;
    double timestamp = 0.0;
};

/// Branches whose trace falls below this are reported as degenerate.
inline constexpr double kDegenerateBranchTrace = 1e-15;

/// Tr(S P) / Tr(S), clamped to [0, 1]. Throws InvalidStateError if Tr S <= 0.
double probability_yes(const WeightOperator& s, const Projector& p);

/// Yes: P S P. No: (1 − P) S (1 − P). Not renormalized, so the trace of the
/// result is Tr(S) times the probability of `answer`.
WeightOperator apply_answer(const WeightOperator& s, const Projector& p, Answer answer);

/// P S P + (1 − P) S (1 − P).
WeightOperator process1(const WeightOperator& s, const Projector& p);

/// Index of the candidate maximizing Tr(S P)/Tr(S); ties go to the lowest index.
std::size_t select_event_index(const WeightOperator& s, const std::vector<Projector>& candidates);

Projector select_event(const WeightOperator& s, const std::vector<Projector>& candidates);

/// Draws Yes with probability probability_yes(s, p), consuming one uniform
/// from `rng`.
NatureAnswer sample_answer(const WeightOperator& s, const Projector& p, Rng& rng);

} // namespace qzeno
