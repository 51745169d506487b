// zeno.hpp — repeated process 1 at a fixed interval: survival in the P
// subspace, its leakage scaling, sampled trajectories, and the effort knob.

#pragma once

#include "qzeno/channels.hpp"
#include "qzeno/collapse.hpp"
#include "qzeno/opalg.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace qzeno {

enum class RunMode { Expected, Sampled };

const char* to_string(RunMode m) noexcept;

/// Events at t_k = k·d, k = 1..N, with d = T/N. Each interval applies the
/// unitary step, then the optional dephasing, then the event.
struct ZenoProtocol {
    double total_time = 1.0;
    std::size_t event_count = 1;
    HamiltonianSpec hamiltonian;
    Projector projector;
    WeightOperator initial_state;
    std::optional<DephasingChannel> dephasing;
    RunMode mode = RunMode::Expected;
    std::size_t trajectories = 1;
    std::uint64_t root_seed = 0;
    /// Keep per-event logs for every trajectory (Sampled mode).
    bool record_events = false;
    /// Worker threads for Sampled mode; 0 picks the hardware concurrency.
    unsigned workers = 0;

    double interval() const { return total_time / static_cast<double>(event_count); }

    /// Throws ValidationError / DimensionError on an inconsistent protocol.
    void validate() const;
};

struct SurvivalPoint {
    std::size_t event_count = 0;
    double interval = 0.0;
    double survival = 0.0;
    std::optional<double> standard_error;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trajectories;
};

struct ProtocolEcho {
    double total_time = 0.0;
    std::size_t dim = 0;
    std::string projector_label;
    std::optional<double> dephasing_rate;
    RunMode mode = RunMode::Expected;
};

struct SurvivalCurve {
    std::vector<SurvivalPoint> points;
    ProtocolEcho metadata;
};

ProtocolEcho echo(const ZenoProtocol& p);

// ----------------------------------------------------------------------------

struct ExpectedRun {
    SurvivalPoint point;
    WeightOperator final_state;
    /// |Tr S_T − Tr S_0| / Tr S_0.
    double trace_drift = 0.0;
};

/// Deterministic propagation of the full (answer-agnostic) state. Survival is
/// Tr(P S_T)/Tr(S_T). Requires the initial state to lie in the P subspace.
ExpectedRun run_expected(const ZenoProtocol& p);

struct EventRecord {
    double timestamp = 0.0;
    Answer answer = Answer::No;
    double probability_yes = 0.0;
};

struct TrajectoryRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    bool survived = false;
    std::size_t yes_count = 0;
    std::vector<EventRecord> events; // empty unless record_events
};

/// Per-event aggregate over all trajectories: observed Yes count against the
/// sum of the probabilities recorded when each answer was drawn.
struct EventStatistics {
    std::size_t event = 0; // 1-based
    double timestamp = 0.0;
    std::size_t trials = 0;
    std::size_t yes_count = 0;
    double expected_yes = 0.0;
    double variance = 0.0;

    /// (yes_count − expected_yes) / sqrt(variance); 0 when variance is 0 and
    /// the counts agree exactly.
    double z_score() const;
};

struct SampledRun {
    SurvivalPoint point;
    std::vector<TrajectoryRecord> trajectories;
    std::vector<EventStatistics> events;
};

/// Monte Carlo over trajectories: at each event an answer is drawn from the
/// probability rule and the state is reduced and renormalized. Survival is
/// the fraction of trajectories answering Yes at every event. Results are
/// independent of the worker count.
SampledRun run_sampled(const ZenoProtocol& p);

// ----------------------------------------------------------------------------

struct DoublingRatio {
    std::size_t event_count = 0;
    double ratio = 0.0; // leakage(2N) / leakage(N)
};

struct SweepResult {
    SurvivalCurve curve;
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<DoublingRatio> doubling;
};

/// Runs run_expected for every count and fits log(1 − w) against log N by
/// least squares.
SweepResult leakage_sweep(const ZenoProtocol& base, const std::vector<std::size_t>& counts);

/// Small-angle bound on spectral_width(H)·d required by leakage_sweep.
inline constexpr double kSmallAngleLimit = 0.3;

// ----------------------------------------------------------------------------

struct EffortSetting {
    double effort = 0.0;
    double rate_min = 1.0;
    double rate_max = 1.0;

    void validate() const;
    double rate() const { return rate_min + effort * (rate_max - rate_min); }
    double interval() const { return 1.0 / rate(); }
};

/// N = max(1, round(T · rate(effort))).
std::size_t effort_to_interval(const EffortSetting& e, double total_time);

// ----------------------------------------------------------------------------

/// One interval written out term by term:
/// P e^{−iHd}[PSP + (1−P)S(1−P)]e^{+iHd}P + (1−P)e^{−iHd}[...]e^{+iHd}(1−P).
WeightOperator eq4_single_step(const WeightOperator& s, const HamiltonianSpec& h, const Projector& p,
                               double d);

struct MixtureRobustnessReport {
    double survival_with_dephasing = 0.0;
    double survival_without_dephasing = 0.0;
    double difference = 0.0;
    bool within_tolerance = false;
};

inline constexpr double kMixtureTolerance = 1e-9;

/// Runs run_expected from `mixture` with and without the protocol's dephasing
/// channel. The channel's pointer vectors must each lie in P or in 1 − P.
MixtureRobustnessReport mixture_robustness_check(const ZenoProtocol& p, const WeightOperator& mixture);

/// True when every pointer vector lies in range(P) or range(1 − P) within tol.
bool block_compatible(const DephasingChannel& ch, const Projector& p, double tolerance = tol::validity);

} // namespace qzeno
