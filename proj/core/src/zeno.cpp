#include "qzeno/zeno.hpp"

#include "qzeno/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace qzeno {

namespace {

// Trajectories are aggregated in fixed-size chunks combined in index order,
// so floating sums do not depend on how chunks were spread over workers.
constexpr std::size_t kChunk = 256;

struct ChunkTotals {
    std::vector<std::size_t> trials;
    std::vector<std::size_t> yes;
    std::vector<double> expected;
    std::vector<double> variance;
    std::exception_ptr error;

    explicit ChunkTotals(std::size_t n) : trials(n, 0), yes(n, 0), expected(n, 0.0), variance(n, 0.0) {}
};

WeightOperator step(const WeightOperator& s, const ComplexMatrix& u, const ZenoProtocol& p, double d) {
    WeightOperator next = apply_propagator(s, u);
    if (p.dephasing) next = apply_dephasing(next, *p.dephasing, d);
    return next;
}

void require_in_subspace(const WeightOperator& s, const Projector& p) {
    const double total = s.trace();
    if (!(total > 0.0)) throw InvalidStateError("initial state has trace <= 0");
    const double inside = (p.matrix() * s.matrix() * p.matrix()).trace().real();
    if (std::abs(inside - total) > tol::validity * total) {
        std::ostringstream os;
        os << "initial state must lie in the '" << p.label() << "' subspace (P-weight " << inside / total << ")";
        throw PreconditionError(os.str());
    }
}

} // namespace

const char* to_string(RunMode m) noexcept { return m == RunMode::Expected ? "expected" : "sampled"; }

void ZenoProtocol::validate() const {
    if (!(total_time > 0.0) || !std::isfinite(total_time))
        throw ValidationError("total_time must be finite and > 0");
    if (event_count < 1) throw ValidationError("event_count must be >= 1");
    const std::size_t n = hamiltonian.dim();
    if (projector.dim() != n) throw DimensionError("projector dim does not match hamiltonian dim");
    if (initial_state.dim() != n) throw DimensionError("initial_state dim does not match hamiltonian dim");
    if (dephasing && dephasing->dim() != n)
        throw DimensionError("dephasing basis dim does not match hamiltonian dim");
    if (mode == RunMode::Sampled && trajectories < 1)
        throw ValidationError("sampled mode requires trajectories >= 1");
}

ProtocolEcho echo(const ZenoProtocol& p) {
    ProtocolEcho e;
    e.total_time = p.total_time;
    e.dim = p.hamiltonian.dim();
    e.projector_label = p.projector.label();
    if (p.dephasing) e.dephasing_rate = p.dephasing->rate();
    e.mode = p.mode;
    return e;
}

// ----------------------------------------------------------------------------

ExpectedRun run_expected(const ZenoProtocol& p) {
    p.validate();
    require_in_subspace(p.initial_state, p.projector);

    const double d = p.interval();
    const ComplexMatrix u = p.hamiltonian.propagator(d);
    WeightOperator s = p.initial_state;
    for (std::size_t k = 0; k < p.event_count; ++k) s = process1(step(s, u, p, d), p.projector);

    const double t0 = p.initial_state.trace();
    ExpectedRun out{
        SurvivalPoint{p.event_count, d, probability_yes(s, p.projector), std::nullopt, std::nullopt, std::nullopt},
        s, std::abs(s.trace() - t0) / t0};
    return out;
}

// ----------------------------------------------------------------------------

double EventStatistics::z_score() const {
    const double diff = static_cast<double>(yes_count) - expected_yes;
    if (variance <= 0.0) return std::abs(diff) < 1e-9 ? 0.0 : std::copysign(INFINITY, diff);
    return diff / std::sqrt(variance);
}

SampledRun run_sampled(const ZenoProtocol& p) {
    p.validate();
    if (p.mode != RunMode::Sampled) throw ValidationError("run_sampled requires mode = sampled");
    require_in_subspace(p.initial_state, p.projector);

    const std::size_t n_events = p.event_count;
    const std::size_t n_traj = p.trajectories;
    const double d = p.interval();
    const ComplexMatrix u = p.hamiltonian.propagator(d);
    const WeightOperator start = p.initial_state.normalized();

    std::vector<TrajectoryRecord> records(n_traj);
    const std::size_t n_chunks = (n_traj + kChunk - 1) / kChunk;
    std::vector<ChunkTotals> chunks;
    chunks.reserve(n_chunks);
    for (std::size_t c = 0; c < n_chunks; ++c) chunks.emplace_back(n_events);

    auto run_chunk = [&](std::size_t c) {
        ChunkTotals& tot = chunks[c];
        const std::size_t end = std::min(n_traj, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            TrajectoryRecord& rec = records[i];
            rec.index = i;
            rec.seed = stream_seed(p.root_seed, i);
            Rng rng(rec.seed);
            if (p.record_events) rec.events.reserve(n_events);

            WeightOperator s = start;
            bool all_yes = true;
            for (std::size_t k = 0; k < n_events; ++k) {
                s = step(s, u, p, d);
                const NatureAnswer a = sample_answer(s, p.projector, rng);
                s = apply_answer(s, p.projector, a.value).normalized();

                const bool yes = a.value == Answer::Yes;
                all_yes = all_yes && yes;
                rec.yes_count += yes ? 1 : 0;
                tot.trials[k] += 1;
                tot.yes[k] += yes ? 1 : 0;
                tot.expected[k] += a.probability_yes;
                tot.variance[k] += a.probability_yes * (1.0 - a.probability_yes);
                if (p.record_events)
                    rec.events.push_back({static_cast<double>(k + 1) * d, a.value, a.probability_yes});
            }
            rec.survived = all_yes;
        }
    };

    unsigned workers = p.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : p.workers;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_chunks));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) {
            try {
                run_chunk(c);
            } catch (...) {
                chunks[c].error = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (const auto& c : chunks)
        if (c.error) std::rethrow_exception(c.error);

    SampledRun out;
    out.events.resize(n_events);
    for (std::size_t k = 0; k < n_events; ++k) {
        EventStatistics& e = out.events[k];
        e.event = k + 1;
        e.timestamp = static_cast<double>(k + 1) * d;
        for (const auto& c : chunks) {
            e.trials += c.trials[k];
            e.yes_count += c.yes[k];
            e.expected_yes += c.expected[k];
            e.variance += c.variance[k];
        }
    }

    std::size_t survivors = 0;
    for (const auto& r : records) survivors += r.survived ? 1 : 0;
    const double m = static_cast<double>(n_traj);
    const double w = static_cast<double>(survivors) / m;

    out.point = SurvivalPoint{n_events, d, w, std::sqrt(w * (1.0 - w) / m), p.root_seed, n_traj};
    out.trajectories = std::move(records);
    return out;
}

// ----------------------------------------------------------------------------

SweepResult leakage_sweep(const ZenoProtocol& base, const std::vector<std::size_t>& counts) {
    if (counts.size() < 2) throw PreconditionError("leakage_sweep: need at least two event counts");
    const double width = base.hamiltonian.spectral_width();
    for (auto n : counts) {
        if (n < 1) throw PreconditionError("leakage_sweep: event counts must be >= 1");
        const double angle = width * base.total_time / static_cast<double>(n);
        if (!(angle < kSmallAngleLimit)) {
            std::ostringstream os;
            os << "leakage_sweep: N = " << n << " gives spectral angle " << angle << " >= " << kSmallAngleLimit;
            throw PreconditionError(os.str());
        }
    }

    SweepResult out;
    out.curve.metadata = echo(base);
    std::vector<double> xs;
    std::vector<double> ys;
    for (auto n : counts) {
        ZenoProtocol p = base;
        p.event_count = n;
        const ExpectedRun r = run_expected(p);
        out.curve.points.push_back(r.point);
        const double leak = 1.0 - r.point.survival;
        if (leak > 0.0 && std::isfinite(leak)) {
            xs.push_back(std::log(static_cast<double>(n)));
            ys.push_back(std::log(leak));
        }
    }

    // distinct abscissae needed for a slope
    const bool spread = xs.size() >= 2 && *std::max_element(xs.begin(), xs.end()) > *std::min_element(xs.begin(), xs.end());
    if (!spread) throw DegenerateFitError("leakage_sweep: fewer than two points with nonzero leakage");

    const double k = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= k;
    my /= k;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;

    for (const auto& a : out.curve.points)
        for (const auto& b : out.curve.points)
            if (b.event_count == 2 * a.event_count && a.survival < 1.0)
                out.doubling.push_back({a.event_count, (1.0 - b.survival) / (1.0 - a.survival)});
    return out;
}

// ----------------------------------------------------------------------------

void EffortSetting::validate() const {
    if (!(effort >= 0.0 && effort <= 1.0)) throw ValidationError("effort must be in [0, 1]");
    if (!(rate_min > 0.0)) throw ValidationError("rate_min must be > 0");
    if (!(rate_max >= rate_min) || !std::isfinite(rate_max))
        throw ValidationError("rate_max must be finite and >= rate_min");
}

std::size_t effort_to_interval(const EffortSetting& e, double total_time) {
    e.validate();
    if (!(total_time > 0.0)) throw ValidationError("total_time must be > 0");
    const double n = std::round(total_time * e.rate());
    return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

// ----------------------------------------------------------------------------

WeightOperator eq4_single_step(const WeightOperator& s, const HamiltonianSpec& h, const Projector& p, double d) {
    if (s.dim() != h.dim() || s.dim() != p.dim()) throw DimensionError("eq4_single_step: dimension mismatch");
    const ComplexMatrix& P = p.matrix();
    const ComplexMatrix Q = ComplexMatrix::Identity(P.rows(), P.cols()) - P;
    const ComplexMatrix& S = s.matrix();
    const ComplexMatrix fwd = h.propagator(d);  // exp(−iHd)
    const ComplexMatrix back = h.propagator(-d); // exp(+iHd)

    const ComplexMatrix inner = P * S * P + Q * S * Q;
    ComplexMatrix out = P * fwd * inner * back * P + Q * fwd * inner * back * Q;
    out = 0.5 * (out + out.adjoint());
    return WeightOperator::assume_valid(std::move(out));
}

bool block_compatible(const DephasingChannel& ch, const Projector& p, double tolerance) {
    if (ch.dim() != p.dim()) throw DimensionError("block_compatible: dimension mismatch");
    const ComplexMatrix& b = ch.pointer_basis();
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
        const double inside = (p.matrix() * b.col(c)).squaredNorm();
        if (std::min(inside, 1.0 - inside) > tolerance) return false;
    }
    return true;
}

MixtureRobustnessReport mixture_robustness_check(const ZenoProtocol& p, const WeightOperator& mixture) {
    if (!p.dephasing) throw PreconditionError("mixture_robustness_check: protocol has no dephasing channel");
    if (!block_compatible(*p.dephasing, p.projector))
        throw PreconditionError("mixture_robustness_check: pointer basis is not block-compatible with P");

    ZenoProtocol with = p;
    with.initial_state = mixture;
    with.mode = RunMode::Expected;
    ZenoProtocol without = with;
    without.dephasing.reset();

    MixtureRobustnessReport r;
    r.survival_with_dephasing = run_expected(with).point.survival;
    r.survival_without_dephasing = run_expected(without).point.survival;
    r.difference = std::abs(r.survival_with_dephasing - r.survival_without_dephasing);
    r.within_tolerance = r.difference <= kMixtureTolerance;
    return r;
}

} // namespace qzeno
