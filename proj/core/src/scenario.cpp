#include "qzeno/scenario.hpp"

#include "json_text.hpp"

#include <chrono>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#ifndef QZENO_VERSION
#define QZENO_VERSION "0.0.0"
#endif

namespace qzeno {

using nlohmann::json;

const char* version() noexcept { return QZENO_VERSION; }

const char* to_string(ScenarioKind k) noexcept {
    switch (k) {
    case ScenarioKind::Zeno: return "zeno";
    case ScenarioKind::ZenoSweep: return "zeno-sweep";
    case ScenarioKind::Calcium: return "calcium";
    case ScenarioKind::Branch: return "branch";
    case ScenarioKind::CustomPipeline: return "custom-pipeline";
    }
    return "?";
}

const char* to_string(OutputFormat f) noexcept { return f == OutputFormat::Csv ? "csv" : "json"; }

const char* to_string(PipelineStep::Op op) noexcept {
    switch (op) {
    case PipelineStep::Op::Evolve: return "evolve";
    case PipelineStep::Op::Dephase: return "dephase";
    case PipelineStep::Op::Process1: return "process1";
    case PipelineStep::Op::Answer: return "answer";
    case PipelineStep::Op::Sample: return "sample";
    case PipelineStep::Op::Select: return "select";
    }
    return "?";
}

namespace {

// ----------------------------------------------------------------------------
// Field readers. Every key read is marked; finish() rejects the rest.
// ----------------------------------------------------------------------------

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be a JSON object");
    }

    const std::string& path() const { return path_; }
    std::string field(const std::string& key) const { return join(path_, key); }

    bool has(const std::string& key) {
        used_.insert(key);
        return j_.contains(key);
    }

    const json& at(const std::string& key) {
        if (!has(key)) throw ConfigError(field(key), "required field is missing");
        return j_.at(key);
    }

    double number(const std::string& key) { return as_number(at(key), field(key)); }
    double number_or(const std::string& key, double def) { return has(key) ? number(key) : def; }

    std::uint64_t uint(const std::string& key) { return as_uint(at(key), field(key)); }
    std::uint64_t uint_or(const std::string& key, std::uint64_t def) { return has(key) ? uint(key) : def; }

    bool boolean_or(const std::string& key, bool def) {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(field(key), "must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key) {
        const json& v = at(key);
        if (!v.is_string()) throw ConfigError(field(key), "must be a string");
        return v.get<std::string>();
    }
    std::string string_or(const std::string& key, const std::string& def) { return has(key) ? string(key) : def; }

    Obj object(const std::string& key) { return Obj(at(key), field(key)); }

    void finish(const std::string& context) const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw ConfigError(field(it.key()), "unknown field" + context);
    }

    static double as_number(const json& v, const std::string& where) {
        if (!v.is_number()) throw ConfigError(where, "must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(where, "must be finite");
        return x;
    }

    static std::uint64_t as_uint(const json& v, const std::string& where) {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) {
            if (v.get<std::int64_t>() < 0) throw ConfigError(where, "must be a non-negative integer");
            return static_cast<std::uint64_t>(v.get<std::int64_t>());
        }
        throw ConfigError(where, "must be a non-negative integer");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

// Runs `f`, turning library validation errors into ConfigErrors at `where`.
template <class F>
auto guarded(const std::string& where, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(where, e.what());
    }
}

// ----------------------------------------------------------------------------
// Operator specs
// ----------------------------------------------------------------------------

ComplexMatrix parse_matrix(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where, "must be a non-empty array of rows");
    const auto n = static_cast<Eigen::Index>(v.size());
    ComplexMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const json& row = v[static_cast<std::size_t>(r)];
        const std::string rw = where + "[" + std::to_string(r) + "]";
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw ConfigError(rw, "each row must have " + std::to_string(n) + " entries (square matrix)");
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = [&] {
            const json& e = row[static_cast<std::size_t>(c)];
            const std::string ew = rw + "[" + std::to_string(c) + "]";
            if (e.is_number()) return Complex(Obj::as_number(e, ew), 0.0);
            if (e.is_array() && e.size() == 2) return Complex(Obj::as_number(e[0], ew), Obj::as_number(e[1], ew));
            throw ConfigError(ew, "entry must be a number or [re, im]");
        }();
    }
    return m;
}

ComplexVector parse_vector(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where, "must be a non-empty array");
    ComplexVector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        const json& e = v[i];
        const std::string ew = where + "[" + std::to_string(i) + "]";
        if (e.is_number()) out(static_cast<Eigen::Index>(i)) = Complex(Obj::as_number(e, ew), 0.0);
        else if (e.is_array() && e.size() == 2)
            out(static_cast<Eigen::Index>(i)) = Complex(Obj::as_number(e[0], ew), Obj::as_number(e[1], ew));
        else throw ConfigError(ew, "entry must be a number or [re, im]");
    }
    return out;
}

std::vector<std::size_t> parse_index_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where, "must be an array of indices");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(static_cast<std::size_t>(Obj::as_uint(v[i], where + "[" + std::to_string(i) + "]")));
    return out;
}

FactorSpace parse_factor_space(Obj o) {
    const std::string where = o.path();
    auto dims = parse_index_list(o.at("factor_dims"), o.field("factor_dims"));
    auto keep = parse_index_list(o.at("keep"), o.field("keep"));
    o.finish("");
    return guarded(where, [&] { return FactorSpace(std::move(dims), std::move(keep)); });
}

HamiltonianSpec parse_hamiltonian(Obj o) {
    const std::string where = o.path();
    if (o.has("entries")) {
        const std::string f = o.field("entries");
        ComplexMatrix m = parse_matrix(o.at("entries"), f);
        o.finish(" (explicit hamiltonian takes only 'entries')");
        return guarded(f, [&] { return HamiltonianSpec(std::move(m)); });
    }
    const std::string preset = o.string("preset");
    if (preset == "rabi") {
        const double omega = o.number("omega");
        o.finish(" for preset 'rabi'");
        return HamiltonianSpec::rabi(omega);
    }
    if (preset == "coupling") {
        const auto dim = o.uint("dim");
        const auto i = o.uint("i");
        const auto j = o.uint("j");
        const double omega = o.number("omega");
        o.finish(" for preset 'coupling'");
        if (dim < 2) throw ConfigError(o.field("dim"), "must be >= 2");
        if (i >= dim) throw ConfigError(o.field("i"), "must be < dim");
        if (j >= dim) throw ConfigError(o.field("j"), "must be < dim");
        if (i == j) throw ConfigError(o.field("j"), "must differ from i");
        return HamiltonianSpec::coupling(dim, i, j, omega);
    }
    if (preset == "random-hermitian") {
        const auto seed = o.uint("seed");
        const auto dim = o.uint("dim");
        const double scale = o.number_or("scale", 1.0);
        o.finish(" for preset 'random-hermitian'");
        if (dim < 1 || dim > 1024) throw ConfigError(o.field("dim"), "must be in [1, 1024]");
        return HamiltonianSpec::random(seed, dim, scale);
    }
    throw ConfigError(o.field("preset"), "unknown preset '" + preset + "' (rabi, coupling, random-hermitian)");
}

Projector parse_projector(Obj o, std::size_t dim) {
    const std::string where = o.path();
    const std::string label = o.string_or("label", "E");
    std::optional<FactorSpace> extend;
    if (o.has("extend")) extend = parse_factor_space(o.object("extend"));
    const std::size_t local_dim = extend ? extend->kept_dim() : dim;
    if (extend && extend->full_dim() != dim)
        throw ConfigError(join(where, "extend.factor_dims"),
                          "product " + std::to_string(extend->full_dim()) + " does not match system dim " +
                              std::to_string(dim));

    std::optional<Projector> local;
    if (o.has("basis")) {
        const auto idx = parse_index_list(o.at("basis"), o.field("basis"));
        for (std::size_t k = 0; k < idx.size(); ++k)
            if (idx[k] >= local_dim)
                throw ConfigError(o.field("basis") + "[" + std::to_string(k) + "]",
                                  "index out of range for dim " + std::to_string(local_dim));
        local = Projector::onto_basis(local_dim, idx, label);
    } else if (o.has("entries")) {
        ComplexMatrix m = parse_matrix(o.at("entries"), o.field("entries"));
        if (static_cast<std::size_t>(m.rows()) != local_dim)
            throw ConfigError(o.field("entries"), "dim " + std::to_string(m.rows()) + " != " + std::to_string(local_dim));
        local = guarded(where, [&] { return Projector(std::move(m), label); });
    } else {
        throw ConfigError(where, "needs 'basis' (index list) or 'entries'");
    }
    o.finish("");
    if (extend) return guarded(where, [&] { return extend_to_full(*local, *extend); });
    return *local;
}

WeightOperator parse_state(Obj o, std::size_t dim) {
    const std::string where = o.path();
    auto check_dim = [&](std::size_t got, const std::string& f) {
        if (got != dim) throw ConfigError(f, "dim " + std::to_string(got) + " != system dim " + std::to_string(dim));
    };
    std::optional<WeightOperator> s;
    if (o.has("basis")) {
        const auto i = o.uint("basis");
        if (i >= dim) throw ConfigError(o.field("basis"), "index out of range");
        s = WeightOperator::basis_state(dim, i);
    } else if (o.has("diagonal")) {
        const ComplexVector v = parse_vector(o.at("diagonal"), o.field("diagonal"));
        check_dim(static_cast<std::size_t>(v.size()), o.field("diagonal"));
        if (v.imag().cwiseAbs().maxCoeff() != 0.0) throw ConfigError(o.field("diagonal"), "weights must be real");
        RealVector w = v.real();
        s = guarded(o.field("diagonal"), [&] { return WeightOperator::diagonal(w); });
    } else if (o.has("pure")) {
        const ComplexVector v = parse_vector(o.at("pure"), o.field("pure"));
        check_dim(static_cast<std::size_t>(v.size()), o.field("pure"));
        s = guarded(o.field("pure"), [&] { return WeightOperator::pure(v); });
    } else if (o.has("entries")) {
        ComplexMatrix m = parse_matrix(o.at("entries"), o.field("entries"));
        check_dim(static_cast<std::size_t>(m.rows()), o.field("entries"));
        s = guarded(where, [&] { return WeightOperator(std::move(m)); });
    } else {
        throw ConfigError(where, "needs one of 'basis', 'diagonal', 'pure', 'entries'");
    }
    o.finish("");
    return *s;
}

DephasingChannel parse_dephasing(Obj o, std::size_t dim) {
    const std::string where = o.path();
    const double rate = o.number("rate");
    if (rate < 0.0) throw ConfigError(o.field("rate"), "must be >= 0");
    ComplexMatrix basis = identity(dim);
    if (o.has("basis")) {
        const json& b = o.at("basis");
        if (b.is_string()) {
            if (b.get<std::string>() != "computational")
                throw ConfigError(o.field("basis"), "must be \"computational\" or a unitary matrix");
        } else {
            basis = parse_matrix(b, o.field("basis"));
            if (static_cast<std::size_t>(basis.rows()) != dim)
                throw ConfigError(o.field("basis"), "dim does not match system dim " + std::to_string(dim));
        }
    }
    o.finish("");
    return guarded(where, [&] { return DephasingChannel(std::move(basis), rate); });
}

PipelineStep parse_step(Obj o, std::size_t dim, bool has_dephasing, bool has_seed) {
    PipelineStep st;
    const std::string op = o.string("op");
    if (op == "evolve" || op == "dephase") {
        st.op = op == "evolve" ? PipelineStep::Op::Evolve : PipelineStep::Op::Dephase;
        st.duration = o.number("duration");
        if (st.duration < 0.0) throw ConfigError(o.field("duration"), "must be >= 0");
        if (st.op == PipelineStep::Op::Dephase && !has_dephasing)
            throw ConfigError(o.field("op"), "'dephase' step requires a top-level 'dephasing' channel");
    } else if (op == "process1") {
        st.op = PipelineStep::Op::Process1;
    } else if (op == "answer") {
        st.op = PipelineStep::Op::Answer;
        const std::string v = o.string("value");
        if (v == "yes") st.answer = Answer::Yes;
        else if (v == "no") st.answer = Answer::No;
        else throw ConfigError(o.field("value"), "must be \"yes\" or \"no\"");
    } else if (op == "sample") {
        st.op = PipelineStep::Op::Sample;
        if (!has_seed) throw ConfigError("root_seed", "required when the pipeline contains a 'sample' step");
    } else if (op == "select") {
        st.op = PipelineStep::Op::Select;
        const json& c = o.at("candidates");
        if (!c.is_array() || c.empty()) throw ConfigError(o.field("candidates"), "must be a non-empty array");
        for (std::size_t i = 0; i < c.size(); ++i)
            st.candidates.push_back(parse_projector(Obj(c[i], o.field("candidates") + "[" + std::to_string(i) + "]"), dim));
    } else {
        throw ConfigError(o.field("op"), "unknown op '" + op + "' (evolve, dephase, process1, answer, sample, select)");
    }
    o.finish(" for op '" + op + "'");
    return st;
}

ScenarioKind parse_kind(const std::string& s) {
    if (s == "zeno") return ScenarioKind::Zeno;
    if (s == "zeno-sweep") return ScenarioKind::ZenoSweep;
    if (s == "calcium") return ScenarioKind::Calcium;
    if (s == "branch") return ScenarioKind::Branch;
    if (s == "custom-pipeline") return ScenarioKind::CustomPipeline;
    throw ConfigError("scenario", "unknown scenario '" + s + "' (zeno, zeno-sweep, calcium, branch, custom-pipeline)");
}

bool accepts_seed(ScenarioKind k) { return k == ScenarioKind::Zeno || k == ScenarioKind::CustomPipeline; }

// System dim, hamiltonian, projector, initial state and dephasing shared by
// the zeno, sweep and pipeline scenarios.
ZenoProtocol parse_system(Obj& root) {
    HamiltonianSpec h = parse_hamiltonian(root.object("hamiltonian"));
    const std::size_t dim = h.dim();
    if (root.has("dim") && root.uint("dim") != dim)
        throw ConfigError("dim", "does not match hamiltonian dim " + std::to_string(dim));
    Projector p = parse_projector(root.object("projector"), dim);

    std::optional<WeightOperator> s0;
    if (root.has("initial_state")) s0 = parse_state(root.object("initial_state"), dim);
    else {
        if (p.rank() < 0.5) throw ConfigError("projector", "is zero; supply 'initial_state' explicitly");
        s0 = WeightOperator::assume_valid(p.matrix() / p.rank());
    }
    std::optional<DephasingChannel> ch;
    if (root.has("dephasing")) ch = parse_dephasing(root.object("dephasing"), dim);

    return ZenoProtocol{.total_time = 1.0,
                        .event_count = 1,
                        .hamiltonian = std::move(h),
                        .projector = std::move(p),
                        .initial_state = std::move(*s0),
                        .dephasing = std::move(ch)};
}

} // namespace

// ----------------------------------------------------------------------------

ScenarioConfig parse_config(std::string_view json_text, const ConfigOverrides& overrides) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("<root>", "must be a JSON object");

    ScenarioConfig cfg;
    {
        if (!doc.contains("scenario") || !doc["scenario"].is_string())
            throw ConfigError("scenario", "required string field is missing");
        cfg.kind = parse_kind(doc["scenario"].get<std::string>());
    }

    if (overrides.seed) {
        if (!accepts_seed(cfg.kind))
            throw ConfigError("root_seed", std::string("scenario '") + to_string(cfg.kind) + "' takes no seed");
        doc["root_seed"] = *overrides.seed;
    }
    if (overrides.output_path) doc["output"]["path"] = *overrides.output_path;
    if (overrides.format) doc["output"]["format"] = to_string(*overrides.format);

    Obj root(doc, "");
    root.string("scenario");
    const std::string context = std::string(" for scenario '") + to_string(cfg.kind) + "'";

    if (root.has("output")) {
        Obj out = root.object("output");
        if (out.has("path")) cfg.output_path = out.string("path");
        if (out.has("format")) {
            const std::string f = out.string("format");
            if (f == "csv") cfg.format = OutputFormat::Csv;
            else if (f == "json") cfg.format = OutputFormat::Json;
            else throw ConfigError(out.field("format"), "must be \"csv\" or \"json\"");
        } else if (cfg.output_path && cfg.output_path->size() >= 5 &&
                   cfg.output_path->compare(cfg.output_path->size() - 5, 5, ".json") == 0) {
            cfg.format = OutputFormat::Json;
        }
        out.finish("");
    }
    cfg.record_wall_time = root.boolean_or("record_wall_time", false);

    switch (cfg.kind) {
    case ScenarioKind::Zeno: {
        ZenoProtocol p = parse_system(root);
        p.total_time = root.number("total_time");
        if (!(p.total_time > 0.0)) throw ConfigError("total_time", "must be > 0");

        const bool has_n = root.has("event_count");
        const bool has_effort = root.has("effort");
        if (has_n == has_effort) throw ConfigError("event_count", "give exactly one of 'event_count' or 'effort'");
        if (has_n) {
            p.event_count = root.uint("event_count");
            if (p.event_count < 1) throw ConfigError("event_count", "must be >= 1");
        } else {
            Obj e = root.object("effort");
            EffortSetting es{e.number("effort"), e.number("rate_min"), e.number("rate_max")};
            e.finish("");
            guarded("effort", [&] { es.validate(); });
            cfg.effort = es;
            p.event_count = effort_to_interval(es, p.total_time);
        }

        const std::string mode = root.string_or("mode", "expected");
        if (mode == "expected") p.mode = RunMode::Expected;
        else if (mode == "sampled") p.mode = RunMode::Sampled;
        else throw ConfigError("mode", "must be \"expected\" or \"sampled\"");

        // sampling fields are accepted (and type-checked) in either mode
        const bool has_seed = root.has("root_seed");
        if (has_seed) p.root_seed = root.uint("root_seed");
        if (p.mode == RunMode::Sampled && !has_seed) throw ConfigError("root_seed", "required when mode = sampled");
        p.trajectories = root.uint_or("trajectories", 1000);
        if (p.trajectories < 1) throw ConfigError("trajectories", "must be >= 1");
        p.record_events = root.boolean_or("record_events", false);
        p.workers = static_cast<unsigned>(root.uint_or("workers", 0));
        cfg.mixture_check = root.boolean_or("mixture_check", false);
        if (cfg.mixture_check) {
            if (!p.dephasing) throw ConfigError("mixture_check", "requires a 'dephasing' channel");
            if (!block_compatible(*p.dephasing, p.projector))
                throw ConfigError("dephasing.basis", "must be block-compatible with the projector for mixture_check");
        }
        guarded("<protocol>", [&] { p.validate(); });
        cfg.protocol = std::move(p);
        break;
    }
    case ScenarioKind::ZenoSweep: {
        ZenoProtocol p = parse_system(root);
        p.total_time = root.number("total_time");
        if (!(p.total_time > 0.0)) throw ConfigError("total_time", "must be > 0");
        cfg.counts = parse_index_list(root.at("counts"), "counts");
        if (cfg.counts.size() < 2) throw ConfigError("counts", "need at least two event counts");
        const double width = p.hamiltonian.spectral_width();
        for (std::size_t i = 0; i < cfg.counts.size(); ++i) {
            const std::string f = "counts[" + std::to_string(i) + "]";
            if (cfg.counts[i] < 1) throw ConfigError(f, "must be >= 1");
            if (!(width * p.total_time / static_cast<double>(cfg.counts[i]) < kSmallAngleLimit))
                throw ConfigError(f, "too small: spectral_width*total_time/N must be < 0.3");
        }
        p.event_count = cfg.counts.front();
        cfg.protocol = std::move(p);
        break;
    }
    case ScenarioKind::Calcium: {
        if (root.has("calcium")) {
            Obj c = root.object("calcium");
            IonParameters ion;
            ion.mass = c.number_or("mass_u", constants::calcium_mass_u) * constants::atomic_mass;
            ion.temperature = c.number_or("temperature", ion.temperature);
            ion.confinement_width = c.number_or("confinement_width", ion.confinement_width);
            ion.transit_distance = c.number_or("transit_distance", ion.transit_distance);
            ion.ion_diameter = c.number_or("ion_diameter", ion.ion_diameter);
            c.finish("");
            guarded("calcium", [&] { ion.validate(); });
            cfg.ion = ion;
        }
        break;
    }
    case ScenarioKind::Branch: {
        Obj b = root.object("branch");
        const auto n = b.uint("terminal_count");
        cfg.branch.release_probability = b.number("release_probability");
        b.finish("");
        if (n < 1 || n > BranchConfig::max_terminals)
            throw ConfigError("branch.terminal_count", "must be in [1, 20]");
        cfg.branch.terminal_count = n;
        guarded("branch.release_probability", [&] { cfg.branch.validate(); });
        break;
    }
    case ScenarioKind::CustomPipeline: {
        ZenoProtocol p = parse_system(root);
        const bool has_seed = root.has("root_seed");
        if (has_seed) p.root_seed = root.uint("root_seed");
        Obj pl = root.object("pipeline");
        const json& steps = pl.at("steps");
        if (!steps.is_array() || steps.empty()) throw ConfigError("pipeline.steps", "must be a non-empty array");
        for (std::size_t i = 0; i < steps.size(); ++i)
            cfg.pipeline.steps.push_back(parse_step(Obj(steps[i], "pipeline.steps[" + std::to_string(i) + "]"),
                                                    p.hamiltonian.dim(), p.dephasing.has_value(), has_seed));
        if (pl.has("reduce")) {
            cfg.pipeline.reduce = parse_factor_space(pl.object("reduce"));
            if (cfg.pipeline.reduce->full_dim() != p.hamiltonian.dim())
                throw ConfigError("pipeline.reduce.factor_dims", "product does not match system dim");
        }
        pl.finish("");
        cfg.protocol = std::move(p);
        break;
    }
    }

    root.finish(context);
    cfg.echo = detail::json_text(doc, 0);
    return cfg;
}

ScenarioConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("--config", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), overrides);
}

// ----------------------------------------------------------------------------

namespace {

template <class E>
bool rethrow_if(const Error& e, const std::string& prefix) {
    if (dynamic_cast<const E*>(&e)) throw E(prefix + e.what());
    return false;
}

[[noreturn]] void rethrow_with_context(const Error& e, const std::string& prefix) {
    rethrow_if<DegenerateBranchError>(e, prefix) || rethrow_if<DegenerateFitError>(e, prefix) ||
        rethrow_if<InvalidStateError>(e, prefix) || rethrow_if<PreconditionError>(e, prefix) ||
        rethrow_if<CapacityError>(e, prefix) || rethrow_if<DimensionError>(e, prefix) ||
        rethrow_if<ValidationError>(e, prefix) || rethrow_if<IoError>(e, prefix);
    throw Error(prefix + e.what());
}

PipelineOutput run_pipeline(const ZenoProtocol& p, const PipelineConfig& pl) {
    PipelineOutput out;
    WeightOperator s = p.initial_state;
    Projector current = p.projector;
    Rng rng = make_stream(p.root_seed, 0);
    double t = 0.0;

    for (std::size_t i = 0; i < pl.steps.size(); ++i) {
        const PipelineStep& st = pl.steps[i];
        PipelineEvent ev;
        ev.step = i;
        ev.op = to_string(st.op);
        switch (st.op) {
        case PipelineStep::Op::Evolve:
            s = evolve_unitary(s, p.hamiltonian, st.duration);
            t += st.duration;
            break;
        case PipelineStep::Op::Dephase:
            s = apply_dephasing(s, *p.dephasing, st.duration);
            break;
        case PipelineStep::Op::Process1:
            ev.probability_yes = probability_yes(s, current);
            s = process1(s, current);
            break;
        case PipelineStep::Op::Answer:
            ev.probability_yes = probability_yes(s, current);
            ev.answer = st.answer;
            s = apply_answer(s, current, st.answer);
            break;
        case PipelineStep::Op::Sample: {
            const NatureAnswer a = sample_answer(s, current, rng);
            ev.probability_yes = a.probability_yes;
            ev.answer = a.value;
            s = apply_answer(s, current, a.value);
            break;
        }
        case PipelineStep::Op::Select:
            current = select_event(s, st.candidates);
            ev.selected = current.label();
            ev.probability_yes = probability_yes(s, current);
            break;
        }
        ev.time = t;
        ev.trace = s.trace();
        out.events.push_back(std::move(ev));
    }

    out.final_diagonal = s.matrix().diagonal().real();
    out.final_trace = s.trace();
    out.final_projector = current.label();
    out.final_probability_yes = probability_yes(s, current);
    if (pl.reduce) out.reduced_state = partial_trace(s, *pl.reduce).matrix();
    return out;
}

} // namespace

ResultRecord run_scenario(const ScenarioConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    ResultRecord r;
    r.kind = cfg.kind;
    r.config_echo = cfg.echo;
    r.record_wall_time = cfg.record_wall_time;
    r.version = version();

    try {
        switch (cfg.kind) {
        case ScenarioKind::Zeno: {
            const ZenoProtocol& p = *cfg.protocol;
            if (p.mode == RunMode::Sampled) {
                SampledRun run = run_sampled(p);
                r.points.push_back(run.point);
                r.event_stats = std::move(run.events);
                if (p.record_events) r.trajectories = std::move(run.trajectories);
            } else {
                const ExpectedRun run = run_expected(p);
                r.points.push_back(run.point);
                r.trace_drift = run.trace_drift;
            }
            if (cfg.mixture_check) r.mixture = mixture_robustness_check(p, p.initial_state);
            break;
        }
        case ScenarioKind::ZenoSweep: {
            const SweepResult sw = leakage_sweep(*cfg.protocol, cfg.counts);
            r.points = sw.curve.points;
            r.slope = sw.slope;
            r.intercept = sw.intercept;
            r.doubling = sw.doubling;
            break;
        }
        case ScenarioKind::Calcium:
            r.estimate = spread_at_trigger(cfg.ion);
            break;
        case ScenarioKind::Branch:
            r.branch = release_branch_mixture(cfg.branch);
            r.branch_config = cfg.branch;
            break;
        case ScenarioKind::CustomPipeline:
            r.pipeline = run_pipeline(*cfg.protocol, cfg.pipeline);
            break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        rethrow_with_context(e, std::string("scenario '") + to_string(cfg.kind) + "': ");
    }

    r.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cfg.output_path) emit_results(r, cfg.format, *cfg.output_path);
    return r;
}

} // namespace qzeno
