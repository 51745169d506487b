#include "json_text.hpp"
#include "qzeno/scenario.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace qzeno {

using nlohmann::json;

namespace detail {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void newline(std::string& out, int indent, int depth) {
    if (indent <= 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * depth), ' ');
}

} // namespace

void write_json(const json& j, std::string& out, int indent, int depth) {
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            newline(out, indent, depth + 1);
            out += json(it.key()).dump();
            out += indent > 0 ? ": " : ":";
            write_json(it.value(), out, indent, depth + 1);
        }
        newline(out, indent, depth);
        out += '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // numeric arrays stay on one line
        const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
        out += '[';
        bool first = true;
        for (const auto& e : j) {
            if (!first) out += flat ? ", " : ",";
            first = false;
            if (!flat) newline(out, indent, depth + 1);
            write_json(e, out, indent, depth + 1);
        }
        if (!flat) newline(out, indent, depth);
        out += ']';
        return;
    }
    case json::value_t::number_float: {
        const double x = j.get<double>();
        out += std::isfinite(x) ? format_double(x) : "null";
        return;
    }
    default:
        out += j.dump();
        return;
    }
}

} // namespace detail

std::string format_double(double x) { return detail::format_double(x); }

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

template <class T>
json opt_int(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

json point_json(const SurvivalPoint& p) {
    return json{{"N", p.event_count},
                {"d", p.interval},
                {"survival", p.survival},
                {"stderr", opt(p.standard_error)},
                {"seed", opt_int(p.seed)},
                {"trajectories", opt_int(p.trajectories)}};
}

json estimate_json(const EstimateReport& e) {
    return json{{"delta_v_m_per_s", e.delta_v},
                {"v_thermal_m_per_s", e.v_thermal},
                {"velocity_ratio", e.velocity_ratio},
                {"transit_time_s", e.transit_time},
                {"spread_at_trigger_m", e.spread_at_trigger},
                {"spread_to_ion_size", e.spread_to_ion_size},
                {"convention", e.convention}};
}

json complex_matrix_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

json pipeline_json(const PipelineOutput& p) {
    json events = json::array();
    for (const auto& e : p.events) {
        events.push_back(json{{"step", e.step},
                              {"op", e.op},
                              {"time", e.time},
                              {"answer", e.answer ? json(to_string(*e.answer)) : json(nullptr)},
                              {"probability_yes", opt(e.probability_yes)},
                              {"selected", e.selected ? json(*e.selected) : json(nullptr)},
                              {"trace", e.trace}});
    }
    json diag = json::array();
    for (Eigen::Index i = 0; i < p.final_diagonal.size(); ++i) diag.push_back(p.final_diagonal(i));
    json out{{"events", std::move(events)},
             {"final_diagonal", std::move(diag)},
             {"final_trace", p.final_trace},
             {"final_projector", p.final_projector},
             {"final_probability_yes", p.final_probability_yes}};
    if (p.reduced_state) out["reduced_state"] = complex_matrix_json(*p.reduced_state);
    return out;
}

std::string csv_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; }

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string to_json(const ResultRecord& r) {
    json doc;
    doc["scenario"] = to_string(r.kind);
    doc["config"] = r.config_echo.empty() ? json::object() : json::parse(r.config_echo);
    doc["version"] = r.version;
    if (r.record_wall_time) doc["wall_time_seconds"] = r.wall_time_seconds;

    if (r.kind == ScenarioKind::Zeno || r.kind == ScenarioKind::ZenoSweep) {
        json pts = json::array();
        for (const auto& p : r.points) pts.push_back(point_json(p));
        doc["points"] = std::move(pts);
    }
    if (r.trace_drift) doc["trace_drift"] = *r.trace_drift;
    if (r.slope) {
        json dbl = json::array();
        for (const auto& d : r.doubling) dbl.push_back(json{{"N", d.event_count}, {"ratio", d.ratio}});
        doc["fit"] = json{{"slope", *r.slope}, {"intercept", opt(r.intercept)}, {"doubling", std::move(dbl)}};
    }
    if (!r.event_stats.empty()) {
        json ev = json::array();
        for (const auto& e : r.event_stats)
            ev.push_back(json{{"event", e.event},
                              {"timestamp", e.timestamp},
                              {"trials", e.trials},
                              {"yes_count", e.yes_count},
                              {"expected_yes", e.expected_yes},
                              {"variance", e.variance},
                              {"z", e.z_score()}});
        doc["event_statistics"] = std::move(ev);
    }
    if (!r.trajectories.empty()) {
        json tr = json::array();
        for (const auto& t : r.trajectories) {
            json events = json::array();
            for (const auto& e : t.events)
                events.push_back(json{{"timestamp", e.timestamp},
                                      {"answer", to_string(e.answer)},
                                      {"probability_yes", e.probability_yes}});
            tr.push_back(json{{"index", t.index},
                              {"seed", t.seed},
                              {"survived", t.survived},
                              {"yes_count", t.yes_count},
                              {"events", std::move(events)}});
        }
        doc["trajectories"] = std::move(tr);
    }
    if (r.mixture)
        doc["mixture_check"] = json{{"survival_with_dephasing", r.mixture->survival_with_dephasing},
                                    {"survival_without_dephasing", r.mixture->survival_without_dephasing},
                                    {"difference", r.mixture->difference},
                                    {"within_tolerance", r.mixture->within_tolerance}};
    if (r.estimate) doc["estimate"] = estimate_json(*r.estimate);
    if (r.branch) {
        json w = json::array();
        for (Eigen::Index i = 0; i < r.branch->weights().size(); ++i) w.push_back(r.branch->weights()(i));
        doc["branch"] = json{{"terminal_count", r.branch->terminal_count()},
                             {"release_probability", r.branch_config ? json(r.branch_config->release_probability)
                                                                     : json(nullptr)},
                             {"trace", r.branch->trace()},
                             {"weights", std::move(w)}};
    }
    if (r.pipeline) doc["pipeline"] = pipeline_json(*r.pipeline);
    return detail::json_text(doc) + "\n";
}

std::string to_csv(const ResultRecord& r) {
    std::string out;
    switch (r.kind) {
    case ScenarioKind::Zeno:
    case ScenarioKind::ZenoSweep:
        out = "scenario,N,d,survival,stderr,seed\n";
        for (const auto& p : r.points) {
            out += to_string(r.kind);
            out += ',' + std::to_string(p.event_count);
            out += ',' + format_double(p.interval);
            out += ',' + format_double(p.survival);
            out += ',' + csv_field(p.standard_error);
            out += ',' + (p.seed ? std::to_string(*p.seed) : std::string{});
            out += '\n';
        }
        break;
    case ScenarioKind::Calcium:
        out = "quantity,value,unit\n";
        if (r.estimate) {
            const auto& e = *r.estimate;
            auto row = [&](const char* q, double v, const char* unit) {
                out += q;
                out += ',' + format_double(v) + ',' + unit + '\n';
            };
            row("delta_v", e.delta_v, "m/s");
            row("v_thermal", e.v_thermal, "m/s");
            row("velocity_ratio", e.velocity_ratio, "1");
            row("transit_time", e.transit_time, "s");
            row("spread_at_trigger", e.spread_at_trigger, "m");
            row("spread_to_ion_size", e.spread_to_ion_size, "1");
        }
        break;
    case ScenarioKind::Branch:
        out = "pattern,releases,weight\n";
        if (r.branch) {
            const auto& w = r.branch->weights();
            for (Eigen::Index i = 0; i < w.size(); ++i) {
                const auto pattern = static_cast<unsigned long long>(i);
                out += std::to_string(pattern) + ',' + std::to_string(std::popcount(pattern)) + ',' +
                       format_double(w(i)) + '\n';
            }
        }
        break;
    case ScenarioKind::CustomPipeline:
        out = "step,op,time,answer,probability_yes,selected,trace\n";
        if (r.pipeline) {
            for (const auto& e : r.pipeline->events) {
                out += std::to_string(e.step) + ',' + e.op + ',' + format_double(e.time) + ',';
                out += e.answer ? to_string(*e.answer) : "";
                out += ',' + csv_field(e.probability_yes) + ',';
                out += e.selected ? csv_escape(*e.selected) : std::string{};
                out += ',' + format_double(e.trace) + '\n';
            }
        }
        break;
    }
    return out;
}

void emit_results(const ResultRecord& r, OutputFormat format, const std::string& path) {
    const std::string text = format == OutputFormat::Csv ? to_csv(r) : to_json(r);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    f.close();
    if (!f) throw IoError("failed writing '" + path + "'");
}

} // namespace qzeno
