// scenario.hpp — declarative experiment configs, dispatch to the simulation
// modules, and result records for offline plotting.
//
// Configs are JSON documents; see docs/config.md for the schema.

#pragma once

#include "qzeno/channels.hpp"
#include "qzeno/errors.hpp"
#include "qzeno/estimates.hpp"
#include "qzeno/zeno.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qzeno {

const char* version() noexcept;

enum class ScenarioKind { Zeno, ZenoSweep, Calcium, Branch, CustomPipeline };
enum class OutputFormat { Csv, Json };

const char* to_string(ScenarioKind k) noexcept;
const char* to_string(OutputFormat f) noexcept;

struct PipelineStep {
    enum class Op { Evolve, Dephase, Process1, Answer, Sample, Select };

    Op op = Op::Process1;
    double duration = 0.0;               // Evolve, Dephase
    Answer answer = Answer::Yes;         // Answer
    std::vector<Projector> candidates;   // Select
};

const char* to_string(PipelineStep::Op op) noexcept;

struct PipelineConfig {
    std::vector<PipelineStep> steps;
    std::optional<FactorSpace> reduce; // report the partial trace of the final state
};

/// A fully validated scenario. Parse with parse_config(); every field has
/// passed the invariants of the module it feeds.
struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::Zeno;

    // zeno, zeno-sweep, custom-pipeline
    std::optional<ZenoProtocol> protocol;
    std::optional<EffortSetting> effort;
    std::vector<std::size_t> counts;
    bool mixture_check = false;
    PipelineConfig pipeline;

    IonParameters ion;
    BranchConfig branch;

    std::optional<std::string> output_path;
    OutputFormat format = OutputFormat::Csv;
    bool record_wall_time = false;

    /// Canonical JSON text of the accepted config (sorted keys), echoed in results.
    std::string echo;
};

struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_path;
    std::optional<OutputFormat> format;
};

/// Parses and validates a JSON config. Every rejection is a ConfigError
/// naming the offending field (dotted path) and the violated constraint.
ScenarioConfig parse_config(std::string_view json_text, const ConfigOverrides& overrides = {});

ScenarioConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

// ----------------------------------------------------------------------------

struct PipelineEvent {
    std::size_t step = 0;
    std::string op;
    double time = 0.0;
    std::optional<Answer> answer;
    std::optional<double> probability_yes;
    std::optional<std::string> selected;
    double trace = 0.0;
};

struct PipelineOutput {
    std::vector<PipelineEvent> events;
    RealVector final_diagonal;
    double final_trace = 0.0;
    double final_probability_yes = 0.0; // for the current projector
    std::string final_projector;
    std::optional<ComplexMatrix> reduced_state;
};

struct ResultRecord {
    ScenarioKind kind = ScenarioKind::Zeno;
    std::string config_echo;

    std::vector<SurvivalPoint> points;
    std::optional<double> trace_drift;
    std::optional<double> slope;
    std::optional<double> intercept;
    std::vector<DoublingRatio> doubling;
    std::vector<EventStatistics> event_stats;
    std::vector<TrajectoryRecord> trajectories;
    std::optional<MixtureRobustnessReport> mixture;

    std::optional<EstimateReport> estimate;
    std::optional<BranchMixture> branch;
    std::optional<BranchConfig> branch_config;
    std::optional<PipelineOutput> pipeline;

    double wall_time_seconds = 0.0;
    bool record_wall_time = false;
    std::string version;
};

/// Runs the configured pipeline. When cfg.output_path is set the record is
/// also written there in cfg.format. Module errors are rethrown as the same
/// type with the scenario name prefixed.
ResultRecord run_scenario(const ScenarioConfig& cfg);

// ----------------------------------------------------------------------------

/// 17 significant digits, lowercase exponent; "nan"/"inf" never appear in
/// JSON (written as null).
std::string format_double(double x);

std::string to_csv(const ResultRecord& r);
std::string to_json(const ResultRecord& r);

/// Writes `r` to `path`. Throws IoError with the path on failure.
void emit_results(const ResultRecord& r, OutputFormat format, const std::string& path);

} // namespace qzeno
