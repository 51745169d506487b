// qzeno — command-line harness for the Zeno / collapse simulations.
//
//   qzeno run --config scenario.json [--seed S] [--out path] [--format csv|json]
//   qzeno zeno | sweep | calcium | branch [flags]
//
// Exit codes: 0 success, 2 config validation failure, 3 numeric/runtime failure.

#include "qzeno/errors.hpp"
#include "qzeno/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct OutputFlags {
    std::string out;
    std::string format;
};

void add_output_flags(CLI::App* cmd, OutputFlags& o) {
    cmd->add_option("--out", o.out, "Write results to this path (default: stdout)");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void apply_output(json& cfg, const OutputFlags& o) {
    if (!o.out.empty()) cfg["output"]["path"] = o.out;
    if (!o.format.empty()) cfg["output"]["format"] = o.format;
}

void print_summary(const qzeno::ResultRecord& r, std::ostream& os) {
    using qzeno::format_double;
    for (const auto& p : r.points) {
        os << "N=" << p.event_count << " d=" << format_double(p.interval) << " survival=" << format_double(p.survival);
        if (p.standard_error) os << " stderr=" << format_double(*p.standard_error);
        os << '\n';
    }
    if (r.slope) os << "leakage slope=" << format_double(*r.slope) << '\n';
    if (r.mixture) os << "mixture difference=" << format_double(r.mixture->difference) << '\n';
    if (r.estimate)
        os << "velocity_ratio=" << format_double(r.estimate->velocity_ratio)
           << " spread_at_trigger_m=" << format_double(r.estimate->spread_at_trigger) << '\n';
    if (r.branch) os << "branch patterns=" << r.branch->dim() << " trace=" << format_double(r.branch->trace()) << '\n';
    if (r.pipeline)
        os << "pipeline steps=" << r.pipeline->events.size()
           << " final_probability_yes=" << format_double(r.pipeline->final_probability_yes) << '\n';
}

int execute(const qzeno::ScenarioConfig& cfg) {
    const qzeno::ResultRecord r = qzeno::run_scenario(cfg);
    if (cfg.output_path) {
        print_summary(r, std::cout);
        std::cout << "wrote " << *cfg.output_path << " (" << qzeno::to_string(cfg.format) << ")\n";
    } else {
        std::cout << (cfg.format == qzeno::OutputFormat::Csv ? qzeno::to_csv(r) : qzeno::to_json(r));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulate repeated projective events (quantum Zeno) and related estimates"};
    app.require_subcommand(1);
    app.set_version_flag("--version", qzeno::version());

    // run --------------------------------------------------------------------
    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    OutputFlags run_out;
    auto* run = app.add_subcommand("run", "Run a scenario described by a JSON config");
    run->add_option("--config", config_path, "Scenario config (JSON)")->required();
    run->add_option("--seed", seed_override, "Override root_seed");
    add_output_flags(run, run_out);

    // zeno -------------------------------------------------------------------
    double omega = std::numbers::pi;
    double total_time = 1.0;
    std::optional<std::uint64_t> events;
    std::optional<double> effort;
    double rate_min = 1.0;
    double rate_max = 100.0;
    std::string mode = "expected";
    std::uint64_t trajectories = 10000;
    std::optional<std::uint64_t> seed;
    std::optional<double> dephasing_rate;
    bool record_events = false;
    bool mixture_check = false;
    unsigned workers = 0;
    OutputFlags zeno_out;
    auto* zeno = app.add_subcommand("zeno", "Two-level Rabi system under repeated process 1");
    zeno->add_option("--omega", omega, "Rabi angular frequency (H = omega/2 sigma_x)")->capture_default_str();
    zeno->add_option("--total-time", total_time, "Total protocol time T")->capture_default_str();
    auto* ev_opt = zeno->add_option("--events", events, "Number of events N (d = T/N)");
    auto* eff_opt = zeno->add_option("--effort", effort, "Effort in [0,1]; sets N from the event rate");
    ev_opt->excludes(eff_opt);
    zeno->add_option("--rate-min", rate_min, "Event rate at effort 0")->capture_default_str();
    zeno->add_option("--rate-max", rate_max, "Event rate at effort 1")->capture_default_str();
    zeno->add_option("--mode", mode, "expected | sampled")->capture_default_str()->check(CLI::IsMember({"expected", "sampled"}));
    zeno->add_option("--trajectories", trajectories, "Sampled-mode trajectory count")->capture_default_str();
    zeno->add_option("--seed", seed, "Root seed (required for sampled mode)");
    zeno->add_option("--dephasing-rate", dephasing_rate, "Computational-basis dephasing rate");
    zeno->add_flag("--record-events", record_events, "Emit per-trajectory event logs");
    zeno->add_flag("--mixture-check", mixture_check, "Compare survival with and without dephasing");
    zeno->add_option("--workers", workers, "Sampled-mode worker threads (0 = all cores)");
    add_output_flags(zeno, zeno_out);

    // sweep ------------------------------------------------------------------
    double sweep_omega = std::numbers::pi;
    double sweep_time = 1.0;
    std::vector<std::uint64_t> counts{100, 200, 400, 800};
    std::optional<double> sweep_dephasing;
    OutputFlags sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Leakage scaling fit over event counts (two-level Rabi)");
    sweep->add_option("--omega", sweep_omega, "Rabi angular frequency")->capture_default_str();
    sweep->add_option("--total-time", sweep_time, "Total protocol time T")->capture_default_str();
    sweep->add_option("--counts", counts, "Event counts")->capture_default_str()->delimiter(',');
    sweep->add_option("--dephasing-rate", sweep_dephasing, "Computational-basis dephasing rate");
    add_output_flags(sweep, sweep_out);

    // calcium ----------------------------------------------------------------
    std::optional<double> mass_u, temperature, width, transit, ion_diameter;
    OutputFlags ca_out;
    auto* calcium = app.add_subcommand("calcium", "Heisenberg-vs-thermal estimate for a calcium ion");
    calcium->add_option("--mass-u", mass_u, "Ion mass in atomic mass units (default 40.078)");
    calcium->add_option("--temperature", temperature, "Temperature in K (default 310)");
    calcium->add_option("--width", width, "Channel diameter in m (default 1e-9)");
    calcium->add_option("--transit", transit, "Channel-to-trigger distance in m (default 50e-9)");
    calcium->add_option("--ion-diameter", ion_diameter, "Ion diameter in m (default 2e-10)");
    add_output_flags(calcium, ca_out);

    // branch -----------------------------------------------------------------
    std::uint64_t terminals = 2;
    double probability = 0.5;
    OutputFlags br_out;
    auto* branch = app.add_subcommand("branch", "Release/no-release branch mixture over n terminals");
    branch->add_option("--terminals", terminals, "Number of terminals n (1..20)")->capture_default_str();
    branch->add_option("--probability", probability, "Release probability per terminal")->capture_default_str();
    add_output_flags(branch, br_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        qzeno::ScenarioConfig cfg;
        if (run->parsed()) {
            qzeno::ConfigOverrides ov;
            ov.seed = seed_override;
            if (!run_out.out.empty()) ov.output_path = run_out.out;
            if (!run_out.format.empty())
                ov.format = run_out.format == "json" ? qzeno::OutputFormat::Json : qzeno::OutputFormat::Csv;
            cfg = qzeno::load_config(config_path, ov);
        } else {
            json j;
            if (zeno->parsed()) {
                j = {{"scenario", "zeno"},
                     {"hamiltonian", {{"preset", "rabi"}, {"omega", omega}}},
                     {"projector", {{"basis", {0}}, {"label", "E"}}},
                     {"initial_state", {{"basis", 0}}},
                     {"total_time", total_time},
                     {"mode", mode}};
                if (effort) j["effort"] = {{"effort", *effort}, {"rate_min", rate_min}, {"rate_max", rate_max}};
                else j["event_count"] = events.value_or(100);
                if (mode == "sampled") {
                    j["trajectories"] = trajectories;
                    j["record_events"] = record_events;
                    j["workers"] = workers;
                }
                if (seed) j["root_seed"] = *seed;
                if (dephasing_rate) j["dephasing"] = {{"rate", *dephasing_rate}, {"basis", "computational"}};
                if (mixture_check) j["mixture_check"] = true;
                apply_output(j, zeno_out);
            } else if (sweep->parsed()) {
                j = {{"scenario", "zeno-sweep"},
                     {"hamiltonian", {{"preset", "rabi"}, {"omega", sweep_omega}}},
                     {"projector", {{"basis", {0}}, {"label", "E"}}},
                     {"initial_state", {{"basis", 0}}},
                     {"total_time", sweep_time},
                     {"counts", counts}};
                if (sweep_dephasing) j["dephasing"] = {{"rate", *sweep_dephasing}, {"basis", "computational"}};
                apply_output(j, sweep_out);
            } else if (calcium->parsed()) {
                json c = json::object();
                if (mass_u) c["mass_u"] = *mass_u;
                if (temperature) c["temperature"] = *temperature;
                if (width) c["confinement_width"] = *width;
                if (transit) c["transit_distance"] = *transit;
                if (ion_diameter) c["ion_diameter"] = *ion_diameter;
                j = {{"scenario", "calcium"}, {"calcium", c}};
                apply_output(j, ca_out);
            } else {
                j = {{"scenario", "branch"},
                     {"branch", {{"terminal_count", terminals}, {"release_probability", probability}}}};
                apply_output(j, br_out);
            }
            cfg = qzeno::parse_config(j.dump());
        }
        return execute(cfg);
    } catch (const qzeno::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
