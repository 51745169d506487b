// estimates.hpp — SI order-of-magnitude estimate for a calcium ion leaving a
// membrane micro-channel: Heisenberg velocity spread against thermal speed,
// and ballistic wave-packet spread at the release trigger site.

#pragma once

#include <string>

namespace qzeno {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;       // J·s
inline constexpr double boltzmann = 1.380649e-23;     // J/K
inline constexpr double atomic_mass = 1.66053907e-27; // kg
inline constexpr double calcium_mass_u = 40.078;
inline constexpr double body_temperature = 310.0;     // K
inline constexpr double calcium_ion_diameter = 0.2e-9; // m
} // namespace constants

/// Uncertainty convention used by every estimate: Δp·Δx = ħ, v_th = sqrt(3kT/m).
inline constexpr const char* kUncertaintyConvention = "dp*dx = hbar; v_thermal = sqrt(3kT/m)";

struct IonParameters {
    double mass = constants::calcium_mass_u * constants::atomic_mass; // kg
    double temperature = constants::body_temperature;                 // K
    double confinement_width = 1e-9;                                  // m
    double transit_distance = 50e-9;                                  // m
    double ion_diameter = constants::calcium_ion_diameter;            // m

    static IonParameters calcium() { return {}; }

    /// All fields > 0 except transit_distance, which may be 0.
    void validate() const;
};

struct EstimateReport {
    double delta_v = 0.0;          // m/s
    double v_thermal = 0.0;        // m/s
    double velocity_ratio = 0.0;   // v_thermal / delta_v
    double transit_time = 0.0;     // s
    double spread_at_trigger = 0.0; // m
    double spread_to_ion_size = 0.0;
    std::string convention = kUncertaintyConvention;
};

/// Fills delta_v, v_thermal and velocity_ratio.
EstimateReport velocity_ratio(const IonParameters& p);

/// Full report: velocity terms plus transit time and spread at the trigger.
EstimateReport spread_at_trigger(const IonParameters& p);

} // namespace qzeno
