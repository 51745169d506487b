#include "qzeno/estimates.hpp"

#include "qzeno/errors.hpp"

#include <cmath>

namespace qzeno {

void IonParameters::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite and > 0");
    };
    positive(mass, "mass");
    positive(temperature, "temperature");
    positive(confinement_width, "confinement_width");
    positive(ion_diameter, "ion_diameter");
    if (!(transit_distance >= 0.0) || !std::isfinite(transit_distance))
        throw ValidationError("transit_distance must be finite and >= 0");
}

EstimateReport velocity_ratio(const IonParameters& p) {
    p.validate();
    EstimateReport r;
    r.delta_v = constants::hbar / (p.mass * p.confinement_width);
    r.v_thermal = std::sqrt(3.0 * constants::boltzmann * p.temperature / p.mass);
    r.velocity_ratio = r.v_thermal / r.delta_v;
    return r;
}

EstimateReport spread_at_trigger(const IonParameters& p) {
    EstimateReport r = velocity_ratio(p);
    r.transit_time = p.transit_distance / r.v_thermal;
    r.spread_at_trigger = r.delta_v * r.transit_time;
    r.spread_to_ion_size = r.spread_at_trigger / p.ion_diameter;
    return r;
}

} // namespace qzeno
