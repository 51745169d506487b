#include "qzeno/errors.hpp"
#include "qzeno/estimates.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qzeno;

namespace {

// Hand-written reference; deliberately does not share code with the library.
struct Reference {
    double dv, vth, ratio, spread;
};

Reference reference(double mass_u, double temp, double width, double transit) {
    const double m = mass_u * 1.66053907e-27;
    const double dv = 1.054571817e-34 / (m * width);
    const double vth = std::sqrt(3.0 * 1.380649e-23 * temp / m);
    return {dv, vth, vth / dv, dv * transit / vth};
}

} // namespace

TEST(Estimates, CalciumVelocityRatio) {
    const auto r = velocity_ratio(IonParameters::calcium());
    EXPECT_NEAR(r.velocity_ratio, 278.0, 1.0);
    EXPECT_NEAR(r.delta_v, 1.58, 0.01);
    EXPECT_NEAR(r.v_thermal, 440.0, 1.0);
    const auto ref = reference(40.078, 310.0, 1e-9, 50e-9);
    EXPECT_NEAR(r.velocity_ratio, ref.ratio, 1e-9 * ref.ratio);
    EXPECT_NEAR(r.delta_v, ref.dv, 1e-12 * ref.dv);
}

TEST(Estimates, CalciumSpreadAtTrigger) {
    const auto r = spread_at_trigger(IonParameters::calcium());
    const auto ref = reference(40.078, 310.0, 1e-9, 50e-9);
    EXPECT_NEAR(r.spread_at_trigger, ref.spread, 1e-12 * ref.spread);
    // comparable to the ion itself
    EXPECT_GT(r.spread_to_ion_size, 0.5);
    EXPECT_LT(r.spread_to_ion_size, 2.0);
    EXPECT_NEAR(r.transit_time, 50e-9 / r.v_thermal, 1e-25);
    EXPECT_EQ(r.convention, kUncertaintyConvention);
}

TEST(Estimates, ConventionBracket) {
    // with Δp·Δx = ħ/2 the ratio halves; both choices fall in [150, 600]
    const double r = velocity_ratio(IonParameters::calcium()).velocity_ratio;
    for (double ratio : {r, r / 2.0}) {
        EXPECT_GE(ratio, 120.0);
        EXPECT_LE(ratio, 600.0);
    }
    EXPECT_GE(r, 150.0);
}

TEST(Estimates, ScalingLaws) {
    const auto base = IonParameters::calcium();
    const double r0 = velocity_ratio(base).velocity_ratio;

    auto p = base;
    p.confinement_width *= 2.0; // ratio ∝ width
    EXPECT_NEAR(velocity_ratio(p).velocity_ratio, 2.0 * r0, 1e-9 * r0);

    p = base;
    p.temperature *= 4.0; // ratio ∝ sqrt(T)
    EXPECT_NEAR(velocity_ratio(p).velocity_ratio, 2.0 * r0, 1e-9 * r0);

    p = base;
    p.mass *= 4.0; // ratio ∝ sqrt(m)
    EXPECT_NEAR(velocity_ratio(p).velocity_ratio, 2.0 * r0, 1e-9 * r0);
}

TEST(Estimates, SpreadLinearInTransit) {
    auto p = IonParameters::calcium();
    const double s0 = spread_at_trigger(p).spread_at_trigger;
    for (double k : {0.5, 2.0, 10.0}) {
        p.transit_distance = 50e-9 * k;
        EXPECT_NEAR(spread_at_trigger(p).spread_at_trigger, k * s0, 1e-12 * k * s0);
    }
}

TEST(Estimates, ZeroTransit) {
    auto p = IonParameters::calcium();
    p.transit_distance = 0.0;
    const auto r = spread_at_trigger(p);
    EXPECT_EQ(r.spread_at_trigger, 0.0);
    EXPECT_EQ(r.transit_time, 0.0);
}

TEST(Estimates, UnitsAgree) {
    // inputs given in nm-scaled form and SI give the same dimensionless ratio
    IonParameters si = IonParameters::calcium();
    const auto a = spread_at_trigger(si);
    const double nm = 1e-9;
    IonParameters scaled = si;
    scaled.confinement_width = 1.0 * nm;
    scaled.transit_distance = 50.0 * nm;
    scaled.ion_diameter = 0.2 * nm;
    const auto b = spread_at_trigger(scaled);
    EXPECT_NEAR(a.spread_to_ion_size, b.spread_to_ion_size, 1e-12);
    EXPECT_NEAR(a.velocity_ratio, b.velocity_ratio, 1e-9);
}

TEST(Estimates, RejectsNonPositiveInputs) {
    auto p = IonParameters::calcium();
    p.mass = 0.0;
    EXPECT_THROW((void)velocity_ratio(p), ValidationError);
    p = IonParameters::calcium();
    p.temperature = -1.0;
    EXPECT_THROW((void)velocity_ratio(p), ValidationError);
    p = IonParameters::calcium();
    p.confinement_width = 0.0;
    EXPECT_THROW((void)spread_at_trigger(p), ValidationError);
    p = IonParameters::calcium();
    p.transit_distance = -1e-9;
    EXPECT_THROW((void)spread_at_trigger(p), ValidationError);
}
