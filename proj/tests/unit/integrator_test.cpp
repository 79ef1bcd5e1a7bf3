#include "lfd/errors.hpp"
#include "lfd/integrator.hpp"

#include <doctest.h>

#include <cmath>

using namespace lfd;
using doctest::Approx;

namespace {

ErrorKind kind_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::IoError;
}

SimulationConfig small_run()
{
    SimulationConfig c;
    c.n = 12;
    c.v_max = 5.0;
    c.eps = 0.05;
    c.t_end = 0.3;
    c.dt_out = 0.05;
    c.initial.preset = InitialPreset::Bimaxwellian;
    return c;
}

} // namespace

TEST_CASE("presets")
{
    for (const char* name : {"maxwellian", "bimaxwellian", "near_saturated", "anisotropic_gaussian"})
        CHECK(to_string(parse_preset(name)) == name);
    CHECK(kind_of([] { parse_preset("gaussian"); }) == ErrorKind::ConfigError);

    const auto g = build_grid(16, 6.0);
    InitialCondition ic;
    ic.preset = InitialPreset::NearSaturated;
    const ScalarField f = initial_field(ic, *g, 0.5);
    CHECK(integrate(*g, f) == Approx(1.0).epsilon(1e-12));
    CHECK(f.maxCoeff() <= 0.9 / 0.5 + 1e-12);
    CHECK(kind_of([&] { initial_field(ic, *g, 0.0); }) == ErrorKind::InvalidArgument);
    ic.preset = InitialPreset::Maxwellian;
    ic.E = 0.3;
    CHECK(kind_of([&] { initial_field(ic, *g, 40.0); }) == ErrorKind::PauliViolation);
}

TEST_CASE("config validation")
{
    SimulationConfig c = small_run();
    CHECK_NOTHROW(validate(c));
    c.cfl = 1.0;
    CHECK(kind_of([&] { validate(c); }) == ErrorKind::InvalidArgument);
    c = small_run();
    c.gamma = 0.0;
    CHECK(kind_of([&] { validate(c); }) == ErrorKind::InvalidArgument);
    c = small_run();
    c.t_end = 0.0;
    CHECK(kind_of([&] { validate(c); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("clipping and projection")
{
    const auto g = build_grid(12, 5.0);
    InitialCondition ic;
    ic.preset = InitialPreset::Bimaxwellian;
    const ScalarField f0 = initial_field(ic, *g, 0.1);
    ScalarField f = f0;
    f[10] = -1e-6;
    f[20] = 11.0;
    const double moved = clip_to_pauli(*g, f, 0.1);
    CHECK(moved == Approx((1e-6 + 1.0) * g->cell_volume()));
    CHECK(f.minCoeff() >= 0.0);
    CHECK(f.maxCoeff() <= 10.0);

    const auto target = invariant_moments(*g, f0);
    const ScalarField perturbed = f0 * (1.0 + 0.01 * g->v(0) + 0.02 * (g->speed_sq() * 0.2).sin());
    const ScalarField p = conservative_projection(*g, perturbed, target, 0.1);
    const auto got = invariant_moments(*g, p);
    CHECK((got - target).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("single steps conserve and refuse unstable sizes")
{
    const auto g = build_grid(12, 5.0);
    InitialCondition ic;
    ic.preset = InitialPreset::Bimaxwellian;
    const ScalarField f = initial_field(ic, *g, 0.05);
    CollisionOperator op(g, 0.05, 1.0);
    const double stiff = op.evaluate(f, true).stiffness;
    const auto m0 = invariant_moments(*g, f);

    const StepReport h = step(op, f, 0.5 * 2.0 / stiff, 0.9);
    CHECK(h.stages == 2);
    CHECK((invariant_moments(*g, h.f) - m0).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(kind_of([&] { step(op, f, 2.0 / stiff, 0.9); }) == ErrorKind::StepTooLarge);

    const double tau = 0.02;
    const int s = rkl2_stages(tau, stiff, 0.9);
    CHECK(s >= 2);
    const StepReport r = step_rkl2(op, f, tau, s, 0.9);
    CHECK((invariant_moments(*g, r.f) - m0).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(kind_of([&] { step_rkl2(op, f, tau, 2, 0.9); }) == ErrorKind::StepTooLarge);
    CHECK(kind_of([&] { step_rkl2(op, f, tau, 1, 0.9); }) == ErrorKind::InvalidArgument);

    // RKL2 is second order against a fine Heun reference
    const int k = 4 * int(std::ceil(tau / (0.5 * 2.0 / stiff)));
    ScalarField ref = f;
    for (int i = 0; i < k; ++i)
        ref = step(op, ref, tau / k, 0.9).f;
    const ScalarField half = step_rkl2(op, f, 0.5 * tau, rkl2_stages(0.5 * tau, stiff, 0.9), 0.9).f;
    const ScalarField two = step_rkl2(op, half, 0.5 * tau, rkl2_stages(0.5 * tau, stiff, 0.9), 0.9).f;
    const double e1 = (r.f - ref).abs().maxCoeff();
    const double e2 = (two - ref).abs().maxCoeff();
    CHECK(e1 / e2 > 3.0);
    CHECK_NOTHROW(step(g, f, 1e-4, 0.05, 1.0));
}

TEST_CASE("stage count grows with the step")
{
    CHECK(rkl2_stages(1e-3, 100.0, 0.5) == 2);
    const int s = rkl2_stages(1.0, 100.0, 0.5);
    CHECK((double(s) * s + s - 2.0) / 4.0 * 0.5 * 2.0 / 100.0 >= 1.0);
    CHECK((double(s - 1) * (s - 1) + (s - 1) - 2.0) / 4.0 * 0.5 * 2.0 / 100.0 < 1.0);
}

TEST_CASE("short run")
{
    const SimulationResult r = simulate(small_run());
    REQUIRE(r.records.size() == 7);
    CHECK(r.records.front().t == 0.0);
    CHECK(r.records.back().t == Approx(0.3));
    CHECK(r.clipped_mass_total == 0.0);
    CHECK(r.min_entropy_increment > -1e-12);
    for (size_t i = 0; i < r.records.size(); ++i) {
        const TrajectoryRecord& x = r.records[i];
        CHECK(x.mass_drift < 1e-12);
        CHECK(x.energy_drift < 1e-12);
        CHECK(x.fmin >= 0.0);
        CHECK(x.H_rel >= 0.0);
        if (i > 0) {
            CHECK(x.S_eps >= r.records[i - 1].S_eps - 1e-12);
            CHECK(x.L12_dist < r.records[i - 1].L12_dist);
        }
    }
    CHECK(r.identity.size() == size_t(small_run().identity_samples));
    for (const auto& s : r.identity)
        CHECK(std::abs(s.dSdt - s.D) <= 0.05 * s.D + 1e-8);
    CHECK(trajectory_row(r.records[0]).size() == trajectory_columns().size());
    CHECK(trajectory_columns().front() == "t");
}

TEST_CASE("runs are deterministic")
{
    SimulationConfig c = small_run();
    c.t_end = 0.1;
    const SimulationResult a = simulate(c);
    const SimulationResult b = simulate(c);
    CHECK((a.final_field == b.final_field).all());
    CHECK(a.steps == b.steps);
}

TEST_CASE("initial data above 1/eps are refused")
{
    SimulationConfig c = small_run();
    c.eps = 100.0;
    c.initial.preset = InitialPreset::Maxwellian;
    CHECK(kind_of([&] { simulate(c); }) == ErrorKind::PauliViolation);
}
