#include "../oracles.hpp"
#include "lfd/diagnostics.hpp"
#include "lfd/equilibrium.hpp"
#include "lfd/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

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

} // namespace

TEST_CASE("thresholds for unit mass and energy")
{
    const Thresholds t = saturation_threshold(GasMoments{});
    CHECK(t.eps_max == Approx(oracle::eps_max_11).epsilon(1e-10));
    CHECK(t.eps_dagger == Approx(oracle::eps_dagger_11).epsilon(1e-10));
    CHECK(t.eps_dagger < t.eps_bar);
    CHECK(t.eps_bar < t.eps_max);
}

TEST_CASE("thresholds scale with rho and E")
{
    // eps_max = (4 pi / 3) (5 E)^{3/2} / rho
    const Thresholds a = saturation_threshold({1.0, Eigen::Vector3d::Zero(), 1.0});
    const Thresholds b = saturation_threshold({2.0, Eigen::Vector3d::Zero(), 1.0});
    const Thresholds c = saturation_threshold({1.0, Eigen::Vector3d::Zero(), 4.0});
    CHECK(b.eps_max == Approx(a.eps_max / 2.0));
    CHECK(c.eps_max == Approx(a.eps_max * 8.0));
}

TEST_CASE("Fermi-Dirac parameters against the high precision reference")
{
    const GasMoments m;
    struct Row {
        double eps, a, b;
    };
    for (const Row& r : {Row{0.01, oracle::a_eps_1e_2, oracle::b_eps_1e_2},
                         Row{0.1, oracle::a_eps_1e_1, oracle::b_eps_1e_1},
                         Row{1.0, oracle::a_eps_1, oracle::b_eps_1}}) {
        CAPTURE(r.eps);
        SolveReport rep;
        const FermiDiracParams p = solve_fermi_dirac(m, r.eps, &rep);
        CHECK(p.a == Approx(r.a).epsilon(1e-10));
        CHECK(p.b == Approx(r.b).epsilon(1e-10));
        CHECK(rep.mass_residual < 1e-12);
        CHECK(rep.energy_residual < 1e-12);
    }
}

TEST_CASE("classical limit")
{
    const FermiDiracParams p = solve_fermi_dirac(GasMoments{}, 1e-12);
    CHECK(std::abs(p.a - std::pow(2.0 * std::numbers::pi, -1.5)) < 1e-9);
    CHECK(std::abs(p.b - 0.5) < 1e-9);
    const FermiDiracParams q = solve_fermi_dirac(GasMoments{}, 0.0);
    CHECK(q.c_eps() == 1.0);
    CHECK(q.kappa_eps() == 1.0);
}

TEST_CASE("no equilibrium at or beyond saturation")
{
    const Thresholds t = saturation_threshold(GasMoments{});
    CHECK(kind_of([&] { solve_fermi_dirac(GasMoments{}, t.eps_max * 1.01); })
          == ErrorKind::NoEquilibrium);
    CHECK(kind_of([] { solve_fermi_dirac(GasMoments{}, -1.0); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { solve_fermi_dirac({0.0, Eigen::Vector3d::Zero(), 1.0}, 0.1); })
          == ErrorKind::InvalidArgument);
}

TEST_CASE("brackets hold below eps_bar")
{
    const Thresholds t = saturation_threshold(GasMoments{});
    for (int k = 1; k <= 20; ++k) {
        const double eps = t.eps_bar * k / 20.0;
        CAPTURE(eps);
        CHECK(brackets_hold(solve_fermi_dirac(GasMoments{}, eps)));
    }
}

TEST_CASE("equilibrium profile identities")
{
    const FermiDiracParams p = solve_fermi_dirac(GasMoments{}, 0.3);
    for (double r : {0.0, 0.7, 2.5}) {
        const double M = p.maxwellian(r);
        CHECK(p.value(r) == Approx(M / (1.0 + p.eps * M)));
        CHECK(p.weight(r) == Approx(p.value(r) * (1.0 - p.eps * p.value(r))));
    }
    CHECK(p.value(p.radial_cutoff()) < 1e-80 * p.value(0.0));
    CHECK(radial_moment(p, 0.0) == Approx(1.0).epsilon(1e-12));
    CHECK(radial_moment(p, 2.0) == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("moments on a fine grid")
{
    const auto g = build_grid(32, 8.0);
    for (double eps : {1e-12, 0.01, 0.1, 1.0}) {
        CAPTURE(eps);
        const ScalarField M = evaluate_equilibrium(solve_fermi_dirac(GasMoments{}, eps), *g);
        const auto mom = invariant_moments(*g, M);
        CHECK(std::abs(mom[0] - 1.0) < 1e-6);
        CHECK(mom.segment<3>(1).norm() < 1e-12);
        CHECK(std::abs(mom[4] / 3.0 - 1.0) < 1e-6);
    }
}

TEST_CASE("grid-consistent equilibrium hits the discrete moments")
{
    const auto g = build_grid(12, 5.0);
    const GasMoments target{1.0, Eigen::Vector3d::Zero(), 0.9};
    const FermiDiracParams p = solve_fermi_dirac_on_grid(*g, target, 0.05);
    const ScalarField M = evaluate_equilibrium(p, *g);
    const auto mom = invariant_moments(*g, M);
    CHECK(mom[0] == Approx(1.0).epsilon(1e-12));
    CHECK(mom[4] == Approx(2.7).epsilon(1e-12));
}

TEST_CASE("entropy and L2 norm of the equilibria")
{
    const auto g = build_grid(32, 8.0);
    const ScalarField M1 = evaluate_equilibrium(solve_fermi_dirac(GasMoments{}, 1.0), *g);
    CHECK(fd_entropy(*g, M1, 1.0) == Approx(oracle::fd_entropy_eps1).epsilon(1e-8));
    const ScalarField M0 = evaluate_equilibrium(solve_fermi_dirac(GasMoments{}, 0.0), *g);
    CHECK(integrate(*g, M0.square()) == Approx(oracle::maxwellian_l2_sq).epsilon(1e-8));
    CHECK((weight_m(solve_fermi_dirac(GasMoments{}, 0.0), *g) - M0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("saturated state")
{
    const auto g = build_grid(32, 2.0);
    const SaturatedState s = saturated_state(1.0, 2.0, *g);
    CHECK(s.measured_mass == Approx(1.0).epsilon(0.05));
    CHECK(s.f.maxCoeff() == Approx(0.5));
    CHECK(((s.f == 0.0) || (s.f == 0.5)).all());
    // a ball of volume 1000 does not fit in the box
    CHECK(kind_of([&] { saturated_state(1000.0, 1.0, *g); }) == ErrorKind::BallTooLarge);
}

TEST_CASE("Gibbs principle")
{
    const FermiDiracParams p = solve_fermi_dirac(GasMoments{}, 0.2);
    CHECK(equilibrium_relative_entropy(p) <= 0.0);
    CHECK(equilibrium_relative_entropy(solve_fermi_dirac(GasMoments{}, 1e-9)) > -1e-8);
}
