#include "lfd/errors.hpp"
#include "lfd/grid.hpp"

#include <doctest.h>

#include <cmath>

using namespace lfd;

TEST_CASE("grid layout")
{
    const VelocityGrid g(8, 4.0);
    CHECK(g.h() == doctest::Approx(1.0));
    CHECK(g.size() == 512);
    CHECK(g.coord(0) == doctest::Approx(-3.5));
    CHECK(g.coord(7) == doctest::Approx(3.5));
    for (Eigen::Index i : {Eigen::Index(0), Eigen::Index(77), Eigen::Index(511)}) {
        const auto m = g.multi_index(i);
        CHECK(g.index(m[0], m[1], m[2]) == i);
        CHECK(g.node(i).x() == doctest::Approx(g.coord(m[0])));
        CHECK(g.node(i).z() == doctest::Approx(g.coord(m[2])));
    }
    // iz runs fastest
    CHECK(g.index(0, 0, 1) == 1);
    CHECK(g.v(2)[1] - g.v(2)[0] == doctest::Approx(1.0));
}

TEST_CASE("bad grids are rejected")
{
    auto kind = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::IoError;
    };
    CHECK(kind([] { VelocityGrid(7, 4.0); }) == ErrorKind::InvalidGrid);
    CHECK(kind([] { VelocityGrid(6, 4.0); }) == ErrorKind::InvalidGrid);
    CHECK(kind([] { VelocityGrid(8, 0.0); }) == ErrorKind::InvalidGrid);
    CHECK(kind([] { VelocityGrid(8, -1.0); }) == ErrorKind::InvalidGrid);
}

TEST_CASE("midpoint integration")
{
    const auto g = build_grid(10, 3.0);
    CHECK(integrate(*g, ScalarField::Ones(g->size())) == doctest::Approx(216.0));
    // odd moments of an even function vanish
    const ScalarField gauss = (-g->speed_sq()).exp();
    CHECK(std::abs(integrate(*g, gauss, g->v(0))) < 1e-14);
    CHECK(integrate_fn(*g, gauss, [](const Eigen::Vector3d&) { return 2.0; })
          == doctest::Approx(2.0 * integrate(*g, gauss)));
}

TEST_CASE("gradients are exact on quadratics")
{
    const auto g = build_grid(8, 2.0);
    const ScalarField f = 1.0 + 2.0 * g->v(0) - g->v(1) * g->v(1) + 3.0 * g->v(0) * g->v(2);
    const VectorField d = gradient(*g, f);
    CHECK((d.col(0) - (2.0 + 3.0 * g->v(2))).abs().maxCoeff() < 1e-12);
    CHECK((d.col(1) + 2.0 * g->v(1)).abs().maxCoeff() < 1e-12);
    CHECK((d.col(2) - 3.0 * g->v(0)).abs().maxCoeff() < 1e-12);

    // one-sided: exact up to a uniform half-cell shift
    const ScalarField q = g->v(1) * g->v(1);
    const VectorField fw = one_sided_gradient(*g, q, Side::Forward);
    const VectorField bw = one_sided_gradient(*g, q, Side::Backward);
    CHECK((fw.col(1) - 2.0 * (g->v(1) + 0.5 * g->h())).abs().maxCoeff() < 1e-12);
    CHECK((bw.col(1) - 2.0 * (g->v(1) - 0.5 * g->h())).abs().maxCoeff() < 1e-12);
    CHECK(fw.col(0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("divergences are adjoint to the gradients")
{
    const auto g = build_grid(8, 2.0);
    const ScalarField f = (g->v(0) * 1.3 + g->v(1) * g->v(2)).sin();
    VectorField u(g->size(), 3);
    u.col(0) = (g->v(2) * 0.7).cos();
    u.col(1) = g->speed_sq();
    u.col(2) = g->v(0) - g->v(1);
    const double lhs = (gradient(*g, f) * u).sum();
    const double rhs = -(f * divergence(*g, u)).sum();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    for (Side s : {Side::Forward, Side::Backward}) {
        const double l = (one_sided_gradient(*g, f, s) * u).sum();
        const double r = -(f * one_sided_divergence(*g, u, s)).sum();
        CHECK(l == doctest::Approx(r).epsilon(1e-12));
    }
}

TEST_CASE("admissibility")
{
    const auto g = build_grid(8, 3.0);
    ScalarField f = ScalarField::Constant(g->size(), 0.5);
    CHECK_NOTHROW(check_admissible({g, f, 1.0}));
    f[3] = 1.5;
    CHECK_THROWS_AS(check_admissible({g, f, 1.0}), Error);
    try {
        check_admissible({g, f, 1.0});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PauliViolation);
    }
    f[3] = -0.1;
    CHECK_THROWS_AS(check_admissible({g, f, 0.0}), Error);
}

TEST_CASE("symmetry and boundary diagnostics")
{
    const auto g = build_grid(12, 6.0);
    const ScalarField iso = (-0.5 * g->speed_sq()).exp();
    CHECK(rotational_asymmetry(*g, iso) < 1e-14);
    CHECK(boundary_mass_fraction(*g, iso) < 1e-3);
    const ScalarField tilted = (-0.5 * (g->speed_sq() + g->v(0))).exp();
    CHECK(rotational_asymmetry(*g, tilted) > 0.1);
    CHECK(boundary_mass_fraction(*g, ScalarField::Ones(g->size())) > 0.5);
}

TEST_CASE("japanese bracket")
{
    const auto g = build_grid(8, 2.0);
    const ScalarField w = japanese_bracket_pow(*g, 2.0);
    CHECK((w - (1.0 + g->speed_sq())).abs().maxCoeff() < 1e-12);
}
