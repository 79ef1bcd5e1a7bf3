#include "lfd/collision.hpp"
#include "lfd/convolution.hpp"
#include "lfd/diagnostics.hpp"
#include "lfd/errors.hpp"
#include "lfd/kernels.hpp"
#include "lfd/radial.hpp"

#include <doctest.h>

#include <cmath>

using namespace lfd;
using doctest::Approx;

namespace {

ScalarField bimaxwellian(const VelocityGrid& g)
{
    auto gauss = [&](double T) {
        return ScalarField((-0.5 * g.speed_sq() / T).exp() / std::pow(2.0 * M_PI * T, 1.5));
    };
    return 0.5 * gauss(0.5) + 0.5 * gauss(1.5);
}

ScalarField skewed(const VelocityGrid& g)
{
    return ScalarField((-0.5 * (g.v(0).square() / 0.6 + g.v(1).square() + g.v(2).square() / 1.4)
                        + 0.3 * g.v(0))
                           .exp()
                       * 0.05);
}

} // namespace

TEST_CASE("kernel values")
{
    const Eigen::Vector3d z(1.0, 2.0, 2.0);
    const auto k = kernel_eval(z, 1.0);
    CHECK((k.a * z).norm() < 1e-12);
    CHECK(k.a.trace() == Approx(2.0 * 27.0));
    CHECK(k.b.norm() == Approx(2.0 * 9.0));
    CHECK(k.c == Approx(-8.0 * 3.0));
    const auto k0 = kernel_eval(Eigen::Vector3d::Zero().eval(), 0.0);
    CHECK(k0.c == -6.0);
    CHECK(radial_power(0.0, 0.0) == 1.0);
}

TEST_CASE("fast and direct convolutions agree")
{
    const auto g = build_grid(8, 4.0);
    const ScalarField f = skewed(*g);
    for (double gamma : {0.0, 0.5, 1.0}) {
        CAPTURE(gamma);
        Convolver fast(g, gamma, ConvolutionPath::Fast);
        Convolver direct(g, gamma, ConvolutionPath::Direct);
        const double scale = fast.a(f).abs().maxCoeff();
        CHECK((fast.a(f) - direct.a(f)).abs().maxCoeff() < 1e-12 * scale);
        CHECK((fast.b(f) - direct.b(f)).abs().maxCoeff() < 1e-12 * scale);
        CHECK((fast.c(f) - direct.c(f)).abs().maxCoeff() < 1e-12 * scale);
        CHECK((fast.power(f, 2.5) - direct.power(f, 2.5)).abs().maxCoeff() < 1e-12 * scale);
    }
}

TEST_CASE("convolution structure")
{
    const auto g = build_grid(10, 4.0);
    const ScalarField f = bimaxwellian(*g);
    Convolver conv(g, 1.0);
    const TensorField A = conv.a(f);
    // trace a = 2 |z|^{g+2}
    const ScalarField tr = A.col(0) + A.col(1) + A.col(2);
    CHECK((tr - 2.0 * conv.power(f, 3.0)).abs().maxCoeff() < 1e-12 * tr.maxCoeff());
    // a_contract on a constant field equals a times the constant vector
    VectorField u = VectorField::Zero(g->size(), 3);
    u.col(0).setConstant(1.0);
    const ScalarField g0 = f;
    CHECK(conv.a_contract(u.colwise() * g0).col(0).isApprox(A.col(0), 1e-12));
    const Eigen::ArrayXXd viaspec = convolve(conv, KernelSpec{KernelKind::C, 1.0, 0.0}, f);
    CHECK(viaspec.col(0).isApprox(conv.c(f), 1e-14));
    CHECK_THROWS_AS(convolve(conv, KernelSpec{KernelKind::C, 0.5, 0.0}, f), Error);
}

TEST_CASE("aliasing warning")
{
    const auto g = build_grid(8, 2.0);
    CHECK(check_aliasing(*g, ScalarField::Ones(g->size())).has_value());
    const auto wide = build_grid(16, 8.0);
    CHECK_FALSE(check_aliasing(*wide, bimaxwellian(*wide)).has_value());
}

TEST_CASE("collision operator conserves mass, momentum and energy")
{
    const auto g = build_grid(12, 5.0);
    for (double eps : {0.0, 0.05, 1.0}) {
        CAPTURE(eps);
        CollisionOperator op(g, eps, 1.0);
        for (const ScalarField& f : {bimaxwellian(*g), skewed(*g)}) {
            const auto ev = op.evaluate(f, true);
            const double scale = integrate(*g, ev.Q.abs(), 1.0 + g->speed_sq());
            const auto dm = invariant_moments(*g, ev.Q);
            CHECK(std::abs(dm[0]) < 1e-13 * scale);
            CHECK(dm.segment<3>(1).norm() < 1e-13 * scale);
            CHECK(std::abs(dm[4]) < 1e-13 * scale);
            CHECK(ev.production > 0.0);
            CHECK(ev.stiffness > 0.0);
        }
    }
}

TEST_CASE("production equals minus the log potential against Q")
{
    const auto g = build_grid(12, 5.0);
    const double eps = 0.2;
    CollisionOperator op(g, eps, 1.0);
    const ScalarField f = bimaxwellian(*g);
    const double floor = op.floor_for(f);
    const auto ev = op.evaluate(f);
    const ScalarField psi = log_potential(clamp_density(f, eps), eps, floor);
    const double lhs = -g->cell_volume() * (psi * ev.Q).sum();
    CHECK(lhs == Approx(ev.production).epsilon(1e-10));
}

TEST_CASE("the discrete equilibrium is stationary")
{
    const auto g = build_grid(12, 5.0);
    for (double eps : {0.0, 0.1, 1.0}) {
        CAPTURE(eps);
        const FermiDiracParams p = solve_fermi_dirac_on_grid(*g, GasMoments{}, eps);
        const ScalarField M = evaluate_equilibrium(p, *g);
        CollisionOperator op(g, eps, 1.0);
        op.fix_floor(1e-6 * M.minCoeff());
        const auto ev = op.evaluate(M);
        CHECK(ev.Q.abs().maxCoeff() < 1e-12 * M.maxCoeff());
        CHECK(std::abs(ev.production) < 1e-12);
    }
}

TEST_CASE("Pauli violation is refused")
{
    const auto g = build_grid(8, 4.0);
    ScalarField f = bimaxwellian(*g);
    f[100] = 50.0;
    CHECK_THROWS_AS(collision_operator(g, f, 0.1, 1.0), Error);
    CHECK_NOTHROW(collision_operator(g, bimaxwellian(*g), 0.1, 1.0));
}

TEST_CASE("division floor")
{
    ScalarField f(4);
    f << 0.0, 1e-20, 0.5, 1.0;
    const double d = division_floor(f, 0.5);
    CHECK(d > 0.0);
    CHECK(d <= 1e-26 + 1e-300);
    ScalarField g(3);
    g << 0.2, 0.4, 1.0;
    CHECK(division_floor(g, 0.0) == Approx(1e-12));
}

TEST_CASE("ellipticity is positive away from saturation")
{
    const auto g = build_grid(10, 5.0);
    Convolver conv(g, 1.0);
    CHECK(ellipticity_estimate(conv, bimaxwellian(*g), 0.1) > 0.0);
    // deterministic for a fixed seed
    CHECK(ellipticity_estimate(conv, skewed(*g), 0.1, 7) == ellipticity_estimate(conv, skewed(*g), 0.1, 7));
}

TEST_CASE("eigenstructure of a * f for radial fields")
{
    const auto g = build_grid(12, 5.0);
    const FermiDiracParams p = solve_fermi_dirac(GasMoments{}, 0.1);
    const ScalarField M = evaluate_equilibrium(p, *g);
    const Eigen::Index node = g->index(8, 6, 7);
    const SigmaEigen se = sigma_spectral_decomposition(*g, M, node, 1.0);
    CHECK(se.lambda1 + 2.0 * se.lambda2 == Approx(se.trace).epsilon(1e-12));
    const double s = g->node(node).norm();
    const RadialProfile prof = equilibrium_profile(p);
    CHECK(lambda1_radial(prof, s, 1.0) + 2.0 * lambda2_radial(prof, s, 1.0)
          == Approx(trace_radial(prof, s, 1.0)).epsilon(1e-9));
    CHECK(se.lambda1 == Approx(lambda1_radial(prof, s, 1.0)).epsilon(1e-3));
    ScalarField tilted = M * (1.0 + 0.3 * g->v(0));
    CHECK_THROWS_AS(sigma_spectral_decomposition(*g, tilted, node, 1.0), Error);
}

TEST_CASE("J_p moments")
{
    const FermiDiracParams p = solve_fermi_dirac(GasMoments{}, 0.1);
    const Eigen::Vector3d v(0.3, -1.0, 0.5);
    CHECK(j_p_moment(0.0, v, p).J == Approx(1.0).epsilon(1e-10));
    const JpMoment j2 = j_p_moment(2.0, v, p);
    CHECK(j2.J == Approx(v.squaredNorm() + j2.mu).epsilon(1e-10));
    CHECK(j2.mu == Approx(3.0).epsilon(1e-10));
}
