#include "../oracles.hpp"
#include "lfd/errors.hpp"
#include "lfd/linearized.hpp"

#include <doctest.h>

#include <cmath>

using namespace lfd;
using doctest::Approx;

namespace {

FermiDiracParams params_at(double frac)
{
    const GasMoments m;
    return solve_fermi_dirac(m, frac * saturation_threshold(m).eps_dagger);
}

ScalarField probe(const VelocityGrid& g, double phase)
{
    return ScalarField((g.v(0) * 0.8 + phase).sin() * g.v(1) + (g.speed_sq() * 0.3).cos() * g.v(2)
                       + g.v(0) * g.v(0) * g.v(1));
}

} // namespace

TEST_CASE("linearized operator is symmetric, nonpositive and kills the invariants")
{
    const auto g = build_grid(10, 5.0);
    LinearizedOperator L(g, params_at(0.01), 1.0);
    const ScalarField a = probe(*g, 0.1);
    const ScalarField b = probe(*g, 1.3) + 0.5 * g->speed_sq();
    const double ab = L.inner(L.apply(a), b);
    const double ba = L.inner(a, L.apply(b));
    CHECK(ab == Approx(ba).epsilon(1e-11));
    CHECK(L.inner(L.apply(a), a) < 0.0);
    const double scale = L.apply(a).abs().maxCoeff();
    for (const ScalarField& inv : {ScalarField(ScalarField::Ones(g->size())), g->v(0), g->v(2), g->speed_sq()})
        CHECK(L.apply(inv).abs().maxCoeff() < 1e-11 * scale);
}

TEST_CASE("projection removes the invariants")
{
    const auto g = build_grid(10, 5.0);
    LinearizedOperator L(g, params_at(0.01), 0.5);
    const Eigen::MatrixXd& B = L.invariant_basis();
    CHECK(B.cols() == 5);
    const ScalarField p = spectral_projection(probe(*g, 0.4) + 2.0 + g->speed_sq(), L);
    for (int k = 0; k < 5; ++k)
        CHECK(std::abs(L.inner(p, B.col(k).array())) < 1e-12 * L.norm(p));
    for (int k = 0; k < 5; ++k)
        CHECK(L.norm(B.col(k).array()) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Dirichlet form matches the operator")
{
    const auto g = build_grid(8, 5.0);
    LinearizedOperator L(g, params_at(0.1), 1.0);
    const ScalarField h = probe(*g, 0.7);
    CHECK(dirichlet_form(L, h) == Approx(-L.inner(L.apply(h), h)).epsilon(1e-9));
}

TEST_CASE("dense and Lanczos gaps agree")
{
    const auto g = build_grid(10, 5.0);
    LinearizedOperator L(g, params_at(0.01), 1.0);
    const GapResult d = spectral_gap_dense(L);
    const GapResult l = spectral_gap_lanczos(L);
    CHECK(d.dense);
    CHECK_FALSE(l.dense);
    CHECK(l.gap == Approx(d.gap).epsilon(1e-3));
    CHECK(d.kernel_values.cwiseAbs().maxCoeff() < 1e-10 * d.gap);
    CHECK(numeric_spectral_gap(L).dense);
    const Eigen::MatrixXd A = L.dense_matrix();
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() < 1e-12 * A.cwiseAbs().maxCoeff());
    const auto big = build_grid(16, 5.0);
    CHECK_THROWS_AS(LinearizedOperator(big, params_at(0.01), 1.0).dense_matrix(), Error);
}

TEST_CASE("gap constants against the high precision reference")
{
    const FermiDiracParams p = params_at(0.01);
    struct Row {
        double gamma, lambda_gamma, k_dagger;
    };
    for (const Row& r : {Row{0.0, oracle::lambda_gamma_g0_dagger100, oracle::k_dagger_g0_dagger100},
                         Row{0.5, oracle::lambda_gamma_ghalf_dagger100, oracle::k_dagger_ghalf_dagger100},
                         Row{1.0, oracle::lambda_gamma_g1_dagger100, oracle::k_dagger_g1_dagger100}}) {
        CAPTURE(r.gamma);
        const GapConstants c = gap_constants(p, r.gamma);
        CHECK(c.out_of_range.empty());
        CHECK(c.C_P == Approx(oracle::C_P_g1_dagger100).epsilon(1e-9));
        CHECK(c.lambda2 == Approx(oracle::lambda2_g1_dagger100).epsilon(1e-9));
        CHECK(c.zeta_eps == Approx(oracle::zeta_g1_dagger100).epsilon(1e-9));
        CHECK(c.lambda_gamma == Approx(r.lambda_gamma).epsilon(1e-9));
        CHECK(c.k_dagger == r.k_dagger);
    }
}

TEST_CASE("classical limit of the constants")
{
    const GapConstants c = gap_constants(solve_fermi_dirac(GasMoments{}, 0.0), 1.0);
    CHECK(c.lambda2 == Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(c.lambda2_bound == Approx(oracle::lambda2_limit_bound).epsilon(1e-12));
    CHECK(c.kappa_eps == 1.0);
    const GapConstants small = gap_constants(params_at(1e-3), 1.0);
    CHECK(small.lambda2_bound < c.lambda2_bound);
    CHECK(small.lambda2 >= small.lambda2_bound);
}

TEST_CASE("out of range parameters")
{
    const FermiDiracParams p = params_at(2.0);
    const GapConstants c = gap_constants(p, 1.0);
    REQUIRE_FALSE(c.out_of_range.empty());
    CHECK(c.out_of_range.front() == "eps_dagger");
    try {
        gap_constants_strict(p, 1.0);
        FAIL("expected EpsilonOutOfRange");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EpsilonOutOfRange);
    }
    CHECK_THROWS_AS(gap_constants(params_at(0.01), 1.5), Error);
}

TEST_CASE("zeta and the confinement profile")
{
    const FermiDiracParams p = params_at(0.01);
    CHECK(zeta_eps(p) == Approx(oracle::zeta_g1_dagger100).epsilon(1e-9));
    const auto g = build_grid(12, 6.0);
    const GapConstants c = gap_constants(p, 1.0);
    const ConfinementProfile prof = confinement_profile(c.k_dagger, p, 1.0, *g);
    CHECK(prof.phi.size() == g->size());
    CHECK(prof.limsup_bound < 0.0);
    CHECK(std::isfinite(prof.outer_shell_sup));
    CHECK_THROWS_AS(confinement_profile(-1.0, p, 1.0, *g), Error);
}

TEST_CASE("weighted Poincare inequality on random polynomials")
{
    const auto g = build_grid(16, 6.0);
    LinearizedOperator L(g, params_at(0.01), 1.0);
    const PoincareReport r = poincare_check(L, 20);
    CHECK(r.functions == 20);
    CHECK(r.holds);
    CHECK(r.min_ratio >= r.C_P);
}

TEST_CASE("two grid gap")
{
    const TwoGridGap t = two_grid_gap(params_at(0.01), 1.0, 8, 10, 5.0);
    CHECK(t.n_coarse == 8);
    CHECK(t.n_fine == 10);
    CHECK(t.gap == t.fine);
    CHECK(t.uncertainty == Approx(std::abs(t.fine - t.coarse)));
    CHECK(t.gap >= gap_constants(params_at(0.01), 1.0).lambda_gamma);
}
