#include "lfd/cli/verify.hpp"
#include "lfd/collision.hpp"
#include "lfd/diagnostics.hpp"
#include "lfd/equilibrium.hpp"
#include "lfd/errors.hpp"
#include "lfd/integrator.hpp"
#include "lfd/radial.hpp"

#include <cmath>

namespace lfd::cli {

namespace {

Check upper(std::string name, std::string field, double lhs, double rhs, std::string note = {})
{
    Check c{std::move(name), std::move(field), lhs, rhs, rhs - lhs, false, true, std::move(note)};
    c.pass = c.slack >= 0.0;
    return c;
}

// nodes on a few rays, for the pointwise radial checks
std::vector<Eigen::Index> sample_nodes(const VelocityGrid& g)
{
    std::vector<Eigen::Index> out;
    const int n = g.n();
    for (int k = n / 2 + 1; k < n; k += 2) {
        out.push_back(g.index(k, n / 2, n / 2));
        out.push_back(g.index(k, k, n / 2));
        out.push_back(g.index(k, k, k));
    }
    return out;
}

} // namespace

std::vector<NamedField> verify_corpus(const VelocityGrid& grid, double eps)
{
    std::vector<NamedField> out;
    InitialCondition ic;
    ic.preset = InitialPreset::Maxwellian;
    out.push_back({"maxwellian", initial_field(ic, grid, eps), true});
    ic.preset = InitialPreset::Bimaxwellian;
    out.push_back({"bimaxwellian", initial_field(ic, grid, eps), true});
    ic.preset = InitialPreset::AnisotropicGaussian;
    ic.T = Eigen::Vector3d(0.6, 1.0, 1.4);
    out.push_back({"anisotropic", initial_field(ic, grid, eps), false});
    if (eps > 0.0) {
        ic.preset = InitialPreset::NearSaturated;
        out.push_back({"near_saturated", initial_field(ic, grid, eps), true});
    }
    const FermiDiracParams p = solve_fermi_dirac(GasMoments{}, eps);
    out.push_back({"equilibrium", evaluate_equilibrium(p, grid), true});
    if (eps > 0.0)
        out.push_back({"saturated", saturated_state(1.0, eps, grid).f, true});
    return out;
}

std::vector<Check> verify_suite(const VerifyOptions& opt)
{
    const GridPtr gp = build_grid(opt.n, opt.v_max);
    const VelocityGrid& g = *gp;
    const double eps = opt.eps;
    const double gamma = opt.gamma;
    const Convolver conv(gp, gamma);
    std::vector<Check> checks;

    for (const NamedField& nf : verify_corpus(g, eps)) {
        const ScalarField& f = nf.f;
        const std::string& name = nf.name;

        if (name == "saturated") {
            Check c{"ellipticity", name, ellipticity_estimate(conv, f, eps, opt.seed), 0.0, 0.0, true,
                    false, "degenerate: f (1 - eps f) vanishes identically"};
            c.slack = c.lhs;
            checks.push_back(c);
            checks.push_back(upper("entropy_of_saturated_state", name, std::abs(fd_entropy(g, f, eps)), 1e-12));
            continue;
        }

        // trace identity: tr(a * f) = 2 |z|^{g+2} * f
        {
            const TensorField A = conv.a(f);
            const ScalarField tr = A.col(0) + A.col(1) + A.col(2);
            const ScalarField two_pow = 2.0 * conv.power(f, gamma + 2.0);
            const double err = (tr - two_pow).abs().maxCoeff() / two_pow.abs().maxCoeff();
            checks.push_back(upper("trace_identity", name, err, 1e-8));
        }
        // pointwise bounds on c * f and b * f
        {
            const double l12 = integrate(g, f, 1.0 + g.speed_sq());
            const ScalarField jb = (1.0 + g.speed_sq()).sqrt();
            const ScalarField cf = conv.c(f).abs() / (8.0 * jb.pow(gamma) * l12);
            const ScalarField bf = conv.b(f).matrix().rowwise().norm().array() / (2.0 * jb.pow(gamma + 1.0) * l12);
            checks.push_back(upper("c_bound", name, cf.maxCoeff(), 1.0));
            checks.push_back(upper("b_bound", name, bf.maxCoeff(), 1.0));
        }
        // eigenstructure of sigma on radial fields
        if (nf.radial) {
            double worst = 0.0;
            for (Eigen::Index i : sample_nodes(g)) {
                const SigmaEigen se = sigma_spectral_decomposition(g, f, i, gamma);
                worst = std::max(worst, std::abs(se.lambda1 + 2.0 * se.lambda2 - se.trace) / se.trace);
            }
            checks.push_back(upper("eigenvalue_trace", name, worst, 1e-8));
        }
        // productions
        const double Deps = entropy_production(conv, f, eps, ProductionPath::PairSum);
        const double D0 = landau_production(conv, f, ProductionPath::PairSum);
        checks.push_back(upper("D_eps_nonnegative", name, -Deps, 0.0));
        checks.push_back(upper("D_0_nonnegative", name, -D0, 0.0));
        {
            const ProductionComparison pc = production_comparison(conv, f, eps);
            Check c = upper("production_comparison", name, pc.lhs, pc.rhs);
            c.note = "kappa0 = " + std::to_string(pc.kappa0);
            checks.push_back(c);
        }
        checks.push_back(upper("fd_entropy_nonnegative", name, -fd_entropy(g, f, eps), 0.0));
        // closeness of the two relative entropies against the equilibrium with the same moments
        {
            const FermiDiracParams p = solve_fermi_dirac_on_grid(g, measure_moments(g, f), eps);
            const ScalarField M = evaluate_equilibrium(p, g);
            const RelativeEntropies re = relative_entropies(g, f, M, eps);
            checks.push_back(upper("relative_entropy_closeness", name,
                                   std::abs(re.H_eps_rel - re.H_0_rel), re.bound));
            const double l1 = l1_distance(g, f, M);
            const double rho = integrate(g, f);
            checks.push_back(upper("csiszar_kullback", name, l1 * l1,
                                   2.0 * rho * fd_relative_entropy(g, f, M, eps)));
        }
        {
            const double e = ellipticity_estimate(conv, f, eps, opt.seed);
            Check c{"ellipticity", name, e, 0.0, e, e > 0.0, true, {}};
            checks.push_back(c);
        }
    }

    // equilibria annihilate both productions
    {
        const FermiDiracParams p = solve_fermi_dirac(GasMoments{}, eps);
        const FermiDiracParams p0 = solve_fermi_dirac(GasMoments{}, 0.0);
        checks.push_back(upper("D_eps_at_equilibrium", "-",
                               entropy_production(conv, evaluate_equilibrium(p, g), eps, ProductionPath::PairSum), 1e-8));
        checks.push_back(upper("D_0_at_maxwellian", "-",
                               landau_production(conv, evaluate_equilibrium(p0, g), ProductionPath::PairSum), 1e-8));

        // b_i[m](v) = -2 b v_i lambda1[m - 2 eps m M_eps](v), radial quadratures on both sides
        const RadialProfile wm = weight_profile(p);
        const RadialProfile wg = weight_gradient_profile(p);
        double worst = 0.0;
        for (double s = 0.25; s <= 4.0; s += 0.25) {
            const double lhs = drift_radial(wm, s, gamma);
            const double rhs = -2.0 * p.b * s * lambda1_radial(wg, s, gamma);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
        }
        checks.push_back(upper("drift_of_weight", "-", worst, 1e-6));

        double j0 = 0.0, j2 = 0.0, j1 = -1e300;
        for (double s = 0.0; s <= 4.0; s += 0.5) {
            const Eigen::Vector3d v(s, 0.0, 0.0);
            j0 = std::max(j0, std::abs(j_p_moment(0.0, v, p).J - 1.0));
            const JpMoment m2 = j_p_moment(2.0, v, p);
            j2 = std::max(j2, std::abs(m2.J - (s * s + m2.mu)) / (s * s + m2.mu));
            const JpMoment m1 = j_p_moment(1.0, v, p);
            j1 = std::max(j1, m1.J - (s + m1.mu));
        }
        checks.push_back(upper("J0_equals_one", "-", j0, 1e-10));
        checks.push_back(upper("J2_identity", "-", j2, 1e-8));
        checks.push_back(upper("J1_bound", "-", j1, 0.0));
    }
    return checks;
}

bool all_passed(const std::vector<Check>& checks)
{
    for (const Check& c : checks)
        if (c.asserted && !c.pass)
            return false;
    return true;
}

} // namespace lfd::cli
