#include "lfd/equilibrium.hpp"
#include "lfd/errors.hpp"
#include "lfd/quadrature.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace lfd {

namespace {

constexpr double pi = std::numbers::pi;

struct MomentEval {
    double mass;
    double energy;
    Eigen::Matrix2d jac; // d(mass, energy) / d(log a, log b)
};

using Evaluator = std::function<MomentEval(double a, double b)>;

MomentEval radial_eval(double a, double b, double eps)
{
    FermiDiracParams p;
    p.a = a;
    p.b = b;
    p.eps = eps;
    const double rmax = p.radial_cutoff();
    auto m = [&](double r) { return p.weight(r); };
    const double m0 = quad::radial(m, rmax);
    const double m2 = quad::radial([&](double r) { return r * r * m(r); }, rmax);
    const double m4 = quad::radial([&](double r) { return r * r * r * r * m(r); }, rmax);
    MomentEval e;
    e.mass = quad::radial([&](double r) { return p.value(r); }, rmax);
    e.energy = quad::radial([&](double r) { return r * r * p.value(r); }, rmax);
    e.jac << m0, -b * m2, m2, -b * m4;
    return e;
}

MomentEval grid_eval(const VelocityGrid& g, double a, double b, double eps)
{
    const ScalarField A = a * (-b * g.speed_sq()).exp();
    const ScalarField Me = A / (1.0 + eps * A);
    const ScalarField m = Me * (1.0 - eps * Me);
    const ScalarField& v2 = g.speed_sq();
    const double h3 = g.cell_volume();
    MomentEval e;
    e.mass = Me.sum() * h3;
    e.energy = (Me * v2).sum() * h3;
    e.jac << m.sum() * h3, -b * (m * v2).sum() * h3, (m * v2).sum() * h3,
        -b * (m * v2 * v2).sum() * h3;
    return e;
}

void clamp_to_brackets(double& a, double& b, double rho, double E)
{
    const double a0 = rho / std::pow(2 * pi * E, 1.5);
    b = std::clamp(b, 3.0 / (8.0 * E), 5.0 / (6.0 * E));
    a = std::clamp(a, std::pow(0.75, 1.5) * a0, std::pow(5.0 / 3.0, 2.5) * a0);
}

bool newton(const Evaluator& eval, const GasMoments& mom, double eps, bool use_brackets,
            double& a, double& b, SolveReport& rep, double tol)
{
    const double target_mass = mom.rho;
    const double target_energy = 3.0 * mom.rho * mom.E;
    for (int it = 0; it < 100; ++it) {
        const MomentEval e = eval(a, b);
        const Eigen::Vector2d r(std::log(e.mass / target_mass), std::log(e.energy / target_energy));
        rep.iterations = it + 1;
        rep.mass_residual = e.mass / target_mass - 1.0;
        rep.energy_residual = e.energy / target_energy - 1.0;
        if (!r.allFinite())
            return false;
        if (r.cwiseAbs().maxCoeff() < tol)
            return true;
        Eigen::Matrix2d J;
        J.row(0) = e.jac.row(0) / e.mass;
        J.row(1) = e.jac.row(1) / e.energy;
        Eigen::Vector2d step = -J.partialPivLu().solve(r);
        const double len = step.cwiseAbs().maxCoeff();
        if (!std::isfinite(len))
            return false;
        if (len > 1.0)
            step /= len;
        a *= std::exp(step[0]);
        b *= std::exp(step[1]);
        if (use_brackets)
            clamp_to_brackets(a, b, mom.rho, mom.E);
    }
    (void)eps;
    return false;
}

// I_k(z) = 4 pi int x^k / (exp(x^2) + z) dx
double ik(int k, double z)
{
    const double xmax = std::sqrt(196.0 + std::log1p(z));
    return 4.0 * pi *
           quad::integrate([&](double x) { return std::pow(x, k) / (std::exp(x * x) + z); }, 0.0,
                           xmax, 1e-14);
}

// Bisection on the fugacity z = eps a, using b = I_4 / (3 E I_2).
void bisect(const GasMoments& mom, double eps, double& a, double& b)
{
    auto solve_b = [&](double z) { return ik(4, z) / (3.0 * mom.E * ik(2, z)); };
    auto G = [&](double z) { return z * std::pow(solve_b(z), -1.5) * ik(2, z); };
    const double target = mom.rho * eps;
    double lo = -60.0;
    double hi = 200.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (G(std::exp(mid)) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15)
            break;
    }
    const double z = std::exp(0.5 * (lo + hi));
    b = solve_b(z);
    a = z / eps;
}

} // namespace

GasMoments measure_moments(const VelocityGrid& grid, const ScalarField& f)
{
    GasMoments m;
    m.rho = integrate(grid, f);
    for (int k = 0; k < 3; ++k)
        m.u[k] = integrate(grid, f, grid.v(k)) / m.rho;
    ScalarField d2 = ScalarField::Zero(grid.size());
    for (int k = 0; k < 3; ++k)
        d2 += (grid.v(k) - m.u[k]).square();
    m.E = integrate(grid, f, d2) / (3.0 * m.rho);
    return m;
}

Eigen::Matrix<double, 5, 1> invariant_moments(const VelocityGrid& grid, const ScalarField& f)
{
    Eigen::Matrix<double, 5, 1> out;
    out[0] = integrate(grid, f);
    for (int k = 0; k < 3; ++k)
        out[1 + k] = integrate(grid, f, grid.v(k));
    out[4] = integrate(grid, f, grid.speed_sq());
    return out;
}

Thresholds saturation_threshold(const GasMoments& m)
{
    if (!(m.rho > 0.0) || !(m.E > 0.0))
        throw Error(ErrorKind::InvalidArgument, "rho and E must be positive");
    Thresholds t;
    t.eps_max = (4.0 * pi / 3.0) * std::pow(5.0 * m.E, 1.5) / m.rho;
    t.eps_bar = std::pow(0.4, 2.5) * std::pow(6.0 * pi * m.E, 1.5) / m.rho;
    const double s2 = std::sqrt(2.0);
    t.eps_dagger = std::pow(5.0, -2.5) * std::pow(3.0, 21.0 / 4.0) / std::pow(3.0 + 4.0 * s2, 2) *
                   std::pow(2.0 * pi * m.E, 1.5) / (2.0 * m.rho);
    t.eps_one = std::pow(0.6, 2.5) * std::pow(2.0 * pi * m.E, 1.5) / m.rho;
    return t;
}

double FermiDiracParams::rho_eps() const
{
    return a * std::pow(pi / b, 1.5);
}

double FermiDiracParams::maxwellian(double r) const
{
    return a * std::exp(-b * r * r);
}

double FermiDiracParams::value(double r) const
{
    const double A = maxwellian(r);
    return A / (1.0 + eps * A);
}

double FermiDiracParams::weight(double r) const
{
    const double A = maxwellian(r);
    const double d = 1.0 + eps * A;
    return A / (d * d);
}

double FermiDiracParams::radial_cutoff() const
{
    return std::sqrt((196.0 + std::log1p(eps * a)) / b);
}

FermiDiracParams solve_fermi_dirac(const GasMoments& moments, double eps, SolveReport* report)
{
    const Thresholds t = saturation_threshold(moments);
    if (eps < 0.0)
        throw Error(ErrorKind::InvalidArgument, "eps must be nonnegative");
    if (eps >= t.eps_max) {
        std::ostringstream os;
        os << "eps = " << eps << " >= eps_max = " << t.eps_max;
        throw Error(ErrorKind::NoEquilibrium, os.str());
    }
    FermiDiracParams p;
    p.eps = eps;
    p.rho = moments.rho;
    p.E = moments.E;
    double a = moments.rho / std::pow(2 * pi * moments.E, 1.5);
    double b = 0.5 / moments.E;
    SolveReport rep;
    const bool brackets = eps <= t.eps_bar;
    Evaluator ev = [eps](double aa, double bb) { return radial_eval(aa, bb, eps); };
    bool ok = newton(ev, moments, eps, brackets, a, b, rep, 1e-13);
    if (!ok && eps > 0.0) {
        rep.bisection_fallback = true;
        bisect(moments, eps, a, b);
        ok = newton(ev, moments, eps, false, a, b, rep, 1e-13);
    }
    if (report)
        *report = rep;
    if (!ok && std::max(std::abs(rep.mass_residual), std::abs(rep.energy_residual)) > 1e-10) {
        std::ostringstream os;
        os << "residuals mass " << rep.mass_residual << ", energy " << rep.energy_residual;
        throw Error(ErrorKind::NonConvergence, os.str());
    }
    p.a = a;
    p.b = b;
    return p;
}

FermiDiracParams solve_fermi_dirac_on_grid(const VelocityGrid& grid, const GasMoments& moments,
                                           double eps, SolveReport* report)
{
    FermiDiracParams p = solve_fermi_dirac(moments, eps);
    SolveReport rep;
    Evaluator ev = [&grid, eps](double aa, double bb) { return grid_eval(grid, aa, bb, eps); };
    double a = p.a;
    double b = p.b;
    if (!newton(ev, moments, eps, false, a, b, rep, 2e-15) &&
        std::max(std::abs(rep.mass_residual), std::abs(rep.energy_residual)) > 1e-12)
        throw Error(ErrorKind::NonConvergence, "grid equilibrium refinement failed");
    if (report)
        *report = rep;
    p.a = a;
    p.b = b;
    return p;
}

bool brackets_hold(const FermiDiracParams& p)
{
    const double x = 0.5 / p.E;
    const double y = p.rho / std::pow(2 * pi * p.E, 1.5);
    return 0.6 * p.b <= x && x <= (4.0 / 3.0) * p.b && std::pow(0.6, 2.5) * p.a <= y &&
           y <= std::pow(4.0 / 3.0, 1.5) * p.a;
}

ScalarField evaluate_equilibrium(const FermiDiracParams& params, const VelocityGrid& grid)
{
    const ScalarField A = params.a * (-params.b * grid.speed_sq()).exp();
    return A / (1.0 + params.eps * A);
}

ScalarField weight_m(const FermiDiracParams& params, const VelocityGrid& grid)
{
    const ScalarField A = params.a * (-params.b * grid.speed_sq()).exp();
    return A / (1.0 + params.eps * A).square();
}

SaturatedState saturated_state(double rho, double eps, const VelocityGrid& grid)
{
    if (!(rho > 0.0) || !(eps > 0.0))
        throw Error(ErrorKind::InvalidArgument, "rho and eps must be positive");
    SaturatedState s;
    s.radius = std::cbrt(3.0 * rho * eps / (4.0 * pi));
    if (s.radius > 0.5 * grid.v_max()) {
        std::ostringstream os;
        os << "R = " << s.radius << " > v_max/2 = " << 0.5 * grid.v_max();
        throw Error(ErrorKind::BallTooLarge, os.str());
    }
    const double r2 = s.radius * s.radius;
    s.f = (grid.speed_sq() <= r2).select(ScalarField::Constant(grid.size(), 1.0 / eps), 0.0);
    s.measured_mass = integrate(grid, s.f);
    return s;
}

double radial_moment(const FermiDiracParams& params, double power)
{
    return quad::radial([&](double r) { return std::pow(r, power) * params.value(r); },
                        params.radial_cutoff());
}

double equilibrium_relative_entropy(const FermiDiracParams& p)
{
    if (p.eps == 0.0)
        return 0.0;
    const double x = p.E / p.E_eps();
    const double psi = std::log(x) + 1.0 - x;
    const double tail = quad::radial(
        [&](double r) { return p.value(r) * std::log1p(p.eps * p.maxwellian(r)); }, p.radial_cutoff());
    return p.rho * (std::log(p.rho) - std::log(p.rho_eps()) - 1.5 * psi) + tail;
}

} // namespace lfd
