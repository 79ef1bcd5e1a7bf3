#include "lfd/diagnostics.hpp"
#include "lfd/collision.hpp"
#include "lfd/errors.hpp"

#include <cmath>
#include <numeric>

namespace lfd {

namespace {

// Pair sum 1/2 h^6 sum_{i,j} F_i F_j |z|^g (|z|^2 |d|^2 - (z.d)^2), d = g_i - g_j,
// over nodes with f above 1e-14 max f.
double pair_production(const Convolver& conv, const ScalarField& f, double eps)
{
    const VelocityGrid& grid = conv.grid();
    const double gamma = conv.gamma();
    const ScalarField fc = clamp_density(f, eps);
    const ScalarField F = fc * (1.0 - eps * fc);
    const ScalarField psi = log_potential(fc, eps, division_floor(fc, eps));
    const double cut = 1e-14 * fc.maxCoeff();
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        if (fc[i] > cut && F[i] > 0.0)
            active.push_back(i);
    double total = 0.0;
    for (Side side : {Side::Forward, Side::Backward}) {
        const VectorField g = one_sided_gradient(grid, psi, side);
        double s = 0.0;
        for (size_t a = 0; a < active.size(); ++a) {
            const Eigen::Index i = active[a];
            const Eigen::Vector3d vi = grid.node(i);
            const Eigen::Vector3d gi = g.row(i).transpose();
            double row = 0.0;
            for (size_t b = a + 1; b < active.size(); ++b) {
                const Eigen::Index j = active[b];
                const Eigen::Vector3d z = vi - grid.node(j);
                const Eigen::Vector3d d = gi - g.row(j).transpose().matrix();
                // |z|^2 |d|^2 - (z.d)^2 as |z x d|^2, nonnegative in floating point too
                row += F[j] * std::pow(z.squaredNorm(), 0.5 * gamma) * z.cross(d).squaredNorm();
            }
            s += F[i] * row;
        }
        // unordered pairs counted once: 1/2 sum_{i,j} = sum_{i<j}
        total += 0.5 * s;
    }
    const double h3 = grid.cell_volume();
    return total * h3 * h3;
}

} // namespace

double moment_m(const VelocityGrid& grid, const ScalarField& f, double s)
{
    return integrate(grid, f, japanese_bracket_pow(grid, s));
}

double moment_M(const VelocityGrid& grid, const ScalarField& f, double s)
{
    return integrate(grid, f.square(), japanese_bracket_pow(grid, s));
}

double dissipation_D(const VelocityGrid& grid, const ScalarField& f, double s)
{
    const VectorField g = gradient(grid, f * japanese_bracket_pow(grid, 0.5 * s));
    return integrate(grid, g.square().rowwise().sum());
}

MomentReport moments(const VelocityGrid& grid, const ScalarField& f, double gamma)
{
    MomentReport r;
    r.m0 = moment_m(grid, f, 0.0);
    r.m2 = moment_m(grid, f, 2.0);
    r.m3 = moment_m(grid, f, 3.0);
    r.m4 = moment_m(grid, f, 4.0);
    r.M0 = moment_M(grid, f, 0.0);
    r.Mg2 = moment_M(grid, f, gamma + 2.0);
    r.Dg2 = dissipation_D(grid, f, gamma + 2.0);
    return r;
}

double fd_entropy(const VelocityGrid& grid, const ScalarField& f, double eps)
{
    if (eps == 0.0)
        return -boltzmann_H(grid, f);
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double x = std::clamp(eps * f[i], 0.0, 1.0);
        double term = 0.0;
        if (x > 0.0)
            term += x * std::log(x);
        if (x < 1.0)
            term += (1.0 - x) * std::log1p(-x);
        s += term;
    }
    return -s * grid.cell_volume() / eps;
}

double boltzmann_H(const VelocityGrid& grid, const ScalarField& f)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i)
        if (f[i] > 0.0)
            s += f[i] * std::log(f[i]);
    return s * grid.cell_volume();
}

namespace {

double entropy_density(double f, double eps)
{
    if (eps == 0.0)
        return f > 0.0 ? -f * std::log(f) : 0.0;
    const double x = std::clamp(eps * f, 0.0, 1.0);
    double term = 0.0;
    if (x > 0.0)
        term += x * std::log(x);
    if (x < 1.0)
        term += (1.0 - x) * std::log1p(-x);
    return -term / eps;
}

// (1 + x) log(1 + x) - x, accurate for small x
double bregman_q(double x)
{
    if (x <= -1.0)
        return 1.0;
    if (std::abs(x) < 1e-3)
        return x * x * (0.5 - x * (1.0 / 6.0 - x * (1.0 / 12.0 - x / 20.0)));
    return (1.0 + x) * std::log1p(x) - x;
}

} // namespace

double fd_entropy_change(const VelocityGrid& grid, const ScalarField& f, const ScalarField& g,
                         double eps)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i)
        if (f[i] != g[i])
            s += entropy_density(f[i], eps) - entropy_density(g[i], eps);
    return s * grid.cell_volume();
}

double fd_relative_entropy(const VelocityGrid& grid, const ScalarField& f, const ScalarField& M,
                           double eps)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double m = M[i];
        if (!(m > 0.0))
            continue;
        const double fi = std::max(f[i], 0.0);
        s += m * bregman_q((fi - m) / m);
        if (eps > 0.0) {
            const double sat = 1.0 - eps * m;
            s += sat / eps * bregman_q(eps * (m - fi) / sat);
        }
    }
    return s * grid.cell_volume();
}

double entropy_production(const Convolver& conv, const ScalarField& f, double eps,
                          ProductionPath path)
{
    if (path == ProductionPath::PairSum)
        return pair_production(conv, f, eps);
    const ScalarField fc = clamp_density(f, eps);
    return evaluate_collision(conv, f, eps, division_floor(fc, eps)).production;
}

double landau_production(const Convolver& conv, const ScalarField& f, ProductionPath path)
{
    return entropy_production(conv, f, 0.0, path);
}

ProductionComparison production_comparison(const Convolver& conv, const ScalarField& f, double eps)
{
    const VelocityGrid& grid = conv.grid();
    ProductionComparison c;
    c.kappa0 = (1.0 - eps * f).minCoeff();
    c.D0 = landau_production(conv, f);
    c.Deps = entropy_production(conv, f, eps);
    const VectorField gp = one_sided_gradient(grid, f, Side::Forward);
    const VectorField gm = one_sided_gradient(grid, f, Side::Backward);
    const ScalarField grad2 = 0.5 * (gp.square().rowwise().sum() + gm.square().rowwise().sum());
    const ScalarField pot = conv.power(f, conv.gamma() + 2.0);
    c.cross = integrate(grid, grad2 * f * pot);
    c.lhs = c.kappa0 * c.kappa0 * c.D0;
    c.rhs = 2.0 * c.Deps + (c.kappa0 > 0.0 ? 4.0 * eps * eps * c.cross / c.kappa0 : 0.0);
    c.holds = c.kappa0 > 0.0 && c.lhs <= c.rhs * (1.0 + 1e-12) + 1e-14;
    return c;
}

RelativeEntropies relative_entropies(const VelocityGrid& grid, const ScalarField& f,
                                     const ScalarField& equilibrium, double eps)
{
    const double mf = integrate(grid, f);
    const double mg = integrate(grid, equilibrium);
    if (std::abs(mf - mg) > 1e-8 * std::max(std::abs(mg), 1e-300))
        throw Error(ErrorKind::MassMismatch, "masses " + std::to_string(mf) + " and " + std::to_string(mg));
    RelativeEntropies r;
    r.H_eps_rel = fd_entropy(grid, equilibrium, eps) - fd_entropy(grid, f, eps);
    r.H_0_rel = boltzmann_H(grid, f) - boltzmann_H(grid, equilibrium);
    r.bound = eps * std::max(integrate(grid, f.square()), integrate(grid, equilibrium.square()));
    r.closeness_holds = std::abs(r.H_eps_rel - r.H_0_rel) <= r.bound * (1.0 + 1e-10) + 1e-14;
    return r;
}

double l1_distance(const VelocityGrid& grid, const ScalarField& f, const ScalarField& g)
{
    return integrate(grid, (f - g).abs());
}

double l12_distance(const VelocityGrid& grid, const ScalarField& f, const ScalarField& g)
{
    return integrate(grid, (f - g).abs(), 1.0 + grid.speed_sq());
}

DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& value, double window)
{
    if (t.size() != value.size() || t.size() < 10)
        throw Error(ErrorKind::DegenerateFit, "need at least 10 points");
    const double t0 = t.front();
    const double t1 = t.back();
    const double start = t1 - window * (t1 - t0);
    constexpr double floor = 1e-14;
    std::vector<double> x, y;
    for (size_t k = 0; k < t.size(); ++k) {
        if (t[k] < start)
            continue;
        if (!(value[k] > 0.0) || !std::isfinite(value[k]))
            throw Error(ErrorKind::DegenerateFit, "nonpositive value in window");
        if (value[k] <= floor)
            continue;
        x.push_back(t[k]);
        y.push_back(std::log(value[k]));
    }
    if (x.size() < 3)
        throw Error(ErrorKind::DegenerateFit, "fewer than 3 points above 1e-14 in the window");
    const double n = double(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    DecayFit fit;
    fit.points = int(x.size());
    const double slope = sxy / sxx;
    fit.rate = -slope;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

EntropyBoundReport entropy_upper_bound_check(const VelocityGrid& grid, const ScalarField& f,
                                             double eps, double R, double E0, double C0, double C1)
{
    if (!(R > 1.0))
        throw Error(ErrorKind::InvalidArgument, "R must exceed 1");
    EntropyBoundReport r;
    r.S = fd_entropy(grid, f, eps);
    const double le = std::abs(std::log(eps));
    const ScalarField ball = (grid.speed_sq() <= R * R).cast<double>();
    const double inner = integrate(grid, f * (1.0 - eps * f), ball);
    const double C = C1 + C0 * std::pow(E0, 0.8) + 3.0 * E0;
    r.rhs = 80.0 * (le + std::log(R)) * inner + C / R + le * E0 / (R * R);
    r.slack = r.rhs - r.S;
    return r;
}

} // namespace lfd
