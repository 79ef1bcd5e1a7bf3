#include "lfd/collision.hpp"
#include "lfd/errors.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace lfd {

namespace {

ScalarField clamp_field(const ScalarField& f, double eps)
{
    ScalarField c = f.max(0.0);
    if (eps > 0.0)
        c = c.min(1.0 / eps);
    return c;
}

constexpr double kSaturationFloor = 1e-12;

} // namespace

VectorField tensor_times(const TensorField& S, const VectorField& g)
{
    VectorField out(S.rows(), 3);
    out.col(0) = S.col(0) * g.col(0) + S.col(3) * g.col(1) + S.col(4) * g.col(2);
    out.col(1) = S.col(3) * g.col(0) + S.col(1) * g.col(1) + S.col(5) * g.col(2);
    out.col(2) = S.col(4) * g.col(0) + S.col(5) * g.col(1) + S.col(2) * g.col(2);
    return out;
}

Eigen::Matrix3d tensor_at(const TensorField& t, Eigen::Index i)
{
    Eigen::Matrix3d m;
    m << t(i, 0), t(i, 3), t(i, 4), t(i, 3), t(i, 1), t(i, 5), t(i, 4), t(i, 5), t(i, 2);
    return m;
}

CollisionCoefficients coefficients(const Convolver& conv, const ScalarField& f, double eps)
{
    CollisionCoefficients c;
    c.gamma = conv.gamma();
    const ScalarField F = f * (1.0 - eps * f);
    if (auto w = check_aliasing(conv.grid(), f))
        c.warnings.push_back(*w);
    c.Sigma = conv.a(F);
    c.sigma = eps == 0.0 ? c.Sigma : conv.a(f);
    c.drift = conv.b(f);
    c.drift_sat = eps == 0.0 ? c.drift : conv.b(F);
    c.cfield = conv.c(f);
    return c;
}

double division_floor(const ScalarField& f, double eps)
{
    const double fmax = f.maxCoeff();
    double sat = 1.0;
    if (eps > 0.0)
        sat = std::min(1.0, (1.0 - eps * f).minCoeff());
    double floor = 1e-12 * std::max(fmax, 0.0) * std::max(sat, 1e-300);
    // positive tails below the floor keep their exact logarithm
    const double fmin = (f > 0.0).select(f, std::numeric_limits<double>::infinity()).minCoeff();
    if (std::isfinite(fmin))
        floor = std::min(floor, 1e-6 * fmin);
    return floor + 1e-300;
}

CollisionOperator::CollisionOperator(GridPtr grid, double eps, double gamma, ConvolutionPath path)
    : grid_(grid), eps_(eps), gamma_(gamma), conv_(grid, gamma, path)
{
    if (eps < 0.0)
        throw Error(ErrorKind::InvalidArgument, "eps must be nonnegative");
}

double CollisionOperator::floor_for(const ScalarField& f) const
{
    return fixed_floor_ > 0.0 ? fixed_floor_ : division_floor(clamp_field(f, eps_), eps_);
}

CollisionOperator::Evaluation CollisionOperator::evaluate(const ScalarField& f, bool want_stiffness) const
{
    return evaluate_collision(conv_, f, eps_, floor_for(f), want_stiffness);
}

ScalarField clamp_density(const ScalarField& f, double eps)
{
    return clamp_field(f, eps);
}

ScalarField log_potential(const ScalarField& fc, double eps, double floor)
{
    ScalarField psi = (fc + floor).log();
    if (eps > 0.0)
        psi -= (1.0 - eps * fc + kSaturationFloor).log();
    return psi;
}

CollisionEvaluation evaluate_collision(const Convolver& conv, const ScalarField& f, double eps,
                                       double floor, bool want_stiffness)
{
    const VelocityGrid& g = conv.grid();
    const ScalarField fc = clamp_field(f, eps);
    const ScalarField F = fc * (1.0 - eps * fc);
    const ScalarField psi = log_potential(fc, eps, floor);

    const TensorField S = conv.a(F);
    CollisionEvaluation ev;
    ev.Q = ScalarField::Zero(g.size());
    for (Side side : {Side::Forward, Side::Backward}) {
        const VectorField grad = one_sided_gradient(g, psi, side);
        const VectorField u = grad.colwise() * F;
        const VectorField w = conv.a_contract(u);
        const VectorField phi = (tensor_times(S, grad) - w).colwise() * F;
        ev.Q += 0.5 * one_sided_divergence(g, phi, side);
        ev.production += 0.5 * g.cell_volume() * (phi * grad).sum();
    }
    if (want_stiffness) {
        // F / (f + d) from the log, eps F / (1 - eps f) from the saturation term
        ScalarField wgt = F / (fc + floor);
        if (eps > 0.0)
            wgt += eps * F / (1.0 - eps * fc + kSaturationFloor);
        double worst = 0.0;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            if (wgt[i] == 0.0)
                continue;
            es.computeDirect(tensor_at(S, i), Eigen::EigenvaluesOnly);
            worst = std::max(worst, es.eigenvalues()[2] * wgt[i]);
        }
        ev.stiffness = 12.0 * worst / (g.h() * g.h());
    }
    return ev;
}

ScalarField collision_operator(GridPtr grid, const ScalarField& f, double eps, double gamma)
{
    DistributionField field{grid, f, eps};
    check_admissible(field);
    CollisionOperator op(grid, eps, gamma);
    return op.apply(f);
}

double ellipticity_estimate(const Convolver& conv, const ScalarField& f, double eps,
                            std::uint64_t seed)
{
    const VelocityGrid& g = conv.grid();
    std::vector<Eigen::Vector3d> dirs;
    for (int x = -1; x <= 1; ++x)
        for (int y = -1; y <= 1; ++y)
            for (int z = -1; z <= 1; ++z)
                if (x || y || z)
                    dirs.push_back(Eigen::Vector3d(x, y, z).normalized());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    while (dirs.size() < 26 + 50) {
        Eigen::Vector3d d(normal(rng), normal(rng), normal(rng));
        if (d.norm() > 1e-8)
            dirs.push_back(d.normalized());
    }
    const TensorField S = conv.a(f * (1.0 - eps * f));
    const ScalarField weight = japanese_bracket_pow(g, conv.gamma());
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const Eigen::Matrix3d m = tensor_at(S, i);
        for (const auto& d : dirs)
            best = std::min(best, d.dot(m * d) / weight[i]);
    }
    return best;
}

} // namespace lfd
