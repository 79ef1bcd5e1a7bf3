#include "lfd/radial.hpp"
#include "lfd/convolution.hpp"
#include "lfd/errors.hpp"
#include "lfd/kernels.hpp"
#include "lfd/quadrature.hpp"

#include <cmath>

namespace lfd {

namespace {

// squared distance |v - w|^2 for |v| = s, |w| = r, cos angle c
double dist2(double s, double r, double c)
{
    return std::max(s * s + r * r - 2.0 * s * r * c, 0.0);
}

} // namespace

SigmaEigen sigma_spectral_decomposition(const VelocityGrid& grid, const ScalarField& f,
                                        Eigen::Index node, double gamma)
{
    const double asym = rotational_asymmetry(grid, f);
    if (asym > 1e-8)
        throw Error(ErrorKind::NotRadial, "relative asymmetry " + std::to_string(asym));
    const Eigen::Vector3d v = grid.node(node);
    const Eigen::Vector3d vhat = v.normalized();
    SigmaEigen out;
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        const Eigen::Vector3d z = v - grid.node(j);
        const double r = z.norm();
        if (r == 0.0 || f[j] == 0.0)
            continue;
        const double c = vhat.dot(z) / r;
        const double w = std::pow(r, gamma + 2.0) * f[j];
        out.lambda1 += (1.0 - c * c) * w;
        out.lambda2 += (1.0 - 0.5 * (1.0 - c * c)) * w;
    }
    out.lambda1 *= grid.cell_volume();
    out.lambda2 *= grid.cell_volume();
    // trace from the tensor kernel, summed independently
    double tr = 0.0;
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        const KernelValues<double> k = kernel_eval<double>(v - grid.node(j), gamma);
        tr += k.a.trace() * f[j];
    }
    out.trace = tr * grid.cell_volume();
    return out;
}

RadialProfile equilibrium_profile(const FermiDiracParams& p)
{
    return {[p](double r) { return p.value(r); }, p.radial_cutoff()};
}

RadialProfile weight_profile(const FermiDiracParams& p)
{
    return {[p](double r) { return p.weight(r); }, p.radial_cutoff()};
}

RadialProfile weight_gradient_profile(const FermiDiracParams& p)
{
    return {[p](double r) { return p.weight(r) * (1.0 - 2.0 * p.eps * p.value(r)); },
            p.radial_cutoff()};
}

RadialProfile weight_times_equilibrium_profile(const FermiDiracParams& p)
{
    return {[p](double r) { return p.weight(r) * p.value(r); }, p.radial_cutoff()};
}

double lambda1_radial(const RadialProfile& prof, double s, double gamma)
{
    auto k = [gamma](double s_, double r, double c) {
        return std::pow(dist2(s_, r, c), 0.5 * gamma) * r * r * (1.0 - c * c);
    };
    return quad::radial_convolution(k, prof.F, s, prof.rmax);
}

double lambda2_radial(const RadialProfile& prof, double s, double gamma)
{
    auto k = [gamma](double s_, double r, double c) {
        const double d2 = dist2(s_, r, c);
        const double along = s_ - r * c;
        return 0.5 * std::pow(d2, 0.5 * gamma) * (d2 + along * along);
    };
    return quad::radial_convolution(k, prof.F, s, prof.rmax);
}

double trace_radial(const RadialProfile& prof, double s, double gamma)
{
    auto k = [gamma](double s_, double r, double c) {
        return 2.0 * std::pow(dist2(s_, r, c), 0.5 * gamma + 1.0);
    };
    return quad::radial_convolution(k, prof.F, s, prof.rmax);
}

double drift_radial(const RadialProfile& prof, double s, double gamma)
{
    auto k = [gamma](double s_, double r, double c) {
        return -2.0 * (s_ - r * c) * std::pow(dist2(s_, r, c), 0.5 * gamma);
    };
    return quad::radial_convolution(k, prof.F, s, prof.rmax);
}

double power_radial(const RadialProfile& prof, double s, double p)
{
    auto k = [p](double s_, double r, double c) { return std::pow(dist2(s_, r, c), 0.5 * p); };
    return quad::radial_convolution(k, prof.F, s, prof.rmax);
}

JpMoment j_p_moment(double p, const Eigen::Vector3d& v, const FermiDiracParams& params)
{
    if (p < 0.0 || p > 3.0)
        throw Error(ErrorKind::InvalidArgument, "p outside [0, 3]");
    const RadialProfile prof = equilibrium_profile(params);
    const double mass = quad::radial(prof.F, prof.rmax);
    JpMoment out;
    out.J = power_radial(prof, v.norm(), p) / mass;
    out.mu = quad::radial([&](double r) { return radial_power(r, p) * prof.F(r); }, prof.rmax) / mass;
    return out;
}

} // namespace lfd
