#pragma once

#include "lfd/equilibrium.hpp"
#include "lfd/grid.hpp"

#include <functional>

namespace lfd {

struct SigmaEigen {
    double lambda1 = 0.0; // eigenvalue along v
    double lambda2 = 0.0; // double eigenvalue on the orthogonal plane
    double trace = 0.0;   // trace of a * f at the node, from the tensor convolution
};

/// Grid sums  lambda1 = h^3 sum_j (1 - <v^, z^>^2) |z|^{g+2} f_j,
///            lambda2 = h^3 sum_j (1 - |v^ x z^|^2 / 2) |z|^{g+2} f_j,  z = v_i - v_j.
/// Throws NotRadial when f is not invariant under the 90 degree grid rotations.
SigmaEigen sigma_spectral_decomposition(const VelocityGrid& grid, const ScalarField& f,
                                        Eigen::Index node, double gamma);

/// Radially symmetric profile F(|w|) supported on [0, rmax].
struct RadialProfile {
    std::function<double(double)> F;
    double rmax = 0.0;
};

RadialProfile equilibrium_profile(const FermiDiracParams& p);
RadialProfile weight_profile(const FermiDiracParams& p);
/// m - 2 eps m M_eps
RadialProfile weight_gradient_profile(const FermiDiracParams& p);
/// m M_eps
RadialProfile weight_times_equilibrium_profile(const FermiDiracParams& p);

/// Quadratures of the same quantities for a radial profile at |v| = s.
double lambda1_radial(const RadialProfile& prof, double s, double gamma);
double lambda2_radial(const RadialProfile& prof, double s, double gamma);
double trace_radial(const RadialProfile& prof, double s, double gamma);
/// Component of (b * F)(v) along v.
double drift_radial(const RadialProfile& prof, double s, double gamma);
/// int |v - w|^p F(|w|) dw
double power_radial(const RadialProfile& prof, double s, double p);

struct JpMoment {
    double J = 0.0;  // rho^{-1} int |v - w|^p M_eps(w) dw
    double mu = 0.0; // rho^{-1} int |w|^p M_eps(w) dw
};

JpMoment j_p_moment(double p, const Eigen::Vector3d& v, const FermiDiracParams& params);

} // namespace lfd
