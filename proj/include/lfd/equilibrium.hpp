#pragma once

#include "lfd/grid.hpp"

namespace lfd {

struct GasMoments {
    double rho = 1.0;
    Eigen::Vector3d u = Eigen::Vector3d::Zero();
    double E = 1.0;
};

/// rho = int f, u = int f v / rho, E = int f |v - u|^2 / (3 rho).
GasMoments measure_moments(const VelocityGrid& grid, const ScalarField& f);

/// The five discrete collision-invariant moments (int f, int f v, int f |v|^2).
Eigen::Matrix<double, 5, 1> invariant_moments(const VelocityGrid& grid, const ScalarField& f);

struct Thresholds {
    double eps_max;
    double eps_bar;
    double eps_dagger;
    double eps_one;
};

Thresholds saturation_threshold(const GasMoments& moments);

struct FermiDiracParams {
    double a = 0.0;
    double b = 0.0;
    double eps = 0.0;
    double rho = 1.0;
    double E = 1.0;

    double rho_eps() const;
    double E_eps() const { return 0.5 / b; }
    double c_eps() const { return 1.0 + eps * a; }
    double kappa_eps() const { return 1.0 / (c_eps() * c_eps()); }

    /// M(r) = a exp(-b r^2)
    double maxwellian(double r) const;
    /// M_eps(r) = M / (1 + eps M)
    double value(double r) const;
    /// m(r) = M_eps (1 - eps M_eps) = M / (1 + eps M)^2
    double weight(double r) const;
    /// radius beyond which the profile is below exp(-196) of its peak
    double radial_cutoff() const;
};

struct SolveReport {
    int iterations = 0;
    double mass_residual = 0.0;
    double energy_residual = 0.0;
    bool bisection_fallback = false;
};

/// Radial-quadrature solve of int M_eps = rho, int M_eps |v|^2 = 3 rho E.
FermiDiracParams solve_fermi_dirac(const GasMoments& moments, double eps,
                                   SolveReport* report = nullptr);

/// Re-solves (a, b) so that the midpoint sums on the grid hit rho and 3 rho E exactly.
/// This is the stationary point of the conservative discrete flow.
FermiDiracParams solve_fermi_dirac_on_grid(const VelocityGrid& grid, const GasMoments& moments,
                                           double eps, SolveReport* report = nullptr);

/// (3/5) b <= 1/(2E) <= (4/3) b and (3/5)^{5/2} a <= rho/(2 pi E)^{3/2} <= (4/3)^{3/2} a.
bool brackets_hold(const FermiDiracParams& p);

ScalarField evaluate_equilibrium(const FermiDiracParams& params, const VelocityGrid& grid);
ScalarField weight_m(const FermiDiracParams& params, const VelocityGrid& grid);

struct SaturatedState {
    ScalarField f;
    double radius = 0.0;
    double measured_mass = 0.0;
};

SaturatedState saturated_state(double rho, double eps, const VelocityGrid& grid);

/// H_0(M_0 | M_eps) = H(M_0) - H(M_eps). Gibbs' principle makes this nonpositive;
/// its magnitude is what the Csiszar-Kullback bound uses.
double equilibrium_relative_entropy(const FermiDiracParams& params);

/// Radial quadratures of the equilibrium.
double radial_moment(const FermiDiracParams& params, double power);

} // namespace lfd
