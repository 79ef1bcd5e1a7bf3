#pragma once

#include "lfd/collision.hpp"
#include "lfd/diagnostics.hpp"
#include "lfd/equilibrium.hpp"
#include "lfd/grid.hpp"

#include <limits>
#include <string>
#include <vector>

namespace lfd {

enum class InitialPreset { Maxwellian, Bimaxwellian, NearSaturated, AnisotropicGaussian };

InitialPreset parse_preset(const std::string& name);
std::string to_string(InitialPreset p);

struct InitialCondition {
    InitialPreset preset = InitialPreset::Maxwellian;
    double rho = 1.0;
    double E = 1.0;                      // maxwellian
    double theta1 = 0.5, theta2 = 1.5;   // bimaxwellian temperatures
    double weight = 0.5;                 // bimaxwellian: (1 - w) M(theta1) + w M(theta2)
    double fraction = 0.9;               // near_saturated: peak as a fraction of 1/eps
    double width = 0.5;                  // near_saturated: Fermi edge width
    Eigen::Vector3d T = Eigen::Vector3d::Ones(); // anisotropic_gaussian temperatures
};

/// Builds the initial field on the grid; throws PauliViolation when it exceeds 1/eps.
ScalarField initial_field(const InitialCondition& ic, const VelocityGrid& grid, double eps);

struct Tolerances {
    double conservation = 1e-10;
    double pauli = 1e-12;
    double clipped_mass = 1e-8;
};

enum class TimeScheme { Heun, RKL2 };

struct SimulationConfig {
    double gamma = 1.0;
    double eps = 0.0;
    int n = 24;
    double v_max = 5.0; // keeps log f resolved out to the cube corners
    InitialCondition initial;
    double t_end = 10.0;
    double dt_out = 0.05;
    double cfl = 0.5;
    TimeScheme scheme = TimeScheme::RKL2;
    int max_stages = 200;
    double converged_l12 = 1e-4;
    int identity_samples = 10;
    Tolerances tol;
};

/// Throws InvalidArgument on t_end <= 0, cfl outside (0, 0.9], gamma outside (0, 1] or eps < 0.
void validate(const SimulationConfig& cfg);

struct TrajectoryRecord {
    double t = 0.0;
    double m0 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
    double M0 = 0.0, Mg2 = 0.0, Dg2 = 0.0;
    double S_eps = 0.0;
    double D_eps = 0.0;
    double H_rel = 0.0;
    double L12_dist = 0.0;
    double fmin = 0.0, fmax = 0.0;
    double one_minus_eps_f_min = 1.0;
    // not part of the CSV
    double L1_dist = 0.0;
    double mass_drift = 0.0;
    double momentum_drift = 0.0;
    double energy_drift = 0.0;
};

/// Fixed CSV header, in column order.
const std::vector<std::string>& trajectory_columns();
std::vector<double> trajectory_row(const TrajectoryRecord& r);

/// Semi-discrete check of dS/dt = D at one time: short explicit probe steps without
/// clipping or projection.
struct EntropyIdentitySample {
    double t = 0.0;
    double dSdt = 0.0;
    double D = 0.0;
};

struct SimulationResult {
    std::vector<TrajectoryRecord> records;
    std::vector<EntropyIdentitySample> identity;
    GridPtr grid;
    ScalarField final_field;
    ScalarField equilibrium;
    FermiDiracParams target;
    long steps = 0;
    long evaluations = 0;
    double clipped_mass_total = 0.0;
    double min_entropy_increment = std::numeric_limits<double>::infinity(); // over all steps
    double log_floor = 0.0;
    bool converged = false;
    DecayFit fit; // L12 distance, over records between 1e-2 and 1e-10 of its initial value
    bool fit_ok = false;
    std::string fit_error;
};

/// Clips f to [0, 1/eps]; returns the removed plus added mass (h^3 sum of |changes|).
double clip_to_pauli(const VelocityGrid& grid, ScalarField& f, double eps);

/// Correction f <- f (1 + c0 + c.v + c4 |v|^2) on {0 < f < (1 - 1e-6)/eps}, chosen so that the
/// five invariant moments equal the target. Throws ProjectionInfeasible.
ScalarField conservative_projection(const VelocityGrid& grid, const ScalarField& f,
                                    const Eigen::Matrix<double, 5, 1>& target, double eps);
ScalarField conservative_projection(const VelocityGrid& grid, const ScalarField& f,
                                    const GasMoments& target, double eps);

struct StepReport {
    ScalarField f;
    double clipped_mass = 0.0;
    int stages = 0;
    double stiffness = 0.0;
};

/// Explicit Heun step, then clipping and projection back onto the moments of f.
/// Throws StepTooLarge when dt exceeds cfl * 2 / stiffness and BlowUp on non-finite values.
StepReport step(const CollisionOperator& op, const ScalarField& f, double dt, double cfl = 0.9);
ScalarField step(GridPtr grid, const ScalarField& f, double dt, double eps, double gamma);

/// Second-order Runge-Kutta-Legendre super step with s stages (s >= 2), same post-processing.
StepReport step_rkl2(const CollisionOperator& op, const ScalarField& f, double tau, int s,
                     double cfl = 0.9);
/// Smallest stage count that keeps tau stable for the given stiffness.
int rkl2_stages(double tau, double stiffness, double cfl);

SimulationResult simulate(const SimulationConfig& cfg);

} // namespace lfd
