#pragma once

#include "lfd/convolution.hpp"
#include "lfd/equilibrium.hpp"
#include "lfd/grid.hpp"
#include "lfd/kernels.hpp"

#include <cstdint>
#include <vector>

namespace lfd {

struct CollisionCoefficients {
    TensorField Sigma;     // a * (f (1 - eps f))
    TensorField sigma;     // a * f
    VectorField drift;     // b * f
    VectorField drift_sat; // b * (f (1 - eps f))
    ScalarField cfield;    // c * f
    double gamma = 1.0;
    std::vector<AliasingRisk> warnings;
};

CollisionCoefficients coefficients(const Convolver& conv, const ScalarField& f, double eps);

Eigen::Matrix3d tensor_at(const TensorField& t, Eigen::Index i);
/// Nodewise S_i g_i.
VectorField tensor_times(const TensorField& S, const VectorField& g);

/// Division floor 1e-12 * max f * min(1, min(1 - eps f)), lowered to 1e-6 of the smallest
/// positive value of f.
double division_floor(const ScalarField& f, double eps);

struct CollisionEvaluation {
    ScalarField Q;
    double production = 0.0; // h^3 sum_i Phi_i . g_i, averaged over the difference pair
    double stiffness = 0.0;  // spectral radius estimate of the Jacobian
};

/// Discrete operator in flux form. The flux at node i is
///   Phi_i = F_i [ (a * F)_i g_i - (a * (F g))_i ],  F = f (1 - eps f),
/// with g the one-sided gradient of psi = log((f + d) / (1 - eps f + d')), averaged over the
/// forward and backward pair. F g is the discrete surrogate of grad f and a * (F g) that of
/// b[f]. As a pair sum Phi_i = sum_j a_ij F_i F_j (g_i - g_j), which conserves mass, momentum
/// and energy exactly, makes production a sum of squares equal to -h^3 sum psi Q, and
/// annihilates M_eps up to the floors since its psi is quadratic.
class CollisionOperator {
public:
    using Evaluation = CollisionEvaluation;

    CollisionOperator(GridPtr grid, double eps, double gamma,
                      ConvolutionPath path = ConvolutionPath::Fast);

    const VelocityGrid& grid() const { return *grid_; }
    const Convolver& convolver() const { return conv_; }
    double eps() const { return eps_; }
    double gamma() const { return gamma_; }

    /// Keep the log floor fixed instead of deriving it from each input.
    void fix_floor(double delta) { fixed_floor_ = delta; }
    double floor_for(const ScalarField& f) const;

    Evaluation evaluate(const ScalarField& f, bool want_stiffness = false) const;
    ScalarField apply(const ScalarField& f) const { return evaluate(f).Q; }

private:
    GridPtr grid_;
    double eps_;
    double gamma_;
    Convolver conv_;
    double fixed_floor_ = -1.0;
};

/// f clamped to [0, 1/eps].
ScalarField clamp_density(const ScalarField& f, double eps);
/// log((f + floor) / (1 - eps f + 1e-12)) for f already clamped.
ScalarField log_potential(const ScalarField& fc, double eps, double floor);

CollisionEvaluation evaluate_collision(const Convolver& conv, const ScalarField& f, double eps,
                                       double floor, bool want_stiffness = false);

/// Throws PauliViolation when f exceeds 1/eps + 1e-12.
ScalarField collision_operator(GridPtr grid, const ScalarField& f, double eps, double gamma);

/// min over nodes and sampled unit directions of xi^T Sigma xi / <v>^gamma.
double ellipticity_estimate(const Convolver& conv, const ScalarField& f, double eps,
                            std::uint64_t seed = 20240611);

} // namespace lfd
