#pragma once

#include "lfd/convolution.hpp"
#include "lfd/equilibrium.hpp"
#include "lfd/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lfd {

/// Linearization of the discrete operator around M_eps with f = M_eps + m h:
///   L h = m^{-1} 1/2 sum_{+,-} div(Phi),  Phi_i = m_i [ (a * m)_i g_i - (a * (m g))_i ],
/// g the one-sided gradient of h. Self-adjoint and nonpositive in the inner product
/// <g, h>_m = h^3 sum m g h, and it annihilates 1, v and |v|^2 exactly.
class LinearizedOperator {
public:
    LinearizedOperator(GridPtr grid, const FermiDiracParams& params, double gamma,
                       ConvolutionPath path = ConvolutionPath::Fast);

    const VelocityGrid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    const FermiDiracParams& params() const { return params_; }
    double gamma() const { return gamma_; }
    const ScalarField& weight() const { return m_; }
    const Convolver& convolver() const { return conv_; }

    ScalarField apply(const ScalarField& h) const;
    double inner(const ScalarField& g, const ScalarField& h) const;
    double norm(const ScalarField& h) const;

    /// m-orthonormal basis of span{1, v1, v2, v3, |v|^2}, one column per function.
    const Eigen::MatrixXd& invariant_basis() const { return basis_; }

    /// Symmetric matrix of -L in the coordinates y = (h^3 m)^{1/2} h. Only for n <= 14.
    Eigen::MatrixXd dense_matrix() const;

private:
    GridPtr grid_;
    FermiDiracParams params_;
    double gamma_;
    Convolver conv_;
    ScalarField m_;
    TensorField Sm_;
    Eigen::MatrixXd basis_;
};

ScalarField apply_linearized(const LinearizedOperator& op, const ScalarField& h);

/// Pair sum 1/2 h^6 sum_{i,j} m_i m_j |z|^{g+2} |Pi(z)(g_i - g_j)|^2, averaged over
/// the forward and backward gradients. O(N^2).
double dirichlet_form(const LinearizedOperator& op, const ScalarField& h);

/// Removes the m-orthogonal projection onto the collision invariants.
/// Throws GramSingular when the Gram matrix of the invariants is degenerate.
ScalarField spectral_projection(const ScalarField& h, const LinearizedOperator& op);

struct GapResult {
    double gap = 0.0;
    int iterations = 0;
    double residual = 0.0;
    bool dense = false;
    Eigen::VectorXd kernel_values; // Rayleigh quotients of the invariants
};

GapResult spectral_gap_dense(const LinearizedOperator& op);
/// Deflated Lanczos with full reorthogonalization. Stops when the residual of the lowest
/// Ritz pair is below rel_tol times its value. Throws NoConvergence.
GapResult spectral_gap_lanczos(const LinearizedOperator& op, int max_iter = 3000,
                               double rel_tol = 1e-4, std::uint64_t seed = 20240611);
/// Dense for n <= 14, Lanczos otherwise.
GapResult numeric_spectral_gap(const LinearizedOperator& op);

struct TwoGridGap {
    double coarse = 0.0;
    double fine = 0.0;
    double gap = 0.0;         // fine-grid value
    double uncertainty = 0.0; // |fine - coarse|
    int n_coarse = 0;
    int n_fine = 0;
    double v_max = 0.0;
};

TwoGridGap two_grid_gap(const FermiDiracParams& params, double gamma, int n_coarse, int n_fine,
                        double v_max);

struct GapConstants {
    double C_P = 0.0;
    double nu = 0.0;
    double C_ab = 0.0;
    double lambda2 = 0.0;
    double lambda2_bound = 0.0; // explicit lower bound for lambda2; 3^6 rho / (32 (3 + 4 sqrt 2)^5) at eps = 0
    double kappa_eps = 0.0;
    double C_gamma_eps = 0.0;
    double lambda_gamma = 0.0;
    double zeta_eps = 0.0;
    double k_dagger = 0.0;
    /// names of violated thresholds: "eps_dagger", "eps_a_below_one"
    std::vector<std::string> out_of_range;
};

GapConstants gap_constants(const FermiDiracParams& params, double gamma);
/// Same, but throws EpsilonOutOfRange naming the first violated threshold.
GapConstants gap_constants_strict(const FermiDiracParams& params, double gamma);

/// (2b/3) int |w|^2 m (1 - 2 eps M_eps) dw
double zeta_eps(const FermiDiracParams& params);

struct ConfinementProfile {
    ScalarField phi;
    double outer_shell_sup = 0.0; // sup of |v|^{-g} Phi_k over 0.75 v_max <= |v| <= v_max
    double limsup_bound = 0.0;    // -(k zeta - rho (g + 3))
    double last_term_at_origin = 0.0;
};

ConfinementProfile confinement_profile(double k, const FermiDiracParams& params, double gamma,
                                       const VelocityGrid& grid);

struct PoincareReport {
    double min_ratio = 0.0; // min int |grad h|^2 m / int h^2 m
    double C_P = 0.0;
    int functions = 0;
    bool holds = false;
};

/// Random cubic polynomials made m-mean-zero.
PoincareReport poincare_check(const LinearizedOperator& op, int functions = 20,
                              std::uint64_t seed = 20240611);

} // namespace lfd
