#pragma once

#include "lfd/convolution.hpp"
#include "lfd/grid.hpp"

#include <vector>

namespace lfd {

struct MomentReport {
    double m0 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0; // int f <v>^s
    double M0 = 0.0, Mg2 = 0.0;                     // int f^2 <v>^s, s in {0, gamma + 2}
    double Dg2 = 0.0;                               // int |grad(f <v>^{(gamma+2)/2})|^2
};

double moment_m(const VelocityGrid& grid, const ScalarField& f, double s);
double moment_M(const VelocityGrid& grid, const ScalarField& f, double s);
double dissipation_D(const VelocityGrid& grid, const ScalarField& f, double s);
MomentReport moments(const VelocityGrid& grid, const ScalarField& f, double gamma);

/// Fermi-Dirac entropy; for eps = 0 the Boltzmann entropy -int f log f.
double fd_entropy(const VelocityGrid& grid, const ScalarField& f, double eps);
/// H(f) = int f log f
double boltzmann_H(const VelocityGrid& grid, const ScalarField& f);
/// S_eps(f) - S_eps(g) summed node by node, so nearby fields do not lose it to cancellation.
double fd_entropy_change(const VelocityGrid& grid, const ScalarField& f, const ScalarField& g,
                         double eps);
/// Bregman form of S_eps(M) - S_eps(f): int M q(f/M - 1) + (1 - eps M)/eps q(eps (M - f)/(1 - eps M))
/// with q(x) = (1 + x) log(1 + x) - x. Equal to the entropy difference when f and the equilibrium
/// M share mass, momentum and energy; nonnegative node by node.
double fd_relative_entropy(const VelocityGrid& grid, const ScalarField& f, const ScalarField& M,
                           double eps);

enum class ProductionPath { Fast, PairSum };

/// Entropy production, averaged over the forward and backward difference pairs,
/// with g = grad log(f / (1 - eps f)) under the division floor.
double entropy_production(const Convolver& conv, const ScalarField& f, double eps,
                          ProductionPath path = ProductionPath::Fast);
double landau_production(const Convolver& conv, const ScalarField& f,
                         ProductionPath path = ProductionPath::Fast);

struct ProductionComparison {
    double kappa0 = 0.0;
    double D0 = 0.0;
    double Deps = 0.0;
    double cross = 0.0; // int int f f_* |v - v_*|^{g+2} |grad f|^2
    double lhs = 0.0;   // kappa0^2 D0
    double rhs = 0.0;   // 2 Deps + 4 eps^2 cross / kappa0
    bool holds = false;
};

ProductionComparison production_comparison(const Convolver& conv, const ScalarField& f, double eps);

struct RelativeEntropies {
    double H_eps_rel = 0.0; // S_eps(M) - S_eps(f)
    double H_0_rel = 0.0;   // H(f) - H(M)
    double bound = 0.0;     // eps max(|f|_2^2, |M|_2^2)
    bool closeness_holds = false;
};

/// Throws MassMismatch when the masses differ by more than 1e-8 relative.
RelativeEntropies relative_entropies(const VelocityGrid& grid, const ScalarField& f,
                                     const ScalarField& equilibrium, double eps);

double l1_distance(const VelocityGrid& grid, const ScalarField& f, const ScalarField& g);
/// int |f - g| <v>^2
double l12_distance(const VelocityGrid& grid, const ScalarField& f, const ScalarField& g);

struct DecayFit {
    double rate = 0.0;
    double r2 = 0.0;
    int points = 0;
};

/// Least squares slope of log(value) against t over the final `window` fraction of the time span.
DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& value,
                        double window);

struct EntropyBoundReport {
    double S = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
};

/// Right side 80 (|log eps| + log R) int_{|v|<=R} f (1 - eps f) + C/R + |log eps| E / R^2,
/// C = C1 + C0 E^{4/5} + 3E.
EntropyBoundReport entropy_upper_bound_check(const VelocityGrid& grid, const ScalarField& f,
                                             double eps, double R, double E0, double C0 = 0.0,
                                             double C1 = 0.0);

} // namespace lfd
