#pragma once

#include "lfd/grid.hpp"

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace lfd {

enum class ConvolutionPath { Fast, Direct };

enum class KernelKind { A, B, C, Power };

/// One kernel of the family: A (tensor), B (vector), C (scalar) at exponent gamma,
/// or Power: |z|^p.
struct KernelSpec {
    KernelKind kind = KernelKind::C;
    double gamma = 1.0;
    double p = 0.0;
};

struct AliasingRisk {
    double boundary_fraction = 0.0;
    std::string message;
};

/// Returns a warning when more than 1e-6 of the mass sits within 2h of the boundary.
std::optional<AliasingRisk> check_aliasing(const VelocityGrid& grid, const ScalarField& g);

class FftPlan;

/// Discrete whole-space convolutions h^3 sum_j k(v_i - v_j) g_j on a fixed grid.
/// The fast path zero-pads to 2n per axis; the direct path sums over an offset table.
class Convolver {
public:
    Convolver(GridPtr grid, double gamma, ConvolutionPath path = ConvolutionPath::Fast);
    ~Convolver();
    Convolver(const Convolver&) = delete;
    Convolver& operator=(const Convolver&) = delete;

    const VelocityGrid& grid() const { return *grid_; }
    double gamma() const { return gamma_; }
    ConvolutionPath path() const { return path_; }

    /// a * g, six symmetric components.
    TensorField a(const ScalarField& g) const;
    /// sum_k a_ik * u_k.
    VectorField a_contract(const VectorField& u) const;
    VectorField b(const ScalarField& g) const;
    ScalarField c(const ScalarField& g) const;
    /// |z|^p * g.
    ScalarField power(const ScalarField& g, double p) const;

private:
    using Spectrum = Eigen::ArrayXcd;

    const Spectrum& spectrum(int component, double p) const;
    const Eigen::ArrayXd& table(int component, double p) const;
    Spectrum forward(const ScalarField& g) const;
    ScalarField inverse(const Spectrum& s) const;
    ScalarField direct(int component, double p, const ScalarField& g) const;
    double kernel_component(int component, double p, const Eigen::Vector3d& z) const;

    GridPtr grid_;
    double gamma_;
    ConvolutionPath path_;
    std::unique_ptr<FftPlan> fft_;
    // component ids: 0..5 a, 6..8 b, 9 c, 10 power(p)
    mutable std::map<std::pair<int, double>, Spectrum> spectra_;
    mutable std::map<std::pair<int, double>, Eigen::ArrayXd> tables_;
};

/// Convenience dispatch on a KernelSpec; returns the components as columns.
Eigen::ArrayXXd convolve(const Convolver& conv, const KernelSpec& kernel, const ScalarField& g);

} // namespace lfd
