#pragma once

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <vector>

namespace lfd {

using ScalarField = Eigen::ArrayXd;
/// Columns are the x, y, z components.
using VectorField = Eigen::Array<double, Eigen::Dynamic, 3>;
/// Columns are xx, yy, zz, xy, xz, yz.
using TensorField = Eigen::Array<double, Eigen::Dynamic, 6>;

/// Uniform cell-centered cubic lattice on [-v_max, v_max)^3.
/// Linear index is (ix * n + iy) * n + iz, so iz runs fastest.
class VelocityGrid {
public:
    VelocityGrid(int n_per_axis, double v_max);

    int n() const { return n_; }
    double v_max() const { return v_max_; }
    double h() const { return h_; }
    double cell_volume() const { return h_ * h_ * h_; }
    Eigen::Index size() const { return Eigen::Index(n_) * n_ * n_; }

    double coord(int k) const { return -v_max_ + (k + 0.5) * h_; }
    Eigen::Index index(int ix, int iy, int iz) const
    {
        return (Eigen::Index(ix) * n_ + iy) * n_ + iz;
    }
    std::array<int, 3> multi_index(Eigen::Index i) const;
    Eigen::Vector3d node(Eigen::Index i) const;

    const ScalarField& v(int axis) const { return v_[axis]; }
    const ScalarField& speed_sq() const { return speed_sq_; }

private:
    int n_;
    double v_max_;
    double h_;
    std::array<ScalarField, 3> v_;
    ScalarField speed_sq_;
};

using GridPtr = std::shared_ptr<const VelocityGrid>;

GridPtr build_grid(int n_per_axis, double v_max);

struct DistributionField {
    GridPtr grid;
    ScalarField f;
    double eps = 0.0;
};

/// Throws PauliViolation or InvalidArgument when f leaves [0, 1/eps] beyond tol.
void check_admissible(const DistributionField& field, double tol = 1e-12);

double integrate(const VelocityGrid& grid, const ScalarField& f);
double integrate(const VelocityGrid& grid, const ScalarField& f, const ScalarField& weight);

template <typename Weight>
double integrate_fn(const VelocityGrid& grid, const ScalarField& f, Weight&& weight)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        s += weight(grid.node(i)) * f[i];
    return s * grid.cell_volume();
}

/// <v>^s on every node.
ScalarField japanese_bracket_pow(const VelocityGrid& grid, double s);

/// Central differences inside, second-order one-sided on the first and last node.
VectorField gradient(const VelocityGrid& grid, const ScalarField& f);
/// Exact adjoint of -gradient under the midpoint inner product.
ScalarField divergence(const VelocityGrid& grid, const VectorField& flux);

enum class Side { Forward, Backward };

/// Forward or backward differences, closed at the open end by quadratic extrapolation,
/// so that every quadratic polynomial is differentiated with a uniform half-cell shift.
VectorField one_sided_gradient(const VelocityGrid& grid, const ScalarField& f, Side side);
/// Exact adjoint of -one_sided_gradient(side).
ScalarField one_sided_divergence(const VelocityGrid& grid, const VectorField& flux, Side side);

/// Fraction of |f| mass held by nodes within two cells of the box boundary.
double boundary_mass_fraction(const VelocityGrid& grid, const ScalarField& f);

/// Maximum over a set of 90 degree rotations of max|f - f o R| / max|f|.
double rotational_asymmetry(const VelocityGrid& grid, const ScalarField& f);

} // namespace lfd
