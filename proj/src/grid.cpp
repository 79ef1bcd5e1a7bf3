#include "lfd/grid.hpp"
#include "lfd/errors.hpp"

#include <cmath>
#include <string>

namespace lfd {

namespace {

struct Entry {
    int row;
    int col;
    double value;
};

using Stencil = std::vector<Entry>;

Stencil central_stencil(int n, double h)
{
    Stencil s;
    const double c = 0.5 / h;
    s.push_back({0, 0, -3 * c});
    s.push_back({0, 1, 4 * c});
    s.push_back({0, 2, -c});
    for (int i = 1; i < n - 1; ++i) {
        s.push_back({i, i - 1, -c});
        s.push_back({i, i + 1, c});
    }
    s.push_back({n - 1, n - 3, c});
    s.push_back({n - 1, n - 2, -4 * c});
    s.push_back({n - 1, n - 1, 3 * c});
    return s;
}

Stencil one_sided_stencil(int n, double h, Side side)
{
    Stencil s;
    const double c = 1.0 / h;
    if (side == Side::Forward) {
        for (int i = 0; i < n - 1; ++i) {
            s.push_back({i, i, -c});
            s.push_back({i, i + 1, c});
        }
        // ghost value 3f[n-1] - 3f[n-2] + f[n-3]
        s.push_back({n - 1, n - 3, c});
        s.push_back({n - 1, n - 2, -3 * c});
        s.push_back({n - 1, n - 1, 2 * c});
    } else {
        s.push_back({0, 0, -2 * c});
        s.push_back({0, 1, 3 * c});
        s.push_back({0, 2, -c});
        for (int i = 1; i < n; ++i) {
            s.push_back({i, i - 1, -c});
            s.push_back({i, i, c});
        }
    }
    return s;
}

// out += scale * D_axis in (or its transpose)
template <typename In, typename Out>
void apply_along_axis(const VelocityGrid& g, const Stencil& st, int axis, bool transpose,
                      double scale, const In& in, Out&& out)
{
    const int n = g.n();
    const Eigen::Index stride = axis == 0 ? Eigen::Index(n) * n : (axis == 1 ? n : 1);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            Eigen::Index base;
            if (axis == 0)
                base = g.index(0, a, b);
            else if (axis == 1)
                base = g.index(a, 0, b);
            else
                base = g.index(a, b, 0);
            for (const Entry& e : st) {
                const int r = transpose ? e.col : e.row;
                const int c = transpose ? e.row : e.col;
                out[base + r * stride] += scale * e.value * in[base + c * stride];
            }
        }
    }
}

} // namespace

VelocityGrid::VelocityGrid(int n_per_axis, double v_max)
    : n_(n_per_axis), v_max_(v_max), h_(0.0)
{
    if (n_per_axis < 8 || n_per_axis % 2 != 0)
        throw Error(ErrorKind::InvalidGrid,
                    "n_per_axis must be even and >= 8, got " + std::to_string(n_per_axis));
    if (!(v_max > 0.0) || !std::isfinite(v_max))
        throw Error(ErrorKind::InvalidGrid, "v_max must be positive");
    h_ = 2.0 * v_max / n_per_axis;
    const Eigen::Index N = size();
    for (auto& c : v_)
        c.resize(N);
    for (int ix = 0; ix < n_; ++ix)
        for (int iy = 0; iy < n_; ++iy)
            for (int iz = 0; iz < n_; ++iz) {
                const Eigen::Index i = index(ix, iy, iz);
                v_[0][i] = coord(ix);
                v_[1][i] = coord(iy);
                v_[2][i] = coord(iz);
            }
    speed_sq_ = v_[0].square() + v_[1].square() + v_[2].square();
}

std::array<int, 3> VelocityGrid::multi_index(Eigen::Index i) const
{
    const int iz = int(i % n_);
    const int iy = int((i / n_) % n_);
    const int ix = int(i / (Eigen::Index(n_) * n_));
    return {ix, iy, iz};
}

Eigen::Vector3d VelocityGrid::node(Eigen::Index i) const
{
    return {v_[0][i], v_[1][i], v_[2][i]};
}

GridPtr build_grid(int n_per_axis, double v_max)
{
    return std::make_shared<const VelocityGrid>(n_per_axis, v_max);
}

void check_admissible(const DistributionField& field, double tol)
{
    if (!field.grid || field.f.size() != field.grid->size())
        throw Error(ErrorKind::InvalidArgument, "field does not match its grid");
    if (!field.f.allFinite())
        throw Error(ErrorKind::BlowUp, "non-finite value in field");
    if (field.f.minCoeff() < -tol)
        throw Error(ErrorKind::InvalidArgument, "negative density value");
    if (field.eps > 0.0 && field.f.maxCoeff() > 1.0 / field.eps + tol)
        throw Error(ErrorKind::PauliViolation, "value above 1/eps");
}

double integrate(const VelocityGrid& grid, const ScalarField& f)
{
    return f.sum() * grid.cell_volume();
}

double integrate(const VelocityGrid& grid, const ScalarField& f, const ScalarField& weight)
{
    return (f * weight).sum() * grid.cell_volume();
}

ScalarField japanese_bracket_pow(const VelocityGrid& grid, double s)
{
    return (1.0 + grid.speed_sq()).pow(0.5 * s);
}

VectorField gradient(const VelocityGrid& grid, const ScalarField& f)
{
    const Stencil st = central_stencil(grid.n(), grid.h());
    VectorField out = VectorField::Zero(grid.size(), 3);
    for (int a = 0; a < 3; ++a)
        apply_along_axis(grid, st, a, false, 1.0, f, out.col(a));
    return out;
}

ScalarField divergence(const VelocityGrid& grid, const VectorField& flux)
{
    const Stencil st = central_stencil(grid.n(), grid.h());
    ScalarField out = ScalarField::Zero(grid.size());
    for (int a = 0; a < 3; ++a)
        apply_along_axis(grid, st, a, true, -1.0, flux.col(a), out);
    return out;
}

VectorField one_sided_gradient(const VelocityGrid& grid, const ScalarField& f, Side side)
{
    const Stencil st = one_sided_stencil(grid.n(), grid.h(), side);
    VectorField out = VectorField::Zero(grid.size(), 3);
    for (int a = 0; a < 3; ++a)
        apply_along_axis(grid, st, a, false, 1.0, f, out.col(a));
    return out;
}

ScalarField one_sided_divergence(const VelocityGrid& grid, const VectorField& flux, Side side)
{
    const Stencil st = one_sided_stencil(grid.n(), grid.h(), side);
    ScalarField out = ScalarField::Zero(grid.size());
    for (int a = 0; a < 3; ++a)
        apply_along_axis(grid, st, a, true, -1.0, flux.col(a), out);
    return out;
}

double boundary_mass_fraction(const VelocityGrid& grid, const ScalarField& f)
{
    const int n = grid.n();
    double edge = 0.0;
    double total = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const auto m = grid.multi_index(i);
        const double w = std::abs(f[i]);
        total += w;
        for (int k : m)
            if (k < 2 || k >= n - 2) {
                edge += w;
                break;
            }
    }
    return total > 0.0 ? edge / total : 0.0;
}

double rotational_asymmetry(const VelocityGrid& grid, const ScalarField& f)
{
    const int n = grid.n();
    const double scale = f.abs().maxCoeff();
    if (scale == 0.0)
        return 0.0;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const auto [x, y, z] = grid.multi_index(i);
        const Eigen::Index images[3] = {grid.index(y, n - 1 - x, z), grid.index(x, z, n - 1 - y),
                                        grid.index(n - 1 - z, y, x)};
        for (Eigen::Index j : images)
            worst = std::max(worst, std::abs(f[i] - f[j]));
    }
    return worst / scale;
}

} // namespace lfd
