#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace lfd {

template <typename Scalar>
struct KernelValues {
    Eigen::Matrix<Scalar, 3, 3> a;
    Eigen::Matrix<Scalar, 3, 1> b;
    Scalar c;
};

/// a(z) = |z|^{g+2} (I - z z^T/|z|^2), b(z) = -2 z |z|^g, c(z) = -2 (g+3) |z|^g.
/// At z = 0 everything vanishes except c for g = 0, where |0|^0 = 1.
template <typename Scalar>
KernelValues<Scalar> kernel_eval(const Eigen::Matrix<Scalar, 3, 1>& z, Scalar gamma)
{
    using std::pow;
    using std::sqrt;
    KernelValues<Scalar> k;
    const Scalar r2 = z.squaredNorm();
    if (r2 == Scalar(0)) {
        k.a.setZero();
        k.b.setZero();
        k.c = gamma == Scalar(0) ? Scalar(-6) : Scalar(0);
        return k;
    }
    const Scalar r = sqrt(r2);
    const Scalar rg = pow(r, gamma);
    k.a = rg * (r2 * Eigen::Matrix<Scalar, 3, 3>::Identity() - z * z.transpose());
    k.b = Scalar(-2) * rg * z;
    k.c = Scalar(-2) * (gamma + Scalar(3)) * rg;
    return k;
}

/// |z|^p with |0|^0 = 1.
template <typename Scalar>
Scalar radial_power(Scalar r, Scalar p)
{
    if (r == Scalar(0))
        return p == Scalar(0) ? Scalar(1) : Scalar(0);
    using std::pow;
    return pow(r, p);
}

} // namespace lfd
