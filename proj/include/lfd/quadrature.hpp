#pragma once

#include <functional>

namespace lfd::quad {

using Fn1 = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (61 points) on [a, b].
double integrate(const Fn1& f, double a, double b, double rel_tol = 1e-13);

/// 4 pi int_0^rmax r^2 f(r) dr, split at the given break points.
double radial(const Fn1& f, double rmax, double rel_tol = 1e-13);

/// Integral over w in R^3 of K(|v|, r, cos) F(r), where r = |w|, cos = <v/|v|, w/|w|>
/// and F is radial, truncated at rmax:
///   2 pi int_0^rmax r^2 F(r) int_{-1}^{1} K(s, r, c) dc dr.
/// The outer range is split at r = s where the kernel is not smooth.
double radial_convolution(const std::function<double(double, double, double)>& kernel,
                          const Fn1& profile, double s, double rmax, double rel_tol = 1e-11);

} // namespace lfd::quad
