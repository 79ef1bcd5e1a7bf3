#include "lfd/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

namespace lfd::quad {

double integrate(const Fn1& f, double a, double b, double rel_tol)
{
    if (b <= a)
        return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 61>::integrate(f, a, b, 25, rel_tol);
}

double radial(const Fn1& f, double rmax, double rel_tol)
{
    auto g = [&](double r) { return r * r * f(r); };
    // a few fixed cuts keep the adaptive splitting away from an almost-empty tail
    const double cuts[] = {0.0, 0.25 * rmax, 0.5 * rmax, rmax};
    double s = 0.0;
    for (int k = 0; k < 3; ++k)
        s += integrate(g, cuts[k], cuts[k + 1], rel_tol);
    return 4.0 * std::numbers::pi * s;
}

double radial_convolution(const std::function<double(double, double, double)>& kernel,
                          const Fn1& profile, double s, double rmax, double rel_tol)
{
    auto outer = [&](double r) {
        if (r == 0.0)
            return 0.0;
        auto inner = [&](double c) { return kernel(s, r, c); };
        return r * r * profile(r) * integrate(inner, -1.0, 1.0, rel_tol);
    };
    double total = 0.0;
    if (s > 0.0 && s < rmax) {
        total += integrate(outer, 0.0, s, rel_tol);
        total += integrate(outer, s, rmax, rel_tol);
    } else {
        total += integrate(outer, 0.0, rmax, rel_tol);
    }
    return 2.0 * std::numbers::pi * total;
}

} // namespace lfd::quad
