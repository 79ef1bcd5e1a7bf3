#pragma once

#include "lfd/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lfd::cli {

/// One inequality or identity: pass when slack >= 0. Unasserted checks are reported only.
struct Check {
    std::string name;
    std::string field; // corpus member, or "-" for field-independent checks
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = false;
    bool asserted = true;
    std::string note;
};

struct NamedField {
    std::string name;
    ScalarField f;
    bool radial = false;
};

/// maxwellian, bimaxwellian, anisotropic, near_saturated, equilibrium (all of mass 1) and the
/// saturated state, which only enters the degenerate-ellipticity report.
std::vector<NamedField> verify_corpus(const VelocityGrid& grid, double eps);

struct VerifyOptions {
    int n = 16;
    double v_max = 6.0;
    double eps = 0.05;
    double gamma = 1.0;
    std::uint64_t seed = 20240611;
};

std::vector<Check> verify_suite(const VerifyOptions& opt);

bool all_passed(const std::vector<Check>& checks);

} // namespace lfd::cli
