#pragma once

#include "lfd/grid.hpp"

#include <string>

namespace lfd {

/// Flat binary container, little endian:
///   "LFDF" | u32 version | i32 n | f64 v_max | f64 eps | u64 count | count x f64 values
void write_field(const std::string& path, const VelocityGrid& grid, const ScalarField& f, double eps);

struct StoredField {
    GridPtr grid;
    ScalarField f;
    double eps = 0.0;
};

/// Throws IoError on a missing file, bad magic, unknown version or truncated payload.
StoredField read_field(const std::string& path);

/// CSV with columns ix, iy, iz, vx, vy, vz, f.
void write_field_csv(const std::string& path, const VelocityGrid& grid, const ScalarField& f);

} // namespace lfd
