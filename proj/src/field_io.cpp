#include "lfd/field_io.hpp"
#include "lfd/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>

namespace lfd {

namespace {

static_assert(std::endian::native == std::endian::little, "container is written little endian");

constexpr char kMagic[4] = {'L', 'F', 'D', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& out, const T& x)
{
    out.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <class T>
T get(std::ifstream& in, const std::string& path)
{
    T x{};
    if (!in.read(reinterpret_cast<char*>(&x), sizeof(T)))
        throw Error(ErrorKind::IoError, "truncated header in " + path);
    return x;
}

} // namespace

void write_field(const std::string& path, const VelocityGrid& grid, const ScalarField& f, double eps)
{
    if (f.size() != grid.size())
        throw Error(ErrorKind::InvalidArgument, "field does not match its grid");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::IoError, "cannot open " + path);
    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, std::int32_t(grid.n()));
    put(out, grid.v_max());
    put(out, eps);
    put(out, std::uint64_t(f.size()));
    out.write(reinterpret_cast<const char*>(f.data()), std::streamsize(f.size() * sizeof(double)));
    if (!out)
        throw Error(ErrorKind::IoError, "write failed for " + path);
}

StoredField read_field(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::IoError, "cannot open " + path);
    char magic[4];
    if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic))
        throw Error(ErrorKind::IoError, path + " is not a field container");
    if (get<std::uint32_t>(in, path) != kVersion)
        throw Error(ErrorKind::IoError, "unknown container version in " + path);
    const auto n = get<std::int32_t>(in, path);
    const auto v_max = get<double>(in, path);
    StoredField s;
    s.eps = get<double>(in, path);
    const auto count = get<std::uint64_t>(in, path);
    s.grid = build_grid(n, v_max);
    if (count != std::uint64_t(s.grid->size()))
        throw Error(ErrorKind::IoError, "value count does not match the grid in " + path);
    s.f.resize(Eigen::Index(count));
    if (!in.read(reinterpret_cast<char*>(s.f.data()), std::streamsize(count * sizeof(double))))
        throw Error(ErrorKind::IoError, "truncated payload in " + path);
    return s;
}

void write_field_csv(const std::string& path, const VelocityGrid& grid, const ScalarField& f)
{
    std::FILE* out = std::fopen(path.c_str(), "w");
    if (!out)
        throw Error(ErrorKind::IoError, "cannot open " + path);
    std::fprintf(out, "ix,iy,iz,vx,vy,vz,f\n");
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const auto m = grid.multi_index(i);
        std::fprintf(out, "%d,%d,%d,%.17g,%.17g,%.17g,%.17g\n", m[0], m[1], m[2], grid.v(0)[i],
                     grid.v(1)[i], grid.v(2)[i], f[i]);
    }
    std::fclose(out);
}

} // namespace lfd
