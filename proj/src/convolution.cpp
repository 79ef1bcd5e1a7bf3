#include "lfd/convolution.hpp"
#include "lfd/errors.hpp"
#include "lfd/kernels.hpp"

#include <fftw3.h>

#include <cmath>
#include <sstream>

namespace lfd {

namespace {

constexpr int kComponentsA = 6;
constexpr int kFirstB = 6;
constexpr int kC = 9;
constexpr int kPower = 10;

// (row, col) of the six stored tensor components
constexpr int kTensorRow[6] = {0, 1, 2, 0, 0, 1};
constexpr int kTensorCol[6] = {0, 1, 2, 1, 2, 2};

} // namespace

class FftPlan {
public:
    explicit FftPlan(int m) : m_(m), complex_size_(Eigen::Index(m) * m * (m / 2 + 1))
    {
        real_ = fftw_alloc_real(size_t(m) * m * m);
        spec_ = fftw_alloc_complex(size_t(complex_size_));
        // FFTW_ESTIMATE keeps the plan, and so the bits of every result, reproducible.
        fwd_ = fftw_plan_dft_r2c_3d(m, m, m, real_, spec_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_3d(m, m, m, spec_, real_, FFTW_ESTIMATE);
    }
    ~FftPlan()
    {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(spec_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    int m() const { return m_; }
    Eigen::Index complex_size() const { return complex_size_; }
    double* real() { return real_; }
    std::complex<double>* spec() { return reinterpret_cast<std::complex<double>*>(spec_); }
    void forward() { fftw_execute(fwd_); }
    void backward() { fftw_execute(bwd_); }

private:
    int m_;
    Eigen::Index complex_size_;
    double* real_;
    fftw_complex* spec_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

std::optional<AliasingRisk> check_aliasing(const VelocityGrid& grid, const ScalarField& g)
{
    const double frac = boundary_mass_fraction(grid, g);
    if (frac > 1e-6) {
        std::ostringstream os;
        os << "mass fraction " << frac << " within 2h of the boundary";
        return AliasingRisk{frac, os.str()};
    }
    return std::nullopt;
}

Convolver::Convolver(GridPtr grid, double gamma, ConvolutionPath path)
    : grid_(std::move(grid)), gamma_(gamma), path_(path)
{
    if (!grid_)
        throw Error(ErrorKind::InvalidArgument, "null grid");
    if (!(gamma >= 0.0) || gamma > 3.0)
        throw Error(ErrorKind::InvalidArgument, "gamma outside [0, 3]");
    if (path_ == ConvolutionPath::Fast)
        fft_ = std::make_unique<FftPlan>(2 * grid_->n());
}

Convolver::~Convolver() = default;

double Convolver::kernel_component(int component, double p, const Eigen::Vector3d& z) const
{
    if (component == kPower)
        return radial_power(z.norm(), p);
    const KernelValues<double> k = kernel_eval<double>(z, gamma_);
    if (component < kComponentsA)
        return k.a(kTensorRow[component], kTensorCol[component]);
    if (component < kC)
        return k.b[component - kFirstB];
    return k.c;
}

const Eigen::ArrayXd& Convolver::table(int component, double p) const
{
    const auto key = std::make_pair(component, component == kPower ? p : 0.0);
    auto it = tables_.find(key);
    if (it != tables_.end())
        return it->second;
    const int n = grid_->n();
    const int w = 2 * n - 1;
    const double h = grid_->h();
    Eigen::ArrayXd t(Eigen::Index(w) * w * w);
    for (int dx = 0; dx < w; ++dx)
        for (int dy = 0; dy < w; ++dy)
            for (int dz = 0; dz < w; ++dz) {
                const Eigen::Vector3d z((dx - (n - 1)) * h, (dy - (n - 1)) * h, (dz - (n - 1)) * h);
                t[(Eigen::Index(dx) * w + dy) * w + dz] = kernel_component(component, p, z);
            }
    return tables_.emplace(key, std::move(t)).first->second;
}

const Convolver::Spectrum& Convolver::spectrum(int component, double p) const
{
    const auto key = std::make_pair(component, component == kPower ? p : 0.0);
    auto it = spectra_.find(key);
    if (it != spectra_.end())
        return it->second;
    const int n = grid_->n();
    const int m = fft_->m();
    const double h = grid_->h();
    double* r = fft_->real();
    std::fill(r, r + size_t(m) * m * m, 0.0);
    auto wrap = [m](int d) { return d < 0 ? d + m : d; };
    for (int dx = -(n - 1); dx <= n - 1; ++dx)
        for (int dy = -(n - 1); dy <= n - 1; ++dy)
            for (int dz = -(n - 1); dz <= n - 1; ++dz) {
                const Eigen::Vector3d z(dx * h, dy * h, dz * h);
                r[(size_t(wrap(dx)) * m + wrap(dy)) * m + wrap(dz)] = kernel_component(component, p, z);
            }
    fft_->forward();
    Spectrum s = Eigen::Map<const Spectrum>(fft_->spec(), fft_->complex_size());
    return spectra_.emplace(key, std::move(s)).first->second;
}

Convolver::Spectrum Convolver::forward(const ScalarField& g) const
{
    const int n = grid_->n();
    const int m = fft_->m();
    double* r = fft_->real();
    std::fill(r, r + size_t(m) * m * m, 0.0);
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz)
                r[(size_t(ix) * m + iy) * m + iz] = g[grid_->index(ix, iy, iz)];
    fft_->forward();
    return Eigen::Map<const Spectrum>(fft_->spec(), fft_->complex_size());
}

ScalarField Convolver::inverse(const Spectrum& s) const
{
    const int n = grid_->n();
    const int m = fft_->m();
    Eigen::Map<Spectrum>(fft_->spec(), fft_->complex_size()) = s;
    fft_->backward();
    const double scale = grid_->cell_volume() / (double(m) * m * m);
    const double* r = fft_->real();
    ScalarField out(grid_->size());
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz)
                out[grid_->index(ix, iy, iz)] = scale * r[(size_t(ix) * m + iy) * m + iz];
    return out;
}

ScalarField Convolver::direct(int component, double p, const ScalarField& g) const
{
    const Eigen::ArrayXd& t = table(component, p);
    const int n = grid_->n();
    const int w = 2 * n - 1;
    const Eigen::Index N = grid_->size();
    ScalarField out = ScalarField::Zero(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const auto [ix, iy, iz] = grid_->multi_index(i);
        double s = 0.0;
        for (Eigen::Index j = 0; j < N; ++j) {
            if (g[j] == 0.0)
                continue;
            const auto [jx, jy, jz] = grid_->multi_index(j);
            const Eigen::Index o =
                (Eigen::Index(ix - jx + n - 1) * w + (iy - jy + n - 1)) * w + (iz - jz + n - 1);
            s += t[o] * g[j];
        }
        out[i] = s * grid_->cell_volume();
    }
    return out;
}

TensorField Convolver::a(const ScalarField& g) const
{
    TensorField out(grid_->size(), 6);
    if (path_ == ConvolutionPath::Direct) {
        for (int c = 0; c < 6; ++c)
            out.col(c) = direct(c, 0.0, g);
        return out;
    }
    const Spectrum gs = forward(g);
    for (int c = 0; c < 6; ++c)
        out.col(c) = inverse(gs * spectrum(c, 0.0));
    return out;
}

VectorField Convolver::a_contract(const VectorField& u) const
{
    // component index of a_ik in the stored layout
    static constexpr int comp[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
    VectorField out(grid_->size(), 3);
    if (path_ == ConvolutionPath::Direct) {
        out.setZero();
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k)
                out.col(i) += direct(comp[i][k], 0.0, u.col(k));
        return out;
    }
    const Spectrum us[3] = {forward(u.col(0)), forward(u.col(1)), forward(u.col(2))};
    for (int i = 0; i < 3; ++i) {
        Spectrum acc = us[0] * spectrum(comp[i][0], 0.0);
        acc += us[1] * spectrum(comp[i][1], 0.0);
        acc += us[2] * spectrum(comp[i][2], 0.0);
        out.col(i) = inverse(acc);
    }
    return out;
}

VectorField Convolver::b(const ScalarField& g) const
{
    VectorField out(grid_->size(), 3);
    if (path_ == ConvolutionPath::Direct) {
        for (int c = 0; c < 3; ++c)
            out.col(c) = direct(kFirstB + c, 0.0, g);
        return out;
    }
    const Spectrum gs = forward(g);
    for (int c = 0; c < 3; ++c)
        out.col(c) = inverse(gs * spectrum(kFirstB + c, 0.0));
    return out;
}

ScalarField Convolver::c(const ScalarField& g) const
{
    if (path_ == ConvolutionPath::Direct)
        return direct(kC, 0.0, g);
    return inverse(forward(g) * spectrum(kC, 0.0));
}

ScalarField Convolver::power(const ScalarField& g, double p) const
{
    if (path_ == ConvolutionPath::Direct)
        return direct(kPower, p, g);
    return inverse(forward(g) * spectrum(kPower, p));
}

Eigen::ArrayXXd convolve(const Convolver& conv, const KernelSpec& kernel, const ScalarField& g)
{
    if (kernel.kind != KernelKind::Power && kernel.gamma != conv.gamma())
        throw Error(ErrorKind::InvalidArgument, "kernel gamma differs from convolver gamma");
    switch (kernel.kind) {
    case KernelKind::A: return conv.a(g);
    case KernelKind::B: return conv.b(g);
    case KernelKind::C: return conv.c(g);
    case KernelKind::Power: return conv.power(g, kernel.p);
    }
    return {};
}

} // namespace lfd
