#include "lfd/linearized.hpp"
#include "lfd/collision.hpp"
#include "lfd/errors.hpp"
#include "lfd/quadrature.hpp"
#include "lfd/radial.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace lfd {

namespace {

Eigen::MatrixXd invariant_functions(const VelocityGrid& grid)
{
    Eigen::MatrixXd phi(grid.size(), 5);
    phi.col(0).setOnes();
    for (int k = 0; k < 3; ++k)
        phi.col(k + 1) = grid.v(k).matrix();
    phi.col(4) = grid.speed_sq().matrix();
    return phi;
}

// sqrt(h^3 m): maps h to the symmetric coordinates y
ScalarField sqrt_weight(const LinearizedOperator& op)
{
    return (op.grid().cell_volume() * op.weight()).sqrt();
}

Eigen::MatrixXd deflation_basis(const LinearizedOperator& op)
{
    const ScalarField w = sqrt_weight(op);
    return op.invariant_basis().array().colwise() * w;
}

// y -> -w L(y / w)
Eigen::VectorXd symmetric_apply(const LinearizedOperator& op, const ScalarField& w,
                                const Eigen::VectorXd& y)
{
    const ScalarField h = y.array() / w;
    return (-w * op.apply(h)).matrix();
}

// Lowest eigenpair of the symmetric tridiagonal matrix (diag, sub):
// Sturm bisection for the value, shifted inverse iteration for the vector.
std::pair<double, Eigen::VectorXd> lowest_tridiagonal(const std::vector<double>& diag,
                                                      const std::vector<double>& sub)
{
    const int k = int(diag.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i < k; ++i) {
        const double r = (i > 0 ? std::abs(sub[i - 1]) : 0.0) + (i + 1 < k ? std::abs(sub[i]) : 0.0);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    const double scale = std::max(std::abs(lo), std::abs(hi));
    auto below = [&](double x) {
        int count = 0;
        double d = 1.0;
        for (int i = 0; i < k; ++i) {
            d = diag[i] - x - (i > 0 ? sub[i - 1] * sub[i - 1] / d : 0.0);
            if (d == 0.0)
                d = -1e-300;
            if (d < 0.0)
                ++count;
        }
        return count;
    };
    for (int it = 0; it < 200 && hi - lo > 4e-16 * scale; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (below(mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    const double theta = 0.5 * (lo + hi);
    // T - s I is positive definite for s below the lowest eigenvalue
    const double s = lo - 1e-10 * scale;
    Eigen::VectorXd x = Eigen::VectorXd::Ones(k);
    Eigen::VectorXd c(k), d(k);
    for (int pass = 0; pass < 3; ++pass) {
        double piv = diag[0] - s;
        c[0] = k > 1 ? sub[0] / piv : 0.0;
        d[0] = x[0] / piv;
        for (int i = 1; i < k; ++i) {
            piv = diag[i] - s - sub[i - 1] * c[i - 1];
            c[i] = i + 1 < k ? sub[i] / piv : 0.0;
            d[i] = (x[i] - sub[i - 1] * d[i - 1]) / piv;
        }
        x[k - 1] = d[k - 1];
        for (int i = k - 2; i >= 0; --i)
            x[i] = d[i] - c[i] * x[i + 1];
        x.normalize();
    }
    return {theta, x};
}

void deflate(const Eigen::MatrixXd& Y, Eigen::VectorXd& y)
{
    for (int pass = 0; pass < 2; ++pass)
        y -= Y * (Y.transpose() * y);
}

Eigen::VectorXd kernel_quotients(const LinearizedOperator& op)
{
    const ScalarField w = sqrt_weight(op);
    const Eigen::MatrixXd Y = deflation_basis(op);
    Eigen::VectorXd out(5);
    for (int k = 0; k < 5; ++k) {
        const Eigen::VectorXd y = Y.col(k);
        out[k] = y.dot(symmetric_apply(op, w, y));
    }
    return out;
}

} // namespace

LinearizedOperator::LinearizedOperator(GridPtr grid, const FermiDiracParams& params, double gamma,
                                       ConvolutionPath path)
    : grid_(grid), params_(params), gamma_(gamma), conv_(grid, gamma, path)
{
    if (gamma < 0.0 || gamma > 1.0)
        throw Error(ErrorKind::InvalidArgument, "gamma must lie in [0, 1]");
    m_ = weight_m(params, *grid);
    if (!(m_.minCoeff() > 0.0))
        throw Error(ErrorKind::GramSingular, "weight vanishes on the grid");
    Sm_ = conv_.a(m_);

    const Eigen::MatrixXd phi = invariant_functions(*grid);
    const Eigen::MatrixXd wphi = phi.array().colwise() * (grid->cell_volume() * m_);
    const Eigen::MatrixXd G = phi.transpose() * wphi;
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    const Eigen::VectorXd d = G.diagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        (d.cwiseSqrt().cwiseInverse().asDiagonal() * G * d.cwiseSqrt().cwiseInverse().asDiagonal()).eval(),
        Eigen::EigenvaluesOnly);
    if (llt.info() != Eigen::Success || es.eigenvalues().minCoeff() < 1e-12)
        throw Error(ErrorKind::GramSingular, "Gram matrix of the invariants is singular");
    // phi L^{-T} is m-orthonormal
    basis_ = llt.matrixU().solve<Eigen::OnTheRight>(phi);
}

ScalarField LinearizedOperator::apply(const ScalarField& h) const
{
    const VelocityGrid& g = *grid_;
    ScalarField out = ScalarField::Zero(g.size());
    for (Side side : {Side::Forward, Side::Backward}) {
        const VectorField grad = one_sided_gradient(g, h, side);
        const VectorField u = grad.colwise() * m_;
        const VectorField w = conv_.a_contract(u);
        const VectorField phi = (tensor_times(Sm_, grad) - w).colwise() * m_;
        out += 0.5 * one_sided_divergence(g, phi, side);
    }
    return out / m_;
}

double LinearizedOperator::inner(const ScalarField& g, const ScalarField& h) const
{
    return grid_->cell_volume() * (m_ * g * h).sum();
}

double LinearizedOperator::norm(const ScalarField& h) const
{
    return std::sqrt(inner(h, h));
}

Eigen::MatrixXd LinearizedOperator::dense_matrix() const
{
    if (grid_->n() > 14)
        throw Error(ErrorKind::InvalidArgument, "dense path limited to n <= 14");
    const Eigen::Index N = grid_->size();
    const ScalarField w = sqrt_weight(*this);
    Eigen::MatrixXd A(N, N);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(N);
    for (Eigen::Index j = 0; j < N; ++j) {
        e[j] = 1.0;
        A.col(j) = symmetric_apply(*this, w, e);
        e[j] = 0.0;
    }
    return 0.5 * (A + A.transpose());
}

ScalarField apply_linearized(const LinearizedOperator& op, const ScalarField& h)
{
    return op.apply(h);
}

double dirichlet_form(const LinearizedOperator& op, const ScalarField& h)
{
    const VelocityGrid& grid = op.grid();
    const ScalarField& m = op.weight();
    const double gamma = op.gamma();
    double total = 0.0;
    for (Side side : {Side::Forward, Side::Backward}) {
        const VectorField g = one_sided_gradient(grid, h, side);
        double s = 0.0;
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
            const Eigen::Vector3d vi = grid.node(i);
            const Eigen::Vector3d gi = g.row(i).transpose().matrix();
            double row = 0.0;
            for (Eigen::Index j = i + 1; j < grid.size(); ++j) {
                const Eigen::Vector3d z = vi - grid.node(j);
                const Eigen::Vector3d d = gi - g.row(j).transpose().matrix();
                const double z2 = z.squaredNorm();
                const double zd = z.dot(d);
                row += m[j] * std::pow(z2, 0.5 * gamma) * (z2 * d.squaredNorm() - zd * zd);
            }
            s += m[i] * row;
        }
        total += 0.5 * s;
    }
    const double h3 = grid.cell_volume();
    return total * h3 * h3;
}

ScalarField spectral_projection(const ScalarField& h, const LinearizedOperator& op)
{
    const Eigen::MatrixXd& B = op.invariant_basis();
    const ScalarField wm = op.grid().cell_volume() * op.weight();
    Eigen::VectorXd out = h.matrix();
    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd c = B.transpose() * (wm * out.array()).matrix();
        out -= B * c;
    }
    return out.array();
}

GapResult spectral_gap_dense(const LinearizedOperator& op)
{
    const Eigen::MatrixXd A = op.dense_matrix();
    const Eigen::MatrixXd Y = deflation_basis(op);
    const Eigen::Index N = A.rows();
    const Eigen::Index k = Y.cols();
    // restrict to an orthonormal basis of the complement of the invariants; a shift that pushes
    // the kernel above the spectrum leaves QR iteration with badly separated clusters
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd Qc = Q.rightCols(N - k);
    Q.resize(0, 0);
    const Eigen::MatrixXd B = Qc.transpose() * (A * Qc);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (B + B.transpose()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw Error(ErrorKind::NoConvergence, "dense eigensolver failed");
    const Eigen::MatrixXd YAY = Y.transpose() * A * Y;
    GapResult r;
    r.gap = es.eigenvalues()[0];
    r.dense = true;
    r.iterations = 1;
    r.kernel_values = YAY.diagonal();
    return r;
}

GapResult spectral_gap_lanczos(const LinearizedOperator& op, int max_iter, double rel_tol,
                               std::uint64_t seed)
{
    const Eigen::Index N = op.grid().size();
    const ScalarField w = sqrt_weight(op);
    const Eigen::MatrixXd Y = deflation_basis(op);
    max_iter = int(std::min<Eigen::Index>(max_iter, N - 5));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd q(N);
    for (Eigen::Index i = 0; i < N; ++i)
        q[i] = normal(rng);
    deflate(Y, q);
    q.normalize();

    Eigen::MatrixXd Q(N, max_iter + 1);
    Q.col(0) = q;
    std::vector<double> alpha, beta;
    GapResult r;
    for (int j = 0; j < max_iter; ++j) {
        Eigen::VectorXd z = symmetric_apply(op, w, Q.col(j));
        deflate(Y, z);
        const double a = Q.col(j).dot(z);
        alpha.push_back(a);
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass) {
            z -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * z);
            deflate(Y, z);
        }
        const double b = z.norm();
        const int k = j + 1;
        const bool check = k % 10 == 0 || k == max_iter || b < 1e-12;
        if (check) {
            const auto [theta, x] = lowest_tridiagonal(alpha, beta);
            const double res = std::abs(b * x[k - 1]);
            r.gap = theta;
            r.iterations = k;
            r.residual = res;
            if (res <= rel_tol * std::abs(theta) || b < 1e-12) {
                r.kernel_values = kernel_quotients(op);
                return r;
            }
        }
        beta.push_back(b);
        Q.col(j + 1) = z / b;
    }
    throw Error(ErrorKind::NoConvergence,
                "Lanczos residual " + std::to_string(r.residual) + " after " + std::to_string(r.iterations)
                    + " iterations");
}

GapResult numeric_spectral_gap(const LinearizedOperator& op)
{
    if (op.grid().n() <= 14)
        return spectral_gap_dense(op);
    return spectral_gap_lanczos(op);
}

TwoGridGap two_grid_gap(const FermiDiracParams& params, double gamma, int n_coarse, int n_fine,
                        double v_max)
{
    TwoGridGap t;
    t.n_coarse = n_coarse;
    t.n_fine = n_fine;
    t.v_max = v_max;
    LinearizedOperator coarse(build_grid(n_coarse, v_max), params, gamma);
    t.coarse = numeric_spectral_gap(coarse).gap;
    LinearizedOperator fine(build_grid(n_fine, v_max), params, gamma);
    t.fine = numeric_spectral_gap(fine).gap;
    t.gap = t.fine;
    t.uncertainty = std::abs(t.fine - t.coarse);
    return t;
}

double zeta_eps(const FermiDiracParams& params)
{
    const RadialProfile prof = weight_gradient_profile(params);
    const double I = quad::radial([&](double r) { return r * r * prof.F(r); }, prof.rmax);
    return 2.0 * params.b / 3.0 * I;
}

GapConstants gap_constants(const FermiDiracParams& p, double gamma)
{
    if (gamma < 0.0 || gamma > 1.0)
        throw Error(ErrorKind::InvalidArgument, "gamma must lie in [0, 1]");
    GapConstants g;
    const double c = p.c_eps();
    g.C_P = 2.0 * p.b / std::pow(c, 4);
    g.C_ab = p.a / (2.0 * p.b) * std::pow(M_PI / p.b, 1.5);
    g.nu = p.rho * p.rho * p.E * p.E / (2.0 * g.C_ab * c);
    g.lambda2 = g.nu * (g.C_P / 3.0
                        - p.eps * p.eps / (p.rho * p.E) * std::pow(p.a, 3) * std::pow(M_PI / (3.0 * p.b), 1.5));
    {
        // explicit lower bound in terms of (eps, rho, E) alone, valid below eps_dagger
        const double r = 3.0 + 4.0 * std::sqrt(2.0);
        g.lambda2_bound = 9.0 * p.rho / (8.0 * r)
                          * (81.0 / (4.0 * std::pow(r, 4))
                             - p.eps * p.eps * std::pow(5.0, 7.5) * p.rho * p.rho
                                   / (std::pow(3.0, 10.5) * std::pow(M_PI * p.E, 3)));
    }
    g.kappa_eps = p.kappa_eps();
    g.C_gamma_eps = 0.125 * std::pow(gamma / (8.0 * M_E * p.b), 0.5 * gamma);
    g.lambda_gamma = g.kappa_eps * g.kappa_eps * g.C_gamma_eps * g.lambda2;
    g.zeta_eps = zeta_eps(p);
    g.k_dagger = g.zeta_eps > 0.0 ? std::max(p.rho * (gamma + 3.0) / g.zeta_eps, 2.0 * gamma + 7.0)
                                  : std::numeric_limits<double>::infinity();

    GasMoments mom;
    mom.rho = p.rho;
    mom.E = p.E;
    if (p.eps >= saturation_threshold(mom).eps_dagger)
        g.out_of_range.push_back("eps_dagger");
    if (p.eps * p.a >= 1.0)
        g.out_of_range.push_back("eps_a_below_one");
    return g;
}

GapConstants gap_constants_strict(const FermiDiracParams& params, double gamma)
{
    GapConstants g = gap_constants(params, gamma);
    if (!g.out_of_range.empty())
        throw Error(ErrorKind::EpsilonOutOfRange, "violated threshold " + g.out_of_range.front());
    return g;
}

ConfinementProfile confinement_profile(double k, const FermiDiracParams& params, double gamma,
                                       const VelocityGrid& grid)
{
    if (!(k >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "k must be nonnegative");
    const RadialProfile wm = weight_profile(params);
    const RadialProfile wmM = weight_times_equilibrium_profile(params);
    const double b = params.b;
    const double eps = params.eps;
    auto phi_at = [&](double s, double* last) {
        const double l1 = lambda1_radial(wm, s, gamma);
        const double l1M = eps > 0.0 ? lambda1_radial(wmM, s, gamma) : 0.0;
        const double tail = (gamma + 3.0) * power_radial(wm, s, gamma);
        if (last)
            *last = tail;
        const double br = 1.0 + s * s;
        return 0.25 * k * k * l1 * s * s / (br * br) - b * k * s * s / br * (l1 - 2.0 * eps * l1M) + tail;
    };

    ConfinementProfile out;
    out.phi.resize(grid.size());
    std::map<long, double> cache;
    const int n = grid.n();
    double sup = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const auto mi = grid.multi_index(i);
        long key = 0;
        for (int a = 0; a < 3; ++a)
            key += long(2 * mi[a] + 1 - n) * (2 * mi[a] + 1 - n);
        auto it = cache.find(key);
        const double s = std::sqrt(grid.speed_sq()[i]);
        if (it == cache.end())
            it = cache.emplace(key, phi_at(s, nullptr)).first;
        out.phi[i] = it->second;
        if (s >= 0.75 * grid.v_max() && s <= grid.v_max())
            sup = std::max(sup, out.phi[i] / std::pow(s, gamma));
    }
    out.outer_shell_sup = sup;
    out.limsup_bound = -(k * zeta_eps(params) - params.rho * (gamma + 3.0));
    phi_at(0.0, &out.last_term_at_origin);
    return out;
}

PoincareReport poincare_check(const LinearizedOperator& op, int functions, std::uint64_t seed)
{
    const VelocityGrid& grid = op.grid();
    std::vector<std::array<int, 3>> powers;
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; i + j <= 3; ++j)
            for (int l = 0; i + j + l <= 3; ++l)
                if (i + j + l > 0)
                    powers.push_back({i, j, l});
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const ScalarField ones = ScalarField::Ones(grid.size());
    const double mass = op.inner(ones, ones);

    PoincareReport rep;
    rep.C_P = gap_constants(op.params(), op.gamma()).C_P;
    rep.functions = functions;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    for (int t = 0; t < functions; ++t) {
        ScalarField h = ScalarField::Zero(grid.size());
        for (const auto& p : powers)
            h += normal(rng) * grid.v(0).pow(p[0]) * grid.v(1).pow(p[1]) * grid.v(2).pow(p[2]);
        h -= op.inner(h, ones) / mass;
        ScalarField g2 = ScalarField::Zero(grid.size());
        for (Side side : {Side::Forward, Side::Backward})
            g2 += 0.5 * one_sided_gradient(grid, h, side).square().rowwise().sum();
        const double ratio = op.inner(g2, ones) / op.inner(h, h);
        rep.min_ratio = std::min(rep.min_ratio, ratio);
    }
    rep.holds = rep.min_ratio >= rep.C_P * (1.0 - 1e-9);
    return rep;
}

} // namespace lfd
