#include "lfd/integrator.hpp"
#include "lfd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lfd {

namespace {

constexpr double pi = std::numbers::pi;

using Vec5 = Eigen::Matrix<double, 5, 1>;

ScalarField maxwellian(const VelocityGrid& grid, double rho, const Eigen::Vector3d& T)
{
    ScalarField e = ScalarField::Zero(grid.size());
    for (int k = 0; k < 3; ++k)
        e += grid.v(k).square() / (2.0 * T[k]);
    return rho / std::pow(2.0 * pi, 1.5) / std::sqrt(T.prod()) * (-e).exp();
}

void require_finite(const ScalarField& f, const char* where)
{
    if (!f.allFinite())
        throw Error(ErrorKind::BlowUp, std::string("non-finite values after ") + where);
}

// f clipped and projected back onto the target moments
StepReport finish(const VelocityGrid& grid, ScalarField f, const Vec5& target, double eps)
{
    require_finite(f, "stage update");
    StepReport rep;
    rep.clipped_mass = clip_to_pauli(grid, f, eps);
    rep.f = conservative_projection(grid, f, target, eps);
    return rep;
}

double entropy_rate_probe(const CollisionOperator& op, const ScalarField& f, double dt, double* D)
{
    const VelocityGrid& g = op.grid();
    const double eps = op.eps();
    // central difference over two Heun steps; D at the midpoint
    auto heun = [&](const ScalarField& x) {
        const ScalarField k1 = op.apply(x);
        const ScalarField k2 = op.apply(x + dt * k1);
        return ScalarField(x + 0.5 * dt * (k1 + k2));
    };
    const ScalarField f1 = heun(f);
    const ScalarField f2 = heun(f1);
    *D = op.evaluate(f1).production;
    return fd_entropy_change(g, f2, f, eps) / (2.0 * dt);
}

} // namespace

InitialPreset parse_preset(const std::string& name)
{
    if (name == "maxwellian")
        return InitialPreset::Maxwellian;
    if (name == "bimaxwellian")
        return InitialPreset::Bimaxwellian;
    if (name == "near_saturated")
        return InitialPreset::NearSaturated;
    if (name == "anisotropic_gaussian")
        return InitialPreset::AnisotropicGaussian;
    throw Error(ErrorKind::ConfigError, "unknown preset '" + name + "'");
}

std::string to_string(InitialPreset p)
{
    switch (p) {
    case InitialPreset::Maxwellian: return "maxwellian";
    case InitialPreset::Bimaxwellian: return "bimaxwellian";
    case InitialPreset::NearSaturated: return "near_saturated";
    case InitialPreset::AnisotropicGaussian: return "anisotropic_gaussian";
    }
    return "?";
}

ScalarField initial_field(const InitialCondition& ic, const VelocityGrid& grid, double eps)
{
    ScalarField f;
    switch (ic.preset) {
    case InitialPreset::Maxwellian:
        f = maxwellian(grid, ic.rho, Eigen::Vector3d::Constant(ic.E));
        break;
    case InitialPreset::Bimaxwellian:
        if (ic.weight < 0.0 || ic.weight > 1.0 || ic.theta1 <= 0.0 || ic.theta2 <= 0.0)
            throw Error(ErrorKind::InvalidArgument, "bimaxwellian needs 0 <= w <= 1 and positive temperatures");
        f = (1.0 - ic.weight) * maxwellian(grid, ic.rho, Eigen::Vector3d::Constant(ic.theta1))
            + ic.weight * maxwellian(grid, ic.rho, Eigen::Vector3d::Constant(ic.theta2));
        break;
    case InitialPreset::AnisotropicGaussian:
        if (!(ic.T.minCoeff() > 0.0))
            throw Error(ErrorKind::InvalidArgument, "temperatures must be positive");
        f = maxwellian(grid, ic.rho, ic.T);
        break;
    case InitialPreset::NearSaturated: {
        if (!(eps > 0.0))
            throw Error(ErrorKind::InvalidArgument, "near_saturated needs eps > 0");
        if (!(ic.fraction > 0.0 && ic.fraction < 1.0) || !(ic.width > 0.0))
            throw Error(ErrorKind::InvalidArgument, "near_saturated needs 0 < fraction < 1 and width > 0");
        const double peak = ic.fraction / eps;
        auto profile = [&](double mu) {
            return ScalarField(peak / (1.0 + ((grid.speed_sq() - mu) / ic.width).exp()));
        };
        // mass is increasing in mu
        double lo = -200.0 * ic.width, hi = grid.v_max() * grid.v_max();
        if (integrate(grid, profile(hi)) < ic.rho)
            throw Error(ErrorKind::BallTooLarge, "grid cannot hold the requested mass below the cap");
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (integrate(grid, profile(mid)) < ic.rho ? lo : hi) = mid;
        }
        f = profile(0.5 * (lo + hi));
        f *= ic.rho / integrate(grid, f);
        break;
    }
    }
    if (eps > 0.0 && f.maxCoeff() > 1.0 / eps)
        throw Error(ErrorKind::PauliViolation, "initial field exceeds 1/eps");
    return f;
}

void validate(const SimulationConfig& cfg)
{
    if (!(cfg.t_end > 0.0))
        throw Error(ErrorKind::InvalidArgument, "t_end must be positive");
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 0.9))
        throw Error(ErrorKind::InvalidArgument, "cfl must lie in (0, 0.9]");
    if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0))
        throw Error(ErrorKind::InvalidArgument, "gamma must lie in (0, 1]");
    if (!(cfg.eps >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "eps must be nonnegative");
    if (!(cfg.dt_out > 0.0))
        throw Error(ErrorKind::InvalidArgument, "dt_out must be positive");
    if (cfg.max_stages < 2)
        throw Error(ErrorKind::InvalidArgument, "max_stages must be at least 2");
}

const std::vector<std::string>& trajectory_columns()
{
    static const std::vector<std::string> cols = {
        "t", "m0", "m2", "m3", "m4", "M0", "Mg2", "Dg2", "S_eps", "D_eps", "H_rel", "L12_dist",
        "fmin", "fmax", "one_minus_eps_f_min"};
    return cols;
}

std::vector<double> trajectory_row(const TrajectoryRecord& r)
{
    return {r.t, r.m0, r.m2, r.m3, r.m4, r.M0, r.Mg2, r.Dg2, r.S_eps, r.D_eps, r.H_rel, r.L12_dist,
            r.fmin, r.fmax, r.one_minus_eps_f_min};
}

double clip_to_pauli(const VelocityGrid& grid, ScalarField& f, double eps)
{
    ScalarField c = f.max(0.0);
    if (eps > 0.0)
        c = c.min(1.0 / eps);
    const double moved = (c - f).abs().sum() * grid.cell_volume();
    f = c;
    return moved;
}

ScalarField conservative_projection(const VelocityGrid& grid, const ScalarField& f, const Vec5& target,
                                    double eps)
{
    const double h3 = grid.cell_volume();
    const double cap = eps > 0.0 ? (1.0 - 1e-6) / eps : std::numeric_limits<double>::infinity();
    ScalarField out = f;
    Eigen::MatrixXd phi(grid.size(), 5);
    phi.col(0).setOnes();
    for (int k = 0; k < 3; ++k)
        phi.col(k + 1) = grid.v(k).matrix();
    phi.col(4) = grid.speed_sq().matrix();
    for (int iter = 0; iter < 3; ++iter) {
        const Vec5 deficit = target - invariant_moments(grid, out);
        if (deficit.isZero(0.0))
            break;
        const ScalarField chi = (out > 0.0 && out < cap).cast<double>();
        const ScalarField w = h3 * out * chi;
        const Eigen::Matrix<double, 5, 5> G = phi.transpose() * (phi.array().colwise() * w).matrix();
        // scale to unit diagonal before judging conditioning
        const Vec5 d = G.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
        const Eigen::Matrix<double, 5, 5> Gs = d.asDiagonal() * G * d.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> es(Gs, Eigen::EigenvaluesOnly);
        if (!(es.eigenvalues().minCoeff() > 1e-12 * es.eigenvalues().maxCoeff()))
            throw Error(ErrorKind::ProjectionInfeasible, "moment system is singular on the active set");
        const Vec5 c = d.asDiagonal() * Gs.ldlt().solve(d.asDiagonal() * deficit);
        out += (out * chi) * (phi * c).array();
        if (eps > 0.0)
            out = out.min(1.0 / eps);
        out = out.max(0.0);
    }
    return out;
}

ScalarField conservative_projection(const VelocityGrid& grid, const ScalarField& f,
                                    const GasMoments& target, double eps)
{
    Vec5 t;
    t[0] = target.rho;
    t.segment<3>(1) = target.rho * target.u;
    t[4] = target.rho * (3.0 * target.E + target.u.squaredNorm());
    return conservative_projection(grid, f, t, eps);
}

StepReport step(const CollisionOperator& op, const ScalarField& f, double dt, double cfl)
{
    const VelocityGrid& g = op.grid();
    const Vec5 target = invariant_moments(g, f);
    const CollisionEvaluation e0 = op.evaluate(f, true);
    if (dt > cfl * 2.0 / e0.stiffness)
        throw Error(ErrorKind::StepTooLarge, "dt " + std::to_string(dt) + " above stability limit "
                                                 + std::to_string(cfl * 2.0 / e0.stiffness));
    if (dt == 0.0) {
        StepReport rep;
        rep.f = f;
        rep.stiffness = e0.stiffness;
        return rep;
    }
    const ScalarField f1 = f + dt * e0.Q;
    require_finite(f1, "first stage");
    const ScalarField k2 = op.apply(f1);
    StepReport rep = finish(g, f + 0.5 * dt * (e0.Q + k2), target, op.eps());
    rep.stages = 2;
    rep.stiffness = e0.stiffness;
    return rep;
}

ScalarField step(GridPtr grid, const ScalarField& f, double dt, double eps, double gamma)
{
    check_admissible(DistributionField{grid, f, eps});
    CollisionOperator op(grid, eps, gamma);
    return step(op, f, dt).f;
}

int rkl2_stages(double tau, double stiffness, double cfl)
{
    const double dt_euler = cfl * 2.0 / stiffness;
    const double need = 4.0 * tau / dt_euler; // s^2 + s - 2 >= need
    const int s = int(std::ceil(0.5 * (-1.0 + std::sqrt(9.0 + 4.0 * need))));
    return std::max(s, 2);
}

StepReport step_rkl2(const CollisionOperator& op, const ScalarField& f, double tau, int s, double cfl)
{
    if (s < 2)
        throw Error(ErrorKind::InvalidArgument, "RKL2 needs at least 2 stages");
    const VelocityGrid& g = op.grid();
    const Vec5 target = invariant_moments(g, f);
    const CollisionEvaluation e0 = op.evaluate(f, true);
    const double limit = cfl * 2.0 / e0.stiffness * (double(s) * s + s - 2.0) / 4.0;
    if (tau > limit * (1.0 + 1e-12))
        throw Error(ErrorKind::StepTooLarge, "tau " + std::to_string(tau) + " above RKL2 limit "
                                                 + std::to_string(limit));
    auto bj = [](int j) { return j < 2 ? 1.0 / 3.0 : (double(j) * j + j - 2.0) / (2.0 * j * (j + 1.0)); };
    const double w1 = 4.0 / (double(s) * s + s - 2.0);
    const ScalarField& L0 = e0.Q;
    ScalarField y_prev2 = f;
    ScalarField y_prev = f + (w1 / 3.0) * tau * L0;
    for (int j = 2; j <= s; ++j) {
        const double mu = (2.0 * j - 1.0) / j * bj(j) / bj(j - 1);
        const double nu = -(j - 1.0) / j * bj(j) / bj(j - 2);
        const double mut = mu * w1;
        const double gt = -(1.0 - bj(j - 1)) * mut;
        const ScalarField Lj = op.apply(y_prev);
        ScalarField y = mu * y_prev + nu * y_prev2 + (1.0 - mu - nu) * f + mut * tau * Lj + gt * tau * L0;
        y_prev2 = std::move(y_prev);
        y_prev = std::move(y);
    }
    StepReport rep = finish(g, y_prev, target, op.eps());
    rep.stages = s;
    rep.stiffness = e0.stiffness;
    return rep;
}

SimulationResult simulate(const SimulationConfig& cfg)
{
    validate(cfg);
    SimulationResult res;
    res.grid = build_grid(cfg.n, cfg.v_max);
    const VelocityGrid& g = *res.grid;
    ScalarField f = initial_field(cfg.initial, g, cfg.eps);

    const GasMoments mom0 = measure_moments(g, f);
    const Thresholds th = saturation_threshold(mom0);
    if (cfg.eps >= th.eps_max)
        throw Error(ErrorKind::NoEquilibrium, "eps above the saturation threshold " + std::to_string(th.eps_max));
    res.target = solve_fermi_dirac_on_grid(g, mom0, cfg.eps);
    res.equilibrium = evaluate_equilibrium(res.target, g);
    const Vec5 target = invariant_moments(g, f);
    const double scale_p = std::sqrt(target[0] * target[4]);

    CollisionOperator op(res.grid, cfg.eps, cfg.gamma);
    // keep the log floor well below the equilibrium everywhere on the grid, so that M_eps stays
    // stationary up to roundoff
    res.log_floor = std::min(op.floor_for(f), 1e-6 * res.equilibrium.minCoeff());
    if (!(res.log_floor > 0.0))
        res.log_floor = op.floor_for(f);
    op.fix_floor(res.log_floor);

    auto record = [&](double t) {
        TrajectoryRecord r;
        r.t = t;
        const MomentReport m = moments(g, f, cfg.gamma);
        r.m0 = m.m0;
        r.m2 = m.m2;
        r.m3 = m.m3;
        r.m4 = m.m4;
        r.M0 = m.M0;
        r.Mg2 = m.Mg2;
        r.Dg2 = m.Dg2;
        r.S_eps = fd_entropy(g, f, cfg.eps);
        r.D_eps = op.evaluate(f).production;
        ++res.evaluations;
        r.H_rel = fd_relative_entropy(g, f, res.equilibrium, cfg.eps);
        r.L12_dist = l12_distance(g, f, res.equilibrium);
        r.L1_dist = l1_distance(g, f, res.equilibrium);
        r.fmin = f.minCoeff();
        r.fmax = f.maxCoeff();
        r.one_minus_eps_f_min = 1.0 - cfg.eps * r.fmax;
        const Vec5 now = invariant_moments(g, f);
        r.mass_drift = std::abs(now[0] - target[0]) / target[0];
        r.momentum_drift = (now.segment<3>(1) - target.segment<3>(1)).norm() / scale_p;
        r.energy_drift = std::abs(now[4] - target[4]) / target[4];
        for (double x : trajectory_row(r))
            if (!std::isfinite(x))
                throw Error(ErrorKind::BlowUp, "non-finite record at t = " + std::to_string(t));
        res.records.push_back(r);
    };

    // probe times t_end (k / (K - 1))^2, concentrated early where D is large
    std::vector<double> probes;
    for (int k = 0; k < cfg.identity_samples; ++k) {
        const double x = cfg.identity_samples > 1 ? double(k) / (cfg.identity_samples - 1) : 0.0;
        probes.push_back(cfg.t_end * x * x);
    }
    size_t next_probe = 0;

    double t = 0.0;
    record(t);
    const long n_out = long(std::ceil(cfg.t_end / cfg.dt_out - 1e-9));
    for (long k = 1; k <= n_out; ++k) {
        const double t_out = std::min(cfg.t_end, k * cfg.dt_out);
        while (t < t_out - 1e-14 * cfg.t_end) {
            const double stiff = op.evaluate(f, true).stiffness;
            ++res.evaluations;
            if (next_probe < probes.size() && t >= probes[next_probe] - 1e-12) {
                EntropyIdentitySample s;
                s.t = t;
                s.dSdt = entropy_rate_probe(op, f, cfg.cfl * 2.0 / stiff, &s.D);
                res.evaluations += 5;
                res.identity.push_back(s);
                ++next_probe;
            }
            StepReport rep;
            if (cfg.scheme == TimeScheme::Heun) {
                const double dt = std::min(t_out - t, cfg.cfl * 2.0 / stiff);
                rep = step(op, f, dt, cfg.cfl);
                t = dt == t_out - t ? t_out : t + dt;
            } else {
                const double max_tau = cfg.cfl * 2.0 / stiff
                                       * (double(cfg.max_stages) * cfg.max_stages + cfg.max_stages - 2.0) / 4.0;
                const double tau = std::min(t_out - t, max_tau);
                const int s = rkl2_stages(tau, stiff, cfg.cfl);
                rep = step_rkl2(op, f, tau, s, cfg.cfl);
                t = tau == t_out - t ? t_out : t + tau;
            }
            res.evaluations += rep.stages;
            ++res.steps;
            res.clipped_mass_total += rep.clipped_mass;
            // re-project onto the initial moments so drift cannot accumulate
            ScalarField next = conservative_projection(g, rep.f, target, cfg.eps);
            res.min_entropy_increment = std::min(res.min_entropy_increment,
                                                 fd_entropy_change(g, next, f, cfg.eps));
            f = std::move(next);
        }
        record(t);
    }
    // probes scheduled at t_end
    while (next_probe < probes.size()) {
        EntropyIdentitySample s;
        s.t = t;
        s.dSdt = entropy_rate_probe(op, f, cfg.cfl * 2.0 / op.evaluate(f, true).stiffness, &s.D);
        res.evaluations += 6;
        res.identity.push_back(s);
        ++next_probe;
    }
    res.final_field = f;
    res.converged = res.records.back().L12_dist <= cfg.converged_l12;

    // terminal regime: from two decades below the initial distance down to the roundoff plateau
    const double d0 = res.records.front().L12_dist;
    std::vector<double> ts, ds;
    for (const auto& r : res.records)
        if (r.L12_dist <= 1e-2 * d0 && r.L12_dist > 1e-10 * d0) {
            ts.push_back(r.t);
            ds.push_back(r.L12_dist);
        }
    try {
        res.fit = fit_decay_rate(ts, ds, 1.0);
        res.fit_ok = true;
    } catch (const Error& e) {
        res.fit_error = e.what();
    }
    return res;
}

} // namespace lfd
