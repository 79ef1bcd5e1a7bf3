#include "lfd/cli/commands.hpp"
#include "lfd/errors.hpp"
#include "lfd/field_io.hpp"
#include "lfd/linearized.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace lfd::cli {

namespace fs = std::filesystem;

namespace {

// JSON has no infinity; keep the document valid
Json num(double x)
{
    if (std::isfinite(x))
        return x;
    return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}

Json thresholds_json(const Thresholds& t)
{
    return Json{{"eps_max", num(t.eps_max)},
                {"eps_bar", num(t.eps_bar)},
                {"eps_dagger", num(t.eps_dagger)},
                {"eps_one", num(t.eps_one)}};
}

Json gap_json(const GapConstants& g)
{
    return Json{{"C_P", num(g.C_P)},
                {"nu", num(g.nu)},
                {"C_ab", num(g.C_ab)},
                {"lambda2", num(g.lambda2)},
                {"lambda2_bound", num(g.lambda2_bound)},
                {"kappa_eps", num(g.kappa_eps)},
                {"C_gamma_eps", num(g.C_gamma_eps)},
                {"lambda_gamma", num(g.lambda_gamma)},
                {"zeta_eps", num(g.zeta_eps)},
                {"k_dagger", num(g.k_dagger)},
                {"out_of_range", g.out_of_range}};
}

void flatten(const Json& j, const std::string& path, std::ostringstream& o)
{
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), o);
    } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
        for (size_t i = 0; i < j.size(); ++i)
            flatten(j[i], path + "[" + std::to_string(i) + "]", o);
    } else {
        o << path << ": " << j.dump() << "\n";
    }
}

void emit(const Json& doc, bool json, std::ostream& out)
{
    if (json)
        out << doc.dump(2) << "\n";
    else
        out << human_readable(doc);
}

void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream o(p, std::ios::binary);
    if (!o)
        throw Error(ErrorKind::IoError, "cannot write " + p.string());
    o << text;
}

std::string format_row(const std::vector<double>& row)
{
    std::string s;
    char buf[32];
    for (size_t i = 0; i < row.size(); ++i) {
        const auto r = std::to_chars(buf, buf + sizeof buf, row[i]);
        s += (i ? "," : "");
        s.append(buf, r.ptr);
    }
    return s;
}

struct Context {
    const Options& opt;
    Config cfg;
    std::string config_text; // bytes of the config file, empty without one
    std::vector<std::string> outputs;
    long steps = 0;
};

void write_manifest(Context& ctx, double seconds, bool passed)
{
    Json m;
    m["command"] = ctx.opt.command;
    m["config"] = render_config(ctx.cfg);
    m["config_hash"] = hex64(fnv1a(render_config(ctx.cfg)));
    Json inputs = Json::object();
    if (ctx.opt.config)
        inputs[*ctx.opt.config] = hex64(fnv1a(ctx.config_text));
    m["input_hashes"] = inputs;
    m["outputs"] = ctx.outputs;
    m["wall_clock_seconds"] = seconds;
    m["steps"] = ctx.steps;
    m["passed"] = passed;
    write_text(fs::path(ctx.opt.out) / "manifest.json", m.dump(2) + "\n");
}

int cmd_constants(Context& ctx, std::ostream& out)
{
    const Json doc = constants_report(ctx.cfg.moments, ctx.cfg.eps_list, ctx.cfg.sim.gamma, ctx.opt.electron);
    emit(doc, ctx.opt.json, out);
    return Ok;
}

int cmd_equilibrium(Context& ctx, std::ostream& out)
{
    const GridPtr g = build_grid(ctx.cfg.sim.n, ctx.cfg.sim.v_max);
    const Json doc = equilibrium_report(ctx.cfg.moments, ctx.cfg.sim.eps, *g);
    const FermiDiracParams p = solve_fermi_dirac(ctx.cfg.moments, ctx.cfg.sim.eps);
    const fs::path field = fs::path(ctx.opt.out) / "equilibrium.lfdf";
    write_field(field.string(), *g, evaluate_equilibrium(p, *g), ctx.cfg.sim.eps);
    ctx.outputs.push_back(field.string());
    emit(doc, ctx.opt.json, out);
    return doc["moments_within_1e-6"].get<bool>() ? Ok : CheckFailed;
}

int cmd_simulate(Context& ctx, std::ostream& out)
{
    const SimulationResult r = simulate(ctx.cfg.sim);
    ctx.steps = r.steps;
    const fs::path dir(ctx.opt.out);

    std::string csv;
    const auto& cols = trajectory_columns();
    for (size_t i = 0; i < cols.size(); ++i)
        csv += (i ? "," : "") + cols[i];
    csv += "\n";
    for (const auto& rec : r.records)
        csv += format_row(trajectory_row(rec)) + "\n";
    write_text(dir / "trajectory.csv", csv);
    ctx.outputs.push_back((dir / "trajectory.csv").string());

    write_field((dir / "final_field.lfdf").string(), *r.grid, r.final_field, ctx.cfg.sim.eps);
    ctx.outputs.push_back((dir / "final_field.lfdf").string());

    const GapConstants gc = gap_constants(r.target, ctx.cfg.sim.gamma);
    Json s;
    s["steps"] = r.steps;
    s["evaluations"] = r.evaluations;
    s["clipped_mass_total"] = r.clipped_mass_total;
    s["log_floor"] = r.log_floor;
    s["final_L12_dist"] = r.records.back().L12_dist;
    s["converged"] = r.converged;
    s["fitted_decay_rate"] = r.fit_ok ? Json(r.fit.rate) : Json(nullptr);
    s["fit_r2"] = r.fit_ok ? Json(r.fit.r2) : Json(nullptr);
    s["fit_points"] = r.fit.points;
    if (!r.fit_ok)
        s["fit_error"] = r.fit_error;
    s["lambda_gamma"] = num(gc.lambda_gamma);
    Json ident = Json::array();
    for (const auto& e : r.identity)
        ident.push_back(Json{{"t", e.t}, {"dS_dt", e.dSdt}, {"D_eps", e.D}});
    s["entropy_identity"] = ident;
    write_text(dir / "summary.json", s.dump(2) + "\n");
    ctx.outputs.push_back((dir / "summary.json").string());

    emit(s, ctx.opt.json, out);
    if (ctx.opt.require_converged && !r.converged)
        return CheckFailed;
    return Ok;
}

int cmd_spectrum(Context& ctx, std::ostream& out)
{
    int fine = ctx.cfg.spectrum_fine;
    double v_max = ctx.cfg.spectrum_v_max;
    if (ctx.opt.grid) {
        fine = ctx.opt.grid->first;
        v_max = ctx.opt.grid->second;
    }
    const Json doc = spectrum_report(ctx.cfg.moments, ctx.cfg.sim.eps, ctx.cfg.sim.gamma,
                                     ctx.cfg.spectrum_coarse, fine, v_max);
    emit(doc, ctx.opt.json, out);
    const Json& d = doc["dominance"];
    return d["asserted"].get<bool>() && !d["holds"].get<bool>() ? CheckFailed : Ok;
}

int cmd_verify(Context& ctx, std::ostream& out)
{
    VerifyOptions v;
    if (ctx.opt.grid) {
        v.n = ctx.opt.grid->first;
        v.v_max = ctx.opt.grid->second;
    }
    if (ctx.cfg.sim.eps > 0.0)
        v.eps = ctx.cfg.sim.eps;
    v.gamma = ctx.cfg.sim.gamma;
    v.seed = ctx.cfg.seed;
    const auto checks = verify_suite(v);
    const Json doc = verify_report(checks);
    emit(doc, ctx.opt.json, out);
    return all_passed(checks) ? Ok : CheckFailed;
}

} // namespace

Json constants_report(const GasMoments& moments, const std::vector<double>& eps_list, double gamma,
                      bool electron)
{
    const Thresholds th = saturation_threshold(moments);
    Json doc;
    doc["rho"] = moments.rho;
    doc["E"] = moments.E;
    doc["gamma"] = gamma;
    doc["thresholds"] = thresholds_json(th);
    std::vector<double> list = eps_list;
    if (electron) {
        list.push_back(1.93e-10);
        doc["note"] = "electrons in a metal at room temperature: eps is about 1.93e-10, far inside the classical regime";
    }
    Json rows = Json::array();
    for (double eps : list) {
        Json row;
        row["eps"] = eps;
        if (eps >= th.eps_max) {
            row["status"] = "NoEquilibrium";
            rows.push_back(row);
            continue;
        }
        try {
            const FermiDiracParams p = solve_fermi_dirac(moments, eps);
            row["status"] = "ok";
            row["eps_max"] = num(th.eps_max);
            row["eps_bar"] = num(th.eps_bar);
            row["eps_dagger"] = num(th.eps_dagger);
            row["eps_one"] = num(th.eps_one);
            row["a_eps"] = p.a;
            row["b_eps"] = p.b;
            row["rho_eps"] = p.rho_eps();
            row["E_eps"] = p.E_eps();
            row["kappa_eps"] = p.kappa_eps();
            row["gap"] = gap_json(gap_constants(p, gamma));
        } catch (const Error& e) {
            row["status"] = std::string(to_string(e.kind()));
        }
        rows.push_back(row);
    }
    doc["rows"] = rows;
    return doc;
}

Json equilibrium_report(const GasMoments& moments, double eps, const VelocityGrid& grid)
{
    SolveReport rep;
    const FermiDiracParams p = solve_fermi_dirac(moments, eps, &rep);
    const ScalarField M = evaluate_equilibrium(p, grid);
    const auto mom = invariant_moments(grid, M);
    const double target_e = 3.0 * moments.rho * moments.E + moments.rho * moments.u.squaredNorm();
    const double err_mass = std::abs(mom[0] - moments.rho) / moments.rho;
    const double err_mom = mom.segment<3>(1).norm() / std::sqrt(moments.rho * target_e);
    const double err_energy = std::abs(mom[4] - target_e) / target_e;
    Json doc;
    doc["eps"] = eps;
    doc["a_eps"] = p.a;
    doc["b_eps"] = p.b;
    doc["rho_eps"] = p.rho_eps();
    doc["E_eps"] = p.E_eps();
    doc["kappa_eps"] = p.kappa_eps();
    doc["thresholds"] = thresholds_json(saturation_threshold(moments));
    doc["brackets_hold"] = brackets_hold(p);
    doc["solver"] = Json{{"iterations", rep.iterations},
                         {"mass_residual", rep.mass_residual},
                         {"energy_residual", rep.energy_residual},
                         {"bisection_fallback", rep.bisection_fallback}};
    doc["grid"] = Json{{"n", grid.n()}, {"v_max", grid.v_max()}};
    doc["relative_error"] = Json{{"mass", err_mass}, {"momentum", err_mom}, {"energy", err_energy}};
    doc["moments_within_1e-6"] = err_mass <= 1e-6 && err_mom <= 1e-6 && err_energy <= 1e-6;
    return doc;
}

Json spectrum_report(const GasMoments& moments, double eps, double gamma, int n_coarse, int n_fine,
                     double v_max)
{
    const FermiDiracParams p = solve_fermi_dirac(moments, eps);
    const GapConstants gc = gap_constants(p, gamma);
    const TwoGridGap tg = two_grid_gap(p, gamma, n_coarse, n_fine, v_max);
    Json doc;
    doc["eps"] = eps;
    doc["gamma"] = gamma;
    doc["gap_num"] = tg.gap;
    doc["gap_uncertainty"] = tg.uncertainty;
    doc["resolutions"] = Json::array({Json{{"n", tg.n_coarse}, {"v_max", v_max}, {"gap", tg.coarse},
                                           {"method", tg.n_coarse <= 14 ? "dense" : "lanczos"}},
                                      Json{{"n", tg.n_fine}, {"v_max", v_max}, {"gap", tg.fine},
                                           {"method", tg.n_fine <= 14 ? "dense" : "lanczos"}}});
    doc["constants"] = gap_json(gc);
    doc["dominance"] = Json{{"lambda_gamma", num(gc.lambda_gamma)},
                            {"holds", tg.gap >= gc.lambda_gamma},
                            {"asserted", gc.out_of_range.empty()}};
    return doc;
}

Json verify_report(const std::vector<Check>& checks)
{
    Json list = Json::array();
    for (const Check& c : checks)
        list.push_back(Json{{"name", c.name},
                            {"field", c.field},
                            {"lhs", num(c.lhs)},
                            {"rhs", num(c.rhs)},
                            {"slack", num(c.slack)},
                            {"pass", c.pass},
                            {"asserted", c.asserted},
                            {"note", c.note}});
    Json doc;
    doc["passed"] = all_passed(checks);
    doc["checks"] = list;
    return doc;
}

std::string human_readable(const Json& doc)
{
    std::ostringstream o;
    flatten(doc, "", o);
    return o.str();
}

int exit_code_for(const std::exception& e)
{
    const auto* le = dynamic_cast<const Error*>(&e);
    if (!le)
        return NumericalFailure;
    switch (le->kind()) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidGrid:
    case ErrorKind::IoError:
        return UsageError;
    default:
        return NumericalFailure;
    }
}

int run(const Options& opt, std::ostream& out, std::ostream& err)
{
    Context ctx{opt, Config{}, {}, {}, 0};
    try {
        if (opt.config) {
            std::ifstream in(*opt.config, std::ios::binary);
            if (!in)
                throw Error(ErrorKind::ConfigError, *opt.config + ": cannot open");
            std::ostringstream ss;
            ss << in.rdbuf();
            ctx.config_text = ss.str();
            ctx.cfg = parse_config(ctx.config_text, *opt.config);
        }
        if (opt.seed)
            ctx.cfg.seed = *opt.seed;
        if (opt.grid && opt.command != "spectrum") {
            ctx.cfg.sim.n = opt.grid->first;
            ctx.cfg.sim.v_max = opt.grid->second;
        }
        resolve(ctx.cfg);
        if (opt.command == "simulate")
            validate(ctx.cfg.sim);

        if (opt.dry_run) {
            out << render_config(ctx.cfg);
            return Ok;
        }
        fs::create_directories(opt.out);
        const auto t0 = std::chrono::steady_clock::now();
        int code = UsageError;
        if (opt.command == "constants")
            code = cmd_constants(ctx, out);
        else if (opt.command == "equilibrium")
            code = cmd_equilibrium(ctx, out);
        else if (opt.command == "simulate")
            code = cmd_simulate(ctx, out);
        else if (opt.command == "spectrum")
            code = cmd_spectrum(ctx, out);
        else if (opt.command == "verify")
            code = cmd_verify(ctx, out);
        else
            throw Error(ErrorKind::ConfigError, "unknown command '" + opt.command + "'");
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_manifest(ctx, secs, code == Ok);
        return code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Numerical lab for the homogeneous Landau-Fermi-Dirac equation"};
    app.require_subcommand(1, 1);
    Options opt;
    std::string grid;
    std::uint64_t seed = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "config file");
        sub->add_option("--out", opt.out, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "global RNG seed");
        sub->add_option("--grid", grid, "N,VMAX");
        sub->add_flag("--json", opt.json, "JSON output");
        sub->add_flag("--dry-run", opt.dry_run, "print the resolved config and stop");
    };
    for (const char* name : {"constants", "equilibrium", "simulate", "spectrum", "verify"}) {
        CLI::App* sub = app.add_subcommand(name);
        add_common(sub);
        if (std::string(name) == "simulate")
            sub->add_flag("--require-converged", opt.require_converged, "exit 1 unless converged");
        if (std::string(name) == "constants")
            sub->add_flag("--electron", opt.electron, "add the electron-gas row");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return Ok;
        }
        err << "usage error: " << e.what() << "\n";
        return UsageError;
    }
    opt.command = app.get_subcommands().front()->get_name();
    if (app.get_subcommands().front()->count("--seed"))
        opt.seed = seed;
    if (!grid.empty()) {
        const auto comma = grid.find(',');
        try {
            if (comma == std::string::npos)
                throw std::invalid_argument(grid);
            size_t used = 0;
            const int n = std::stoi(grid.substr(0, comma), &used);
            if (used != comma)
                throw std::invalid_argument(grid);
            const std::string rest = grid.substr(comma + 1);
            const double vmax = std::stod(rest, &used);
            if (used != rest.size())
                throw std::invalid_argument(grid);
            opt.grid = std::make_pair(n, vmax);
        } catch (const std::exception&) {
            err << "usage error: --grid expects N,VMAX, got '" << grid << "'\n";
            return UsageError;
        }
    }
    return run(opt, out, err);
}

} // namespace lfd::cli
