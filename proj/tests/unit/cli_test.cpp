#include "lfd/cli/commands.hpp"
#include "lfd/cli/config.hpp"
#include "lfd/errors.hpp"
#include "lfd/field_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lfd;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "lfd");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::main_entry(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("lfd_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string config_error(const std::string& text)
{
    try {
        cli::parse_config(text, "cfg");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConfigError);
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("config parsing")
{
    const cli::Config c = cli::parse_config(R"(
# comment
[physics]
gamma = 0.5
eps_over_dagger = 0.01
eps_list = 0, 0.1

[grid]
n = 16
v_max = 6

[initial]
preset = anisotropic_gaussian
T = 0.6, 1, 1.4

[time]
t_end = 2
scheme = heun
)");
    CHECK(c.sim.gamma == 0.5);
    CHECK(c.eps_over_dagger == 0.01);
    CHECK(c.eps_list.size() == 2);
    CHECK(c.sim.n == 16);
    CHECK(c.sim.initial.preset == InitialPreset::AnisotropicGaussian);
    CHECK(c.sim.initial.T.z() == 1.4);
    CHECK(c.sim.scheme == TimeScheme::Heun);
}

TEST_CASE("config errors carry the line")
{
    CHECK(config_error("[grid]\nn = x\n") == "ConfigError: cfg:2: expected an integer, got 'x'");
    CHECK(config_error("n = 4\n").find("cfg:1: key 'n' outside any section") != std::string::npos);
    CHECK(config_error("[nope]\n").find("cfg:1: unknown section") != std::string::npos);
    CHECK(config_error("[grid]\n\nfoo = 1\n").find("cfg:3: unknown key 'foo'") != std::string::npos);
    CHECK(config_error("[time]\nscheme = euler\n").find("cfg:2:") != std::string::npos);
    CHECK(config_error("[grid\n").find("unterminated") != std::string::npos);
}

TEST_CASE("config resolves eps and round-trips")
{
    cli::Config c = cli::parse_config("[physics]\neps_over_dagger = 0.01\nrho = 2\n");
    cli::resolve(c);
    const double dagger = saturation_threshold({2.0, Eigen::Vector3d::Zero(), 1.0}).eps_dagger;
    CHECK(c.sim.eps == doctest::Approx(0.01 * dagger));
    CHECK(c.sim.initial.rho == 2.0);
    const std::string text = cli::render_config(c);
    cli::Config back = cli::parse_config(text);
    cli::resolve(back);
    CHECK(cli::render_config(back) == text);
    CHECK(cli::fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(cli::hex64(255) == "00000000000000ff");
}

TEST_CASE("field container round trip")
{
    const fs::path dir = scratch_dir("io");
    const auto g = build_grid(8, 3.0);
    const ScalarField f = (-g->speed_sq()).exp();
    write_field((dir / "f.lfdf").string(), *g, f, 0.25);
    const StoredField s = read_field((dir / "f.lfdf").string());
    CHECK(s.grid->n() == 8);
    CHECK(s.grid->v_max() == 3.0);
    CHECK(s.eps == 0.25);
    CHECK((s.f == f).all());

    std::ofstream((dir / "bad.lfdf").string()) << "not a field";
    CHECK_THROWS_AS(read_field((dir / "bad.lfdf").string()), Error);
    CHECK_THROWS_AS(read_field((dir / "missing.lfdf").string()), Error);
    // truncated payload
    fs::copy_file(dir / "f.lfdf", dir / "short.lfdf");
    fs::resize_file(dir / "short.lfdf", fs::file_size(dir / "f.lfdf") - 8);
    CHECK_THROWS_AS(read_field((dir / "short.lfdf").string()), Error);

    write_field_csv((dir / "f.csv").string(), *g, f);
    std::ifstream in((dir / "f.csv").string());
    std::string header;
    std::getline(in, header);
    CHECK(header == "ix,iy,iz,vx,vy,vz,f");
}

TEST_CASE("exit codes")
{
    CHECK(run_cli({}).code == cli::UsageError);
    CHECK(run_cli({"bogus"}).code == cli::UsageError);
    CHECK(run_cli({"equilibrium", "--grid", "7,3"}).code == cli::UsageError);
    CHECK(run_cli({"constants"}).code == cli::Ok);
    CHECK(run_cli({"simulate", "--config", "/nonexistent/file.cfg"}).code == cli::UsageError);
}

TEST_CASE("json and text reports carry the same values")
{
    const Run j = run_cli({"constants", "--json"});
    const Run t = run_cli({"constants"});
    REQUIRE(j.code == 0);
    REQUIRE(t.code == 0);
    const auto doc = cli::Json::parse(j.out);
    CHECK(t.out == cli::human_readable(doc));
    CHECK(doc["thresholds"]["eps_dagger"].get<double>() == doctest::Approx(0.6011476754439404));
    CHECK(doc["rows"].size() == 5);
}

TEST_CASE("electron row and out of range rows")
{
    const auto doc = cli::constants_report(GasMoments{}, {0.0, 100.0}, 1.0, true);
    CHECK(doc["rows"][1]["status"] == "NoEquilibrium");
    CHECK(doc.contains("note"));
    CHECK(doc["rows"].size() == 3);
}

TEST_CASE("equilibrium report")
{
    const auto g = build_grid(16, 6.0);
    const auto doc = cli::equilibrium_report(GasMoments{}, 0.1, *g);
    CHECK(doc["moments_within_1e-6"].get<bool>());
}

TEST_CASE("dry run writes nothing")
{
    const fs::path dir = scratch_dir("dry");
    const Run r = run_cli({"simulate", "--dry-run", "--out", dir.string(), "--grid", "12,5"});
    CHECK(r.code == cli::Ok);
    CHECK(r.out.find("[grid]") != std::string::npos);
    CHECK(fs::is_empty(dir));
}

TEST_CASE("simulate writes its artifacts")
{
    const fs::path dir = scratch_dir("sim");
    std::ofstream((dir / "run.cfg").string()) << "[physics]\neps = 0.05\n[grid]\nn = 10\nv_max = 5\n"
                                                 "[initial]\npreset = bimaxwellian\n[time]\nt_end = 0.1\n";
    const Run r = run_cli({"simulate", "--config", (dir / "run.cfg").string(), "--out", dir.string(), "--json"});
    CHECK(r.code == cli::Ok);
    for (const char* name : {"trajectory.csv", "final_field.lfdf", "summary.json", "manifest.json"})
        CHECK(fs::exists(dir / name));
    std::ifstream in((dir / "manifest.json").string());
    const auto manifest = cli::Json::parse(in);
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest.contains("config_hash"));
    const StoredField s = read_field((dir / "final_field.lfdf").string());
    CHECK(s.grid->n() == 10);

    // short run is not converged
    const Run strict = run_cli({"simulate", "--config", (dir / "run.cfg").string(), "--out",
                                dir.string(), "--require-converged"});
    CHECK(strict.code == cli::CheckFailed);
}

TEST_CASE("seeded commands are reproducible")
{
    const fs::path a = scratch_dir("seed_a");
    const fs::path b = scratch_dir("seed_b");
    const std::string cfg = "[physics]\neps = 0.05\n[grid]\nn = 10\nv_max = 5\n[time]\nt_end = 0.05\n";
    std::ofstream((a / "c.cfg").string()) << cfg;
    run_cli({"simulate", "--config", (a / "c.cfg").string(), "--out", a.string(), "--seed", "3"});
    run_cli({"simulate", "--config", (a / "c.cfg").string(), "--out", b.string(), "--seed", "3"});
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p.string(), std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
    CHECK(slurp(a / "final_field.lfdf") == slurp(b / "final_field.lfdf"));
}

TEST_CASE("exit code mapping")
{
    CHECK(cli::exit_code_for(Error(ErrorKind::ConfigError, "x")) == cli::UsageError);
    CHECK(cli::exit_code_for(Error(ErrorKind::BlowUp, "x")) == cli::NumericalFailure);
}
