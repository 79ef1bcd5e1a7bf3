#include "lfd/cli/config.hpp"
#include "lfd/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lfd::cli {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Reader {
    const std::string& origin;
    int line;

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw Error(ErrorKind::ConfigError, origin + ":" + std::to_string(line) + ": " + msg);
    }

    double number(std::string_view v) const
    {
        double x = 0.0;
        const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || p != v.data() + v.size())
            fail("expected a number, got '" + std::string(v) + "'");
        return x;
    }

    long integer(std::string_view v) const
    {
        long x = 0;
        const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || p != v.data() + v.size())
            fail("expected an integer, got '" + std::string(v) + "'");
        return x;
    }

    std::vector<double> list(std::string_view v) const
    {
        std::vector<double> out;
        while (!v.empty()) {
            const auto c = v.find(',');
            out.push_back(number(trim(v.substr(0, c))));
            if (c == std::string_view::npos)
                break;
            v.remove_prefix(c + 1);
        }
        if (out.empty())
            fail("empty list");
        return out;
    }
};

// shortest text that reads back to the same double
std::string fmt(double x)
{
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

} // namespace

Config parse_config(std::string_view text, const std::string& origin)
{
    Config c;
    std::string section;
    Reader r{origin, 0};
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view raw = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++r.line;
        if (const auto hash = raw.find_first_of("#;"); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        const std::string_view ln = trim(raw);
        if (ln.empty())
            continue;
        if (ln.front() == '[') {
            if (ln.back() != ']')
                r.fail("unterminated section header");
            section = std::string(trim(ln.substr(1, ln.size() - 2)));
            if (section != "physics" && section != "grid" && section != "initial" && section != "time"
                && section != "spectrum" && section != "run")
                r.fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = ln.find('=');
        if (eq == std::string_view::npos)
            r.fail("expected key = value");
        const std::string key(trim(ln.substr(0, eq)));
        const std::string_view val = trim(ln.substr(eq + 1));
        if (section.empty())
            r.fail("key '" + key + "' outside any section");
        if (val.empty())
            r.fail("missing value for '" + key + "'");
        const std::string k = section + "." + key;

        if (k == "physics.gamma") c.sim.gamma = r.number(val);
        else if (k == "physics.eps") c.sim.eps = r.number(val);
        else if (k == "physics.eps_over_dagger") c.eps_over_dagger = r.number(val);
        else if (k == "physics.rho") c.moments.rho = r.number(val);
        else if (k == "physics.E") c.moments.E = r.number(val);
        else if (k == "physics.eps_list") c.eps_list = r.list(val);
        else if (k == "grid.n") c.sim.n = int(r.integer(val));
        else if (k == "grid.v_max") c.sim.v_max = r.number(val);
        else if (k == "initial.preset") {
            try {
                c.sim.initial.preset = parse_preset(std::string(val));
            } catch (const Error& e) {
                r.fail(e.what());
            }
        }
        else if (k == "initial.theta1") c.sim.initial.theta1 = r.number(val);
        else if (k == "initial.theta2") c.sim.initial.theta2 = r.number(val);
        else if (k == "initial.weight") c.sim.initial.weight = r.number(val);
        else if (k == "initial.fraction") c.sim.initial.fraction = r.number(val);
        else if (k == "initial.width") c.sim.initial.width = r.number(val);
        else if (k == "initial.T") {
            const auto T = r.list(val);
            if (T.size() != 3)
                r.fail("T needs three temperatures");
            c.sim.initial.T = Eigen::Vector3d(T[0], T[1], T[2]);
        }
        else if (k == "time.t_end") c.sim.t_end = r.number(val);
        else if (k == "time.dt_out") c.sim.dt_out = r.number(val);
        else if (k == "time.cfl") c.sim.cfl = r.number(val);
        else if (k == "time.scheme") {
            if (val == "heun")
                c.sim.scheme = TimeScheme::Heun;
            else if (val == "rkl2")
                c.sim.scheme = TimeScheme::RKL2;
            else
                r.fail("scheme must be heun or rkl2");
        }
        else if (k == "time.max_stages") c.sim.max_stages = int(r.integer(val));
        else if (k == "time.converged_l12") c.sim.converged_l12 = r.number(val);
        else if (k == "spectrum.n_coarse") c.spectrum_coarse = int(r.integer(val));
        else if (k == "spectrum.n_fine") c.spectrum_fine = int(r.integer(val));
        else if (k == "spectrum.v_max") c.spectrum_v_max = r.number(val);
        else if (k == "run.seed") {
            const long s = r.integer(val);
            if (s < 0)
                r.fail("seed must be nonnegative");
            c.seed = std::uint64_t(s);
        }
        else r.fail("unknown key '" + key + "' in [" + section + "]");
    }
    return c;
}

Config load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::ConfigError, path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

void resolve(Config& cfg)
{
    if (!(cfg.moments.rho > 0.0) || !(cfg.moments.E > 0.0))
        throw Error(ErrorKind::ConfigError, "rho and E must be positive");
    if (cfg.eps_over_dagger >= 0.0)
        cfg.sim.eps = cfg.eps_over_dagger * saturation_threshold(cfg.moments).eps_dagger;
    cfg.sim.initial.rho = cfg.moments.rho;
    cfg.sim.initial.E = cfg.moments.E;
}

std::string render_config(const Config& c)
{
    std::ostringstream o;
    const auto& s = c.sim;
    o << "[physics]\n"
      << "gamma = " << fmt(s.gamma) << "\n"
      << "eps = " << fmt(s.eps) << "\n"
      << "rho = " << fmt(c.moments.rho) << "\n"
      << "E = " << fmt(c.moments.E) << "\n"
      << "eps_list = ";
    for (size_t i = 0; i < c.eps_list.size(); ++i)
        o << (i ? ", " : "") << fmt(c.eps_list[i]);
    o << "\n\n[grid]\n"
      << "n = " << s.n << "\n"
      << "v_max = " << fmt(s.v_max) << "\n\n"
      << "[initial]\n"
      << "preset = " << to_string(s.initial.preset) << "\n"
      << "theta1 = " << fmt(s.initial.theta1) << "\n"
      << "theta2 = " << fmt(s.initial.theta2) << "\n"
      << "weight = " << fmt(s.initial.weight) << "\n"
      << "fraction = " << fmt(s.initial.fraction) << "\n"
      << "width = " << fmt(s.initial.width) << "\n"
      << "T = " << fmt(s.initial.T[0]) << ", " << fmt(s.initial.T[1]) << ", " << fmt(s.initial.T[2]) << "\n\n"
      << "[time]\n"
      << "t_end = " << fmt(s.t_end) << "\n"
      << "dt_out = " << fmt(s.dt_out) << "\n"
      << "cfl = " << fmt(s.cfl) << "\n"
      << "scheme = " << (s.scheme == TimeScheme::Heun ? "heun" : "rkl2") << "\n"
      << "max_stages = " << s.max_stages << "\n"
      << "converged_l12 = " << fmt(s.converged_l12) << "\n\n"
      << "[spectrum]\n"
      << "n_coarse = " << c.spectrum_coarse << "\n"
      << "n_fine = " << c.spectrum_fine << "\n"
      << "v_max = " << fmt(c.spectrum_v_max) << "\n\n"
      << "[run]\n"
      << "seed = " << c.seed << "\n";
    return o.str();
}

std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t x)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

} // namespace lfd::cli
