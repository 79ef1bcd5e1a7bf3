#pragma once

#include "lfd/cli/config.hpp"
#include "lfd/cli/verify.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lfd::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { Ok = 0, CheckFailed = 1, UsageError = 2, NumericalFailure = 3 };

struct Options {
    std::string command;
    std::optional<std::string> config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::pair<int, double>> grid;
    bool json = false;
    bool require_converged = false;
    bool dry_run = false;
    bool electron = false;
};

/// Parses argv and runs; never throws.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int run(const Options& opt, std::ostream& out, std::ostream& err);

/// Reports, shared by the subcommands and the tests.
Json constants_report(const GasMoments& moments, const std::vector<double>& eps_list, double gamma,
                      bool electron = false);
Json equilibrium_report(const GasMoments& moments, double eps, const VelocityGrid& grid);
Json spectrum_report(const GasMoments& moments, double eps, double gamma, int n_coarse, int n_fine,
                     double v_max);
Json verify_report(const std::vector<Check>& checks);

/// One "path: value" line per leaf, in document order.
std::string human_readable(const Json& doc);

/// Exit code for a library error.
int exit_code_for(const std::exception& e);

} // namespace lfd::cli
