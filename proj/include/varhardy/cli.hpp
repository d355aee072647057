#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace varhardy::cli {

enum class Verb { Gen, Norm, Decompose, Verify, Calibrate };

struct Command {
    Verb verb = Verb::Gen;
    /// Set for --help; execute() prints it and exits 0.
    std::optional<std::string> help;

    std::string space_path;
    std::string exponent_path;
    std::string rv_path;
    std::string martingale_path;
    std::string bounds_path;
    /// Empty means stdout.
    std::string output_path;
    std::string csv_path;

    /// From --tol; falls back to VARHARDY_TOL, then the solver default.
    std::optional<double> tol;
    std::uint64_t seed = 1;
    int jobs = 1;

    // gen
    int depth = 3;
    double bias = 0.5;
    bool randomize_orientation = false;
    std::string exponent_out;
    double p_min = 1.0;
    double p_max = 1.0;
    std::string martingale_out;
    std::string generator = "rademacher";
    double scale = 1.0;

    // norm: lp (the --rv variable) or a Hardy norm star|S|s|Q|D of --martingale
    std::string mode = "lp";

    // decompose
    int category = 1;

    // verify / calibrate
    std::vector<std::string> suites;
    int trials = 200;
    std::optional<double> exponent_min;
    std::optional<double> exponent_max;
};

/// args excludes the program name. Throws UsageError.
Command parse_command(const std::vector<std::string>& args);

/// 0 when everything passed, 1 on a validation failure, 2 on usage or IO
/// errors. Library errors are reported on err rather than thrown.
int execute(const Command& cmd, std::ostream& out, std::ostream& err);

/// parse_command + execute with the exit-code mapping applied to parse errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace varhardy::cli
