#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace diracgap::cli {

using Json = nlohmann::ordered_json;

/// Resolved settings of one run. Unset optionals fall back to per-command defaults.
struct RunConfig {
    int dim = 3;
    std::optional<double> nu;
    std::string potential_table;  // two-column "r v" file; nu then bounds the potential
    std::optional<double> kappa_max;
    double r_min = 1e-6, r_max = 0.0;  // r_max 0 picks the automatic cutoff
    int nodes = 1000;
    std::optional<double> p_min, p_max;
    std::optional<int> cells;
    std::string method = "talman";  // talman, esteban-sere or both
    double tol = 1e-10;
    std::uint64_t seed = 20240611ULL;
    std::string format = "json";
    std::string output;  // empty writes to stdout
    int k = 1;
    bool enrich = true;
    int samples = 100;
    std::optional<double> slack;
    int kmax = 64;
    int two_m = 1;
    int jmax = 5;
    std::vector<double> nus;
    bool timing = false;
    int threads = 0;
};

/// Overlays the keys of a JSON object (same names as RunConfig fields) onto `base`.
RunConfig apply_config_json(const Json& j, RunConfig base);
RunConfig load_config_file(const std::string& path, RunConfig base);

/// A command's report: the JSON document, its flat table form and the exit code.
struct CommandOutput {
    Json doc;
    std::vector<std::string> header;
    std::vector<std::vector<Json>> rows;
    int exit_code = 0;
};

CommandOutput cmd_eigenvalues(const RunConfig& cfg);
CommandOutput cmd_hardy_check(const RunConfig& cfg);
CommandOutput cmd_kernel_check(const RunConfig& cfg);
CommandOutput cmd_core_check(const RunConfig& cfg);
CommandOutput cmd_certificate(const RunConfig& cfg);
CommandOutput cmd_sweep(const RunConfig& cfg);

std::string render(const CommandOutput& out, const std::string& format);

/// Full front end. Returns the process exit code: 0 success, 1 config, 2 no eigenvalue,
/// 3 convergence, 4 property violation.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace diracgap::cli
