#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "saoovqe/config.hpp"

namespace saoovqe {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitDimension = 2,
    kExitNonConvergence = 3,
};

/// Command-line values that take precedence over the config file.
struct CommandOverrides {
    std::optional<std::filesystem::path> out;
    std::optional<Solver> solver;
    std::optional<int> jobs;
    std::optional<std::filesystem::path> fcidump;
    std::optional<std::filesystem::path> operator_file;
};

/// Result document of `run`. `wall_time_s` and `timestamp` are the only
/// fields that differ between identical runs.
nlohmann::json run_result_json(const RunConfig &config, const SaooVqeResult &result,
                               double wall_time_s);

/// iteration,e_sa,e0,e1,orbital_grad,circuit_grad,step_norm
std::string history_csv(const SaooVqeResult &result);

struct ScanPoint {
    double parameter = 0.0;
    std::filesystem::path file;
};

/// `<value> <relative-path>` per line, '#' comments; paths resolve against
/// the manifest's directory. Values must be monotone.
std::vector<ScanPoint> read_scan_manifest(const std::filesystem::path &path);

struct ScanRow {
    double parameter = 0.0;
    double e0 = 0.0;
    double e1 = 0.0;
    std::optional<double> e0_exact;
    std::optional<double> e1_exact;
    /// ⟨Ψ_I(previous point)|Ψ_I(this point)⟩ after tracking; 1 at the first point.
    double overlap0 = 1.0;
    double overlap1 = 1.0;
    bool converged = false;
    bool ambiguous = false;
    bool swapped = false;
    std::string error;

    std::string status() const;
};

std::vector<ScanRow> run_scan(const RunConfig &config);
/// alpha,e0_vqe,e1_vqe,e0_exact,e1_exact,overlap0,overlap1,status
std::string scan_csv(const std::vector<ScanRow> &rows);

/// Each command writes to `config.output` when set and to `out` otherwise,
/// returning kExitOk or kExitNonConvergence. Errors propagate as exceptions.
int cmd_run(const RunConfig &config, std::ostream &out);
int cmd_scan(const RunConfig &config, std::ostream &out);
int cmd_grad(const RunConfig &config, std::ostream &out);
int cmd_nac(const RunConfig &config, std::ostream &out);
int cmd_exact(const RunConfig &config, std::ostream &out);
/// Lint report of an FCIDUMP; kExitConfig when it has errors.
int cmd_validate(const std::filesystem::path &fcidump, std::ostream &out);

/// Loads the config (if any), applies overrides, runs `command` and maps
/// exceptions to exit codes with a message on `err`.
int dispatch(const std::string &command, const std::optional<std::filesystem::path> &config,
             const CommandOverrides &overrides, std::ostream &out, std::ostream &err);

} // namespace saoovqe
