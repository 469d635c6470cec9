#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "saoovqe/orbital_opt.hpp"
#include "saoovqe/response.hpp"

namespace saoovqe {

struct ScanSettings {
    std::optional<std::filesystem::path> manifest;
    /// Seed each point with the previous point's θ and orbitals.
    bool warm_start = true;
    /// Also solve every point with the exact active-space solver.
    bool compare_exact = true;
};

struct ResponseSettings {
    std::optional<std::filesystem::path> stencil;
    std::optional<std::filesystem::path> derivatives;
    std::optional<std::filesystem::path> connection;
    /// Add dκ/dx terms to the Hellmann-Feynman state gradients and NACs.
    bool orbital_response = true;
    double gap_floor = kGapFloor;
    ResponseOptions options;
};

/// Fully resolved run configuration. Paths are absolute.
struct RunConfig {
    std::optional<std::filesystem::path> fcidump;
    /// Qubit operator file for `exact` without integrals.
    std::optional<std::filesystem::path> operator_file;
    int n_active_elec = 0;
    int n_active_orb = 0;
    std::string ansatz = "guccsd";
    SaooVqeOptions saoo;
    std::optional<std::filesystem::path> output;
    ScanSettings scan;
    ResponseSettings response;
    /// Worker threads for scans and stencils.
    int jobs = 1;
    /// Eigenvalues printed by `exact`.
    int exact_roots = 4;

    /// Domain checks and the warm-start / parallel exclusivity; file
    /// existence is checked for every referenced path.
    void validate() const;
    /// Active space must fit the integrals.
    void check_against(const SpatialIntegrals &ints) const;
};

/// TOML text → RunConfig; relative paths resolve against `base_dir`.
/// Unknown keys are rejected. Throws ConfigError (ParseError for syntax).
RunConfig parse_config(const std::string &text, const std::filesystem::path &base_dir);
RunConfig load_config(const std::filesystem::path &path);

/// Every field with defaults materialized, as JSON.
nlohmann::json config_to_json(const RunConfig &config);
/// TOML text that parse_config maps back to the same configuration.
std::string config_to_toml(const RunConfig &config);

} // namespace saoovqe
