#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "saoovqe/fcidump.hpp"
#include "saoovqe/orbital_opt.hpp"

namespace saoovqe {

enum class Tracking { PhaseMatched, None };

std::string to_string(Tracking t);
Tracking parse_tracking(const std::string &name);

/// Integrals at a central geometry and at ±step along each coordinate, all
/// in the central geometry's molecular-orbital basis.
struct GeometryStencil {
    SpatialIntegrals center;
    double step = 1e-3;
    Tracking tracking = Tracking::PhaseMatched;
    /// Coordinate labels in manifest order.
    std::vector<std::string> coordinates;
    /// (label, +1 / −1) → integrals.
    std::map<std::pair<std::string, int>, SpatialIntegrals> displaced;

    /// Throws ConfigError for a coordinate missing one side and
    /// DimensionError for mismatched orbital counts.
    void validate() const;
};

/// Stencil manifest: `step <bohr>`, `tracking <phase-matched|none>`,
/// `center <path> <convention>` and `<label>+` / `<label>-` entries in the
/// derivative-manifest layout.
GeometryStencil read_stencil(const std::filesystem::path &manifest);

/// Overlap magnitude below which a state cannot be matched.
inline constexpr double kTrackingThreshold = 0.5;
inline constexpr double kGapFloor = 1e-6;

/// Two resolved states at a displaced geometry, matched to the center.
struct TrackedStates {
    double e0 = 0.0;
    double e1 = 0.0;
    double e_sa = 0.0;
    StateVector psi0;
    StateVector psi1;
    /// ⟨Ψ_I(center)|Ψ_I(here)⟩ after matching.
    double overlap0 = 0.0;
    double overlap1 = 0.0;
    bool swapped = false;
    bool ambiguous = false;
    bool converged = false;
};

/// Reorders and re-phases (psi0, psi1) against reference states.
TrackedStates track_states(const StateVector &ref0, const StateVector &ref1, double e0, double e1,
                           StateVector psi0, StateVector psi1, Tracking tracking);

struct StencilSolution {
    SaooVqeResult center;
    std::vector<std::string> coordinates;
    /// points[k] = {+step, −step} for coordinates[k].
    std::vector<std::pair<TrackedStates, TrackedStates>> points;
    double step = 0.0;
};

/// Runs the center (unless given) and every displaced geometry. With
/// `relax_orbitals` each point is a full SA-OO run warm-started from the
/// center; otherwise displaced integrals are rotated by the center's orbital
/// rotation and only the active-space problem is re-solved. `jobs` > 1 runs
/// points on worker threads.
StencilSolution solve_stencil(const GeometryStencil &stencil, int n_active_elec,
                              int n_active_orb, const SaooVqeOptions &options,
                              bool relax_orbitals,
                              const std::optional<SaooVqeResult> &center = std::nullopt,
                              int jobs = 1);

struct GradientRow {
    std::string coordinate;
    double de0 = 0.0;
    double de1 = 0.0;
    double de_sa = 0.0;
    std::string flags;
};

/// Central differences of the tracked energies over a relaxed stencil.
std::vector<GradientRow> fd_gradient(const StencilSolution &solution);
std::vector<GradientRow> fd_gradient(const GeometryStencil &stencil, int n_active_elec,
                                     int n_active_orb, const SaooVqeOptions &options,
                                     int jobs = 1);

/// X_pq = ⟨φ_p(center)|∂χ_q/∂x⟩: motion of the fixed-orbital frame χ along
/// one coordinate, antisymmetric, in the frame of the derivative integrals.
struct FrameConnection {
    std::string coordinate_label;
    Matrix x;
};

/// Lines `<label> <p> <q> <value>` with 1-based p > q; '#' starts a comment.
std::vector<FrameConnection> read_connection(const std::filesystem::path &path, int n_orb);

/// dκ/dx on the nonredundant pairs (active-active excluded) from the coupled
/// orbital/active-space response of the SA energy: H dκ/dx = −∂g/∂x, with H
/// and ∂g/∂x built by central differences of the orbital gradient with the
/// active space re-solved at every point.
struct OrbitalResponse {
    OrbitalPairs pairs;
    std::vector<std::string> coordinates;
    /// n_pairs × n_coordinates.
    Matrix dkappa;
};

struct ResponseOptions {
    double kappa_step = 1e-3;
    double coordinate_step = 1e-3;
    /// Circuit-gradient tolerance of the re-solved VQE points.
    double tol_grad = 1e-9;
    int jobs = 1;
};

OrbitalResponse solve_orbital_response(const SaooVqeResult &result,
                                       const std::vector<DerivativeIntegralSet> &derivs,
                                       const SaooVqeOptions &options,
                                       const ResponseOptions &response = {});

/// de_core + Σ γ̃ dh' + ½ Σ Γ̃ dg' with dh' = Uᵀ dh U (U = total rotation):
/// exact for the SA energy at joint stationarity. State entries add
/// Σ G^I_pq dκ_pq/dx when a response is given and omit it otherwise.
std::vector<GradientRow> hf_gradient(const SaooVqeResult &result,
                                     const std::vector<DerivativeIntegralSet> &derivs,
                                     const OrbitalResponse *response = nullptr);

enum class NacMethod { HellmannFeynman, FdOverlap };

std::string to_string(NacMethod m);

struct NacResult {
    std::vector<std::string> coordinates;
    /// d_IJ per coordinate (1/bohr); NaN when withheld. Sum of the terms below
    /// that were requested.
    Vector d01;
    /// ⟨bra|∂H|ket⟩/ΔE with fixed orbitals.
    Vector d_ci;
    /// Σ G^{bra,ket}_pq dκ_pq/dx / ΔE; zero unless a response was given.
    Vector d_response;
    /// Σ γ^{bra,ket}_pq X_pq; zero unless a connection was given.
    Vector d_frame;
    NacMethod method = NacMethod::HellmannFeynman;
    double e_gap = 0.0;
    bool divergent = false;
    std::vector<std::string> flags;
};

/// Optional contributions beyond the fixed-orbital term.
struct NacTerms {
    const OrbitalResponse *response = nullptr;
    const std::vector<FrameConnection> *connection = nullptr;
};

/// ⟨Ψ_bra|∂H|Ψ_ket⟩ / (E_ket − E_bra) from transition RDMs; bra, ket ∈ {0, 1}.
/// With `terms` filled in, adds the orbital-response and frame-motion parts,
/// which together give ⟨Ψ_bra|∂Ψ_ket⟩ of the orbital-optimized states.
NacResult hf_nac(const SaooVqeResult &result, const std::vector<DerivativeIntegralSet> &derivs,
                 int bra = 0, int ket = 1, double gap_floor = kGapFloor,
                 const NacTerms &terms = {});

/// Antisymmetrized central difference over a fixed-orbital stencil solution:
/// [⟨I(c)|J(+h)⟩ − ⟨I(c)|J(−h)⟩ − ⟨J(c)|I(+h)⟩ + ⟨J(c)|I(−h)⟩]/(4h) with
/// I = bra, J = ket. d_IJ = −d_JI and d_II = 0 hold exactly.
NacResult fd_overlap_nac(const StencilSolution &solution, int bra = 0, int ket = 1);
NacResult fd_overlap_nac(const GeometryStencil &stencil, int n_active_elec, int n_active_orb,
                         const SaooVqeOptions &options, int jobs = 1);

/// coordinate_label,dE0,dE1,dE_SA,d01_hf,d01_fd,flags, followed by
/// d01_ci,d01_response,d01_frame when `hf` carries its decomposition.
/// d01_fd is the fixed-orbital estimate and compares with d01_ci. Any of
/// the inputs may be empty; missing values are written as empty fields.
std::string response_csv(const std::vector<std::string> &coordinates,
                         const std::vector<GradientRow> &grad, const NacResult *hf,
                         const NacResult *fd);

} // namespace saoovqe
