#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "saoovqe/fcidump.hpp"
#include "saoovqe/operators.hpp"
#include "saoovqe/rdm.hpp"
#include "saoovqe/sa_vqe.hpp"

namespace saoovqe {

using OrbitalPairs = std::vector<std::pair<int, int>>;

/// Antisymmetric rotation generator restricted to a set of (p, q), p > q.
struct OrbitalRotation {
    Matrix kappa;
    OrbitalPairs nonredundant_pairs;
};

/// Inactive-active, inactive-virtual and active-virtual pairs (p > q);
/// active-active pairs too when requested.
OrbitalPairs nonredundant_pairs(const ActiveSpaceProblem &partition,
                                bool include_active_active = false);

/// U = exp(−κ) for antisymmetric κ.
Matrix rotation_matrix(const Matrix &kappa);

/// h ← Uᵀ h U, (pq|rs) ← Σ U U U U (ab|cd); e_core unchanged.
SpatialIntegrals transform_integrals(const SpatialIntegrals &ints, const Matrix &u);
/// transform_integrals with U = exp(−κ).
SpatialIntegrals rotate_integrals(const SpatialIntegrals &ints, const Matrix &kappa);

/// Active-space RDMs embedded in the full orbital space: γ̃ gets 2 on the
/// inactive diagonal; Γ̃ gets the closed-shell inactive block and the
/// Coulomb/exchange couplings between inactive and active orbitals. Both are
/// symmetrized over the index permutations the integrals are invariant under.
/// `overlap` = ⟨bra|ket⟩ scales the pure-core parts (0 for transition RDMs).
struct FullDensity {
    Matrix gamma;
    Tensor4 Gamma;
};

FullDensity extend_density(const Matrix &gamma, const Tensor4 &Gamma,
                           const ActiveSpaceProblem &partition, double overlap = 1.0);

/// e_core + Σ γ̃ h + ½ Σ Γ̃ (pq|rs); `core_weight` multiplies e_core.
double energy_from_density(const SpatialIntegrals &ints, const FullDensity &d,
                           double core_weight = 1.0);

/// F_pq = Σ_r γ̃_qr h_pr + Σ_rst Γ̃_qr,st (pr|st).
Matrix generalized_fock(const SpatialIntegrals &ints, const FullDensity &d);

/// dE/dκ_pq at κ = 0 with U = exp(−κ): G_pq = 2(F_qp − F_pq) for the listed
/// pairs, G_qp = −G_pq, zero elsewhere.
Matrix orbital_gradient(const SpatialIntegrals &ints, const FullDensity &d,
                        const OrbitalPairs &pairs);
Matrix orbital_gradient(const SpatialIntegrals &ints, const RdmSet &sa_rdms,
                        const ActiveSpaceProblem &partition, bool include_active_active = false);

/// Truncated conjugate gradient on H κ = −g (Steihaug): stops at the trust
/// radius, or falls back to a scaled steepest-descent step when negative
/// curvature shows up. Vectors live on the nonredundant pairs.
Vector orbital_newton_step(const Vector &grad, const std::function<Vector(const Vector &)> &hess_apply,
                           double trust_radius, double cg_tol = 1e-8);

Vector pack_pairs(const Matrix &m, const OrbitalPairs &pairs);
Matrix unpack_pairs(const Vector &v, const OrbitalPairs &pairs, int n_orb);

enum class Solver { Vqe, Exact };

std::string to_string(Solver s);
Solver parse_solver(const std::string &name);

struct SaooVqeOptions {
    Solver solver = Solver::Vqe;
    SaVqeOptions vqe;
    std::optional<std::vector<int>> active_indices;
    bool include_active_active = false;
    bool optimize_orbitals = true;
    int max_macro_iters = 200;
    double tol_orbital_grad = 1e-6;
    double tol_energy = 1e-9;
    double trust_radius = 0.3;
    /// Step of the finite-difference Hessian-vector products.
    double hessian_fd_step = 1e-5;
};

struct MacroRecord {
    int iteration = 0;
    double e_sa = 0.0;
    double e0 = 0.0;
    double e1 = 0.0;
    double orbital_grad = 0.0;
    double circuit_grad = 0.0;
    double step_norm = 0.0;
};

struct SaooVqeResult {
    double e0 = 0.0;
    double e1 = 0.0;
    double e_sa = 0.0;
    double w0 = 0.5;
    double w1 = 0.5;
    Vector theta;
    /// Orthogonal U with final integrals = transform_integrals(original, U).
    Matrix total_rotation;
    SpatialIntegrals integrals;
    ActiveSpaceProblem problem;
    SaVqeState states;
    RdmSet rdm0;
    RdmSet rdm1;
    RdmSet rdm_sa;
    RdmSet rdm01;
    double resolution_angle = 0.0;
    double orbital_grad_norm = 0.0;
    double circuit_grad_norm = 0.0;
    bool converged = false;
    std::vector<MacroRecord> history;
};

struct WarmStart {
    Vector theta;
    Matrix rotation;
};

/// Resolved states of one active-space problem with the configured solver.
SaVqeState solve_active_space(const ActiveSpaceProblem &prob, const SaooVqeOptions &options,
                              const std::optional<Vector> &theta0 = std::nullopt);

/// Alternates circuit optimization and orbital Newton steps until both
/// gradients fall below the tolerance and the SA energy stops changing.
SaooVqeResult run_sa_oo_vqe(const SpatialIntegrals &ints, int n_active_elec, int n_active_orb,
                            const SaooVqeOptions &options,
                            const std::optional<WarmStart> &warm = std::nullopt);

/// Fills RDMs and energies of a result from resolved states (no orbital
/// optimization); used by fixed-orbital runs.
SaooVqeResult fixed_orbital_result(const SpatialIntegrals &ints, const ActiveSpaceProblem &prob,
                                   const SaVqeState &states, double w0, double w1);

} // namespace saoovqe
