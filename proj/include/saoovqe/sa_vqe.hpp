#pragma once

#include <optional>
#include <vector>

#include "saoovqe/ansatz.hpp"
#include "saoovqe/operators.hpp"
#include "saoovqe/optimizers.hpp"
#include "saoovqe/statevector.hpp"

namespace saoovqe {

/// Resolved two-state solution at one parameter vector.
struct SaVqeState {
    Vector theta;
    double e_sa = 0.0;
    /// h_sub(k, l) = ⟨φ_k(θ)|H|φ_l(θ)⟩ over the evolved ensemble states.
    Eigen::Matrix2d h_sub = Eigen::Matrix2d::Zero();
    double resolution_angle = 0.0;
    double e0 = 0.0;
    double e1 = 0.0;
    StateVector psi0;
    StateVector psi1;
    bool converged = false;
    int iterations = 0;
    std::vector<IterationRecord> history;
};

/// w0·⟨φ_A(θ)|H|φ_A(θ)⟩ + w1·⟨φ_B(θ)|H|φ_B(θ)⟩.
double sa_energy(const Vector &theta, const AnsatzCircuit &circ, const EnsembleSpec &ens,
                 const PauliSum &h);
double sa_energy(const Vector &theta, const AnsatzCircuit &circ, const EnsembleSpec &ens,
                 const CompiledOperator &h);

/// ∂E_SA/∂θ by the parameter-shift rule: each rotation j with angle θ_k·s_j
/// contributes s_j·[E(+π/2 at j) − E(−π/2 at j)]/2 to component k.
Vector circuit_gradient(const Vector &theta, const AnsatzCircuit &circ, const EnsembleSpec &ens,
                        const PauliSum &h);
Vector circuit_gradient(const Vector &theta, const AnsatzCircuit &circ, const EnsembleSpec &ens,
                        const CompiledOperator &h);

/// Rotation angle of the 2×2 subspace eigenproblem: φ* = ½·atan(2h01/(h00 − h11))
/// in (−π/4, π/4], π/4 for a degenerate diagonal with h01 ≠ 0.
double resolution_angle(const Eigen::Matrix2d &h_sub);

/// Diagonalizes H in the span of the two evolved states:
/// psi0 = cosφ·φ_A + sinφ·φ_B, psi1 = −sinφ·φ_A + cosφ·φ_B, swapped when
/// needed so that e0 ≤ e1.
SaVqeState state_resolution(const Vector &theta, const AnsatzCircuit &circ,
                            const EnsembleSpec &ens, const PauliSum &h);
SaVqeState resolve_states(const StateVector &phi_a, const StateVector &phi_b,
                          const CompiledOperator &h, double w0, double w1);

struct SaVqeOptions {
    OptimizerOptions optimizer;
    int trotter_reps = 1;
    double w0 = 0.5;
    double w1 = 0.5;
};

/// Minimizes the ensemble energy of `prob` starting from theta0 (zeros when
/// absent) and returns the resolved states. A run that exhausts its
/// iterations returns the best point with converged = false.
SaVqeState run_sa_vqe(const ActiveSpaceProblem &prob, const SaVqeOptions &options,
                      const std::optional<Vector> &theta0 = std::nullopt);

/// Two lowest eigenstates of the embedded Hamiltonian in the spin-singlet
/// sector with n_active_elec electrons; fills e0, e1, psi0, psi1, h_sub and
/// e_sa (weights w0, w1). theta stays empty.
SaVqeState solve_exact(const ActiveSpaceProblem &prob, double w0 = 0.5, double w1 = 0.5);

} // namespace saoovqe
