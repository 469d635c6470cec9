#pragma once

#include <vector>

#include "saoovqe/operators.hpp"
#include "saoovqe/pauli.hpp"
#include "saoovqe/statevector.hpp"
#include "saoovqe/tensor.hpp"

namespace saoovqe {

/// One variational parameter: a set of excitations whose anti-hermitian
/// parts T − T† are summed and scaled by the same θ. Spin-tied singles carry
/// two excitations (α and β), doubles carry one.
struct Generator {
    std::vector<Excitation> excitations;

    friend bool operator==(const Generator &, const Generator &) = default;
};

/// Generalized singles (one tied α/β parameter per spatial pair p > q) then
/// generalized doubles over distinct spin-orbital quadruples with ΔSz = 0,
/// each counted once (T and T† share a generator).
std::vector<Generator> generate_excitations(int n_active_orb, int n_active_elec);

struct Rotation {
    PauliString pauli;
    /// Gate angle = prefactor · θ[parameter].
    double prefactor = 0.0;
    int parameter = 0;
};

/// Ordered sequence of Pauli rotations exp(−i·angle/2·P).
struct AnsatzCircuit {
    int n_qubits = 0;
    int n_parameters = 0;
    std::vector<Rotation> rotations;
};

/// First-order Trotterized exp(Σ θ_k (T_k − T_k†)). Every Pauli string of a
/// generator becomes one rotation with prefactor −2c_j / reps, where c_j
/// are the coefficients of −i(T − T†); the block is repeated `reps` times.
/// Strings within one generator commute, so with one generator the circuit
/// equals the exact exponential.
AnsatzCircuit build_ansatz(const std::vector<Generator> &generators, int n_qubits,
                           int trotter_reps = 1);

/// Applies the rotations in order.
StateVector apply_ansatz(const AnsatzCircuit &circ, const Vector &theta,
                         const StateVector &initial);
void apply_ansatz_inplace(const AnsatzCircuit &circ, const Vector &theta, StateVector &state);

/// Two orthogonal reference states and their ensemble weights.
struct EnsembleSpec {
    double w0 = 0.5;
    double w1 = 0.5;
    StateVector state_a;
    StateVector state_b;
};

/// state_a: closed-shell determinant with the lowest n_active_elec/2 active
/// orbitals doubly occupied. state_b: singlet HOMO→LUMO single excitation
/// (a†_Lα a_Hα + a†_Lβ a_Hβ)|state_a⟩/√2.
EnsembleSpec prepare_initial_states(const ActiveSpaceProblem &prob, double w0 = 0.5,
                                    double w1 = 0.5);

} // namespace saoovqe
