#pragma once

#include <complex>
#include <cstdint>
#include <string_view>
#include <vector>

#include "saoovqe/pauli.hpp"

namespace saoovqe {

/// Amplitudes over 2^n computational basis states. Little-endian: bit k of
/// the amplitude index is the occupation of qubit k.
class StateVector {
  public:
    StateVector() = default;
    /// All-zero amplitudes (not normalized); fill before use.
    explicit StateVector(int n_qubits);
    StateVector(int n_qubits, std::vector<cplx> amplitudes);

    int n_qubits() const noexcept { return n_; }
    std::size_t size() const noexcept { return amps_.size(); }

    cplx &operator[](std::size_t i) { return amps_[i]; }
    const cplx &operator[](std::size_t i) const { return amps_[i]; }
    std::vector<cplx> &amplitudes() noexcept { return amps_; }
    const std::vector<cplx> &amplitudes() const noexcept { return amps_; }

    double norm() const;
    void normalize();

    friend bool operator==(const StateVector &, const StateVector &) = default;

  private:
    int n_ = 0;
    std::vector<cplx> amps_;
};

/// Basis state from an occupation string; character k is qubit k.
StateVector init_basis_state(int n_qubits, std::string_view occupation);

/// |ψ⟩ ← P|ψ⟩ in O(2^n) without forming a matrix.
StateVector apply_pauli(const StateVector &state, const PauliString &p);
void apply_pauli_inplace(StateVector &state, const PauliString &p);

/// |ψ⟩ ← exp(−iθ/2·P)|ψ⟩ = cos(θ/2)|ψ⟩ − i sin(θ/2) P|ψ⟩.
StateVector apply_pauli_rotation(const StateVector &state, const PauliString &p, double theta);
void apply_pauli_rotation_inplace(StateVector &state, const PauliString &p, double theta);

/// Op|ψ⟩ for a general PauliSum.
StateVector apply_operator(const PauliSum &op, const StateVector &state);

/// ⟨a|b⟩.
cplx inner(const StateVector &a, const StateVector &b);

/// ⟨ψ|Op|ψ⟩ for hermitian Op. Throws NumericalError for non-real
/// coefficients or an imaginary residual above 1e-10.
double expectation(const StateVector &state, const PauliSum &op);

/// ⟨bra|Op|ket⟩.
cplx transition_element(const StateVector &bra, const PauliSum &op, const StateVector &ket);

/// A PauliSum regrouped by X-mask: for each distinct mask, the diagonal
/// factor Σ_z c·i^{|x&z|}(−1)^{|b&z|} is tabulated over basis index b, so
/// applying the operator costs (#masks)·2^n.
class CompiledOperator {
  public:
    CompiledOperator() = default;
    explicit CompiledOperator(const PauliSum &op);

    int n_qubits() const noexcept { return n_; }
    void apply(const StateVector &in, StateVector &out) const;
    StateVector apply(const StateVector &in) const;
    cplx matrix_element(const StateVector &bra, const StateVector &ket) const;
    double expectation(const StateVector &state) const;

  private:
    struct Block {
        std::uint64_t x;
        std::vector<cplx> diag;
    };
    int n_ = 0;
    std::vector<Block> blocks_;
};

} // namespace saoovqe
