#pragma once

#include <string>

#include "saoovqe/operators.hpp"
#include "saoovqe/statevector.hpp"
#include "saoovqe/tensor.hpp"

namespace saoovqe {

enum class RdmKind { State, Transition, Averaged };

std::string to_string(RdmKind k);

/// Spin-summed reduced density matrices over the active orbitals.
/// Gamma(p, q, r, s) pairs (pq) and (rs) as one-electron indices
/// (chemists' ordering): ⟨bra| Σ_στ a†_pσ a†_rτ a_sτ a_qσ |ket⟩.
struct RdmSet {
    Matrix gamma;
    Tensor4 Gamma;
    int bra_index = 0;
    int ket_index = 0;
    RdmKind kind = RdmKind::State;
};

/// γ_pq = ⟨bra| Σ_σ a†_pσ a_qσ |ket⟩ (real part; wavefunctions are real).
Matrix one_rdm(const StateVector &bra, const StateVector &ket, int n_active_orb);

/// Γ_pq,rs = ⟨bra| Σ_στ a†_pσ a†_rτ a_sτ a_qσ |ket⟩.
Tensor4 two_rdm(const StateVector &bra, const StateVector &ket, int n_active_orb);

RdmSet make_rdms(const StateVector &bra, const StateVector &ket, int n_active_orb,
                 int bra_index, int ket_index);

/// w0·A + w1·B for two state RDMs.
RdmSet average_rdms(const RdmSet &a, const RdmSet &b, double w0, double w1);

/// e_frozen + Σ h_eff γ + ½ Σ (tu|vw) Γ. Rejects transition RDMs.
double energy_from_rdms(const ActiveSpaceProblem &prob, const RdmSet &rdms);

/// ⟨Ψ_I|H|Ψ_J⟩ = Σ h_eff γ^IJ + ½ Σ (tu|vw) Γ^IJ for orthogonal I, J.
double transition_energy_element(const ActiveSpaceProblem &prob, const Matrix &gamma,
                                 const Tensor4 &Gamma);

} // namespace saoovqe
