#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "saoovqe/fcidump.hpp"
#include "saoovqe/pauli.hpp"

namespace saoovqe {

/// Spin-orbital → qubit map: qubit 2p + σ, σ = 0 for α and 1 for β.
constexpr int spin_orbital(int p, int sigma) { return 2 * p + sigma; }

/// Complete-active-space Hamiltonian with the inactive core folded into
/// `h_eff` and `e_frozen`. Index lists refer to the full orbital basis and
/// partition [0, n_orb).
struct ActiveSpaceProblem {
    int n_active_orb = 0;
    int n_active_elec = 0;
    int ms2 = 0;
    std::vector<int> active_indices;
    std::vector<int> inactive_indices;
    std::vector<int> virtual_indices;
    Matrix h_eff;
    SymmetricEri g_act;
    double e_frozen = 0.0;

    int n_qubits() const { return 2 * n_active_orb; }
    int n_orb() const {
        return static_cast<int>(active_indices.size() + inactive_indices.size() +
                                virtual_indices.size());
    }
};

/// Builds the embedded active-space problem. With no explicit active list
/// the window starts right after the (n_elec − n_active_elec)/2 inactive
/// orbitals, i.e. it straddles the Fermi level.
ActiveSpaceProblem build_active_space(const SpatialIntegrals &ints, int n_active_orb,
                                      int n_active_elec,
                                      const std::optional<std::vector<int>> &active_indices = {});

/// Same partition as `like`, recomputed for new integrals.
ActiveSpaceProblem rebuild_active_space(const SpatialIntegrals &ints,
                                        const ActiveSpaceProblem &like);

/// Jordan-Wigner images of single ladder operators:
/// a†_s = (Π_{k<s} Z_k)(X_s − iY_s)/2 and a_s = (Π_{k<s} Z_k)(X_s + iY_s)/2.
PauliSum jw_creation(int n_qubits, int mode);
PauliSum jw_annihilation(int n_qubits, int mode);

/// Qubit Hamiltonian H = e_frozen + Σ h_eff_tu E_tu + ½ Σ (tu|vw) e_tu,vw.
PauliSum jordan_wigner(const ActiveSpaceProblem &prob);

/// Particle number, spin projection and total spin operators on n qubits
/// (interleaved spin-orbital order).
PauliSum number_operator(int n_qubits);
PauliSum sz_operator(int n_qubits);
PauliSum s2_operator(int n_qubits);

/// T = a†_{create[0]} a†_{create[1]} ... a_{annihilate[0]} a_{annihilate[1]} ...
/// over spin-orbital (qubit) indices. Single and double excitations only.
struct Excitation {
    std::vector<int> create;
    std::vector<int> annihilate;

    friend bool operator==(const Excitation &, const Excitation &) = default;
    friend auto operator<=>(const Excitation &, const Excitation &) = default;
};

/// JW image of T for the given excitation.
PauliSum excitation_operator(int n_qubits, const Excitation &ex);

/// Pauli decomposition of −i(T − T†): real coefficients, strings in
/// lexicographic order. Throws ConfigError for anything that is not a
/// single or double excitation over distinct spin-orbitals.
std::vector<std::pair<PauliString, double>> excitation_to_pauli(int n_qubits,
                                                                const Excitation &ex);

} // namespace saoovqe
