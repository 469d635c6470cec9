#pragma once

#include <optional>
#include <vector>

#include "saoovqe/pauli.hpp"
#include "saoovqe/statevector.hpp"

namespace saoovqe {

struct EigenPair {
    double value = 0.0;
    StateVector vector;
};

/// Largest qubit count handled by dense diagonalization; beyond it the
/// solver switches to Lanczos.
inline constexpr int kDenseEigenMaxQubits = 12;

enum class EigenMethod { Auto, Dense, Lanczos };

/// The k lowest eigenpairs of a hermitian operator, ascending, with
/// orthonormal eigenvectors. Each vector's largest amplitude is made real
/// and positive so results are reproducible.
std::vector<EigenPair> exact_eigensolve(const PauliSum &op, int k,
                                        EigenMethod method = EigenMethod::Auto);

/// Fixed particle-number / spin-projection sector, optionally restricted to
/// a single total-spin multiplet (`two_s` = 2S, e.g. 0 for singlets).
struct Sector {
    int n_elec = 0;
    int two_sz = 0;
    std::optional<int> two_s;
};

/// k lowest eigenpairs of `op` restricted to a symmetry sector; vectors are
/// returned in the full 2^n space.
std::vector<EigenPair> sector_eigensolve(const PauliSum &op, const Sector &sector, int k);

/// Basis indices with the requested electron count and 2·Sz (interleaved
/// spin-orbital ordering).
std::vector<std::size_t> sector_basis(int n_qubits, int n_elec, int two_sz);

/// Multiplies a vector by the phase that makes its largest amplitude real
/// and positive.
void fix_phase(StateVector &v);

} // namespace saoovqe
