#include "saoovqe/ansatz.hpp"

#include <bit>
#include <cmath>
#include <optional>
#include <string>

#include "saoovqe/error.hpp"

namespace saoovqe {

namespace {

/// Ladder operator on a basis index with the Jordan-Wigner sign, or nothing
/// when the result vanishes.
std::optional<std::pair<std::size_t, double>> ladder(std::size_t b, int mode, bool create) {
    const std::size_t bit = std::size_t{1} << mode;
    if (static_cast<bool>(b & bit) == create) {
        return std::nullopt;
    }
    const double sign = (std::popcount(b & (bit - 1)) & 1) ? -1.0 : 1.0;
    return std::make_pair(b ^ bit, sign);
}

int spin_of(int mode) { return mode % 2; }

} // namespace

std::vector<Generator> generate_excitations(int n_active_orb, int n_active_elec) {
    if (n_active_orb <= 0) {
        throw ConfigError("generate_excitations: empty active space");
    }
    if (n_active_elec < 0 || n_active_elec > 2 * n_active_orb) {
        throw ConfigError("generate_excitations: invalid electron count");
    }
    std::vector<Generator> out;
    for (int p = 0; p < n_active_orb; ++p) {
        for (int q = 0; q < p; ++q) {
            Generator g;
            for (int sigma = 0; sigma < 2; ++sigma) {
                g.excitations.push_back({{spin_orbital(p, sigma)}, {spin_orbital(q, sigma)}});
            }
            out.push_back(std::move(g));
        }
    }
    const int nq = 2 * n_active_orb;
    // Doubles a†_p a†_q a_s a_r with p > q, r > s, (p, q) > (r, s) and all
    // four modes distinct.
    for (int p = 0; p < nq; ++p)
        for (int q = 0; q < p; ++q)
            for (int r = 0; r <= p; ++r)
                for (int s = 0; s < r; ++s) {
                    if (r == p && s >= q) {
                        continue;
                    }
                    if (r == p || r == q || s == p || s == q) {
                        continue;
                    }
                    if (spin_of(p) + spin_of(q) != spin_of(r) + spin_of(s)) {
                        continue;
                    }
                    out.push_back(Generator{{Excitation{{p, q}, {r, s}}}});
                }
    return out;
}

AnsatzCircuit build_ansatz(const std::vector<Generator> &generators, int n_qubits,
                           int trotter_reps) {
    if (trotter_reps < 1) {
        throw ConfigError("trotter_reps must be at least 1");
    }
    AnsatzCircuit circ;
    circ.n_qubits = n_qubits;
    circ.n_parameters = static_cast<int>(generators.size());
    std::vector<Rotation> block;
    for (std::size_t k = 0; k < generators.size(); ++k) {
        if (generators[k].excitations.empty()) {
            throw ConfigError("generator " + std::to_string(k) + " has no excitations");
        }
        for (const auto &ex : generators[k].excitations) {
            for (const auto &[p, c] : excitation_to_pauli(n_qubits, ex)) {
                block.push_back({p, -2.0 * c / trotter_reps, static_cast<int>(k)});
            }
        }
    }
    for (int r = 0; r < trotter_reps; ++r) {
        circ.rotations.insert(circ.rotations.end(), block.begin(), block.end());
    }
    return circ;
}

void apply_ansatz_inplace(const AnsatzCircuit &circ, const Vector &theta, StateVector &state) {
    if (theta.size() != circ.n_parameters) {
        throw DimensionError("ansatz expects " + std::to_string(circ.n_parameters) +
                             " parameters, got " + std::to_string(theta.size()));
    }
    for (const auto &rot : circ.rotations) {
        apply_pauli_rotation_inplace(state, rot.pauli, rot.prefactor * theta(rot.parameter));
    }
}

StateVector apply_ansatz(const AnsatzCircuit &circ, const Vector &theta,
                         const StateVector &initial) {
    StateVector out = initial;
    apply_ansatz_inplace(circ, theta, out);
    return out;
}

EnsembleSpec prepare_initial_states(const ActiveSpaceProblem &prob, double w0, double w1) {
    const int ne = prob.n_active_elec;
    const int no = prob.n_active_orb;
    if (ne % 2 != 0) {
        throw ConfigError("open-shell active spaces are not supported");
    }
    if (ne < 2 || ne / 2 >= no) {
        throw ConfigError("ensemble needs at least one occupied and one empty active orbital");
    }
    if (!(w0 > 0.0) || !(w1 > 0.0) || std::abs(w0 + w1 - 1.0) > 1e-12) {
        throw ConfigError("ensemble weights must be positive and sum to 1");
    }
    const int nq = prob.n_qubits();
    std::size_t ref = 0;
    for (int s = 0; s < ne; ++s) {
        ref |= std::size_t{1} << s;
    }
    EnsembleSpec ens;
    ens.w0 = w0;
    ens.w1 = w1;
    ens.state_a = StateVector(nq);
    ens.state_a[ref] = 1.0;
    ens.state_b = StateVector(nq);
    const int homo = ne / 2 - 1, lumo = ne / 2;
    for (int sigma = 0; sigma < 2; ++sigma) {
        auto a = ladder(ref, spin_orbital(homo, sigma), false);
        auto c = ladder(a->first, spin_orbital(lumo, sigma), true);
        ens.state_b[c->first] += a->second * c->second / std::sqrt(2.0);
    }
    return ens;
}

} // namespace saoovqe
