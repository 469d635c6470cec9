#include "saoovqe/operators.hpp"

#include <algorithm>
#include <set>

#include "saoovqe/error.hpp"

namespace saoovqe {

namespace {

PauliSum jw_ladder(int n_qubits, int mode, bool dagger) {
    if (mode < 0 || mode >= n_qubits) {
        throw DimensionError("ladder operator mode " + std::to_string(mode) +
                             " out of range for " + std::to_string(n_qubits) + " qubits");
    }
    const std::uint64_t chain = (1ull << mode) - 1;
    const std::uint64_t bit = 1ull << mode;
    PauliSum s(n_qubits);
    s.add(PauliString(n_qubits, bit, chain), 0.5);
    s.add(PauliString(n_qubits, bit, chain | bit), cplx(0.0, dagger ? -0.5 : 0.5));
    return s;
}

PauliSum adjoint(const PauliSum &a) {
    PauliSum out(a.n_qubits());
    for (const auto &[p, c] : a.terms()) {
        out.add(p, std::conj(c));
    }
    return out;
}

/// Spin-summed E_tu = Σ_σ a†_tσ a_uσ for every active pair.
std::vector<PauliSum> spin_summed_excitations(int n_orb) {
    const int nq = 2 * n_orb;
    std::vector<PauliSum> cre, ann;
    for (int s = 0; s < nq; ++s) {
        cre.push_back(jw_creation(nq, s));
        ann.push_back(jw_annihilation(nq, s));
    }
    std::vector<PauliSum> e(static_cast<std::size_t>(n_orb * n_orb), PauliSum(nq));
    for (int t = 0; t < n_orb; ++t) {
        for (int u = 0; u < n_orb; ++u) {
            PauliSum sum(nq);
            for (int sigma = 0; sigma < 2; ++sigma) {
                sum += pauli_mul(cre[spin_orbital(t, sigma)], ann[spin_orbital(u, sigma)]);
            }
            e[static_cast<std::size_t>(t * n_orb + u)] = pauli_simplify(sum);
        }
    }
    return e;
}

} // namespace

ActiveSpaceProblem build_active_space(const SpatialIntegrals &ints, int n_active_orb,
                                      int n_active_elec,
                                      const std::optional<std::vector<int>> &active_indices) {
    const int n = ints.n_orb;
    if (n_active_orb <= 0) {
        throw ConfigError("active orbital count must be positive");
    }
    if (n_active_orb > n) {
        throw DimensionError("active orbital count " + std::to_string(n_active_orb) +
                          " outside (0, " + std::to_string(n) + "]");
    }
    if (n_active_elec < 0 || n_active_elec > 2 * n_active_orb) {
        throw ConfigError("active electron count " + std::to_string(n_active_elec) +
                          " incompatible with " + std::to_string(n_active_orb) + " orbitals");
    }
    const int n_core_elec = ints.n_elec - n_active_elec;
    if (n_core_elec < 0 || n_core_elec % 2 != 0) {
        throw DimensionError("n_elec - n_active_elec must be even and non-negative");
    }
    const int n_inactive = n_core_elec / 2;

    ActiveSpaceProblem prob;
    prob.n_active_orb = n_active_orb;
    prob.n_active_elec = n_active_elec;
    prob.ms2 = ints.ms2;
    if (active_indices) {
        std::set<int> uniq(active_indices->begin(), active_indices->end());
        if (static_cast<int>(active_indices->size()) != n_active_orb ||
            uniq.size() != active_indices->size() || *uniq.begin() < 0 || *uniq.rbegin() >= n) {
            throw ConfigError("active index list must hold " + std::to_string(n_active_orb) +
                              " distinct orbitals in [0, " + std::to_string(n) + ")");
        }
        prob.active_indices = *active_indices;
    } else {
        if (n_inactive + n_active_orb > n) {
            throw DimensionError("active window out of range");
        }
        for (int p = 0; p < n_active_orb; ++p) {
            prob.active_indices.push_back(n_inactive + p);
        }
    }
    const std::set<int> active(prob.active_indices.begin(), prob.active_indices.end());
    for (int p = 0; p < n; ++p) {
        if (active.count(p)) {
            continue;
        }
        if (static_cast<int>(prob.inactive_indices.size()) < n_inactive) {
            prob.inactive_indices.push_back(p);
        } else {
            prob.virtual_indices.push_back(p);
        }
    }
    if (static_cast<int>(prob.inactive_indices.size()) != n_inactive) {
        throw DimensionError("not enough orbitals outside the active space for the core");
    }
    return rebuild_active_space(ints, prob);
}

ActiveSpaceProblem rebuild_active_space(const SpatialIntegrals &ints,
                                        const ActiveSpaceProblem &like) {
    if (like.n_orb() != ints.n_orb) {
        throw DimensionError("active-space partition covers " + std::to_string(like.n_orb()) +
                             " orbitals, integrals have " + std::to_string(ints.n_orb));
    }
    ActiveSpaceProblem prob = like;
    const auto &act = prob.active_indices;
    const auto &core = prob.inactive_indices;
    const int na = prob.n_active_orb;

    double e = ints.e_core;
    for (int i : core) {
        e += 2.0 * ints.h(i, i);
        for (int j : core) {
            e += 2.0 * ints.g(i, i, j, j) - ints.g(i, j, j, i);
        }
    }
    prob.e_frozen = e;

    prob.h_eff = Matrix::Zero(na, na);
    for (int t = 0; t < na; ++t) {
        for (int u = 0; u < na; ++u) {
            const int tt = act[t], uu = act[u];
            double v = ints.h(tt, uu);
            for (int i : core) {
                v += 2.0 * ints.g(tt, uu, i, i) - ints.g(tt, i, i, uu);
            }
            prob.h_eff(t, u) = v;
        }
    }
    prob.h_eff = 0.5 * (prob.h_eff + prob.h_eff.transpose());

    prob.g_act = SymmetricEri(static_cast<std::size_t>(na));
    for (int t = 0; t < na; ++t)
        for (int u = 0; u <= t; ++u)
            for (int v = 0; v < na; ++v)
                for (int w = 0; w <= v; ++w)
                    prob.g_act.at(t, u, v, w) = ints.g(act[t], act[u], act[v], act[w]);
    prob.ms2 = ints.ms2;
    return prob;
}

PauliSum jw_creation(int n_qubits, int mode) { return jw_ladder(n_qubits, mode, true); }

PauliSum jw_annihilation(int n_qubits, int mode) { return jw_ladder(n_qubits, mode, false); }

PauliSum jordan_wigner(const ActiveSpaceProblem &prob) {
    const int n = prob.n_active_orb;
    const int nq = prob.n_qubits();
    const auto e = spin_summed_excitations(n);
    auto E = [&](int t, int u) -> const PauliSum & {
        return e[static_cast<std::size_t>(t * n + u)];
    };

    PauliSum h = PauliSum::identity(nq, prob.e_frozen);
    // e_tu,vw = E_tu E_vw − δ_uv E_tw
    for (int t = 0; t < n; ++t) {
        for (int u = 0; u < n; ++u) {
            PauliSum right(nq);
            for (int v = 0; v < n; ++v) {
                for (int w = 0; w < n; ++w) {
                    const double g = prob.g_act(t, u, v, w);
                    if (g != 0.0) {
                        right += cplx(0.5 * g) * E(v, w);
                    }
                }
            }
            h += pauli_mul(E(t, u), right);
            double one_body = prob.h_eff(t, u);
            for (int v = 0; v < n; ++v) {
                one_body -= 0.5 * prob.g_act(t, v, v, u);
            }
            if (one_body != 0.0) {
                h += cplx(one_body) * E(t, u);
            }
        }
    }
    const PauliSum simplified = pauli_simplify(h);
    PauliSum out(nq);
    for (const auto &[p, c] : simplified.terms()) {
        out.add(p, c.real());
    }
    return out;
}

PauliSum number_operator(int n_qubits) {
    PauliSum s(n_qubits);
    for (int q = 0; q < n_qubits; ++q) {
        s += pauli_mul(jw_creation(n_qubits, q), jw_annihilation(n_qubits, q));
    }
    return pauli_simplify(s);
}

PauliSum sz_operator(int n_qubits) {
    PauliSum s(n_qubits);
    for (int q = 0; q < n_qubits; ++q) {
        const double sign = q % 2 == 0 ? 0.5 : -0.5;
        s += cplx(sign) * pauli_mul(jw_creation(n_qubits, q), jw_annihilation(n_qubits, q));
    }
    return pauli_simplify(s);
}

PauliSum s2_operator(int n_qubits) {
    const int n = n_qubits / 2;
    PauliSum splus(n_qubits), sminus(n_qubits);
    for (int p = 0; p < n; ++p) {
        splus += pauli_mul(jw_creation(n_qubits, spin_orbital(p, 0)),
                           jw_annihilation(n_qubits, spin_orbital(p, 1)));
        sminus += pauli_mul(jw_creation(n_qubits, spin_orbital(p, 1)),
                            jw_annihilation(n_qubits, spin_orbital(p, 0)));
    }
    const PauliSum sz = sz_operator(n_qubits);
    // S² = S− S+ + Sz (Sz + 1)
    return pauli_add(pauli_mul(sminus, splus),
                     pauli_mul(sz, pauli_add(sz, PauliSum::identity(n_qubits))));
}

PauliSum excitation_operator(int n_qubits, const Excitation &ex) {
    PauliSum t = PauliSum::identity(n_qubits);
    for (int c : ex.create) {
        t = pauli_mul(t, jw_creation(n_qubits, c));
    }
    for (int a : ex.annihilate) {
        t = pauli_mul(t, jw_annihilation(n_qubits, a));
    }
    return t;
}

std::vector<std::pair<PauliString, double>> excitation_to_pauli(int n_qubits,
                                                                const Excitation &ex) {
    const auto rank = ex.create.size();
    if (rank == 0 || rank > 2 || ex.annihilate.size() != rank) {
        throw ConfigError("excitation_to_pauli: expected a single or double excitation");
    }
    std::set<int> modes(ex.create.begin(), ex.create.end());
    modes.insert(ex.annihilate.begin(), ex.annihilate.end());
    if (modes.size() != 2 * rank) {
        throw ConfigError("excitation_to_pauli: spin-orbitals must be distinct");
    }
    const PauliSum t = excitation_operator(n_qubits, ex);
    PauliSum g = pauli_simplify(cplx(0.0, -1.0) * (t - adjoint(t)));
    std::vector<std::pair<PauliString, double>> out;
    for (const auto &[p, c] : g.terms()) {
        if (std::abs(c.imag()) > 1e-12) {
            throw NumericalError("excitation_to_pauli: generator is not anti-hermitian");
        }
        out.emplace_back(p, c.real());
    }
    if (out.empty()) {
        throw ConfigError("excitation_to_pauli: T - T^dagger vanishes");
    }
    return out;
}

} // namespace saoovqe
