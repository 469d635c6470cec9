#include "saoovqe/rdm.hpp"

#include <bit>

#include "saoovqe/error.hpp"

namespace saoovqe {

namespace {

void check_pair(const StateVector &bra, const StateVector &ket, int n_orb) {
    if (bra.n_qubits() != ket.n_qubits() || ket.n_qubits() != 2 * n_orb) {
        throw DimensionError("RDM: states must both have 2·n_active_orb qubits");
    }
}

/// a_mode (create = false) or a†_mode on basis index b; sign 0 when the
/// result vanishes. Sign is the Jordan-Wigner parity of lower modes.
inline double ladder(std::size_t &b, int mode, bool create) {
    const std::size_t bit = std::size_t{1} << mode;
    if (static_cast<bool>(b & bit) == create) {
        return 0.0;
    }
    const double sign = (std::popcount(b & (bit - 1)) & 1) ? -1.0 : 1.0;
    b ^= bit;
    return sign;
}

} // namespace

std::string to_string(RdmKind k) {
    switch (k) {
    case RdmKind::State:
        return "state";
    case RdmKind::Transition:
        return "transition";
    case RdmKind::Averaged:
        return "averaged";
    }
    return "?";
}

Matrix one_rdm(const StateVector &bra, const StateVector &ket, int n_orb) {
    check_pair(bra, ket, n_orb);
    Matrix g = Matrix::Zero(n_orb, n_orb);
    for (std::size_t b = 0; b < ket.size(); ++b) {
        const cplx amp = ket[b];
        if (amp == cplx{}) {
            continue;
        }
        for (int q = 0; q < n_orb; ++q)
            for (int p = 0; p < n_orb; ++p)
                for (int s = 0; s < 2; ++s) {
                    std::size_t c = b;
                    double sign = ladder(c, spin_orbital(q, s), false);
                    if (sign == 0.0) {
                        continue;
                    }
                    sign *= ladder(c, spin_orbital(p, s), true);
                    if (sign != 0.0) {
                        g(p, q) += sign * (std::conj(bra[c]) * amp).real();
                    }
                }
    }
    return g;
}

Tensor4 two_rdm(const StateVector &bra, const StateVector &ket, int n_orb) {
    check_pair(bra, ket, n_orb);
    const auto n = static_cast<std::size_t>(n_orb);
    Tensor4 G(n);
    for (std::size_t b = 0; b < ket.size(); ++b) {
        const cplx amp = ket[b];
        if (amp == cplx{}) {
            continue;
        }
        // a†_pσ a†_rτ a_sτ a_qσ applied right to left.
        for (int q = 0; q < n_orb; ++q)
            for (int sg = 0; sg < 2; ++sg) {
                std::size_t b1 = b;
                const double s1 = ladder(b1, spin_orbital(q, sg), false);
                if (s1 == 0.0) {
                    continue;
                }
                for (int s = 0; s < n_orb; ++s)
                    for (int tau = 0; tau < 2; ++tau) {
                        std::size_t b2 = b1;
                        const double s2 = ladder(b2, spin_orbital(s, tau), false);
                        if (s2 == 0.0) {
                            continue;
                        }
                        for (int r = 0; r < n_orb; ++r) {
                            std::size_t b3 = b2;
                            const double s3 = ladder(b3, spin_orbital(r, tau), true);
                            if (s3 == 0.0) {
                                continue;
                            }
                            for (int p = 0; p < n_orb; ++p) {
                                std::size_t b4 = b3;
                                const double s4 = ladder(b4, spin_orbital(p, sg), true);
                                if (s4 == 0.0) {
                                    continue;
                                }
                                G(p, q, r, s) +=
                                    s1 * s2 * s3 * s4 * (std::conj(bra[b4]) * amp).real();
                            }
                        }
                    }
            }
    }
    return G;
}

RdmSet make_rdms(const StateVector &bra, const StateVector &ket, int n_orb, int bra_index,
                 int ket_index) {
    RdmSet r;
    r.gamma = one_rdm(bra, ket, n_orb);
    r.Gamma = two_rdm(bra, ket, n_orb);
    r.bra_index = bra_index;
    r.ket_index = ket_index;
    r.kind = bra_index == ket_index ? RdmKind::State : RdmKind::Transition;
    return r;
}

RdmSet average_rdms(const RdmSet &a, const RdmSet &b, double w0, double w1) {
    if (a.gamma.rows() != b.gamma.rows()) {
        throw DimensionError("average_rdms: active spaces differ");
    }
    RdmSet r;
    r.gamma = w0 * a.gamma + w1 * b.gamma;
    r.Gamma = a.Gamma;
    r.Gamma *= w0;
    Tensor4 t = b.Gamma;
    t *= w1;
    r.Gamma += t;
    r.bra_index = a.bra_index;
    r.ket_index = b.ket_index;
    r.kind = RdmKind::Averaged;
    return r;
}

double transition_energy_element(const ActiveSpaceProblem &prob, const Matrix &gamma,
                                 const Tensor4 &Gamma) {
    const int n = prob.n_active_orb;
    if (gamma.rows() != n || Gamma.dim() != static_cast<std::size_t>(n)) {
        throw DimensionError("RDM dimension does not match the active space");
    }
    double e = (prob.h_eff.array() * gamma.array()).sum();
    for (int t = 0; t < n; ++t)
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                for (int w = 0; w < n; ++w)
                    e += 0.5 * prob.g_act(t, u, v, w) * Gamma(t, u, v, w);
    return e;
}

double energy_from_rdms(const ActiveSpaceProblem &prob, const RdmSet &rdms) {
    if (rdms.kind == RdmKind::Transition) {
        throw ConfigError("energy_from_rdms: use transition_energy_element for transition RDMs");
    }
    return prob.e_frozen + transition_energy_element(prob, rdms.gamma, rdms.Gamma);
}

} // namespace saoovqe
