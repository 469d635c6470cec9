#pragma once

#include <bit>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "saoovqe/fcidump.hpp"
#include "saoovqe/operators.hpp"
#include "saoovqe/statevector.hpp"

namespace testutil {

using saoovqe::cplx;

inline std::filesystem::path fixture(const std::string &rel) {
    return std::filesystem::path(SAOOVQE_SOURCE_DIR) / "fixtures" / rel;
}

inline std::filesystem::path source(const std::string &rel) {
    return std::filesystem::path(SAOOVQE_SOURCE_DIR) / rel;
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string &name) {
    auto p = std::filesystem::path(SAOOVQE_BINARY_DIR) / "scratch" / name;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline saoovqe::StateVector random_state(int n_qubits, std::mt19937_64 &rng) {
    std::normal_distribution<double> nd;
    saoovqe::StateVector s(n_qubits);
    for (auto &a : s.amplitudes()) {
        a = cplx(nd(rng), nd(rng));
    }
    s.normalize();
    return s;
}

/// Random real state inside a fixed (N, 2Sz) sector.
inline saoovqe::StateVector random_sector_state(int n_qubits, int n_elec, int two_sz,
                                                std::mt19937_64 &rng) {
    std::normal_distribution<double> nd;
    saoovqe::StateVector s(n_qubits);
    for (std::size_t b = 0; b < s.size(); ++b) {
        int na = 0, nb = 0;
        for (int k = 0; k < n_qubits; ++k) {
            if ((b >> k) & 1U) {
                (k % 2 == 0 ? na : nb)++;
            }
        }
        if (na + nb == n_elec && na - nb == two_sz) {
            s[b] = nd(rng);
        }
    }
    s.normalize();
    return s;
}

inline Eigen::VectorXcd to_eigen(const saoovqe::StateVector &s) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = s[i];
    }
    return v;
}

/// a_mode as an explicit 2^n matrix built from occupation bits and the
/// parity of lower modes, independent of any Pauli-string machinery.
inline Eigen::MatrixXcd dense_annihilation(int n_qubits, int mode) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
    for (std::size_t b = 0; b < dim; ++b) {
        if (!((b >> mode) & 1U)) {
            continue;
        }
        const std::size_t lower = b & ((std::size_t{1} << mode) - 1);
        const double sign = (std::popcount(lower) % 2) ? -1.0 : 1.0;
        a(static_cast<Eigen::Index>(b ^ (std::size_t{1} << mode)), static_cast<Eigen::Index>(b)) =
            sign;
    }
    return a;
}

/// Second-quantized active-space Hamiltonian from dense ladder matrices.
inline Eigen::MatrixXcd dense_hamiltonian(const saoovqe::ActiveSpaceProblem &prob) {
    const int n = prob.n_active_orb, nq = 2 * n;
    std::vector<Eigen::MatrixXcd> a, ad;
    for (int s = 0; s < nq; ++s) {
        a.push_back(dense_annihilation(nq, s));
        ad.push_back(a.back().adjoint());
    }
    const auto dim = a[0].rows();
    Eigen::MatrixXcd h = prob.e_frozen * Eigen::MatrixXcd::Identity(dim, dim);
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            for (int s = 0; s < 2; ++s) {
                h += prob.h_eff(p, q) * ad[2 * p + s] * a[2 * q + s];
            }
        }
    }
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            for (int r = 0; r < n; ++r) {
                for (int t = 0; t < n; ++t) {
                    const double g = prob.g_act(p, q, r, t);
                    if (g == 0.0) {
                        continue;
                    }
                    for (int s = 0; s < 2; ++s) {
                        for (int u = 0; u < 2; ++u) {
                            h += 0.5 * g * ad[2 * p + s] * ad[2 * r + u] * a[2 * t + u] *
                                 a[2 * q + s];
                        }
                    }
                }
            }
        }
    }
    return h;
}

} // namespace testutil
