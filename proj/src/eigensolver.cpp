#include "saoovqe/eigensolver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "saoovqe/error.hpp"
#include "saoovqe/operators.hpp"

namespace saoovqe {

namespace {

constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

using CVec = Eigen::VectorXcd;

StateVector to_state(int n_qubits, const CVec &v) {
    std::vector<cplx> amps(v.data(), v.data() + v.size());
    StateVector s(n_qubits, std::move(amps));
    fix_phase(s);
    return s;
}

CVec to_vec(const StateVector &s) {
    return Eigen::Map<const CVec>(s.amplitudes().data(), static_cast<Eigen::Index>(s.size()));
}

std::vector<EigenPair> dense_solve(const PauliSum &op, int k) {
    const Eigen::MatrixXcd m = op.to_dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success) {
        throw NumericalError("dense eigensolver failed");
    }
    std::vector<EigenPair> out;
    for (int i = 0; i < k; ++i) {
        out.push_back({es.eigenvalues()(i), to_state(op.n_qubits(), es.eigenvectors().col(i))});
    }
    return out;
}

/// One eigenpair at a time: restarted Lanczos with full reorthogonalization,
/// deflating the eigenvectors already found.
std::vector<EigenPair> lanczos_solve(const PauliSum &op, int k) {
    const CompiledOperator h(op);
    const int nq = op.n_qubits();
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << nq);
    const int krylov = static_cast<int>(std::min<Eigen::Index>(dim, 80));
    std::vector<CVec> found;
    std::vector<EigenPair> out;

    auto deflate = [&](CVec &v) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &f : found) {
                v -= f * f.dot(v);
            }
        }
    };
    auto apply = [&](const CVec &v) {
        StateVector in(nq, std::vector<cplx>(v.data(), v.data() + v.size()));
        return to_vec(h.apply(in));
    };

    for (int target = 0; target < k; ++target) {
        // Deterministic, generic starting vector.
        CVec start(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            start(i) = cplx(1.0 + 0.37 * std::sin(1.3 * static_cast<double>(i) + target), 0.0);
        }
        double value = 0.0;
        CVec ritz;
        bool done = false;
        for (int restart = 0; restart < 200 && !done; ++restart) {
            deflate(start);
            start.normalize();
            std::vector<CVec> basis{start};
            std::vector<double> alpha, beta;
            for (int j = 0; j < krylov; ++j) {
                CVec w = apply(basis[j]);
                deflate(w);
                const double a = basis[j].dot(w).real();
                alpha.push_back(a);
                for (int pass = 0; pass < 2; ++pass) {
                    for (const auto &b : basis) {
                        w -= b * b.dot(w);
                    }
                }
                const double nb = w.norm();
                if (nb < 1e-12 || static_cast<Eigen::Index>(basis.size()) >= dim - static_cast<Eigen::Index>(found.size())) {
                    break;
                }
                beta.push_back(nb);
                basis.push_back(w / nb);
            }
            const auto m = static_cast<Eigen::Index>(alpha.size());
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
            for (Eigen::Index i = 0; i < m; ++i) {
                t(i, i) = alpha[static_cast<std::size_t>(i)];
                if (i + 1 < m) {
                    t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
            ritz = CVec::Zero(dim);
            for (Eigen::Index i = 0; i < m; ++i) {
                ritz += basis[static_cast<std::size_t>(i)] * es.eigenvectors()(i, 0);
            }
            deflate(ritz);
            ritz.normalize();
            value = es.eigenvalues()(0);
            CVec r = apply(ritz) - value * ritz;
            deflate(r);
            done = r.norm() < 1e-10;
            start = ritz;
        }
        if (!done) {
            throw NumericalError("Lanczos did not converge");
        }
        found.push_back(ritz);
        out.push_back({value, to_state(nq, ritz)});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const EigenPair &a, const EigenPair &b) { return a.value < b.value; });
    return out;
}

/// Matrix of `op` restricted to the span of the given basis states.
Eigen::MatrixXcd restrict(const PauliSum &op, const std::vector<std::size_t> &basis) {
    std::unordered_map<std::size_t, Eigen::Index> pos;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        pos[basis[i]] = static_cast<Eigen::Index>(i);
    }
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (const auto &[p, c] : op.terms()) {
        const cplx base = c * kIPow[p.y_count() % 4];
        for (Eigen::Index col = 0; col < n; ++col) {
            const std::size_t b = basis[static_cast<std::size_t>(col)];
            auto it = pos.find(b ^ p.x_mask());
            if (it == pos.end()) {
                continue;
            }
            const double sign = (std::popcount(b & p.z_mask()) & 1) ? -1.0 : 1.0;
            m(it->second, col) += base * sign;
        }
    }
    return m;
}

} // namespace

void fix_phase(StateVector &v) {
    std::size_t best = 0;
    double mag = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        // Small tolerance so near-ties resolve to the lowest index.
        if (std::abs(v[i]) > mag + 1e-12) {
            mag = std::abs(v[i]);
            best = i;
        }
    }
    if (mag <= 0.0) {
        return;
    }
    const cplx phase = std::conj(v[best]) / std::abs(v[best]);
    for (auto &a : v.amplitudes()) {
        a *= phase;
    }
}

std::vector<EigenPair> exact_eigensolve(const PauliSum &op, int k, EigenMethod method) {
    const int nq = op.n_qubits();
    const long long dim = 1ll << nq;
    if (k < 1 || k > dim) {
        throw ConfigError("exact_eigensolve: k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(dim) + "]");
    }
    if (!op.is_hermitian(1e-12)) {
        throw NumericalError("exact_eigensolve: operator is not hermitian");
    }
    if (method == EigenMethod::Auto) {
        method = nq <= kDenseEigenMaxQubits ? EigenMethod::Dense : EigenMethod::Lanczos;
    }
    return method == EigenMethod::Dense ? dense_solve(op, k) : lanczos_solve(op, k);
}

std::vector<std::size_t> sector_basis(int n_qubits, int n_elec, int two_sz) {
    std::vector<std::size_t> out;
    std::uint64_t alpha_mask = 0;
    for (int q = 0; q < n_qubits; q += 2) {
        alpha_mask |= 1ull << q;
    }
    for (std::size_t b = 0; b < (std::size_t{1} << n_qubits); ++b) {
        const int na = std::popcount(b & alpha_mask);
        const int nb = std::popcount(b & ~alpha_mask);
        if (na + nb == n_elec && na - nb == two_sz) {
            out.push_back(b);
        }
    }
    return out;
}

std::vector<EigenPair> sector_eigensolve(const PauliSum &op, const Sector &sector, int k) {
    const int nq = op.n_qubits();
    const auto basis = sector_basis(nq, sector.n_elec, sector.two_sz);
    if (basis.empty()) {
        throw ConfigError("sector_eigensolve: empty symmetry sector");
    }
    const Eigen::MatrixXcd h = restrict(op, basis);
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(h.rows(), h.cols());
    if (sector.two_s) {
        // Eigenvectors of S² with eigenvalue S(S+1) span the multiplet.
        const double s = 0.5 * *sector.two_s;
        const Eigen::MatrixXcd s2 = restrict(s2_operator(nq), basis);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ss(s2);
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < s2.rows(); ++i) {
            if (std::abs(ss.eigenvalues()(i) - s * (s + 1)) < 1e-6) {
                keep.push_back(i);
            }
        }
        q.resize(h.rows(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j) {
            q.col(static_cast<Eigen::Index>(j)) = ss.eigenvectors().col(keep[j]);
        }
    }
    if (k < 1 || k > q.cols()) {
        throw ConfigError("sector_eigensolve: k=" + std::to_string(k) + " exceeds sector size " +
                          std::to_string(q.cols()));
    }
    const Eigen::MatrixXcd hq = q.adjoint() * h * q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (hq + hq.adjoint()));
    std::vector<EigenPair> out;
    for (int i = 0; i < k; ++i) {
        const CVec local = q * es.eigenvectors().col(i);
        CVec full = CVec::Zero(static_cast<Eigen::Index>(std::size_t{1} << nq));
        for (std::size_t j = 0; j < basis.size(); ++j) {
            full(static_cast<Eigen::Index>(basis[j])) = local(static_cast<Eigen::Index>(j));
        }
        out.push_back({es.eigenvalues()(i), to_state(nq, full)});
    }
    return out;
}

} // namespace saoovqe
