#include "saoovqe/statevector.hpp"

#include <bit>
#include <cmath>
#include <map>

#include "saoovqe/error.hpp"

namespace saoovqe {

namespace {

constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

void check_size(const StateVector &s, int n_qubits, const char *what) {
    if (s.n_qubits() != n_qubits) {
        throw DimensionError(std::string(what) + ": state has " + std::to_string(s.n_qubits()) +
                             " qubits, operator has " + std::to_string(n_qubits));
    }
}

inline double parity_sign(std::uint64_t b, std::uint64_t z) {
    return (std::popcount(b & z) & 1) ? -1.0 : 1.0;
}

} // namespace

StateVector::StateVector(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 0 || n_qubits > 30) {
        throw ConfigError("StateVector supports 0..30 qubits");
    }
    amps_.assign(std::size_t{1} << n_qubits, cplx{});
}

StateVector::StateVector(int n_qubits, std::vector<cplx> amplitudes)
    : n_(n_qubits), amps_(std::move(amplitudes)) {
    if (n_qubits < 0 || n_qubits > 30 || amps_.size() != (std::size_t{1} << n_qubits)) {
        throw DimensionError("amplitude count does not match 2^n_qubits");
    }
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto &a : amps_) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

void StateVector::normalize() {
    const double n = norm();
    if (n == 0.0) {
        throw NumericalError("cannot normalize the zero vector");
    }
    for (auto &a : amps_) {
        a /= n;
    }
}

StateVector init_basis_state(int n_qubits, std::string_view occupation) {
    if (occupation.size() != static_cast<std::size_t>(n_qubits)) {
        throw DimensionError("occupation string has " + std::to_string(occupation.size()) +
                             " characters, expected " + std::to_string(n_qubits));
    }
    std::size_t index = 0;
    for (std::size_t k = 0; k < occupation.size(); ++k) {
        if (occupation[k] == '1') {
            index |= std::size_t{1} << k;
        } else if (occupation[k] != '0') {
            throw ConfigError("occupation string must contain only 0 and 1");
        }
    }
    StateVector s(n_qubits);
    s[index] = 1.0;
    return s;
}

void apply_pauli_inplace(StateVector &state, const PauliString &p) {
    check_size(state, p.n_qubits(), "apply_pauli");
    const std::uint64_t x = p.x_mask(), z = p.z_mask();
    const cplx base = kIPow[p.y_count() % 4];
    auto &a = state.amplitudes();
    if (x == 0) {
        for (std::size_t b = 0; b < a.size(); ++b) {
            a[b] *= base * parity_sign(b, z);
        }
        return;
    }
    // P|b⟩ = base·(−1)^{|b&z|}|b⊕x⟩; swap each pair (b, b⊕x) once.
    for (std::size_t b = 0; b < a.size(); ++b) {
        const std::size_t c = b ^ x;
        if (c < b) {
            continue;
        }
        const cplx ab = a[b], ac = a[c];
        a[c] = base * parity_sign(b, z) * ab;
        a[b] = base * parity_sign(c, z) * ac;
    }
}

StateVector apply_pauli(const StateVector &state, const PauliString &p) {
    StateVector out = state;
    apply_pauli_inplace(out, p);
    return out;
}

void apply_pauli_rotation_inplace(StateVector &state, const PauliString &p, double theta) {
    check_size(state, p.n_qubits(), "apply_pauli_rotation");
    if (!std::isfinite(theta)) {
        throw NumericalError("rotation angle is not finite");
    }
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    const std::uint64_t x = p.x_mask(), z = p.z_mask();
    // −i·sin·base folded into one factor
    const cplx k = cplx(0.0, -s) * kIPow[p.y_count() % 4];
    auto &a = state.amplitudes();
    if (x == 0) {
        for (std::size_t b = 0; b < a.size(); ++b) {
            a[b] *= c + k * parity_sign(b, z);
        }
        return;
    }
    for (std::size_t b = 0; b < a.size(); ++b) {
        const std::size_t d = b ^ x;
        if (d < b) {
            continue;
        }
        const cplx ab = a[b], ad = a[d];
        a[b] = c * ab + k * parity_sign(d, z) * ad;
        a[d] = c * ad + k * parity_sign(b, z) * ab;
    }
}

StateVector apply_pauli_rotation(const StateVector &state, const PauliString &p, double theta) {
    StateVector out = state;
    apply_pauli_rotation_inplace(out, p, theta);
    return out;
}

StateVector apply_operator(const PauliSum &op, const StateVector &state) {
    check_size(state, op.n_qubits(), "apply_operator");
    StateVector out(state.n_qubits());
    for (const auto &[p, c] : op.terms()) {
        StateVector t = apply_pauli(state, p);
        for (std::size_t b = 0; b < out.size(); ++b) {
            out[b] += c * t[b];
        }
    }
    return out;
}

cplx inner(const StateVector &a, const StateVector &b) {
    if (a.size() != b.size()) {
        throw DimensionError("inner: state sizes differ");
    }
    cplx s{};
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

cplx transition_element(const StateVector &bra, const PauliSum &op, const StateVector &ket) {
    check_size(bra, op.n_qubits(), "transition_element");
    check_size(ket, op.n_qubits(), "transition_element");
    cplx total{};
    for (const auto &[p, c] : op.terms()) {
        const std::uint64_t x = p.x_mask(), z = p.z_mask();
        const cplx base = kIPow[p.y_count() % 4];
        cplx s{};
        for (std::size_t b = 0; b < ket.size(); ++b) {
            s += std::conj(bra[b ^ x]) * parity_sign(b, z) * ket[b];
        }
        total += c * base * s;
    }
    return total;
}

double expectation(const StateVector &state, const PauliSum &op) {
    if (!op.is_hermitian(1e-12)) {
        throw NumericalError("expectation: operator has non-real coefficients");
    }
    const cplx v = transition_element(state, op, state);
    if (std::abs(v.imag()) > 1e-10) {
        throw NumericalError("expectation: imaginary residual " + std::to_string(v.imag()));
    }
    return v.real();
}

CompiledOperator::CompiledOperator(const PauliSum &op) : n_(op.n_qubits()) {
    const std::size_t dim = std::size_t{1} << n_;
    std::map<std::uint64_t, std::size_t> where;
    for (const auto &[p, c] : op.terms()) {
        auto [it, fresh] = where.emplace(p.x_mask(), blocks_.size());
        if (fresh) {
            blocks_.push_back({p.x_mask(), std::vector<cplx>(dim)});
        }
        auto &diag = blocks_[it->second].diag;
        const cplx base = c * kIPow[p.y_count() % 4];
        for (std::size_t b = 0; b < dim; ++b) {
            diag[b] += base * parity_sign(b, p.z_mask());
        }
    }
}

void CompiledOperator::apply(const StateVector &in, StateVector &out) const {
    check_size(in, n_, "CompiledOperator::apply");
    if (out.n_qubits() != n_) {
        out = StateVector(n_);
    } else {
        std::fill(out.amplitudes().begin(), out.amplitudes().end(), cplx{});
    }
    for (const auto &blk : blocks_) {
        for (std::size_t b = 0; b < in.size(); ++b) {
            out[b ^ blk.x] += blk.diag[b] * in[b];
        }
    }
}

StateVector CompiledOperator::apply(const StateVector &in) const {
    StateVector out(n_);
    apply(in, out);
    return out;
}

cplx CompiledOperator::matrix_element(const StateVector &bra, const StateVector &ket) const {
    check_size(bra, n_, "CompiledOperator::matrix_element");
    check_size(ket, n_, "CompiledOperator::matrix_element");
    cplx total{};
    for (const auto &blk : blocks_) {
        cplx s{};
        for (std::size_t b = 0; b < ket.size(); ++b) {
            s += std::conj(bra[b ^ blk.x]) * blk.diag[b] * ket[b];
        }
        total += s;
    }
    return total;
}

double CompiledOperator::expectation(const StateVector &state) const {
    const cplx v = matrix_element(state, state);
    if (std::abs(v.imag()) > 1e-10) {
        throw NumericalError("expectation: imaginary residual " + std::to_string(v.imag()));
    }
    return v.real();
}

} // namespace saoovqe
