#include "saoovqe/sa_vqe.hpp"

#include <cmath>
#include <numbers>

#include "saoovqe/eigensolver.hpp"
#include "saoovqe/error.hpp"

namespace saoovqe {

namespace {

void check_ensemble(const AnsatzCircuit &circ, const EnsembleSpec &ens, int n_qubits) {
    if (circ.n_qubits != n_qubits || ens.state_a.n_qubits() != n_qubits ||
        ens.state_b.n_qubits() != n_qubits) {
        throw DimensionError("ansatz, ensemble and Hamiltonian qubit counts differ");
    }
}

/// Energy of `state` after applying rotations [from, end) of the circuit.
double tail_energy(const AnsatzCircuit &circ, const Vector &theta, std::size_t from,
                   StateVector state, const CompiledOperator &h) {
    for (std::size_t j = from; j < circ.rotations.size(); ++j) {
        const auto &r = circ.rotations[j];
        apply_pauli_rotation_inplace(state, r.pauli, r.prefactor * theta(r.parameter));
    }
    return h.expectation(state);
}

} // namespace

double sa_energy(const Vector &theta, const AnsatzCircuit &circ, const EnsembleSpec &ens,
                 const CompiledOperator &h) {
    check_ensemble(circ, ens, h.n_qubits());
    return ens.w0 * h.expectation(apply_ansatz(circ, theta, ens.state_a)) +
           ens.w1 * h.expectation(apply_ansatz(circ, theta, ens.state_b));
}

double sa_energy(const Vector &theta, const AnsatzCircuit &circ, const EnsembleSpec &ens,
                 const PauliSum &h) {
    return sa_energy(theta, circ, ens, CompiledOperator(h));
}

Vector circuit_gradient(const Vector &theta, const AnsatzCircuit &circ, const EnsembleSpec &ens,
                        const CompiledOperator &h) {
    check_ensemble(circ, ens, h.n_qubits());
    if (theta.size() != circ.n_parameters) {
        throw DimensionError("ansatz expects " + std::to_string(circ.n_parameters) +
                             " parameters, got " + std::to_string(theta.size()));
    }
    Vector grad = Vector::Zero(circ.n_parameters);
    constexpr double shift = std::numbers::pi / 2;
    const std::pair<const StateVector *, double> members[] = {{&ens.state_a, ens.w0},
                                                             {&ens.state_b, ens.w1}};
    for (const auto &[init, w] : members) {
        // `prefix` holds the state after rotations [0, j).
        StateVector prefix = *init;
        for (std::size_t j = 0; j < circ.rotations.size(); ++j) {
            const auto &r = circ.rotations[j];
            const double angle = r.prefactor * theta(r.parameter);
            const double ep = tail_energy(circ, theta, j + 1,
                                          apply_pauli_rotation(prefix, r.pauli, angle + shift), h);
            const double em = tail_energy(circ, theta, j + 1,
                                          apply_pauli_rotation(prefix, r.pauli, angle - shift), h);
            grad(r.parameter) += w * r.prefactor * 0.5 * (ep - em);
            apply_pauli_rotation_inplace(prefix, r.pauli, angle);
        }
    }
    return grad;
}

Vector circuit_gradient(const Vector &theta, const AnsatzCircuit &circ, const EnsembleSpec &ens,
                        const PauliSum &h) {
    return circuit_gradient(theta, circ, ens, CompiledOperator(h));
}

double resolution_angle(const Eigen::Matrix2d &h_sub) {
    const double diff = h_sub(0, 0) - h_sub(1, 1);
    const double off = h_sub(0, 1);
    if (std::abs(diff) < 1e-12) {
        return off != 0.0 ? std::numbers::pi / 4 : 0.0;
    }
    return 0.5 * std::atan(2.0 * off / diff);
}

SaVqeState resolve_states(const StateVector &phi_a, const StateVector &phi_b,
                          const CompiledOperator &h, double w0, double w1) {
    SaVqeState st;
    const cplx h01 = h.matrix_element(phi_a, phi_b);
    if (std::abs(h01.imag()) > 1e-10) {
        throw NumericalError("subspace Hamiltonian has an imaginary off-diagonal element");
    }
    st.h_sub(0, 0) = h.expectation(phi_a);
    st.h_sub(1, 1) = h.expectation(phi_b);
    st.h_sub(0, 1) = st.h_sub(1, 0) = h01.real();
    st.e_sa = w0 * st.h_sub(0, 0) + w1 * st.h_sub(1, 1);

    const double phi = resolution_angle(st.h_sub);
    st.resolution_angle = phi;
    const double c = std::cos(phi), s = std::sin(phi);
    st.psi0 = StateVector(phi_a.n_qubits());
    st.psi1 = StateVector(phi_a.n_qubits());
    for (std::size_t i = 0; i < phi_a.size(); ++i) {
        st.psi0[i] = c * phi_a[i] + s * phi_b[i];
        st.psi1[i] = -s * phi_a[i] + c * phi_b[i];
    }
    const double hd = st.h_sub(0, 0), hb = st.h_sub(1, 1), ho = st.h_sub(0, 1);
    st.e0 = c * c * hd + 2.0 * c * s * ho + s * s * hb;
    st.e1 = s * s * hd - 2.0 * c * s * ho + c * c * hb;
    if (st.e0 > st.e1) {
        std::swap(st.e0, st.e1);
        std::swap(st.psi0, st.psi1);
    }
    return st;
}

SaVqeState state_resolution(const Vector &theta, const AnsatzCircuit &circ,
                            const EnsembleSpec &ens, const PauliSum &h) {
    const CompiledOperator op(h);
    check_ensemble(circ, ens, op.n_qubits());
    SaVqeState st = resolve_states(apply_ansatz(circ, theta, ens.state_a),
                                   apply_ansatz(circ, theta, ens.state_b), op, ens.w0, ens.w1);
    st.theta = theta;
    return st;
}

SaVqeState run_sa_vqe(const ActiveSpaceProblem &prob, const SaVqeOptions &options,
                      const std::optional<Vector> &theta0) {
    const PauliSum h = jordan_wigner(prob);
    const CompiledOperator op(h);
    const auto circ = build_ansatz(generate_excitations(prob.n_active_orb, prob.n_active_elec),
                                   prob.n_qubits(), options.trotter_reps);
    const auto ens = prepare_initial_states(prob, options.w0, options.w1);
    Vector x0 = Vector::Zero(circ.n_parameters);
    if (theta0 && theta0->size() > 0) {
        if (theta0->size() != circ.n_parameters) {
            throw DimensionError("warm-start theta has " + std::to_string(theta0->size()) +
                                 " entries, ansatz has " + std::to_string(circ.n_parameters));
        }
        x0 = *theta0;
    }
    const auto res = minimize(
        [&](const Vector &t) { return sa_energy(t, circ, ens, op); },
        [&](const Vector &t) { return circuit_gradient(t, circ, ens, op); }, x0,
        options.optimizer);
    SaVqeState st = resolve_states(apply_ansatz(circ, res.x, ens.state_a),
                                   apply_ansatz(circ, res.x, ens.state_b), op, ens.w0, ens.w1);
    st.theta = res.x;
    st.converged = res.converged();
    st.iterations = res.iterations;
    st.history = res.history;
    return st;
}

SaVqeState solve_exact(const ActiveSpaceProblem &prob, double w0, double w1) {
    const PauliSum h = jordan_wigner(prob);
    const auto pairs = sector_eigensolve(h, Sector{prob.n_active_elec, prob.ms2, 0}, 2);
    SaVqeState st;
    st.e0 = pairs[0].value;
    st.e1 = pairs[1].value;
    st.psi0 = pairs[0].vector;
    st.psi1 = pairs[1].vector;
    st.h_sub(0, 0) = st.e0;
    st.h_sub(1, 1) = st.e1;
    st.e_sa = w0 * st.e0 + w1 * st.e1;
    st.converged = true;
    return st;
}

} // namespace saoovqe
