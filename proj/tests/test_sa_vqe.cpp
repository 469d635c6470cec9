#include <doctest.h>

#include <numbers>
#include <random>

#include "saoovqe/eigensolver.hpp"
#include "saoovqe/sa_vqe.hpp"
#include "test_util.hpp"

using namespace saoovqe;

namespace {

struct Setup {
    ActiveSpaceProblem prob;
    AnsatzCircuit circ;
    EnsembleSpec ens;
    PauliSum h;
};

Setup make(const SpatialIntegrals &ints, int ne, int no,
           const std::optional<std::vector<int>> &active = {}) {
    Setup s;
    s.prob = build_active_space(ints, no, ne, active);
    s.circ = build_ansatz(generate_excitations(no, ne), s.prob.n_qubits());
    s.ens = prepare_initial_states(s.prob);
    s.h = jordan_wigner(s.prob);
    return s;
}

Setup h2() { return make(read_fcidump(testutil::fixture("h2/h2.fcidump")), 2, 2); }

Setup formaldimine() {
    return make(read_fcidump(testutil::fixture("formaldimine/a130_p90/center.fcidump")), 4, 3,
                std::vector<int>{6, 7, 8});
}

Vector random_theta(int n, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    Vector t(n);
    for (auto &x : t) {
        x = u(rng);
    }
    return t;
}

/// Problem whose qubit Hamiltonian is the number operator.
ActiveSpaceProblem number_problem(int no, int ne) {
    auto ints = SpatialIntegrals::zeros(no, ne);
    ints.h = Matrix::Identity(no, no);
    return build_active_space(ints, no, ne);
}

} // namespace

TEST_CASE("ensemble energy of the number operator") {
    const auto prob = number_problem(3, 4);
    const auto circ = build_ansatz(generate_excitations(3, 4), 6);
    const auto ens = prepare_initial_states(prob);
    const auto h = jordan_wigner(prob);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 5; ++k) {
        CHECK(std::abs(sa_energy(random_theta(circ.n_parameters, rng), circ, ens, h) - 4.0) <
              1e-12);
    }
}

TEST_CASE("equal weights: swapping the reference states changes nothing") {
    auto s = h2();
    std::mt19937_64 rng(3);
    const Vector theta = random_theta(s.circ.n_parameters, rng);
    const double e = sa_energy(theta, s.circ, s.ens, s.h);
    std::swap(s.ens.state_a, s.ens.state_b);
    CHECK(sa_energy(theta, s.circ, s.ens, s.h) == doctest::Approx(e).epsilon(1e-15));
}

TEST_CASE("ensemble energy against the dense quadratic form") {
    const auto s = h2();
    const Eigen::MatrixXcd dense = s.h.to_dense();
    std::mt19937_64 rng(4);
    for (int k = 0; k < 10; ++k) {
        const Vector theta = random_theta(s.circ.n_parameters, rng);
        const auto a = testutil::to_eigen(apply_ansatz(s.circ, theta, s.ens.state_a));
        const auto b = testutil::to_eigen(apply_ansatz(s.circ, theta, s.ens.state_b));
        const double ref = 0.5 * (a.adjoint() * dense * a)(0, 0).real() +
                           0.5 * (b.adjoint() * dense * b)(0, 0).real();
        CHECK(std::abs(sa_energy(theta, s.circ, s.ens, s.h) - ref) < 1e-12);
        CHECK(std::abs(sa_energy(theta, s.circ, s.ens, CompiledOperator(s.h)) - ref) < 1e-12);
    }
}

TEST_CASE("parameter shift on a one-qubit model") {
    AnsatzCircuit circ;
    circ.n_qubits = 1;
    circ.n_parameters = 1;
    circ.rotations.push_back({PauliString::from_letters("X"), 1.0, 0});
    EnsembleSpec ens;
    ens.w0 = 1.0;
    ens.w1 = 0.0;
    ens.state_a = init_basis_state(1, "0");
    ens.state_b = init_basis_state(1, "1");
    const auto z = PauliSum::term(PauliString::from_letters("Z"));
    for (double theta : {0.3, std::numbers::pi / 2, 2.0}) {
        const Vector t = Vector::Constant(1, theta);
        CHECK(circuit_gradient(t, circ, ens, z)(0) ==
              doctest::Approx(-std::sin(theta)).epsilon(1e-14));
    }
    const double e_pi = sa_energy(Vector::Constant(1, std::numbers::pi), circ, ens, z);
    const double e_0 = sa_energy(Vector::Constant(1, 0.0), circ, ens, z);
    CHECK((e_pi - e_0) / 2 == doctest::Approx(-1.0));
}

TEST_CASE("zero Hamiltonian has zero gradient") {
    const auto s = h2();
    std::mt19937_64 rng(5);
    const Vector g =
        circuit_gradient(random_theta(s.circ.n_parameters, rng), s.circ, s.ens, PauliSum(4));
    CHECK(g.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parameter shift against central differences") {
    for (auto s : {h2(), formaldimine()}) {
        std::mt19937_64 rng(6);
        const CompiledOperator h(s.h);
        const double step = 1e-5;
        for (int k = 0; k < 5; ++k) {
            Vector theta = random_theta(s.circ.n_parameters, rng);
            const Vector g = circuit_gradient(theta, s.circ, s.ens, h);
            Vector fd(theta.size());
            for (Eigen::Index i = 0; i < theta.size(); ++i) {
                Vector tp = theta, tm = theta;
                tp(i) += step;
                tm(i) -= step;
                fd(i) = (sa_energy(tp, s.circ, s.ens, h) - sa_energy(tm, s.circ, s.ens, h)) /
                        (2 * step);
            }
            CHECK((g - fd).cwiseAbs().maxCoeff() < 1e-7);
        }
    }
}

TEST_CASE("resolution angle") {
    Eigen::Matrix2d diag;
    diag << -1.0, 0.0, 0.0, -2.0;
    CHECK(resolution_angle(diag) == 0.0);
    Eigen::Matrix2d sym;
    sym << 0.3, 0.1, 0.1, 0.3;
    CHECK(resolution_angle(sym) == doctest::Approx(std::numbers::pi / 4));
}

TEST_CASE("state resolution on a diagonal and a symmetric subspace") {
    const auto z = jordan_wigner(number_problem(2, 2));
    AnsatzCircuit empty;
    empty.n_qubits = 4;
    EnsembleSpec ens;
    ens.state_a = init_basis_state(4, "1100");
    ens.state_b = init_basis_state(4, "0011");
    // H = number operator plus a diagonal offset on state_b's orbital.
    auto ints = SpatialIntegrals::zeros(2, 2);
    ints.h(0, 0) = 0.5;
    ints.h(1, 1) = -0.25;
    const auto prob = build_active_space(ints, 2, 2);
    const auto st = state_resolution(Vector(), empty, ens, jordan_wigner(prob));
    CHECK(st.resolution_angle == 0.0);
    CHECK(st.e0 == doctest::Approx(-0.5));
    CHECK(st.e1 == doctest::Approx(1.0));
    CHECK(z.n_qubits() == 4);

    // Degenerate diagonal with coupling: e0 = a − c, e1 = a + c.
    ints.h(0, 0) = 0.0;
    ints.h(1, 1) = 0.0;
    ints.g.at(0, 1, 0, 1) = 0.2;
    const auto coupled = state_resolution(Vector(), empty, ens,
                                          jordan_wigner(build_active_space(ints, 2, 2)));
    const double c = coupled.h_sub(0, 1);
    CHECK(std::abs(c) > 0.0);
    CHECK(coupled.e0 == doctest::Approx(coupled.h_sub(0, 0) - std::abs(c)));
    CHECK(coupled.e1 == doctest::Approx(coupled.h_sub(0, 0) + std::abs(c)));
    CHECK(std::abs(std::abs(coupled.resolution_angle) - std::numbers::pi / 4) < 1e-12);
}

TEST_CASE("resolved energies preserve the subspace trace") {
    const auto s = formaldimine();
    std::mt19937_64 rng(7);
    for (int k = 0; k < 5; ++k) {
        const auto st = state_resolution(random_theta(s.circ.n_parameters, rng), s.circ, s.ens, s.h);
        CHECK(std::abs(st.e0 + st.e1 - st.h_sub.trace()) < 1e-10);
        CHECK(st.e0 <= st.e1);
        CHECK(std::abs(inner(st.psi0, st.psi1)) < 1e-12);
    }
}

TEST_CASE("flat landscape converges at the start") {
    const auto prob = number_problem(2, 2);
    const auto st = run_sa_vqe(prob, SaVqeOptions{});
    CHECK(st.converged);
    CHECK(st.iterations == 0);
    CHECK(st.e_sa == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("H2 resolved energies equal the two lowest singlets") {
    const auto s = h2();
    const auto st = run_sa_vqe(s.prob, SaVqeOptions{});
    const auto exact = sector_eigensolve(s.h, Sector{2, 0, 0}, 2);
    CHECK(st.converged);
    CHECK(std::abs(st.e0 - exact[0].value) < 1e-6);
    CHECK(std::abs(st.e1 - exact[1].value) < 1e-6);
}

TEST_CASE("formaldimine ensemble energy is bounded by the exact average") {
    const auto s = formaldimine();
    const auto st = run_sa_vqe(s.prob, SaVqeOptions{});
    const auto ex = solve_exact(s.prob);
    const double bound = 0.5 * (ex.e0 + ex.e1);
    CHECK(st.converged);
    CHECK(st.e_sa >= bound - 1e-12);
    CHECK(st.e_sa <= bound + 1e-6);
}

TEST_CASE("theta length is checked") {
    const auto s = h2();
    CHECK_THROWS(run_sa_vqe(s.prob, SaVqeOptions{}, Vector::Zero(s.circ.n_parameters + 1)));
}
