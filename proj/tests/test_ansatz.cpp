#include <doctest.h>

#include <numbers>
#include <random>
#include <set>

#include <unsupported/Eigen/MatrixFunctions>

#include "saoovqe/ansatz.hpp"
#include "saoovqe/error.hpp"
#include "test_util.hpp"

using namespace saoovqe;
using testutil::to_eigen;

namespace {

/// T − T† of one generator as a dense anti-hermitian matrix.
Eigen::MatrixXcd dense_generator(int nq, const Generator &g) {
    const auto dim = Eigen::Index{1} << nq;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto &ex : g.excitations) {
        Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(dim, dim);
        for (int c : ex.create) {
            t = t * testutil::dense_annihilation(nq, c).adjoint();
        }
        for (int r : ex.annihilate) {
            t = t * testutil::dense_annihilation(nq, r);
        }
        a += t - t.adjoint();
    }
    return a;
}

int spin(int mode) { return mode % 2 == 0 ? 1 : -1; }

/// Unordered pairs of disjoint spin-orbital pairs with equal total Sz.
std::size_t brute_force_doubles(int n_orb) {
    const int nq = 2 * n_orb;
    std::set<std::set<std::set<int>>> seen;
    for (int p = 0; p < nq; ++p)
        for (int q = 0; q < nq; ++q)
            for (int r = 0; r < nq; ++r)
                for (int s = 0; s < nq; ++s) {
                    if (std::set<int>{p, q, r, s}.size() != 4) {
                        continue;
                    }
                    if (spin(p) + spin(q) != spin(r) + spin(s)) {
                        continue;
                    }
                    seen.insert({std::set<int>{p, q}, std::set<int>{r, s}});
                }
    return seen.size();
}

std::size_t count_doubles(const std::vector<Generator> &gens) {
    std::size_t n = 0;
    for (const auto &g : gens) {
        n += g.excitations.front().create.size() == 2;
    }
    return n;
}

ActiveSpaceProblem h2_problem() {
    return build_active_space(read_fcidump(testutil::fixture("h2/h2.fcidump")), 2, 2);
}

} // namespace

TEST_CASE("two active orbitals: one tied single and two doubles") {
    const auto gens = generate_excitations(2, 2);
    REQUIRE(gens.size() == 3);
    CHECK(gens[0].excitations.size() == 2);
    CHECK(gens[0].excitations[0] == Excitation{{2}, {0}});
    CHECK(gens[0].excitations[1] == Excitation{{3}, {1}});
    CHECK(count_doubles(gens) == 2);
    CHECK(count_doubles(gens) == brute_force_doubles(2));
}

TEST_CASE("double counts match brute-force enumeration") {
    for (int n = 2; n <= 4; ++n) {
        const auto gens = generate_excitations(n, 2);
        CHECK(count_doubles(gens) == brute_force_doubles(n));
        CHECK(gens.size() - count_doubles(gens) == static_cast<std::size_t>(n * (n - 1) / 2));
    }
    CHECK(generate_excitations(3, 4).size() - count_doubles(generate_excitations(3, 4)) == 3);
    CHECK_THROWS_AS(generate_excitations(0, 0), ConfigError);
}

TEST_CASE("generators conserve particle number and spin projection") {
    const int n = 3, nq = 6;
    const auto num = number_operator(nq), sz = sz_operator(nq);
    for (const auto &g : generate_excitations(n, 4)) {
        PauliSum gen(nq);
        for (const auto &ex : g.excitations) {
            for (const auto &[p, c] : excitation_to_pauli(nq, ex)) {
                gen.add(p, c);
            }
        }
        for (const auto &op : {num, sz}) {
            const auto c = commutator(gen, op);
            CHECK((c.empty() || c.max_abs_coefficient() < 1e-12));
        }
    }
}

TEST_CASE("empty and zero-angle circuits are the identity") {
    const auto empty = build_ansatz({}, 4);
    CHECK(empty.n_parameters == 0);
    CHECK(empty.rotations.empty());

    std::mt19937_64 rng(1);
    const auto circ = build_ansatz(generate_excitations(2, 2), 4);
    const auto s = testutil::random_state(4, rng);
    const auto out = apply_ansatz(circ, Vector::Zero(circ.n_parameters), s);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(std::abs(out[i] - s[i]) < 1e-14);
    }
    CHECK_THROWS_AS(build_ansatz(generate_excitations(2, 2), 4, 0), ConfigError);
}

TEST_CASE("single generator equals the matrix exponential") {
    const auto gens = generate_excitations(2, 2);
    const std::vector<Generator> single{gens[0]};
    const auto circ = build_ansatz(single, 4);
    const auto ref = init_basis_state(4, "1100");
    for (double theta : {0.3, std::numbers::pi / 2, -1.1}) {
        const Eigen::MatrixXcd u = (theta * dense_generator(4, gens[0])).exp();
        const auto out = apply_ansatz(circ, Vector::Constant(1, theta), ref);
        CHECK((to_eigen(out) - u * to_eigen(ref)).cwiseAbs().maxCoeff() < 1e-12);
    }
    // With only the α electron, θ = π/2 moves it completely to orbital 1.
    const std::vector<Generator> alpha{Generator{{Excitation{{2}, {0}}}}};
    const auto moved = apply_ansatz(build_ansatz(alpha, 4), Vector::Constant(1, std::numbers::pi / 2),
                                    init_basis_state(4, "1000"));
    CHECK(std::abs(std::abs(moved[4]) - 1.0) < 1e-12);
}

TEST_CASE("full circuit equals the ordered product of exponentials") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto gens = generate_excitations(2, 2);
    for (int reps : {1, 3}) {
        const auto circ = build_ansatz(gens, 4, reps);
        Vector theta(circ.n_parameters);
        for (auto &t : theta) {
            t = u(rng);
        }
        const auto s = testutil::random_state(4, rng);
        Eigen::VectorXcd ref = to_eigen(s);
        for (int r = 0; r < reps; ++r) {
            for (std::size_t k = 0; k < gens.size(); ++k) {
                ref = (theta(static_cast<Eigen::Index>(k)) / reps *
                       dense_generator(4, gens[k]))
                          .exp() *
                      ref;
            }
        }
        const auto out = apply_ansatz(circ, theta, s);
        CHECK((to_eigen(out) - ref).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(std::abs(out.norm() - 1.0) < 1e-13);
    }
}

TEST_CASE("ensemble reference states") {
    const auto prob = h2_problem();
    const auto ens = prepare_initial_states(prob);
    CHECK(ens.w0 == 0.5);
    CHECK(ens.state_a == init_basis_state(4, "1100"));
    CHECK(std::abs(ens.state_b.norm() - 1.0) < 1e-15);
    CHECK(std::abs(inner(ens.state_a, ens.state_b)) < 1e-15);
    CHECK(std::abs(std::abs(ens.state_b[0b1001]) - 1 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(std::abs(ens.state_b[0b0110]) - 1 / std::sqrt(2.0)) < 1e-15);
    for (const auto &s : {ens.state_a, ens.state_b}) {
        CHECK(std::abs(expectation(s, number_operator(4)) - 2.0) < 1e-14);
        CHECK(std::abs(expectation(s, sz_operator(4))) < 1e-14);
        CHECK(std::abs(expectation(s, s2_operator(4))) < 1e-14);
    }
}

TEST_CASE("reference states for a larger active space") {
    const auto ints = read_fcidump(testutil::fixture("formaldimine/a130_p90/center.fcidump"));
    const auto prob = build_active_space(ints, 3, 4, std::vector<int>{6, 7, 8});
    const auto ens = prepare_initial_states(prob, 0.25, 0.75);
    CHECK(ens.w1 == 0.75);
    CHECK(ens.state_a == init_basis_state(6, "111100"));
    CHECK(std::abs(inner(ens.state_a, ens.state_b)) < 1e-15);
    CHECK(std::abs(expectation(ens.state_b, number_operator(6)) - 4.0) < 1e-14);
}
