#include <doctest.h>

#include <random>
#include <sstream>

#include "saoovqe/error.hpp"
#include "saoovqe/pauli.hpp"
#include "test_util.hpp"

using namespace saoovqe;

namespace {

PauliSum random_sum(int n, int terms, std::mt19937_64 &rng) {
    std::uniform_int_distribution<std::uint64_t> mask(0, (std::uint64_t{1} << n) - 1);
    std::normal_distribution<double> nd;
    PauliSum s(n);
    for (int t = 0; t < terms; ++t) {
        s.add(PauliString(n, mask(rng), mask(rng)), cplx(nd(rng), nd(rng)));
    }
    return s;
}

PauliSum parse(const std::string &text) {
    std::istringstream in(text);
    return parse_pauli_sum(in);
}

} // namespace

TEST_CASE("letters round trip and single-qubit constructors") {
    const auto p = PauliString::from_letters("XIZY");
    CHECK(p.n_qubits() == 4);
    CHECK(p.letters() == "XIZY");
    CHECK(p.weight() == 3);
    CHECK(p.y_count() == 1);
    CHECK(p.letter(2) == 'Z');
    CHECK(PauliString::single(4, 'Z', 2) == PauliString::from_letters("IIZI"));
    CHECK_THROWS(PauliString::from_letters("XQ"));
}

TEST_CASE("single-qubit products") {
    const auto x = PauliString::from_letters("X"), y = PauliString::from_letters("Y"),
               z = PauliString::from_letters("Z");
    auto [c1, p1] = multiply(x, y);
    CHECK(p1 == z);
    CHECK(std::abs(c1 - cplx(0, 1)) < 1e-15);
    auto [c2, p2] = multiply(y, x);
    CHECK(p2 == z);
    CHECK(std::abs(c2 - cplx(0, -1)) < 1e-15);
    auto [c3, p3] = multiply(z, z);
    CHECK(p3.is_identity());
    CHECK(c3 == cplx(1, 0));
    CHECK_FALSE(commutes(x, y));
    CHECK(commutes(PauliString::from_letters("XX"), PauliString::from_letters("YY")));
}

TEST_CASE("Z squared is the identity") {
    const auto h = PauliSum::term(PauliString::from_letters("Z"));
    const auto sq = h * h;
    REQUIRE(sq.size() == 1);
    CHECK(sq.coefficient(PauliString(1)) == cplx(1, 0));
}

TEST_CASE("dense products match pauli_mul on random four-qubit sums") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_sum(4, 6, rng), b = random_sum(4, 6, rng);
        const Eigen::MatrixXcd dense = a.to_dense() * b.to_dense();
        CHECK((dense - pauli_mul(a, b).to_dense()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((a.to_dense() + b.to_dense() - pauli_add(a, b).to_dense()).cwiseAbs().maxCoeff() <
              1e-12);
        const Eigen::MatrixXcd comm = a.to_dense() * b.to_dense() - b.to_dense() * a.to_dense();
        CHECK((comm - commutator(a, b).to_dense()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("dense matrix of single letters") {
    const auto y = PauliSum::term(PauliString::from_letters("Y")).to_dense();
    CHECK(y(0, 1) == cplx(0, -1));
    CHECK(y(1, 0) == cplx(0, 1));
    // Little endian: Z on qubit 1 flips the sign of indices 2 and 3.
    const auto z1 = PauliSum::term(PauliString::from_letters("IZ")).to_dense();
    CHECK(z1(1, 1) == cplx(1, 0));
    CHECK(z1(2, 2) == cplx(-1, 0));
}

TEST_CASE("simplification drops cancelled terms") {
    PauliSum s(2);
    s.add(PauliString::from_letters("XZ"), 1.0);
    s.add(PauliString::from_letters("XZ"), -1.0);
    s.add(PauliString::from_letters("ZZ"), 1e-16);
    CHECK(pauli_simplify(s).empty());
    CHECK(s.is_hermitian());
    s.add(PauliString::from_letters("II"), cplx(0, 1));
    CHECK_FALSE(s.is_hermitian());
}

TEST_CASE("qubit-count mismatch is a dimension error") {
    const auto a = PauliSum::identity(2), b = PauliSum::identity(3);
    CHECK_THROWS_AS(pauli_add(a, b), DimensionError);
    CHECK_THROWS_AS(pauli_mul(a, b), DimensionError);
}

TEST_CASE("operator text parser") {
    const auto s = parse("# H = Z0 + 0.5 X0 X1\n1.0 ZI\n0.5 XX  # hopping\n\n0 -0.25 YY\n");
    CHECK(s.n_qubits() == 2);
    CHECK(s.coefficient(PauliString::from_letters("ZI")) == cplx(1, 0));
    CHECK(s.coefficient(PauliString::from_letters("XX")) == cplx(0.5, 0));
    CHECK(s.coefficient(PauliString::from_letters("YY")) == cplx(0, -0.25));

    auto line_of = [](const std::string &text) {
        try {
            parse(text);
        } catch (const ParseError &e) {
            return e.line();
        }
        return std::size_t{0};
    };
    CHECK(line_of("1.0 Z\nabc Z\n") == 2);
    CHECK(line_of("1.0 Z\n1.0 Q\n") == 2);
    CHECK(line_of("1.0\n") == 1);
    CHECK_THROWS_AS(parse("1 X\n1 XX\n"), DimensionError);
    CHECK_THROWS_AS(parse("# empty\n"), ParseError);
}
