#include <doctest.h>

#include <fstream>
#include <random>

#include <json.hpp>

#include "saoovqe/error.hpp"
#include "saoovqe/response.hpp"
#include "test_util.hpp"

using namespace saoovqe;

namespace {

SaooVqeOptions options(Solver solver, std::vector<int> active) {
    SaooVqeOptions o;
    o.solver = solver;
    o.active_indices = std::move(active);
    return o;
}

SaooVqeOptions h4_options(Solver solver = Solver::Exact) { return options(solver, {1, 2}); }

/// H4 integrals with a random symmetric one-electron perturbation.
struct LinearModel {
    SpatialIntegrals center;
    Matrix dh;
};

LinearModel linear_model() {
    LinearModel m{read_fcidump(testutil::fixture("h4/center.fcidump")), Matrix()};
    std::mt19937_64 rng(21);
    std::normal_distribution<double> nd(0.0, 0.1);
    m.dh = Matrix::Zero(4, 4);
    for (int p = 0; p < 4; ++p) {
        for (int q = 0; q <= p; ++q) {
            m.dh(p, q) = m.dh(q, p) = nd(rng);
        }
    }
    return m;
}

GeometryStencil linear_stencil(const LinearModel &m, double step) {
    GeometryStencil st;
    st.center = m.center;
    st.step = step;
    st.coordinates = {"0x"};
    for (int sign : {+1, -1}) {
        auto ints = m.center;
        ints.h += sign * step * m.dh;
        st.displaced[{"0x", sign}] = ints;
    }
    return st;
}

std::vector<DerivativeIntegralSet> linear_derivs(const LinearModel &m) {
    DerivativeIntegralSet d;
    d.coordinate_label = "0x";
    d.d = SpatialIntegrals::zeros(4, m.center.n_elec);
    d.d.h = m.dh;
    return {d};
}

GeometryStencil frozen_stencil(const SpatialIntegrals &center) {
    GeometryStencil st;
    st.center = center;
    st.coordinates = {"0x", "0y"};
    for (const auto &label : st.coordinates) {
        st.displaced[{label, +1}] = center;
        st.displaced[{label, -1}] = center;
    }
    return st;
}

nlohmann::json meta(const std::string &rel) {
    std::ifstream f(testutil::fixture(rel));
    return nlohmann::json::parse(f);
}

} // namespace

TEST_CASE("stencil manifest") {
    const auto st = read_stencil(testutil::fixture("h4/stencil_1e-3/manifest.txt"));
    CHECK(st.step == 1e-3);
    CHECK(st.tracking == Tracking::PhaseMatched);
    CHECK(st.coordinates.size() == 12);
    CHECK(st.displaced.size() == 24);
    CHECK(st.center.n_orb == 4);

    auto broken = st;
    broken.displaced.erase({"0x", -1});
    CHECK_THROWS_AS(broken.validate(), ConfigError);
    auto small = st;
    small.displaced[{"0y", +1}] = SpatialIntegrals::zeros(3, 4);
    CHECK_THROWS_AS(small.validate(), DimensionError);
    CHECK(parse_tracking("none") == Tracking::None);
    CHECK_THROWS(parse_tracking("sometimes"));
}

TEST_CASE("state tracking") {
    const auto a = init_basis_state(4, "1100"), b = init_basis_state(4, "0011");
    StateVector minus_a = a;
    for (auto &x : minus_a.amplitudes()) {
        x = -x;
    }
    const auto t = track_states(a, b, -1.0, -0.5, b, minus_a, Tracking::PhaseMatched);
    CHECK(t.swapped);
    CHECK(t.e0 == -0.5);
    CHECK(t.overlap0 == doctest::Approx(1.0));
    CHECK(t.overlap1 == doctest::Approx(1.0));
    CHECK_FALSE(t.ambiguous);

    StateVector mix(4);
    mix[0b0011] = mix[0b1100] = 1.0 / std::sqrt(2.0);
    StateVector mix2(4);
    mix2[0b0011] = 1.0 / std::sqrt(2.0);
    mix2[0b1100] = -1.0 / std::sqrt(2.0);
    CHECK(track_states(a, b, 0, 1, mix, mix2, Tracking::PhaseMatched).overlap0 ==
          doctest::Approx(std::sqrt(0.5)));
    const auto far = init_basis_state(4, "1010"), far2 = init_basis_state(4, "0101");
    CHECK(track_states(a, b, 0, 1, far, far2, Tracking::PhaseMatched).ambiguous);
    CHECK_FALSE(track_states(a, b, 0, 1, far, far2, Tracking::None).ambiguous);
}

TEST_CASE("frozen stencil gives zero gradients and couplings") {
    const auto center = read_fcidump(testutil::fixture("h4/center.fcidump"));
    const auto st = frozen_stencil(center);
    for (const auto &row : fd_gradient(st, 2, 2, h4_options())) {
        CHECK(row.de0 == 0.0);
        CHECK(row.de1 == 0.0);
        CHECK(row.de_sa == 0.0);
    }
    const auto nac = fd_overlap_nac(st, 2, 2, h4_options());
    CHECK(nac.d01.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero derivative integrals give zero gradients and couplings") {
    const auto center = read_fcidump(testutil::fixture("h4/center.fcidump"));
    const auto res = run_sa_oo_vqe(center, 2, 2, h4_options());
    DerivativeIntegralSet d;
    d.coordinate_label = "0x";
    d.d = SpatialIntegrals::zeros(4, 4);
    for (const auto &row : hf_gradient(res, {d})) {
        CHECK(row.de0 == 0.0);
        CHECK(row.de_sa == 0.0);
    }
    CHECK(hf_nac(res, {d}).d01(0) == 0.0);
}

TEST_CASE("linear one-electron perturbation: finite differences converge as h^2") {
    const auto m = linear_model();
    const auto res = run_sa_oo_vqe(m.center, 2, 2, h4_options());
    const auto hf = hf_gradient(res, linear_derivs(m))[0];
    double err[2];
    int k = 0;
    for (double step : {2e-3, 1e-3}) {
        const auto fd = fd_gradient(linear_stencil(m, step), 2, 2, h4_options())[0];
        err[k++] = std::abs(fd.de_sa - hf.de_sa);
    }
    CHECK(err[1] < 1e-5);
    CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("H4 Hellmann-Feynman gradients match the relaxed stencil") {
    const auto st = read_stencil(testutil::fixture("h4/stencil_1e-3/manifest.txt"));
    const auto derivs = parse_derivative_manifest(testutil::fixture("h4/derivs/manifest.txt"), st.center);
    const auto res = run_sa_oo_vqe(st.center, 2, 2, h4_options());
    const auto resp = solve_orbital_response(res, derivs, h4_options());
    const auto hf = hf_gradient(res, derivs, &resp);
    const auto fd = fd_gradient(solve_stencil(st, 2, 2, h4_options(), true, res));
    REQUIRE(hf.size() == fd.size());
    for (std::size_t k = 0; k < hf.size(); ++k) {
        CHECK(std::abs(hf[k].de_sa - fd[k].de_sa) < 1e-5);
        CHECK(std::abs(hf[k].de0 - fd[k].de0) < 1e-5);
        CHECK(std::abs(hf[k].de1 - fd[k].de1) < 1e-5);
    }
}

TEST_CASE("translational sum rule") {
    const auto center = read_fcidump(testutil::fixture("formaldimine/a130_p90/center.fcidump"));
    const auto derivs = parse_derivative_manifest(
        testutil::fixture("formaldimine/a130_p90/derivs/manifest.txt"), center);
    const auto res = run_sa_oo_vqe(center, 4, 3, options(Solver::Exact, {6, 7, 8}));
    double sum[3] = {0, 0, 0};
    for (const auto &row : hf_gradient(res, derivs)) {
        sum[row.coordinate.back() - 'x'] += row.de_sa;
    }
    for (double s : sum) {
        CHECK(std::abs(s) < 1e-5);
    }
}

TEST_CASE("coupling antisymmetry and vanishing diagonal") {
    const auto st = read_stencil(testutil::fixture("h4/stencil_1e-3/manifest.txt"));
    const auto derivs = parse_derivative_manifest(testutil::fixture("h4/derivs/manifest.txt"), st.center);
    const auto sol = solve_stencil(st, 2, 2, h4_options(), false);
    const auto d01 = fd_overlap_nac(sol, 0, 1), d10 = fd_overlap_nac(sol, 1, 0);
    CHECK((d01.d01 + d10.d01).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(fd_overlap_nac(sol, 0, 0).d01.cwiseAbs().maxCoeff() < 1e-8);
    CHECK(fd_overlap_nac(sol, 1, 1).d01.cwiseAbs().maxCoeff() < 1e-8);

    const auto h01 = hf_nac(sol.center, derivs, 0, 1), h10 = hf_nac(sol.center, derivs, 1, 0);
    CHECK((h01.d01 + h10.d01).cwiseAbs().maxCoeff() == 0.0);
    CHECK(hf_nac(sol.center, derivs, 0, 0).d01.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("H4 fixed-orbital couplings: overlap differences against Hellmann-Feynman") {
    const auto st = read_stencil(testutil::fixture("h4/stencil_1e-3/manifest.txt"));
    const auto derivs = parse_derivative_manifest(testutil::fixture("h4/derivs/manifest.txt"), st.center);
    const auto fd = fd_overlap_nac(st, 2, 2, h4_options());
    const auto res = run_sa_oo_vqe(st.center, 2, 2, h4_options());
    const auto hf = hf_nac(res, derivs);
    CHECK(hf.e_gap > 0.05);
    for (Eigen::Index k = 0; k < hf.d01.size(); ++k) {
        if (std::abs(hf.d01(k)) > 1e-3) {
            CHECK(std::abs(fd.d01(k) - hf.d01(k)) < 0.05 * std::abs(hf.d01(k)));
        } else {
            CHECK(std::abs(fd.d01(k)) < 1e-6);
        }
    }
}

TEST_CASE("H4 total couplings with orbital response and frame motion") {
    const auto m = meta("h4/meta.json");
    const auto st = read_stencil(testutil::fixture("h4/stencil_1e-3/manifest.txt"));
    const auto derivs = parse_derivative_manifest(testutil::fixture("h4/derivs/manifest.txt"), st.center);
    const auto conn = read_connection(testutil::fixture("h4/derivs/connection.txt"), 4);
    const auto res = run_sa_oo_vqe(st.center, 2, 2, h4_options());
    const auto resp = solve_orbital_response(res, derivs, h4_options());
    const auto nac = hf_nac(res, derivs, 0, 1, kGapFloor, NacTerms{&resp, &conn});
    std::vector<double> ref = m["nac01"], ref_ci = m["nac01_ci"];
    REQUIRE(ref.size() == static_cast<std::size_t>(nac.d01.size()));
    // Overall sign of the coupling vector is a phase convention.
    const double sign = nac.d01.dot(Eigen::Map<Vector>(ref.data(), ref.size())) < 0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        CHECK(std::abs(sign * nac.d01(i) - ref[k]) < 1e-4);
        CHECK(std::abs(sign * (nac.d_ci(i) + nac.d_response(i)) - ref_ci[k]) < 1e-4);
    }
    CHECK((nac.d01 - nac.d_ci - nac.d_response - nac.d_frame).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("divergent couplings are flagged") {
    const auto st = read_stencil(testutil::fixture("h4/stencil_1e-3/manifest.txt"));
    const auto derivs = parse_derivative_manifest(testutil::fixture("h4/derivs/manifest.txt"), st.center);
    const auto res = run_sa_oo_vqe(st.center, 2, 2, h4_options());
    const auto nac = hf_nac(res, derivs, 0, 1, 10.0);
    CHECK(nac.divergent);
    CHECK(nac.flags.front() == "divergent");
}

TEST_CASE("frame connection file") {
    const auto dir = testutil::scratch("connection");
    std::ofstream(dir / "c.txt") << "# frame connection\n0x 2 1 0.25\n0x 3 1 -0.5\n1y 3 2 1e-3\n";
    const auto conn = read_connection(dir / "c.txt", 3);
    REQUIRE(conn.size() == 2);
    CHECK(conn[0].coordinate_label == "0x");
    CHECK(conn[0].x(1, 0) == 0.25);
    CHECK(conn[0].x(0, 1) == -0.25);
    CHECK(conn[0].x(2, 0) == -0.5);
    CHECK(conn[1].x(2, 1) == 1e-3);

    std::ofstream(dir / "bad.txt") << "0x 2 1\n";
    CHECK_THROWS_AS(read_connection(dir / "bad.txt", 3), ParseError);
    std::ofstream(dir / "range.txt") << "0x 5 1 0.1\n";
    CHECK_THROWS(read_connection(dir / "range.txt", 3));
}

TEST_CASE("response CSV layout") {
    GradientRow row{"0x", 0.1, 0.2, 0.15, ""};
    const std::string csv = response_csv({"0x"}, {row}, nullptr, nullptr);
    CHECK(csv.rfind("coordinate_label,dE0,dE1,dE_SA,d01_hf,d01_fd,flags\n", 0) == 0);
    CHECK(csv.find("\n0x,1.000000000000e-01,2.000000000000e-01,1.500000000000e-01,,,\n") !=
          std::string::npos);
}
