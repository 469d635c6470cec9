#include <doctest.h>

#include <cmath>
#include <limits>

#include "saoovqe/error.hpp"
#include "saoovqe/optimizers.hpp"

using namespace saoovqe;

namespace {

double sphere(const Vector &x) { return x.squaredNorm(); }
Vector sphere_grad(const Vector &x) { return 2.0 * x; }

double rosenbrock(const Vector &x) {
    return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
}

Vector rosenbrock_grad(const Vector &x) {
    Vector g(2);
    g(0) = -400.0 * x(0) * (x(1) - x(0) * x(0)) - 2.0 * (1.0 - x(0));
    g(1) = 200.0 * (x(1) - x(0) * x(0));
    return g;
}

OptimizerOptions pso_options() {
    OptimizerOptions o;
    o.method = OptimizerMethod::Pso;
    o.seed = 42;
    o.pso_particles = 20;
    o.max_iters = 2000;
    o.bounds = std::vector<std::pair<double, double>>{{-5.0, 5.0}, {-5.0, 5.0}};
    return o;
}

void check_monotone(const OptimizeResult &r) {
    for (std::size_t k = 1; k < r.history.size(); ++k) {
        CHECK(r.history[k].f <= r.history[k - 1].f);
    }
}

} // namespace

TEST_CASE("BFGS on a sphere") {
    OptimizerOptions o;
    o.tol_grad = 1e-10;
    const auto r = minimize(sphere, sphere_grad, (Vector(2) << 3.0, -4.0).finished(), o);
    CHECK(r.converged());
    CHECK(r.x.norm() < 1e-8);
    CHECK(r.iterations < 50);
    check_monotone(r);
}

TEST_CASE("BFGS on Rosenbrock") {
    OptimizerOptions o;
    o.tol_grad = 1e-8;
    const auto r = minimize(rosenbrock, rosenbrock_grad, (Vector(2) << -1.2, 1.0).finished(), o);
    CHECK(r.converged());
    CHECK((r.x - Vector::Ones(2)).norm() < 1e-6);
    check_monotone(r);
}

TEST_CASE("gradient descent on a sphere") {
    OptimizerOptions o;
    o.method = OptimizerMethod::GradientDescent;
    o.gd_step = 0.25;
    o.tol_grad = 1e-9;
    const auto r = minimize(sphere, sphere_grad, (Vector(3) << 1.0, 2.0, 3.0).finished(), o);
    CHECK(r.converged());
    CHECK(r.x.norm() < 1e-9);
    check_monotone(r);
}

TEST_CASE("PSO on Rosenbrock") {
    const auto o = pso_options();
    const auto r = minimize(rosenbrock, {}, Vector::Zero(2), o);
    CHECK(r.f < 1e-3);
    check_monotone(r);
    CHECK(std::isnan(r.history.back().grad_norm));
    for (Eigen::Index i = 0; i < 2; ++i) {
        CHECK(r.x(i) >= -5.0);
        CHECK(r.x(i) <= 5.0);
    }
}

TEST_CASE("seeded runs are bit-identical") {
    const auto o = pso_options();
    const auto a = minimize(rosenbrock, {}, Vector::Zero(2), o);
    const auto b = minimize(rosenbrock, {}, Vector::Zero(2), o);
    CHECK(a.x == b.x);
    CHECK(a.f == b.f);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t k = 0; k < a.history.size(); ++k) {
        CHECK(a.history[k].f == b.history[k].f);
    }
    auto other = o;
    other.seed = 7;
    CHECK(minimize(rosenbrock, {}, Vector::Zero(2), other).history[1].f != a.history[1].f);

    OptimizerOptions bfgs;
    const auto c = minimize(rosenbrock, rosenbrock_grad, (Vector(2) << -1.2, 1.0).finished(), bfgs);
    const auto d = minimize(rosenbrock, rosenbrock_grad, (Vector(2) << -1.2, 1.0).finished(), bfgs);
    CHECK(c.x == d.x);
    CHECK(c.iterations == d.iterations);
}

TEST_CASE("iteration cap is reported") {
    OptimizerOptions o;
    o.max_iters = 2;
    o.tol_grad = 1e-14;
    const auto r = minimize(rosenbrock, rosenbrock_grad, (Vector(2) << -1.2, 1.0).finished(), o);
    CHECK(r.status == OptimizerStatus::MaxIterations);
    CHECK_FALSE(r.converged());
    CHECK(r.iterations == 2);
}

TEST_CASE("NaN objective raises") {
    OptimizerOptions o;
    auto nan_f = [](const Vector &) { return std::numeric_limits<double>::quiet_NaN(); };
    CHECK_THROWS_AS(minimize(nan_f, sphere_grad, Vector::Ones(2), o), NumericalError);
}

TEST_CASE("option validation and names") {
    OptimizerOptions o;
    o.validate();
    o.max_iters = -1;
    CHECK_THROWS_AS(o.validate(), ConfigError);
    o = OptimizerOptions{};
    o.tol_grad = -1.0;
    CHECK_THROWS_AS(o.validate(), ConfigError);
    o = OptimizerOptions{};
    o.bounds = std::vector<std::pair<double, double>>{{1.0, -1.0}};
    CHECK_THROWS_AS(o.validate(), ConfigError);

    CHECK(parse_optimizer_method("bfgs") == OptimizerMethod::Bfgs);
    CHECK(parse_optimizer_method("pso") == OptimizerMethod::Pso);
    CHECK(parse_optimizer_method("gradient_descent") == OptimizerMethod::GradientDescent);
    CHECK(to_string(OptimizerMethod::Pso) == "pso");
    CHECK_THROWS_AS(parse_optimizer_method("adam"), ConfigError);

    OptimizerOptions bfgs;
    CHECK_THROWS(minimize(sphere, {}, Vector::Ones(2), bfgs));
}
