#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "saoovqe/tensor.hpp"

namespace saoovqe {

enum class OptimizerMethod { Bfgs, GradientDescent, Pso };

std::string to_string(OptimizerMethod m);
OptimizerMethod parse_optimizer_method(const std::string &name);

struct OptimizerOptions {
    OptimizerMethod method = OptimizerMethod::Bfgs;
    int max_iters = 1000;
    /// Gradient ∞-norm threshold (gradient methods).
    double tol_grad = 1e-6;
    /// Change in f between iterations; for PSO the stall threshold on gbest.
    double tol_f = 1e-9;
    /// Initial step of gradient descent before backtracking.
    double gd_step = 1.0;
    std::uint64_t seed = 42;
    int pso_particles = 20;
    double pso_inertia = 0.7298;
    double pso_cognitive = 1.49618;
    double pso_social = 1.49618;
    /// PSO stops when gbest improved by less than tol_f for this many
    /// consecutive iterations.
    int pso_stall_iters = 200;
    std::optional<std::vector<std::pair<double, double>>> bounds;

    /// Throws ConfigError on non-positive counts or tolerances.
    void validate() const;
};

enum class OptimizerStatus { Converged, MaxIterations, LineSearchFailed };

std::string to_string(OptimizerStatus s);

struct IterationRecord {
    int iteration = 0;
    double f = 0.0;
    /// Gradient ∞-norm; NaN for PSO.
    double grad_norm = 0.0;
};

struct OptimizeResult {
    Vector x;
    double f = 0.0;
    OptimizerStatus status = OptimizerStatus::MaxIterations;
    int iterations = 0;
    int n_evaluations = 0;
    /// f_best after every iteration (entry 0 is the starting point).
    std::vector<IterationRecord> history;

    bool converged() const { return status == OptimizerStatus::Converged; }
};

using Objective = std::function<double(const Vector &)>;
using GradientFn = std::function<Vector(const Vector &)>;

/// Minimizes f from x0. bfgs and gradient_descent require `grad`.
/// Throws NumericalError when f returns NaN.
OptimizeResult minimize(const Objective &f, const GradientFn &grad, const Vector &x0,
                        const OptimizerOptions &opts);

} // namespace saoovqe
