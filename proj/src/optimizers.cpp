#include "saoovqe/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "saoovqe/error.hpp"

namespace saoovqe {

namespace {

double checked(double v) {
    if (std::isnan(v)) {
        throw NumericalError("objective returned NaN");
    }
    return v;
}

double inf_norm(const Vector &v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

/// Armijo backtracking along a descent direction d (c = 1e-4, halving).
/// A step whose change in f is within rounding noise of |f| is accepted too,
/// so tight gradient tolerances stay reachable once f stops resolving the
/// decrease. Returns the accepted step length, or 0 if none was found.
double backtrack(const Objective &f, const Vector &x, double fx, const Vector &g, const Vector &d,
                 double alpha, int &evals, double &f_new) {
    const double slope = g.dot(d);
    const double noise = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(fx));
    for (int i = 0; i < 60; ++i) {
        f_new = checked(f(x + alpha * d));
        ++evals;
        if (f_new <= fx + 1e-4 * alpha * slope ||
            (std::abs(alpha * slope) < noise && f_new - fx <= noise)) {
            return alpha;
        }
        alpha *= 0.5;
    }
    return 0.0;
}

bool gradient_converged(double gnorm, double df, const OptimizerOptions &o) {
    return gnorm < o.tol_grad && std::abs(df) < o.tol_f;
}

OptimizeResult run_gradient(const Objective &f, const GradientFn &grad, const Vector &x0,
                            const OptimizerOptions &o, bool bfgs) {
    if (!grad) {
        throw ConfigError("gradient-based optimizer needs a gradient callable");
    }
    OptimizeResult res;
    Vector x = x0;
    double fx = checked(f(x));
    Vector g = grad(x);
    res.n_evaluations = 1;
    res.history.push_back({0, fx, inf_norm(g)});
    const auto n = x.size();
    Matrix hinv = Matrix::Identity(n, n);
    bool scaled = false;
    double df = 0.0;
    res.status = OptimizerStatus::MaxIterations;

    if (inf_norm(g) < o.tol_grad) {
        res.status = OptimizerStatus::Converged;
    }
    int it = 0;
    while (res.status != OptimizerStatus::Converged && it < o.max_iters) {
        ++it;
        Vector d = bfgs ? Vector(-hinv * g) : Vector(-g);
        if (g.dot(d) >= 0.0) {
            // Lost positive definiteness; restart from steepest descent.
            hinv.setIdentity();
            d = -g;
        }
        double f_new = fx;
        const double step =
            backtrack(f, x, fx, g, d, bfgs ? 1.0 : o.gd_step, res.n_evaluations, f_new);
        if (step == 0.0) {
            if (bfgs && !hinv.isIdentity()) {
                hinv.setIdentity();
                --it;
                continue;
            }
            res.status = OptimizerStatus::LineSearchFailed;
            break;
        }
        const Vector s = step * d;
        x += s;
        const Vector g_new = grad(x);
        df = f_new - fx;
        fx = f_new;
        if (bfgs) {
            const Vector y = g_new - g;
            const double sy = s.dot(y);
            if (sy > 1e-14 * s.norm() * y.norm()) {
                if (!scaled) {
                    hinv *= sy / y.dot(y);
                    scaled = true;
                }
                const double rho = 1.0 / sy;
                const Vector hy = hinv * y;
                hinv += (rho * rho * y.dot(hy) + rho) * s * s.transpose() -
                        rho * (hy * s.transpose() + s * hy.transpose());
            }
        }
        g = g_new;
        res.history.push_back({it, fx, inf_norm(g)});
        if (gradient_converged(inf_norm(g), df, o)) {
            res.status = OptimizerStatus::Converged;
        }
    }
    res.x = x;
    res.f = fx;
    res.iterations = it;
    return res;
}

OptimizeResult run_pso(const Objective &f, const Vector &x0, const OptimizerOptions &o) {
    const auto n = x0.size();
    Vector lo(n), hi(n);
    if (o.bounds) {
        if (static_cast<Eigen::Index>(o.bounds->size()) != n) {
            throw DimensionError("PSO bounds have " + std::to_string(o.bounds->size()) +
                                 " entries, problem has " + std::to_string(n));
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            lo(i) = (*o.bounds)[static_cast<std::size_t>(i)].first;
            hi(i) = (*o.bounds)[static_cast<std::size_t>(i)].second;
            if (!(lo(i) < hi(i))) {
                throw ConfigError("PSO bound " + std::to_string(i) + " is empty");
            }
        }
    } else {
        lo = x0.array() - 1.0;
        hi = x0.array() + 1.0;
    }
    const Vector vmax = 0.5 * (hi - lo);

    std::mt19937_64 rng(o.seed);
    // 53 random bits mapped to [0, 1); avoids implementation-defined
    // distributions so runs are bit-identical across standard libraries.
    auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    const int np = o.pso_particles;
    std::vector<Vector> x(static_cast<std::size_t>(np)), v(x.size()), pbest(x.size());
    std::vector<double> pval(x.size());
    OptimizeResult res;
    res.x = x0;
    res.f = checked(f(x0));
    res.n_evaluations = 1;
    for (std::size_t p = 0; p < x.size(); ++p) {
        x[p].resize(n);
        v[p].resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            x[p](i) = lo(i) + uniform() * (hi(i) - lo(i));
            v[p](i) = (2.0 * uniform() - 1.0) * vmax(i);
        }
        pbest[p] = x[p];
        pval[p] = checked(f(x[p]));
        ++res.n_evaluations;
        // Strict comparison: ties keep the lowest particle index.
        if (pval[p] < res.f) {
            res.f = pval[p];
            res.x = x[p];
        }
    }
    res.history.push_back({0, res.f, std::numeric_limits<double>::quiet_NaN()});
    res.status = OptimizerStatus::MaxIterations;
    int stall = 0;
    int it = 0;
    while (it < o.max_iters) {
        ++it;
        const double before = res.f;
        for (std::size_t p = 0; p < x.size(); ++p) {
            for (Eigen::Index i = 0; i < n; ++i) {
                const double r1 = uniform(), r2 = uniform();
                double vi = o.pso_inertia * v[p](i) +
                            o.pso_cognitive * r1 * (pbest[p](i) - x[p](i)) +
                            o.pso_social * r2 * (res.x(i) - x[p](i));
                vi = std::clamp(vi, -vmax(i), vmax(i));
                v[p](i) = vi;
                x[p](i) += vi;
                if (o.bounds) {
                    x[p](i) = std::clamp(x[p](i), lo(i), hi(i));
                }
            }
        }
        // Evaluate all particles, then update bests in index order.
        for (std::size_t p = 0; p < x.size(); ++p) {
            const double fp = checked(f(x[p]));
            ++res.n_evaluations;
            if (fp < pval[p]) {
                pval[p] = fp;
                pbest[p] = x[p];
            }
            if (fp < res.f) {
                res.f = fp;
                res.x = x[p];
            }
        }
        res.history.push_back({it, res.f, std::numeric_limits<double>::quiet_NaN()});
        stall = before - res.f < o.tol_f ? stall + 1 : 0;
        if (stall >= o.pso_stall_iters) {
            res.status = OptimizerStatus::Converged;
            break;
        }
    }
    res.iterations = it;
    return res;
}

} // namespace

std::string to_string(OptimizerMethod m) {
    switch (m) {
    case OptimizerMethod::Bfgs:
        return "bfgs";
    case OptimizerMethod::GradientDescent:
        return "gradient_descent";
    case OptimizerMethod::Pso:
        return "pso";
    }
    return "?";
}

OptimizerMethod parse_optimizer_method(const std::string &name) {
    if (name == "bfgs") {
        return OptimizerMethod::Bfgs;
    }
    if (name == "gradient_descent" || name == "gd") {
        return OptimizerMethod::GradientDescent;
    }
    if (name == "pso") {
        return OptimizerMethod::Pso;
    }
    throw ConfigError("unknown optimizer '" + name + "' (expected bfgs, gradient_descent or pso)");
}

std::string to_string(OptimizerStatus s) {
    switch (s) {
    case OptimizerStatus::Converged:
        return "converged";
    case OptimizerStatus::MaxIterations:
        return "max_iterations";
    case OptimizerStatus::LineSearchFailed:
        return "line_search_failed";
    }
    return "?";
}

void OptimizerOptions::validate() const {
    if (max_iters < 0 || !(tol_grad > 0.0) || !(tol_f > 0.0) || !(gd_step > 0.0)) {
        throw ConfigError("optimizer iterations, tolerances and step must be positive");
    }
    if (pso_particles < 1 || pso_stall_iters < 1) {
        throw ConfigError("pso_particles and pso_stall_iters must be positive");
    }
    if (pso_inertia < 0.0 || pso_cognitive < 0.0 || pso_social < 0.0) {
        throw ConfigError("PSO coefficients must be non-negative");
    }
    if (bounds) {
        for (const auto &[lo, hi] : *bounds) {
            if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
                throw ConfigError("optimizer bounds need finite lo < hi");
            }
        }
    }
}

OptimizeResult minimize(const Objective &f, const GradientFn &grad, const Vector &x0,
                        const OptimizerOptions &opts) {
    opts.validate();
    switch (opts.method) {
    case OptimizerMethod::Bfgs:
        return run_gradient(f, grad, x0, opts, true);
    case OptimizerMethod::GradientDescent:
        return run_gradient(f, grad, x0, opts, false);
    case OptimizerMethod::Pso:
        return run_pso(f, x0, opts);
    }
    throw ConfigError("unknown optimizer method");
}

} // namespace saoovqe
