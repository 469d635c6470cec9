#include "saoovqe/orbital_opt.hpp"

#include <cmath>
#include <limits>
#include <set>

#include <unsupported/Eigen/MatrixFunctions>

#include "saoovqe/error.hpp"

namespace saoovqe {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Average over the eight index permutations that leave (pq|rs) invariant.
Tensor4 symmetrize8(const Tensor4 &t) {
    const std::size_t n = t.dim();
    Tensor4 out(n);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q)
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t s = 0; s < n; ++s)
                    out(p, q, r, s) = 0.125 * (t(p, q, r, s) + t(q, p, r, s) + t(p, q, s, r) +
                                               t(q, p, s, r) + t(r, s, p, q) + t(s, r, p, q) +
                                               t(r, s, q, p) + t(s, r, q, p));
    return out;
}

double inf_norm(const Vector &v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

} // namespace

OrbitalPairs nonredundant_pairs(const ActiveSpaceProblem &part, bool include_active_active) {
    enum Block { Inactive, Active, Virtual };
    std::vector<Block> block(static_cast<std::size_t>(part.n_orb()));
    for (int i : part.inactive_indices) block[static_cast<std::size_t>(i)] = Inactive;
    for (int t : part.active_indices) block[static_cast<std::size_t>(t)] = Active;
    for (int a : part.virtual_indices) block[static_cast<std::size_t>(a)] = Virtual;
    OrbitalPairs out;
    for (int p = 0; p < part.n_orb(); ++p) {
        for (int q = 0; q < p; ++q) {
            const Block bp = block[static_cast<std::size_t>(p)];
            const Block bq = block[static_cast<std::size_t>(q)];
            if (bp != bq || (bp == Active && include_active_active)) {
                out.emplace_back(p, q);
            }
        }
    }
    return out;
}

Matrix rotation_matrix(const Matrix &kappa) {
    if (kappa.rows() != kappa.cols()) {
        throw DimensionError("rotation generator must be square");
    }
    if ((kappa + kappa.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ConfigError("rotation generator must be antisymmetric");
    }
    const Matrix minus = -kappa;
    return minus.exp();
}

SpatialIntegrals transform_integrals(const SpatialIntegrals &ints, const Matrix &u) {
    if (u.rows() != ints.n_orb || u.cols() != ints.n_orb) {
        throw DimensionError("orbital rotation is " + std::to_string(u.rows()) + "x" +
                             std::to_string(u.cols()) + ", integrals have " +
                             std::to_string(ints.n_orb) + " orbitals");
    }
    SpatialIntegrals out = ints;
    out.h = transform_one_body(ints.h, u);
    out.g = transform_two_body(ints.g, u);
    return out;
}

SpatialIntegrals rotate_integrals(const SpatialIntegrals &ints, const Matrix &kappa) {
    return transform_integrals(ints, rotation_matrix(kappa));
}

FullDensity extend_density(const Matrix &gamma, const Tensor4 &Gamma,
                           const ActiveSpaceProblem &part, double overlap) {
    const int n = part.n_orb();
    const auto &act = part.active_indices;
    const auto &core = part.inactive_indices;
    const auto na = act.size();
    if (gamma.rows() != static_cast<Eigen::Index>(na) || Gamma.dim() != na) {
        throw DimensionError("active RDMs do not match the partition");
    }
    FullDensity d;
    d.gamma = Matrix::Zero(n, n);
    d.Gamma = Tensor4(static_cast<std::size_t>(n));
    const Matrix gs = 0.5 * (gamma + gamma.transpose());
    const Tensor4 Gs = symmetrize8(Gamma);
    for (std::size_t t = 0; t < na; ++t)
        for (std::size_t u = 0; u < na; ++u) {
            d.gamma(act[t], act[u]) = gs(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(u));
            for (std::size_t v = 0; v < na; ++v)
                for (std::size_t w = 0; w < na; ++w)
                    d.Gamma(act[t], act[u], act[v], act[w]) = Gs(t, u, v, w);
        }
    if (!core.empty()) {
        for (int i : core) {
            d.gamma(i, i) = 2.0 * overlap;
            for (int j : core) {
                d.Gamma(i, i, j, j) += 4.0 * overlap;
                d.Gamma(i, j, j, i) -= 2.0 * overlap;
            }
            for (std::size_t t = 0; t < na; ++t)
                for (std::size_t u = 0; u < na; ++u) {
                    const double g = gs(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(u));
                    d.Gamma(i, i, act[t], act[u]) += 2.0 * g;
                    d.Gamma(act[t], act[u], i, i) += 2.0 * g;
                    d.Gamma(act[t], i, i, act[u]) -= g;
                    d.Gamma(i, act[u], act[t], i) -= g;
                }
        }
        d.Gamma = symmetrize8(d.Gamma);
    }
    return d;
}

double energy_from_density(const SpatialIntegrals &ints, const FullDensity &d,
                           double core_weight) {
    const int n = ints.n_orb;
    if (d.gamma.rows() != n) {
        throw DimensionError("density does not match the integrals");
    }
    double e = core_weight * ints.e_core + (ints.h.array() * d.gamma.array()).sum();
    const Tensor4 g = ints.g.unpack();
    for (std::size_t i = 0; i < g.data().size(); ++i) {
        e += 0.5 * g.data()[i] * d.Gamma.data()[i];
    }
    return e;
}

Matrix generalized_fock(const SpatialIntegrals &ints, const FullDensity &d) {
    const int n = ints.n_orb;
    if (d.gamma.rows() != n || d.Gamma.dim() != static_cast<std::size_t>(n)) {
        throw DimensionError("density does not match the integrals");
    }
    const Tensor4 g = ints.g.unpack();
    const Eigen::Index n3 = static_cast<Eigen::Index>(n) * n * n;
    Eigen::Map<const RowMat> gm(g.data().data(), n, n3);
    Eigen::Map<const RowMat> Gm(d.Gamma.data().data(), n, n3);
    Matrix f = ints.h * d.gamma.transpose();
    f.noalias() += gm * Gm.transpose();
    return f;
}

Matrix orbital_gradient(const SpatialIntegrals &ints, const FullDensity &d,
                        const OrbitalPairs &pairs) {
    const Matrix f = generalized_fock(ints, d);
    Matrix g = Matrix::Zero(ints.n_orb, ints.n_orb);
    for (const auto &[p, q] : pairs) {
        g(p, q) = 2.0 * (f(q, p) - f(p, q));
        g(q, p) = -g(p, q);
    }
    return g;
}

Matrix orbital_gradient(const SpatialIntegrals &ints, const RdmSet &sa,
                        const ActiveSpaceProblem &part, bool include_active_active) {
    if (part.n_orb() != ints.n_orb) {
        throw DimensionError("partition covers " + std::to_string(part.n_orb()) +
                             " orbitals, integrals have " + std::to_string(ints.n_orb));
    }
    return orbital_gradient(ints, extend_density(sa.gamma, sa.Gamma, part),
                            nonredundant_pairs(part, include_active_active));
}

Vector pack_pairs(const Matrix &m, const OrbitalPairs &pairs) {
    Vector v(static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        v(static_cast<Eigen::Index>(k)) = m(pairs[k].first, pairs[k].second);
    }
    return v;
}

Matrix unpack_pairs(const Vector &v, const OrbitalPairs &pairs, int n_orb) {
    Matrix m = Matrix::Zero(n_orb, n_orb);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        m(pairs[k].first, pairs[k].second) = v(static_cast<Eigen::Index>(k));
        m(pairs[k].second, pairs[k].first) = -v(static_cast<Eigen::Index>(k));
    }
    return m;
}

Vector orbital_newton_step(const Vector &grad,
                           const std::function<Vector(const Vector &)> &hess_apply,
                           double trust_radius, double cg_tol) {
    Vector x = Vector::Zero(grad.size());
    const double gnorm = grad.norm();
    if (gnorm == 0.0) {
        return x;
    }
    auto steepest = [&]() -> Vector { return -trust_radius / gnorm * grad; };
    // Largest τ ≥ 0 with ‖x + τd‖ = radius.
    auto to_boundary = [&](const Vector &d) {
        const double a = d.squaredNorm(), b = 2.0 * x.dot(d),
                     c = x.squaredNorm() - trust_radius * trust_radius;
        return (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c))) / (2.0 * a);
    };
    Vector r = -grad;
    Vector d = r;
    double rr = r.squaredNorm();
    for (Eigen::Index it = 0; it < 2 * grad.size() + 10; ++it) {
        const Vector hd = hess_apply(d);
        const double curv = d.dot(hd);
        if (curv <= 0.0) {
            return it == 0 ? steepest() : Vector(x + to_boundary(d) * d);
        }
        const double alpha = rr / curv;
        if ((x + alpha * d).norm() >= trust_radius) {
            return x + to_boundary(d) * d;
        }
        x += alpha * d;
        r -= alpha * hd;
        const double rr_new = r.squaredNorm();
        if (std::sqrt(rr_new) <= cg_tol * gnorm) {
            break;
        }
        d = r + (rr_new / rr) * d;
        rr = rr_new;
    }
    return x;
}

std::string to_string(Solver s) { return s == Solver::Vqe ? "vqe" : "exact"; }

Solver parse_solver(const std::string &name) {
    if (name == "vqe") {
        return Solver::Vqe;
    }
    if (name == "exact") {
        return Solver::Exact;
    }
    throw ConfigError("unknown solver '" + name + "' (expected vqe or exact)");
}

SaVqeState solve_active_space(const ActiveSpaceProblem &prob, const SaooVqeOptions &options,
                              const std::optional<Vector> &theta0) {
    if (options.solver == Solver::Exact) {
        return solve_exact(prob, options.vqe.w0, options.vqe.w1);
    }
    return run_sa_vqe(prob, options.vqe, theta0);
}

SaooVqeResult fixed_orbital_result(const SpatialIntegrals &ints, const ActiveSpaceProblem &prob,
                                   const SaVqeState &states, double w0, double w1) {
    SaooVqeResult res;
    const int na = prob.n_active_orb;
    res.e0 = states.e0;
    res.e1 = states.e1;
    res.e_sa = w0 * states.e0 + w1 * states.e1;
    res.w0 = w0;
    res.w1 = w1;
    res.theta = states.theta;
    res.total_rotation = Matrix::Identity(ints.n_orb, ints.n_orb);
    res.integrals = ints;
    res.problem = prob;
    res.states = states;
    res.rdm0 = make_rdms(states.psi0, states.psi0, na, 0, 0);
    res.rdm1 = make_rdms(states.psi1, states.psi1, na, 1, 1);
    res.rdm_sa = average_rdms(res.rdm0, res.rdm1, w0, w1);
    res.rdm01 = make_rdms(states.psi0, states.psi1, na, 0, 1);
    res.resolution_angle = states.resolution_angle;
    res.circuit_grad_norm = states.history.empty() ? 0.0 : states.history.back().grad_norm;
    res.converged = states.converged;
    return res;
}

SaooVqeResult run_sa_oo_vqe(const SpatialIntegrals &ints, int n_active_elec, int n_active_orb,
                            const SaooVqeOptions &options, const std::optional<WarmStart> &warm) {
    ints.validate();
    const int n = ints.n_orb;
    Matrix u = Matrix::Identity(n, n);
    std::optional<Vector> theta;
    if (warm) {
        if (warm->rotation.size() > 0) {
            if (warm->rotation.rows() != n || warm->rotation.cols() != n) {
                throw DimensionError("warm-start rotation does not match the orbital count");
            }
            u = warm->rotation;
        }
        if (warm->theta.size() > 0) {
            theta = warm->theta;
        }
    }
    const ActiveSpaceProblem partition =
        build_active_space(ints, n_active_orb, n_active_elec, options.active_indices);
    const OrbitalPairs pairs = nonredundant_pairs(partition, options.include_active_active);
    const bool rotate = options.optimize_orbitals && !pairs.empty();

    SaooVqeResult best;
    double radius = options.trust_radius;
    double e_prev = std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < options.max_macro_iters; ++it) {
        const SpatialIntegrals cur = transform_integrals(ints, u);
        const ActiveSpaceProblem prob = rebuild_active_space(cur, partition);
        const SaVqeState st = solve_active_space(prob, options, theta);
        if (options.solver == Solver::Vqe) {
            theta = st.theta;
        }
        SaooVqeResult res = fixed_orbital_result(cur, prob, st, options.vqe.w0, options.vqe.w1);
        res.total_rotation = u;

        const FullDensity dens = extend_density(res.rdm_sa.gamma, res.rdm_sa.Gamma, prob);
        const Vector grad = pack_pairs(orbital_gradient(cur, dens, pairs), pairs);
        res.orbital_grad_norm = rotate ? inf_norm(grad) : 0.0;

        MacroRecord rec{it, res.e_sa, res.e0, res.e1, res.orbital_grad_norm,
                        res.circuit_grad_norm, 0.0};
        const bool stationary = res.orbital_grad_norm < options.tol_orbital_grad &&
                                res.circuit_grad_norm < options.vqe.optimizer.tol_grad &&
                                st.converged;
        const bool settled = !rotate || (it > 0 && std::abs(res.e_sa - e_prev) < options.tol_energy);
        res.history = best.history;
        if (stationary && settled) {
            res.converged = true;
            res.history.push_back(rec);
            return res;
        }
        if (!rotate) {
            res.converged = false;
            res.history.push_back(rec);
            return res;
        }

        // Hessian-vector products by central differences of the gradient
        // along the normalized direction, at fixed RDMs.
        const double hstep = options.hessian_fd_step;
        auto hess = [&](const Vector &v) -> Vector {
            const double vn = v.norm();
            if (vn == 0.0) {
                return Vector::Zero(v.size());
            }
            const Matrix k = unpack_pairs(hstep / vn * v, pairs, n);
            const Vector gp = pack_pairs(orbital_gradient(rotate_integrals(cur, k), dens, pairs), pairs);
            const Vector gm = pack_pairs(orbital_gradient(rotate_integrals(cur, Matrix(-k)), dens, pairs), pairs);
            return vn * (gp - gm) / (2.0 * hstep);
        };
        const double e_model0 = energy_from_density(cur, dens);
        Vector step;
        Matrix v;
        for (int attempt = 0;; ++attempt) {
            step = orbital_newton_step(grad, hess, radius);
            v = rotation_matrix(unpack_pairs(step, pairs, n));
            const double e_trial = energy_from_density(transform_integrals(cur, v), dens);
            if (e_trial <= e_model0 || attempt >= 30) {
                break;
            }
            radius *= 0.5;
        }
        rec.step_norm = step.norm();
        res.history.push_back(rec);
        best = res;
        u = u * v;
        radius = std::min(options.trust_radius, 2.0 * radius);
        e_prev = res.e_sa;
    }
    best.converged = false;
    return best;
}

} // namespace saoovqe
