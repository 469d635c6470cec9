#include "saoovqe/response.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "saoovqe/error.hpp"

namespace saoovqe {

namespace {

std::vector<std::string> split_ws(const std::string &s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string t; is >> t;) {
        out.push_back(t);
    }
    return out;
}

/// Runs fn(0..n-1) on up to `jobs` threads; rethrows the first exception.
template <class Fn> void parallel_for(std::size_t n, int jobs, Fn fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex mu;
    auto worker = [&]() {
        for (std::size_t i; (i = next++) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(jobs, static_cast<int>(n)); ++t) {
        pool.emplace_back(worker);
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

double real_overlap(const StateVector &a, const StateVector &b) { return inner(a, b).real(); }

void negate(StateVector &s) {
    for (auto &a : s.amplitudes()) {
        a = -a;
    }
}

const StateVector &state_of(const SaooVqeResult &r, int i) {
    if (i != 0 && i != 1) {
        throw ConfigError("state index must be 0 or 1");
    }
    return i == 0 ? r.states.psi0 : r.states.psi1;
}

double energy_of(const SaooVqeResult &r, int i) { return i == 0 ? r.e0 : r.e1; }

void require_fixed_orbital(const DerivativeIntegralSet &d) {
    if (d.convention != OrbitalConvention::FixedOrbital) {
        throw ConfigError("derivative set '" + d.coordinate_label +
                          "' uses the tracked-orbital convention; fixed-orbital is required");
    }
}

std::string join_flags(const std::vector<std::string> &f) {
    std::string s;
    for (const auto &x : f) {
        if (x.empty()) {
            continue;
        }
        s += (s.empty() ? "" : ";") + x;
    }
    return s;
}

std::string point_flags(const TrackedStates &p, const TrackedStates &m) {
    std::vector<std::string> f;
    if (!p.converged || !m.converged) f.push_back("nonconverged");
    if (p.ambiguous || m.ambiguous) f.push_back("ambiguous");
    if (p.swapped || m.swapped) f.push_back("swapped");
    return join_flags(f);
}

} // namespace

std::string to_string(Tracking t) { return t == Tracking::PhaseMatched ? "phase-matched" : "none"; }

Tracking parse_tracking(const std::string &name) {
    if (name == "phase-matched") {
        return Tracking::PhaseMatched;
    }
    if (name == "none") {
        return Tracking::None;
    }
    throw ConfigError("unknown tracking mode '" + name + "' (expected phase-matched or none)");
}

std::string to_string(NacMethod m) {
    return m == NacMethod::HellmannFeynman ? "hellmann_feynman" : "fd_overlap";
}

void GeometryStencil::validate() const {
    if (!(step > 0.0)) {
        throw ConfigError("stencil step must be positive");
    }
    for (const auto &c : coordinates) {
        for (int dir : {+1, -1}) {
            auto it = displaced.find({c, dir});
            if (it == displaced.end()) {
                throw ConfigError("stencil coordinate '" + c + "' lacks its " +
                                  (dir > 0 ? "+" : "-") + " entry");
            }
            if (it->second.n_orb != center.n_orb || it->second.n_elec != center.n_elec) {
                throw DimensionError("stencil entry '" + c + (dir > 0 ? "+" : "-") +
                                     "' does not match the center dimensions");
            }
        }
    }
}

GeometryStencil read_stencil(const std::filesystem::path &manifest) {
    std::ifstream in(manifest);
    if (!in) {
        throw ConfigError("cannot open stencil manifest '" + manifest.string() + "'");
    }
    const auto base = manifest.parent_path();
    GeometryStencil st;
    bool have_center = false, have_step = false;
    std::size_t lineno = 0;
    auto load = [&](const std::string &rel, const std::string &tag) {
        if (parse_convention(tag) != OrbitalConvention::FixedOrbital) {
            throw ParseError(manifest.string() + ": stencil entries must be fixed-orbital", lineno);
        }
        const auto path = base / rel;
        if (!std::filesystem::exists(path)) {
            throw ConfigError("stencil file '" + path.string() + "' listed on line " +
                              std::to_string(lineno) + " does not exist");
        }
        return read_fcidump(path);
    };
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        const auto hash = line.find('#');
        const auto toks = split_ws(hash == std::string::npos ? line : line.substr(0, hash));
        if (toks.empty()) {
            continue;
        }
        if (toks[0] == "step" && toks.size() == 2) {
            try {
                st.step = std::stod(toks[1]);
            } catch (const std::exception &) {
                throw ParseError(manifest.string() + ": bad step value '" + toks[1] + "'", lineno);
            }
            have_step = true;
        } else if (toks[0] == "tracking" && toks.size() == 2) {
            try {
                st.tracking = parse_tracking(toks[1]);
            } catch (const ConfigError &e) {
                throw ParseError(manifest.string() + ": " + e.what(), lineno);
            }
        } else if (toks.size() == 3 && toks[0] == "center") {
            st.center = load(toks[1], toks[2]);
            have_center = true;
        } else if (toks.size() == 3 && toks[0].size() > 1 &&
                   (toks[0].back() == '+' || toks[0].back() == '-')) {
            const std::string label = toks[0].substr(0, toks[0].size() - 1);
            const int dir = toks[0].back() == '+' ? 1 : -1;
            if (st.displaced.count({label, dir})) {
                throw ParseError(manifest.string() + ": duplicate entry '" + toks[0] + "'", lineno);
            }
            if (std::find(st.coordinates.begin(), st.coordinates.end(), label) ==
                st.coordinates.end()) {
                st.coordinates.push_back(label);
            }
            st.displaced[{label, dir}] = load(toks[1], toks[2]);
        } else {
            throw ParseError(manifest.string() + ": unrecognized stencil line", lineno);
        }
    }
    if (!have_center || !have_step) {
        throw ParseError(manifest.string() + ": stencil needs 'step' and 'center' lines");
    }
    st.validate();
    return st;
}

TrackedStates track_states(const StateVector &ref0, const StateVector &ref1, double e0, double e1,
                           StateVector psi0, StateVector psi1, Tracking tracking) {
    TrackedStates t;
    if (tracking == Tracking::PhaseMatched) {
        const double o00 = real_overlap(ref0, psi0), o01 = real_overlap(ref0, psi1);
        const double o10 = real_overlap(ref1, psi0), o11 = real_overlap(ref1, psi1);
        if (std::abs(o01) * std::abs(o10) > std::abs(o00) * std::abs(o11)) {
            std::swap(psi0, psi1);
            std::swap(e0, e1);
            t.swapped = true;
        }
        if (real_overlap(ref0, psi0) < 0.0) {
            negate(psi0);
        }
        if (real_overlap(ref1, psi1) < 0.0) {
            negate(psi1);
        }
    }
    t.overlap0 = real_overlap(ref0, psi0);
    t.overlap1 = real_overlap(ref1, psi1);
    t.ambiguous = tracking == Tracking::PhaseMatched &&
                  (std::abs(t.overlap0) < kTrackingThreshold ||
                   std::abs(t.overlap1) < kTrackingThreshold);
    t.e0 = e0;
    t.e1 = e1;
    t.psi0 = std::move(psi0);
    t.psi1 = std::move(psi1);
    return t;
}

StencilSolution solve_stencil(const GeometryStencil &stencil, int n_active_elec,
                              int n_active_orb, const SaooVqeOptions &options,
                              bool relax_orbitals, const std::optional<SaooVqeResult> &center,
                              int jobs) {
    stencil.validate();
    StencilSolution sol;
    sol.center = center ? *center
                        : run_sa_oo_vqe(stencil.center, n_active_elec, n_active_orb, options);
    sol.coordinates = stencil.coordinates;
    sol.step = stencil.step;
    const auto &c = sol.center;
    const double w0 = options.vqe.w0, w1 = options.vqe.w1;

    std::vector<std::pair<std::string, int>> keys;
    for (const auto &label : stencil.coordinates) {
        keys.emplace_back(label, +1);
        keys.emplace_back(label, -1);
    }
    std::vector<TrackedStates> out(keys.size());
    parallel_for(keys.size(), jobs, [&](std::size_t k) {
        const SpatialIntegrals &ints = stencil.displaced.at(keys[k]);
        StateVector p0, p1;
        double e0, e1;
        bool converged;
        if (relax_orbitals) {
            const auto r = run_sa_oo_vqe(ints, n_active_elec, n_active_orb, options,
                                         WarmStart{c.theta, c.total_rotation});
            p0 = r.states.psi0;
            p1 = r.states.psi1;
            e0 = r.e0;
            e1 = r.e1;
            converged = r.converged;
        } else {
            const auto prob =
                rebuild_active_space(transform_integrals(ints, c.total_rotation), c.problem);
            const auto st = solve_active_space(prob, options,
                                               c.theta.size() ? std::optional<Vector>(c.theta)
                                                              : std::nullopt);
            p0 = st.psi0;
            p1 = st.psi1;
            e0 = st.e0;
            e1 = st.e1;
            converged = st.converged;
        }
        out[k] = track_states(c.states.psi0, c.states.psi1, e0, e1, std::move(p0), std::move(p1),
                              stencil.tracking);
        out[k].e_sa = w0 * out[k].e0 + w1 * out[k].e1;
        out[k].converged = converged;
    });
    for (std::size_t k = 0; k < keys.size(); k += 2) {
        sol.points.emplace_back(std::move(out[k]), std::move(out[k + 1]));
    }
    return sol;
}

std::vector<GradientRow> fd_gradient(const StencilSolution &sol) {
    std::vector<GradientRow> rows;
    const double h2 = 2.0 * sol.step;
    for (std::size_t k = 0; k < sol.coordinates.size(); ++k) {
        const auto &[p, m] = sol.points[k];
        GradientRow r;
        r.coordinate = sol.coordinates[k];
        r.de0 = (p.e0 - m.e0) / h2;
        r.de1 = (p.e1 - m.e1) / h2;
        r.de_sa = (p.e_sa - m.e_sa) / h2;
        r.flags = point_flags(p, m);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<GradientRow> fd_gradient(const GeometryStencil &stencil, int n_active_elec,
                                     int n_active_orb, const SaooVqeOptions &options, int jobs) {
    return fd_gradient(
        solve_stencil(stencil, n_active_elec, n_active_orb, options, true, std::nullopt, jobs));
}

std::vector<FrameConnection> read_connection(const std::filesystem::path &path, int n_orb) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open frame connection '" + path.string() + "'");
    }
    std::vector<FrameConnection> out;
    std::map<std::string, std::size_t> index;
    std::size_t lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        const auto hash = line.find('#');
        const auto toks = split_ws(hash == std::string::npos ? line : line.substr(0, hash));
        if (toks.empty()) {
            continue;
        }
        if (toks.size() != 4) {
            throw ParseError(path.string() + ": expected '<label> <p> <q> <value>'", lineno);
        }
        int p = 0, q = 0;
        double v = 0.0;
        try {
            p = std::stoi(toks[1]);
            q = std::stoi(toks[2]);
            v = std::stod(toks[3]);
        } catch (const std::exception &) {
            throw ParseError(path.string() + ": malformed number", lineno);
        }
        if (p < 1 || q < 1 || p > n_orb || q > n_orb) {
            throw DimensionError(path.string() + ": orbital index out of range on line " +
                                 std::to_string(lineno));
        }
        if (p <= q) {
            throw ParseError(path.string() + ": entries must have p > q", lineno);
        }
        auto it = index.find(toks[0]);
        if (it == index.end()) {
            it = index.emplace(toks[0], out.size()).first;
            out.push_back({toks[0], Matrix::Zero(n_orb, n_orb)});
        }
        Matrix &x = out[it->second].x;
        x(p - 1, q - 1) = v;
        x(q - 1, p - 1) = -v;
    }
    return out;
}

namespace {

SpatialIntegrals displace(const SpatialIntegrals &ints, const SpatialIntegrals &d, double eps) {
    SpatialIntegrals out = ints;
    out.e_core += eps * d.e_core;
    out.h += eps * d.h;
    auto &g = out.g.packed();
    const auto &dg = d.g.packed();
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] += eps * dg[i];
    }
    return out;
}

void check_derivs(const SaooVqeResult &result, const std::vector<DerivativeIntegralSet> &derivs) {
    for (const auto &d : derivs) {
        require_fixed_orbital(d);
        if (d.d.n_orb != result.integrals.n_orb) {
            throw DimensionError("derivative set '" + d.coordinate_label +
                                 "' does not match the orbital count");
        }
    }
}

/// Column of `response` for `label`, or nullptr when absent.
const double *response_column(const OrbitalResponse &response, const std::string &label) {
    for (std::size_t k = 0; k < response.coordinates.size(); ++k) {
        if (response.coordinates[k] == label) {
            return response.dkappa.col(static_cast<Eigen::Index>(k)).data();
        }
    }
    throw ConfigError("orbital response lacks coordinate '" + label + "'");
}

double response_term(const SaooVqeResult &result, const FullDensity &d,
                     const OrbitalResponse &response, const std::string &label) {
    if (response.pairs.empty()) {
        return 0.0;
    }
    const Vector g = pack_pairs(orbital_gradient(result.integrals, d, response.pairs),
                                response.pairs);
    const double *dk = response_column(response, label);
    double s = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        s += g(i) * dk[i];
    }
    return s;
}

} // namespace

OrbitalResponse solve_orbital_response(const SaooVqeResult &result,
                                       const std::vector<DerivativeIntegralSet> &derivs,
                                       const SaooVqeOptions &options,
                                       const ResponseOptions &response) {
    if (!result.converged) {
        throw ConfigError("orbital response needs a converged result");
    }
    if (!(response.kappa_step > 0.0) || !(response.coordinate_step > 0.0)) {
        throw ConfigError("response steps must be positive");
    }
    check_derivs(result, derivs);
    const auto &part = result.problem;
    const int na = part.n_active_orb;
    OrbitalResponse out;
    out.pairs = nonredundant_pairs(part, false);
    const auto n = static_cast<Eigen::Index>(out.pairs.size());
    const auto m = static_cast<Eigen::Index>(derivs.size());
    out.dkappa = Matrix::Zero(n, m);
    for (const auto &d : derivs) {
        out.coordinates.push_back(d.coordinate_label);
    }
    if (n == 0 || m == 0) {
        return out;
    }

    SaooVqeOptions opts = options;
    opts.vqe.optimizer.tol_grad = std::min(opts.vqe.optimizer.tol_grad, response.tol_grad);
    const std::optional<Vector> theta0 =
        result.theta.size() ? std::optional<Vector>(result.theta) : std::nullopt;
    auto gradient_at = [&](const SpatialIntegrals &ints) -> Vector {
        const auto st = solve_active_space(rebuild_active_space(ints, part), opts, theta0);
        const RdmSet sa = average_rdms(make_rdms(st.psi0, st.psi0, na, 0, 0),
                                       make_rdms(st.psi1, st.psi1, na, 1, 1), result.w0,
                                       result.w1);
        return pack_pairs(
            orbital_gradient(ints, extend_density(sa.gamma, sa.Gamma, part), out.pairs),
            out.pairs);
    };

    std::vector<SpatialIntegrals> dx;
    for (const auto &d : derivs) {
        dx.push_back(transform_integrals(d.d, result.total_rotation));
    }
    // Tasks: ± kappa steps for every pair, then ± coordinate steps.
    const std::size_t n_tasks = 2 * static_cast<std::size_t>(n + m);
    std::vector<Vector> g(n_tasks);
    parallel_for(n_tasks, response.jobs, [&](std::size_t t) {
        const double sign = (t % 2 == 0) ? 1.0 : -1.0;
        const auto j = static_cast<Eigen::Index>(t / 2);
        if (j < n) {
            Vector v = Vector::Zero(n);
            v(j) = sign * response.kappa_step;
            g[t] = gradient_at(rotate_integrals(
                result.integrals, unpack_pairs(v, out.pairs, result.integrals.n_orb)));
        } else {
            g[t] = gradient_at(displace(result.integrals, dx[static_cast<std::size_t>(j - n)],
                                        sign * response.coordinate_step));
        }
    });
    Matrix hess(n, n), rhs(n, m);
    for (Eigen::Index j = 0; j < n; ++j) {
        hess.col(j) = (g[2 * j] - g[2 * j + 1]) / (2.0 * response.kappa_step);
    }
    for (Eigen::Index k = 0; k < m; ++k) {
        rhs.col(k) = (g[2 * (n + k)] - g[2 * (n + k) + 1]) / (2.0 * response.coordinate_step);
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(hess);
    if (eig.eigenvalues().minCoeff() <= 0.0) {
        throw NumericalError("orbital response Hessian is not positive definite (lowest "
                             "eigenvalue " + std::to_string(eig.eigenvalues().minCoeff()) + ")");
    }
    out.dkappa = -eig.eigenvectors() *
                 (eig.eigenvalues().cwiseInverse().asDiagonal() *
                  (eig.eigenvectors().transpose() * rhs));
    return out;
}

std::vector<GradientRow> hf_gradient(const SaooVqeResult &result,
                                     const std::vector<DerivativeIntegralSet> &derivs,
                                     const OrbitalResponse *response) {
    if (!result.converged) {
        throw ConfigError("Hellmann-Feynman gradients need a converged result");
    }
    check_derivs(result, derivs);
    const auto &part = result.problem;
    const FullDensity dsa = extend_density(result.rdm_sa.gamma, result.rdm_sa.Gamma, part);
    const FullDensity d0 = extend_density(result.rdm0.gamma, result.rdm0.Gamma, part);
    const FullDensity d1 = extend_density(result.rdm1.gamma, result.rdm1.Gamma, part);
    std::vector<GradientRow> rows;
    for (const auto &d : derivs) {
        const SpatialIntegrals dx = transform_integrals(d.d, result.total_rotation);
        GradientRow r;
        r.coordinate = d.coordinate_label;
        r.de_sa = energy_from_density(dx, dsa);
        r.de0 = energy_from_density(dx, d0);
        r.de1 = energy_from_density(dx, d1);
        if (response) {
            r.de0 += response_term(result, d0, *response, r.coordinate);
            r.de1 += response_term(result, d1, *response, r.coordinate);
            r.de_sa += response_term(result, dsa, *response, r.coordinate);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

NacResult hf_nac(const SaooVqeResult &result, const std::vector<DerivativeIntegralSet> &derivs,
                 int bra, int ket, double gap_floor, const NacTerms &terms) {
    if (bra > ket) {
        // Real states: d_ji = −d_ij, evaluated in one order so it holds bitwise.
        NacResult out = hf_nac(result, derivs, ket, bra, gap_floor, terms);
        out.e_gap = -out.e_gap;
        for (Vector *v : {&out.d01, &out.d_ci, &out.d_response, &out.d_frame}) {
            *v = -*v;
        }
        return out;
    }
    check_derivs(result, derivs);
    NacResult out;
    out.method = NacMethod::HellmannFeynman;
    out.e_gap = energy_of(result, ket) - energy_of(result, bra);
    const auto m = static_cast<Eigen::Index>(derivs.size());
    out.d01 = Vector::Zero(m);
    out.d_ci = Vector::Zero(m);
    out.d_response = Vector::Zero(m);
    out.d_frame = Vector::Zero(m);
    const auto &part = result.problem;
    const RdmSet t = make_rdms(state_of(result, bra), state_of(result, ket), part.n_active_orb,
                               bra, ket);
    const double ovl = real_overlap(state_of(result, bra), state_of(result, ket));
    const FullDensity dt = extend_density(t.gamma, t.Gamma, part, ovl);
    out.divergent = bra != ket && std::abs(out.e_gap) < gap_floor;
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto &d = derivs[static_cast<std::size_t>(i)];
        out.coordinates.push_back(d.coordinate_label);
        if (bra == ket) {
            // ⟨Ψ|∂Ψ⟩ of a real normalized state.
            out.flags.emplace_back();
            continue;
        }
        if (out.divergent) {
            out.d01(i) = out.d_ci(i) = std::numeric_limits<double>::quiet_NaN();
            out.flags.emplace_back("divergent");
            continue;
        }
        const SpatialIntegrals dx = transform_integrals(d.d, result.total_rotation);
        out.d_ci(i) = energy_from_density(dx, dt, ovl) / out.e_gap;
        if (terms.response) {
            out.d_response(i) =
                response_term(result, dt, *terms.response, d.coordinate_label) / out.e_gap;
        }
        if (terms.connection) {
            const auto it = std::find_if(
                terms.connection->begin(), terms.connection->end(),
                [&](const FrameConnection &c) { return c.coordinate_label == d.coordinate_label; });
            if (it == terms.connection->end()) {
                throw ConfigError("frame connection lacks coordinate '" + d.coordinate_label + "'");
            }
            if (it->x.rows() != result.integrals.n_orb) {
                throw DimensionError("frame connection does not match the orbital count");
            }
            const Matrix x = result.total_rotation.transpose() * it->x * result.total_rotation;
            double s = 0.0;
            for (int a = 0; a < part.n_active_orb; ++a) {
                for (int b = 0; b < part.n_active_orb; ++b) {
                    s += t.gamma(a, b) * x(part.active_indices[a], part.active_indices[b]);
                }
            }
            out.d_frame(i) = s;
        }
        out.d01(i) = out.d_ci(i) + out.d_response(i) + out.d_frame(i);
        out.flags.emplace_back();
    }
    return out;
}

NacResult fd_overlap_nac(const StencilSolution &sol, int bra, int ket) {
    NacResult out;
    out.method = NacMethod::FdOverlap;
    out.coordinates = sol.coordinates;
    out.e_gap = energy_of(sol.center, ket) - energy_of(sol.center, bra);
    const auto m = static_cast<Eigen::Index>(sol.coordinates.size());
    out.d01 = Vector::Zero(m);
    out.d_response = Vector::Zero(m);
    out.d_frame = Vector::Zero(m);
    const StateVector &ref_i = state_of(sol.center, bra);
    const StateVector &ref_j = state_of(sol.center, ket);
    auto pick = [](const TrackedStates &t, int i) -> const StateVector & {
        return i == 0 ? t.psi0 : t.psi1;
    };
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto &[p, mi] = sol.points[static_cast<std::size_t>(k)];
        out.d01(k) = (real_overlap(ref_i, pick(p, ket)) - real_overlap(ref_i, pick(mi, ket)) -
                      real_overlap(ref_j, pick(p, bra)) + real_overlap(ref_j, pick(mi, bra))) /
                     (4.0 * sol.step);
        out.flags.push_back(point_flags(p, mi));
    }
    out.d_ci = out.d01;
    return out;
}

NacResult fd_overlap_nac(const GeometryStencil &stencil, int n_active_elec, int n_active_orb,
                         const SaooVqeOptions &options, int jobs) {
    return fd_overlap_nac(
        solve_stencil(stencil, n_active_elec, n_active_orb, options, false, std::nullopt, jobs));
}

std::string response_csv(const std::vector<std::string> &coordinates,
                         const std::vector<GradientRow> &grad, const NacResult *hf,
                         const NacResult *fd) {
    auto num = [](double v) {
        if (std::isnan(v)) {
            return std::string();
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12e", v);
        return std::string(buf);
    };
    std::string csv = "coordinate_label,dE0,dE1,dE_SA,d01_hf,d01_fd,flags";
    const bool terms = hf && hf->d_ci.size() == hf->d01.size();
    if (terms) {
        csv += ",d01_ci,d01_response,d01_frame";
    }
    csv += "\n";
    for (std::size_t k = 0; k < coordinates.size(); ++k) {
        std::vector<std::string> flags;
        csv += coordinates[k];
        if (k < grad.size()) {
            csv += "," + num(grad[k].de0) + "," + num(grad[k].de1) + "," + num(grad[k].de_sa);
            flags.push_back(grad[k].flags);
        } else {
            csv += ",,,";
        }
        for (const NacResult *n : {hf, fd}) {
            csv += ",";
            if (n && k < static_cast<std::size_t>(n->d01.size())) {
                csv += num(n->d01(static_cast<Eigen::Index>(k)));
                if (k < n->flags.size()) {
                    flags.push_back(n->flags[k]);
                }
            }
        }
        csv += "," + join_flags(flags);
        if (terms) {
            const auto i = static_cast<Eigen::Index>(k);
            csv += "," + num(hf->d_ci(i)) + "," + num(hf->d_response(i)) + "," +
                   num(hf->d_frame(i));
        }
        csv += "\n";
    }
    return csv;
}

} // namespace saoovqe
