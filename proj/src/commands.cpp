#include "saoovqe/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "saoovqe/eigensolver.hpp"
#include "saoovqe/error.hpp"

namespace saoovqe {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    if (std::isnan(v)) {
        return "";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

nlohmann::json matrix_json(const Matrix &m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            r.push_back(m(i, j));
        }
        rows.push_back(r);
    }
    return rows;
}

nlohmann::json rdm_json(const RdmSet &r) {
    double pair_trace = 0.0;
    const auto n = static_cast<std::size_t>(r.gamma.rows());
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            pair_trace += r.Gamma(p, p, q, q);
        }
    }
    return {{"kind", to_string(r.kind)},
            {"bra", r.bra_index},
            {"ket", r.ket_index},
            {"trace_gamma", r.gamma.trace()},
            {"trace_Gamma", pair_trace},
            {"gamma", matrix_json(r.gamma)}};
}

std::string timestamp() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Writes `text` to config.output (and returns true) or to `out`.
void emit(const RunConfig &config, const std::string &text, std::ostream &out) {
    if (!config.output) {
        out << text;
        return;
    }
    if (config.output->has_parent_path()) {
        fs::create_directories(config.output->parent_path());
    }
    std::ofstream f(*config.output);
    if (!f) {
        throw ConfigError("cannot write output '" + config.output->string() + "'");
    }
    f << text;
}

SpatialIntegrals load_integrals(const RunConfig &config) {
    if (!config.fcidump) {
        throw ConfigError("this command needs 'fcidump' in the config");
    }
    SpatialIntegrals ints = read_fcidump(*config.fcidump);
    config.check_against(ints);
    return ints;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GeometryStencil load_stencil(const RunConfig &config) {
    if (!config.response.stencil) {
        throw ConfigError("this command needs 'response.stencil' in the config");
    }
    GeometryStencil st = read_stencil(*config.response.stencil);
    config.check_against(st.center);
    return st;
}

std::vector<DerivativeIntegralSet> load_derivatives(const RunConfig &config,
                                                    const SpatialIntegrals &reference) {
    if (!config.response.derivatives) {
        throw ConfigError("this command needs 'response.derivatives' in the config");
    }
    return parse_derivative_manifest(*config.response.derivatives, reference);
}

} // namespace

nlohmann::json run_result_json(const RunConfig &config, const SaooVqeResult &r,
                               double wall_time_s) {
    using nlohmann::json;
    json history = json::array();
    for (const auto &h : r.history) {
        history.push_back({{"iteration", h.iteration},
                           {"e_sa", h.e_sa},
                           {"e0", h.e0},
                           {"e1", h.e1},
                           {"orbital_grad", h.orbital_grad},
                           {"circuit_grad", h.circuit_grad},
                           {"step_norm", h.step_norm}});
    }
    json vqe = json::array();
    for (const auto &h : r.states.history) {
        vqe.push_back({{"iteration", h.iteration},
                       {"e_sa", h.f},
                       {"grad_norm", std::isnan(h.grad_norm) ? json(nullptr) : json(h.grad_norm)}});
    }
    return {
        {"command", "run"},
        {"config", config_to_json(config)},
        {"timestamp", timestamp()},
        {"wall_time_s", wall_time_s},
        {"converged", r.converged},
        {"e0", r.e0},
        {"e1", r.e1},
        {"e_sa", r.e_sa},
        {"weights", {r.w0, r.w1}},
        {"resolution_angle", r.resolution_angle},
        {"orbital_grad_norm", r.orbital_grad_norm},
        {"circuit_grad_norm", r.circuit_grad_norm},
        {"theta", std::vector<double>(r.theta.data(), r.theta.data() + r.theta.size())},
        {"active_indices", r.problem.active_indices},
        {"total_rotation", matrix_json(r.total_rotation)},
        {"history", history},
        {"final_circuit_history", vqe},
        {"rdm",
         {{"state0", rdm_json(r.rdm0)},
          {"state1", rdm_json(r.rdm1)},
          {"average", rdm_json(r.rdm_sa)},
          {"transition01", rdm_json(r.rdm01)}}},
    };
}

std::string history_csv(const SaooVqeResult &r) {
    std::string s = "iteration,e_sa,e0,e1,orbital_grad,circuit_grad,step_norm\n";
    for (const auto &h : r.history) {
        s += std::to_string(h.iteration) + "," + num(h.e_sa) + "," + num(h.e0) + "," +
             num(h.e1) + "," + num(h.orbital_grad) + "," + num(h.circuit_grad) + "," +
             num(h.step_norm) + "\n";
    }
    return s;
}

std::vector<ScanPoint> read_scan_manifest(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open scan manifest '" + path.string() + "'");
    }
    std::vector<ScanPoint> pts;
    std::size_t lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.resize(hash);
        }
        std::istringstream is(line);
        std::string a, file, extra;
        if (!(is >> a)) {
            continue;
        }
        if (!(is >> file) || (is >> extra)) {
            throw ParseError(path.string() + ": expected '<value> <path>'", lineno);
        }
        ScanPoint p;
        try {
            std::size_t used = 0;
            p.parameter = std::stod(a, &used);
            if (used != a.size()) {
                throw std::invalid_argument(a);
            }
        } catch (const std::exception &) {
            throw ParseError(path.string() + ": bad scan value '" + a + "'", lineno);
        }
        p.file = path.parent_path() / file;
        if (!fs::is_regular_file(p.file)) {
            throw ConfigError("scan file '" + p.file.string() + "' listed on line " +
                              std::to_string(lineno) + " does not exist");
        }
        pts.push_back(std::move(p));
    }
    if (pts.empty()) {
        throw ParseError(path.string() + ": scan manifest lists no points");
    }
    int dir = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double d = pts[i].parameter - pts[i - 1].parameter;
        const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
        if (s != 0 && dir != 0 && s != dir) {
            throw ConfigError(path.string() + ": scan values are not monotone");
        }
        dir = dir ? dir : s;
    }
    return pts;
}

std::string ScanRow::status() const {
    if (!error.empty()) {
        return "error: " + error;
    }
    std::string s = converged ? "ok" : "nonconverged";
    if (ambiguous) {
        s += ";ambiguous";
    }
    if (swapped) {
        s += ";swapped";
    }
    return s;
}

std::vector<ScanRow> run_scan(const RunConfig &config) {
    if (!config.scan.manifest) {
        throw ConfigError("scan needs 'scan.manifest' in the config");
    }
    const auto points = read_scan_manifest(*config.scan.manifest);
    std::vector<ScanRow> rows(points.size());
    std::vector<std::optional<SaooVqeResult>> results(points.size());
    SaooVqeOptions exact_opts = config.saoo;
    exact_opts.solver = Solver::Exact;

    auto solve_point = [&](std::size_t i, const std::optional<WarmStart> &warm,
                           const std::optional<WarmStart> &warm_exact) {
        ScanRow &row = rows[i];
        row.parameter = points[i].parameter;
        try {
            const SpatialIntegrals ints = read_fcidump(points[i].file);
            config.check_against(ints);
            SaooVqeResult r = run_sa_oo_vqe(ints, config.n_active_elec, config.n_active_orb,
                                            config.saoo, warm);
            row.e0 = r.e0;
            row.e1 = r.e1;
            row.converged = r.converged;
            if (config.scan.compare_exact && config.saoo.solver != Solver::Exact) {
                const SaooVqeResult x = run_sa_oo_vqe(ints, config.n_active_elec,
                                                      config.n_active_orb, exact_opts, warm_exact);
                row.e0_exact = x.e0;
                row.e1_exact = x.e1;
                row.converged = row.converged && x.converged;
            } else if (config.saoo.solver == Solver::Exact) {
                row.e0_exact = r.e0;
                row.e1_exact = r.e1;
            }
            results[i] = std::move(r);
        } catch (const Error &e) {
            row.error = e.what();
        }
    };

    if (config.scan.warm_start) {
        std::optional<WarmStart> warm, warm_exact;
        for (std::size_t i = 0; i < points.size(); ++i) {
            solve_point(i, warm, warm_exact);
            if (results[i]) {
                warm = WarmStart{results[i]->theta, results[i]->total_rotation};
                warm_exact = WarmStart{Vector(), results[i]->total_rotation};
            }
        }
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t i; (i = next++) < points.size();) {
                solve_point(i, std::nullopt, std::nullopt);
            }
        };
        for (int t = 0; t < std::min<int>(config.jobs, static_cast<int>(points.size())); ++t) {
            pool.emplace_back(worker);
        }
        for (auto &t : pool) {
            t.join();
        }
    }

    // Track states point to point; the first solved point is the reference.
    const SaooVqeResult *prev = nullptr;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!results[i]) {
            continue;
        }
        SaooVqeResult &r = *results[i];
        if (prev && prev->states.psi0.n_qubits() == r.states.psi0.n_qubits()) {
            const TrackedStates t = track_states(prev->states.psi0, prev->states.psi1, r.e0, r.e1,
                                                 r.states.psi0, r.states.psi1,
                                                 Tracking::PhaseMatched);
            rows[i].overlap0 = t.overlap0;
            rows[i].overlap1 = t.overlap1;
            rows[i].ambiguous = t.ambiguous;
            rows[i].swapped = t.swapped;
            r.states.psi0 = t.psi0;
            r.states.psi1 = t.psi1;
        }
        prev = &r;
    }
    return rows;
}

std::string scan_csv(const std::vector<ScanRow> &rows) {
    std::string s = "alpha,e0_vqe,e1_vqe,e0_exact,e1_exact,overlap0,overlap1,status\n";
    for (const auto &r : rows) {
        const bool ok = r.error.empty();
        s += num(r.parameter) + "," + (ok ? num(r.e0) : "") + "," + (ok ? num(r.e1) : "") + "," +
             (r.e0_exact ? num(*r.e0_exact) : "") + "," + (r.e1_exact ? num(*r.e1_exact) : "") +
             "," + (ok ? num(r.overlap0) : "") + "," + (ok ? num(r.overlap1) : "") + "," +
             r.status() + "\n";
    }
    return s;
}

int cmd_run(const RunConfig &config, std::ostream &out) {
    const auto t0 = std::chrono::steady_clock::now();
    const SpatialIntegrals ints = load_integrals(config);
    const SaooVqeResult r =
        run_sa_oo_vqe(ints, config.n_active_elec, config.n_active_orb, config.saoo);
    const nlohmann::json j = run_result_json(config, r, seconds_since(t0));
    emit(config, j.dump(2) + "\n", out);
    if (config.output) {
        fs::path h = *config.output;
        h.replace_extension(".history.csv");
        std::ofstream(h) << history_csv(r);
    }
    return r.converged ? kExitOk : kExitNonConvergence;
}

int cmd_scan(const RunConfig &config, std::ostream &out) {
    const auto rows = run_scan(config);
    emit(config, scan_csv(rows), out);
    for (const auto &r : rows) {
        if (!r.error.empty() || !r.converged) {
            return kExitNonConvergence;
        }
    }
    return kExitOk;
}

int cmd_grad(const RunConfig &config, std::ostream &out) {
    if (config.response.stencil) {
        const GeometryStencil st = load_stencil(config);
        const auto sol = solve_stencil(st, config.n_active_elec, config.n_active_orb, config.saoo,
                                       true, std::nullopt, config.jobs);
        const auto rows = fd_gradient(sol);
        emit(config, response_csv(st.coordinates, rows, nullptr, nullptr), out);
        bool ok = sol.center.converged;
        for (const auto &r : rows) {
            ok = ok && r.flags.find("nonconverged") == std::string::npos;
        }
        return ok ? kExitOk : kExitNonConvergence;
    }
    const SpatialIntegrals ints = load_integrals(config);
    const auto derivs = load_derivatives(config, ints);
    const SaooVqeResult r =
        run_sa_oo_vqe(ints, config.n_active_elec, config.n_active_orb, config.saoo);
    if (!r.converged) {
        return kExitNonConvergence;
    }
    std::optional<OrbitalResponse> resp;
    if (config.response.orbital_response) {
        resp = solve_orbital_response(r, derivs, config.saoo, config.response.options);
    }
    const auto rows = hf_gradient(r, derivs, resp ? &*resp : nullptr);
    std::vector<std::string> labels;
    for (const auto &d : derivs) {
        labels.push_back(d.coordinate_label);
    }
    emit(config, response_csv(labels, rows, nullptr, nullptr), out);
    return kExitOk;
}

int cmd_nac(const RunConfig &config, std::ostream &out) {
    const GeometryStencil st = load_stencil(config);
    const auto derivs = load_derivatives(config, st.center);
    const SaooVqeResult center =
        run_sa_oo_vqe(st.center, config.n_active_elec, config.n_active_orb, config.saoo);
    if (!center.converged) {
        return kExitNonConvergence;
    }
    std::optional<OrbitalResponse> resp;
    if (config.response.orbital_response) {
        resp = solve_orbital_response(center, derivs, config.saoo, config.response.options);
    }
    std::optional<std::vector<FrameConnection>> conn;
    if (config.response.connection) {
        conn = read_connection(*config.response.connection, st.center.n_orb);
    }
    const NacTerms terms{resp ? &*resp : nullptr, conn ? &*conn : nullptr};
    const NacResult hf = hf_nac(center, derivs, 0, 1, config.response.gap_floor, terms);
    const auto grad = hf_gradient(center, derivs, resp ? &*resp : nullptr);
    const auto sol = solve_stencil(st, config.n_active_elec, config.n_active_orb, config.saoo,
                                   false, center, config.jobs);
    const NacResult fd = fd_overlap_nac(sol);
    // Rows follow the derivative manifest; the FD column is matched by label.
    NacResult fd_aligned = fd;
    fd_aligned.d01 = Vector::Constant(static_cast<Eigen::Index>(derivs.size()),
                                      std::numeric_limits<double>::quiet_NaN());
    fd_aligned.flags.assign(derivs.size(), "");
    for (std::size_t k = 0; k < derivs.size(); ++k) {
        for (std::size_t j = 0; j < fd.coordinates.size(); ++j) {
            if (fd.coordinates[j] == derivs[k].coordinate_label) {
                fd_aligned.d01(static_cast<Eigen::Index>(k)) = fd.d01(static_cast<Eigen::Index>(j));
                fd_aligned.flags[k] = fd.flags[j];
            }
        }
    }
    emit(config, response_csv(hf.coordinates, grad, &hf, &fd_aligned), out);
    for (const auto &f : fd.flags) {
        if (f.find("nonconverged") != std::string::npos) {
            return kExitNonConvergence;
        }
    }
    return kExitOk;
}

int cmd_exact(const RunConfig &config, std::ostream &out) {
    std::ostringstream os;
    os << std::setprecision(12);
    if (config.operator_file) {
        const PauliSum op = read_pauli_sum(*config.operator_file);
        const int dim_cap = op.n_qubits() < 31 ? (1 << op.n_qubits()) : config.exact_roots;
        const auto pairs = exact_eigensolve(op, std::min(config.exact_roots, dim_cap));
        os << "index,energy\n";
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            os << i << "," << pairs[i].value << "\n";
        }
        emit(config, os.str(), out);
        return kExitOk;
    }
    const SpatialIntegrals ints = load_integrals(config);
    const int no = config.n_active_orb > 0 ? config.n_active_orb : ints.n_orb;
    const int ne = config.n_active_elec > 0 ? config.n_active_elec : ints.n_elec;
    const ActiveSpaceProblem prob = build_active_space(ints, no, ne, config.saoo.active_indices);
    const PauliSum h = jordan_wigner(prob);
    const Sector sector{ne, ints.ms2, std::nullopt};
    const int dim = static_cast<int>(sector_basis(prob.n_qubits(), ne, ints.ms2).size());
    const auto pairs = sector_eigensolve(h, sector, std::min(config.exact_roots, dim));
    const PauliSum s2 = s2_operator(prob.n_qubits());
    os << "index,energy,s2\n";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        double s = expectation(pairs[i].vector, s2);
        if (std::abs(s) < 1e-10) {
            s = 0.0;
        }
        os << i << "," << pairs[i].value << "," << s << "\n";
    }
    emit(config, os.str(), out);
    return kExitOk;
}

int cmd_validate(const fs::path &fcidump, std::ostream &out) {
    std::ifstream in(fcidump);
    if (!in) {
        throw ConfigError("cannot open fcidump '" + fcidump.string() + "'");
    }
    std::vector<FcidumpIssue> errors, warnings;
    const auto ints = lint_fcidump(in, errors, warnings);
    for (const auto &e : errors) {
        out << fcidump.string() << ":" << e.line << ": error: " << e.message << "\n";
    }
    for (const auto &w : warnings) {
        out << fcidump.string() << ":" << w.line << ": warning: " << w.message << "\n";
    }
    if (!errors.empty() || !ints) {
        out << "invalid (" << errors.size() << " error(s), " << warnings.size()
            << " warning(s))\n";
        return kExitConfig;
    }
    out << "ok: NORB=" << ints->n_orb << " NELEC=" << ints->n_elec << " MS2=" << ints->ms2 << " ("
        << warnings.size() << " warning(s))\n";
    return kExitOk;
}

int dispatch(const std::string &command, const std::optional<fs::path> &config_path,
             const CommandOverrides &ov, std::ostream &out, std::ostream &err) {
    try {
        RunConfig config;
        if (config_path) {
            config = load_config(*config_path);
        }
        if (ov.fcidump) {
            config.fcidump = fs::absolute(*ov.fcidump).lexically_normal();
        }
        if (ov.operator_file) {
            config.operator_file = fs::absolute(*ov.operator_file).lexically_normal();
        }
        if (ov.out) {
            config.output = fs::absolute(*ov.out).lexically_normal();
        }
        if (ov.solver) {
            config.saoo.solver = *ov.solver;
        }
        if (ov.jobs) {
            config.jobs = *ov.jobs;
            config.response.options.jobs = *ov.jobs;
        }
        if (command == "validate") {
            if (!config.fcidump) {
                throw ConfigError("validate needs an FCIDUMP (config 'fcidump' or --fcidump)");
            }
            return cmd_validate(*config.fcidump, out);
        }
        if (command == "exact" && !config_path) {
            if (!config.fcidump && !config.operator_file) {
                throw ConfigError("exact needs --config, --fcidump or --operator");
            }
            return cmd_exact(config, out);
        }
        if (!config_path) {
            throw ConfigError(command + " needs --config");
        }
        config.validate();
        if (command == "run") {
            return cmd_run(config, out);
        }
        if (command == "scan") {
            return cmd_scan(config, out);
        }
        if (command == "grad") {
            return cmd_grad(config, out);
        }
        if (command == "nac") {
            return cmd_nac(config, out);
        }
        if (command == "exact") {
            return cmd_exact(config, out);
        }
        throw ConfigError("unknown command '" + command + "'");
    } catch (const ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DimensionError &e) {
        err << "error: " << e.what() << "\n";
        return kExitDimension;
    } catch (const NumericalError &e) {
        err << "error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

} // namespace saoovqe
