#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "saoovqe/ansatz.hpp"
#include "saoovqe/commands.hpp"
#include "saoovqe/config.hpp"
#include "saoovqe/eigensolver.hpp"
#include "saoovqe/error.hpp"
#include "saoovqe/fcidump.hpp"
#include "saoovqe/operators.hpp"
#include "saoovqe/orbital_opt.hpp"
#include "saoovqe/pauli.hpp"
#include "saoovqe/rdm.hpp"
#include "saoovqe/response.hpp"
#include "saoovqe/sa_vqe.hpp"

namespace py = pybind11;
using namespace saoovqe;

namespace {

py::array_t<double> tensor_array(const Tensor4 &t) {
    const auto n = static_cast<py::ssize_t>(t.dim());
    py::array_t<double> a({n, n, n, n});
    std::copy(t.data().begin(), t.data().end(), a.mutable_data());
    return a;
}

/// Active-space problem together with its GUCCSD circuit and ensemble.
struct Problem {
    ActiveSpaceProblem prob;
    AnsatzCircuit circuit;
    EnsembleSpec ensemble;
    CompiledOperator hamiltonian;
    PauliSum qubit_hamiltonian;

    Problem(const SpatialIntegrals &ints, int n_elec, int n_orb,
            const std::optional<std::vector<int>> &active, int trotter_reps, double w0,
            double w1)
        : prob(build_active_space(ints, n_orb, n_elec, active)),
          circuit(build_ansatz(generate_excitations(n_orb, n_elec), prob.n_qubits(),
                               trotter_reps)),
          ensemble(prepare_initial_states(prob, w0, w1)),
          qubit_hamiltonian(jordan_wigner(prob)) {
        hamiltonian = CompiledOperator(qubit_hamiltonian);
    }

    void check(const Vector &theta) const {
        if (theta.size() != circuit.n_parameters) {
            throw DimensionError("theta has " + std::to_string(theta.size()) +
                                 " entries, the circuit has " +
                                 std::to_string(circuit.n_parameters) + " parameters");
        }
    }
};

SaooVqeOptions make_options(const std::string &solver, const std::string &optimizer,
                            std::pair<double, double> weights,
                            const std::optional<std::vector<int>> &active,
                            bool optimize_orbitals, int trotter_reps, double tol_grad,
                            int max_iters, std::uint64_t seed) {
    SaooVqeOptions o;
    o.solver = parse_solver(solver);
    o.vqe.optimizer.method = parse_optimizer_method(optimizer);
    o.vqe.optimizer.tol_grad = tol_grad;
    o.vqe.optimizer.max_iters = max_iters;
    o.vqe.optimizer.seed = seed;
    o.vqe.optimizer.validate();
    o.vqe.w0 = weights.first;
    o.vqe.w1 = weights.second;
    o.vqe.trotter_reps = trotter_reps;
    o.active_indices = active;
    o.optimize_orbitals = optimize_orbitals;
    return o;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "State-averaged orbital-optimized VQE on a statevector simulator";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", error.ptr());
    py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", error.ptr());

    py::class_<SpatialIntegrals>(m, "Integrals")
        .def_readonly("n_orb", &SpatialIntegrals::n_orb)
        .def_readonly("n_elec", &SpatialIntegrals::n_elec)
        .def_readonly("ms2", &SpatialIntegrals::ms2)
        .def_readonly("e_core", &SpatialIntegrals::e_core)
        .def_property_readonly("h", [](const SpatialIntegrals &s) { return s.h; })
        .def_property_readonly("eri", [](const SpatialIntegrals &s) { return tensor_array(s.g.unpack()); },
                               "(pq|rs) as a dense (n, n, n, n) array")
        .def("__eq__", [](const SpatialIntegrals &a, const SpatialIntegrals &b) { return a == b; });

    m.def("read_fcidump", [](const std::filesystem::path &p) { return read_fcidump(p); }, py::arg("path"));
    m.def("parse_fcidump", &parse_fcidump_string, py::arg("text"));
    m.def("write_fcidump", py::overload_cast<const SpatialIntegrals &>(&write_fcidump),
          py::arg("integrals"));

    py::class_<PauliSum>(m, "PauliSum")
        .def_property_readonly("n_qubits", &PauliSum::n_qubits)
        .def("__len__", &PauliSum::size)
        .def("terms",
             [](const PauliSum &s) {
                 std::vector<std::pair<std::string, cplx>> out;
                 for (const auto &[p, c] : s.terms()) {
                     out.emplace_back(p.letters(), c);
                 }
                 return out;
             })
        .def("to_dense", &PauliSum::to_dense)
        .def("is_hermitian", &PauliSum::is_hermitian, py::arg("tol") = 1e-12)
        .def("__str__", &PauliSum::to_string);

    m.def("parse_pauli_sum",
          [](const std::string &text) {
              std::istringstream in(text);
              return parse_pauli_sum(in);
          },
          py::arg("text"), "`<re> [<im>] <LETTERS>` per line");
    m.def("exact_eigenvalues",
          [](const PauliSum &op, int k) {
              std::vector<double> out;
              for (const auto &e : exact_eigensolve(op, k)) {
                  out.push_back(e.value);
              }
              return out;
          },
          py::arg("operator"), py::arg("k"));

    py::class_<Problem>(m, "ActiveSpace")
        .def(py::init<const SpatialIntegrals &, int, int, const std::optional<std::vector<int>> &,
                      int, double, double>(),
             py::arg("integrals"), py::arg("n_active_elec"), py::arg("n_active_orb"),
             py::arg("active_indices") = std::nullopt, py::arg("trotter_reps") = 1,
             py::arg("w0") = 0.5, py::arg("w1") = 0.5)
        .def_property_readonly("n_qubits", [](const Problem &p) { return p.prob.n_qubits(); })
        .def_property_readonly("n_parameters", [](const Problem &p) { return p.circuit.n_parameters; })
        .def_property_readonly("active_indices", [](const Problem &p) { return p.prob.active_indices; })
        .def_property_readonly("e_frozen", [](const Problem &p) { return p.prob.e_frozen; })
        .def_property_readonly("hamiltonian", [](const Problem &p) { return p.qubit_hamiltonian; })
        .def("sa_energy",
             [](const Problem &p, const Vector &theta) {
                 p.check(theta);
                 return sa_energy(theta, p.circuit, p.ensemble, p.hamiltonian);
             },
             py::arg("theta"))
        .def("circuit_gradient",
             [](const Problem &p, const Vector &theta) {
                 p.check(theta);
                 return circuit_gradient(theta, p.circuit, p.ensemble, p.hamiltonian);
             },
             py::arg("theta"), "parameter-shift gradient of the ensemble energy")
        .def("exact_states",
             [](const Problem &p) {
                 const SaVqeState s = solve_exact(p.prob, p.ensemble.w0, p.ensemble.w1);
                 return std::make_pair(s.e0, s.e1);
             },
             "two lowest singlet energies of the active space");

    py::class_<SaooVqeResult>(m, "Result")
        .def_readonly("e0", &SaooVqeResult::e0)
        .def_readonly("e1", &SaooVqeResult::e1)
        .def_readonly("e_sa", &SaooVqeResult::e_sa)
        .def_readonly("theta", &SaooVqeResult::theta)
        .def_readonly("total_rotation", &SaooVqeResult::total_rotation)
        .def_readonly("resolution_angle", &SaooVqeResult::resolution_angle)
        .def_readonly("orbital_grad_norm", &SaooVqeResult::orbital_grad_norm)
        .def_readonly("circuit_grad_norm", &SaooVqeResult::circuit_grad_norm)
        .def_readonly("converged", &SaooVqeResult::converged)
        .def_property_readonly("integrals", [](const SaooVqeResult &r) { return r.integrals; })
        .def("gamma",
             [](const SaooVqeResult &r, const std::string &which) -> Matrix {
                 if (which == "0") return r.rdm0.gamma;
                 if (which == "1") return r.rdm1.gamma;
                 if (which == "sa") return r.rdm_sa.gamma;
                 if (which == "01") return r.rdm01.gamma;
                 throw ConfigError("unknown RDM '" + which + "' (expected 0, 1, sa or 01)");
             },
             py::arg("which"), "active-space one-RDM: '0', '1', 'sa' or the transition '01'")
        .def("Gamma",
             [](const SaooVqeResult &r, const std::string &which) {
                 if (which == "0") return tensor_array(r.rdm0.Gamma);
                 if (which == "1") return tensor_array(r.rdm1.Gamma);
                 if (which == "sa") return tensor_array(r.rdm_sa.Gamma);
                 if (which == "01") return tensor_array(r.rdm01.Gamma);
                 throw ConfigError("unknown RDM '" + which + "' (expected 0, 1, sa or 01)");
             },
             py::arg("which"))
        .def("history", [](const SaooVqeResult &r) {
            py::list out;
            for (const auto &h : r.history) {
                py::dict d;
                d["iteration"] = h.iteration;
                d["e_sa"] = h.e_sa;
                d["e0"] = h.e0;
                d["e1"] = h.e1;
                d["orbital_grad"] = h.orbital_grad;
                d["circuit_grad"] = h.circuit_grad;
                d["step_norm"] = h.step_norm;
                out.append(d);
            }
            return out;
        });

    m.def(
        "run_sa_oo_vqe",
        [](const SpatialIntegrals &ints, int n_active_elec, int n_active_orb,
           const std::string &solver, const std::string &optimizer,
           std::pair<double, double> weights, const std::optional<std::vector<int>> &active,
           bool optimize_orbitals, int trotter_reps, double tol_grad, int max_iters,
           std::uint64_t seed) {
            const auto o = make_options(solver, optimizer, weights, active, optimize_orbitals,
                                        trotter_reps, tol_grad, max_iters, seed);
            py::gil_scoped_release release;
            return run_sa_oo_vqe(ints, n_active_elec, n_active_orb, o);
        },
        py::arg("integrals"), py::arg("n_active_elec"), py::arg("n_active_orb"),
        py::arg("solver") = "vqe", py::arg("optimizer") = "bfgs",
        py::arg("weights") = std::make_pair(0.5, 0.5), py::arg("active_indices") = std::nullopt,
        py::arg("optimize_orbitals") = true, py::arg("trotter_reps") = 1,
        py::arg("tol_grad") = 1e-6, py::arg("max_iters") = 1000, py::arg("seed") = 42);

    m.def(
        "config_json",
        [](const std::filesystem::path &path) { return config_to_json(load_config(path)).dump(); },
        py::arg("path"), "fully resolved configuration as JSON text");

    m.def(
        "run_command",
        [](const std::string &command, const std::optional<std::filesystem::path> &config,
           const std::optional<std::filesystem::path> &out, const std::optional<std::string> &solver,
           std::optional<int> jobs, const std::optional<std::filesystem::path> &fcidump,
           const std::optional<std::filesystem::path> &operator_file) {
            CommandOverrides ov;
            ov.out = out;
            if (solver) {
                ov.solver = parse_solver(*solver);
            }
            ov.jobs = jobs;
            ov.fcidump = fcidump;
            ov.operator_file = operator_file;
            std::ostringstream so, se;
            int code;
            {
                py::gil_scoped_release release;
                code = dispatch(command, config, ov, so, se);
            }
            return py::make_tuple(code, so.str(), se.str());
        },
        py::arg("command"), py::arg("config") = std::nullopt, py::arg("out") = std::nullopt,
        py::arg("solver") = std::nullopt, py::arg("jobs") = std::nullopt,
        py::arg("fcidump") = std::nullopt, py::arg("operator") = std::nullopt,
        "Runs a CLI command (run, scan, grad, nac, exact, validate); returns "
        "(exit_code, stdout, stderr).");
}
