#include "saoovqe/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "saoovqe/error.hpp"

namespace saoovqe {

namespace fs = std::filesystem;

namespace {

/// Reads typed keys from one TOML table and rejects keys nobody asked for.
class TableReader {
  public:
    TableReader(const toml::table *table, std::string name) : t_(table), name_(std::move(name)) {}

    ~TableReader() noexcept(false) {
        if (t_ && std::uncaught_exceptions() == 0) {
            for (const auto &[k, v] : *t_) {
                if (!seen_.count(std::string(k.str()))) {
                    throw ConfigError("unknown key '" + qualified(std::string(k.str())) + "'");
                }
            }
        }
    }

    bool has(const std::string &key) {
        seen_.insert(key);
        return t_ && t_->contains(key);
    }

    template <class T> void get(const std::string &key, T &out) {
        if (!has(key)) {
            return;
        }
        const toml::node &n = *t_->get(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!n.is_boolean()) {
                throw type_error(key, "a boolean");
            }
            out = *n.value<bool>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!n.is_integer()) {
                throw type_error(key, "an integer");
            }
            const auto v = *n.value<std::int64_t>();
            if constexpr (std::is_unsigned_v<T>) {
                if (v < 0) {
                    throw ConfigError("'" + qualified(key) + "' must be non-negative");
                }
            }
            out = static_cast<T>(v);
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!n.is_number()) {
                throw type_error(key, "a number");
            }
            out = *n.value<double>();
        } else {
            if (!n.is_string()) {
                throw type_error(key, "a string");
            }
            out = *n.value<std::string>();
        }
    }

    void get_path(const std::string &key, const fs::path &base, std::optional<fs::path> &out) {
        std::string s;
        if (has(key)) {
            get(key, s);
            out = resolve(base, s);
        }
    }

    const toml::array *array(const std::string &key) {
        if (!has(key)) {
            return nullptr;
        }
        const auto *a = t_->get(key)->as_array();
        if (!a) {
            throw type_error(key, "an array");
        }
        return a;
    }

    std::string qualified(const std::string &key) const {
        return name_.empty() ? key : name_ + "." + key;
    }

    static fs::path resolve(const fs::path &base, const std::string &s) {
        fs::path p(s);
        if (p.is_relative()) {
            p = base / p;
        }
        return fs::absolute(p).lexically_normal();
    }

  private:
    ConfigError type_error(const std::string &key, const std::string &what) const {
        return ConfigError("'" + qualified(key) + "' must be " + what);
    }

    const toml::table *t_;
    std::string name_;
    std::set<std::string> seen_;
};

std::vector<double> number_array(const toml::array &a, const std::string &name) {
    std::vector<double> out;
    for (const auto &n : a) {
        if (!n.is_number()) {
            throw ConfigError("'" + name + "' must hold numbers");
        }
        out.push_back(*n.value<double>());
    }
    return out;
}

void require_file(const std::optional<fs::path> &p, const std::string &what) {
    if (p && !fs::is_regular_file(*p)) {
        throw ConfigError(what + " '" + p->string() + "' does not exist");
    }
}

std::string toml_string(const std::string &s) {
    std::ostringstream os;
    os << toml::value<std::string>(s);
    return os.str();
}

std::string toml_double(double v) {
    std::ostringstream os;
    os << toml::value<double>(v);
    return os.str();
}

} // namespace

void RunConfig::validate() const {
    if (!fcidump && !operator_file && !scan.manifest && !response.stencil) {
        throw ConfigError("config names no input: set 'fcidump', 'operator', 'scan.manifest' "
                          "or 'response.stencil'");
    }
    require_file(fcidump, "fcidump file");
    require_file(operator_file, "operator file");
    require_file(scan.manifest, "scan manifest");
    require_file(response.stencil, "stencil manifest");
    require_file(response.derivatives, "derivative manifest");
    require_file(response.connection, "frame connection file");
    if ((fcidump || scan.manifest || response.stencil) && (n_active_orb < 1 || n_active_elec < 1)) {
        throw ConfigError("active_space.electrons and active_space.orbitals must be positive");
    }
    if (ansatz != "guccsd") {
        throw ConfigError("unknown ansatz '" + ansatz + "' (expected guccsd)");
    }
    if (saoo.vqe.trotter_reps < 1) {
        throw ConfigError("solver.trotter_reps must be at least 1");
    }
    const double w0 = saoo.vqe.w0, w1 = saoo.vqe.w1;
    if (!(w0 > 0.0) || !(w1 > 0.0) || std::abs(w0 + w1 - 1.0) > 1e-12) {
        throw ConfigError("ensemble.weights must be positive and sum to 1");
    }
    saoo.vqe.optimizer.validate();
    if (saoo.max_macro_iters < 0 || !(saoo.tol_orbital_grad > 0.0) || !(saoo.tol_energy > 0.0) ||
        !(saoo.trust_radius > 0.0) || !(saoo.hessian_fd_step > 0.0)) {
        throw ConfigError("orbital optimization counts, tolerances and steps must be positive");
    }
    if (saoo.active_indices) {
        const auto &a = *saoo.active_indices;
        if (static_cast<int>(a.size()) != n_active_orb) {
            throw ConfigError("active_space.indices must list active_space.orbitals entries");
        }
        if (std::set<int>(a.begin(), a.end()).size() != a.size()) {
            throw ConfigError("active_space.indices has duplicates");
        }
    }
    if (jobs < 1) {
        throw ConfigError("jobs must be at least 1");
    }
    if (scan.warm_start && jobs > 1) {
        throw ConfigError("scan.warm_start runs points in sequence; set jobs = 1 or "
                          "scan.warm_start = false");
    }
    if (exact_roots < 1) {
        throw ConfigError("exact.roots must be at least 1");
    }
    if (!(response.gap_floor > 0.0) || !(response.options.kappa_step > 0.0) ||
        !(response.options.coordinate_step > 0.0) || !(response.options.tol_grad > 0.0)) {
        throw ConfigError("response steps and tolerances must be positive");
    }
}

void RunConfig::check_against(const SpatialIntegrals &ints) const {
    if (n_active_orb > ints.n_orb) {
        throw DimensionError("active space has " + std::to_string(n_active_orb) +
                             " orbitals but the integrals have " + std::to_string(ints.n_orb));
    }
    if (n_active_elec > ints.n_elec || (ints.n_elec - n_active_elec) % 2 != 0) {
        throw DimensionError("active electron count " + std::to_string(n_active_elec) +
                             " does not fit " + std::to_string(ints.n_elec) +
                             " electrons with a closed-shell core");
    }
    if (n_active_elec > 2 * n_active_orb) {
        throw DimensionError("more active electrons than active spin orbitals");
    }
    if (saoo.active_indices) {
        for (int i : *saoo.active_indices) {
            if (i < 0 || i >= ints.n_orb) {
                throw DimensionError("active index " + std::to_string(i) + " out of range");
            }
        }
    }
}

RunConfig parse_config(const std::string &text, const fs::path &base_dir) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error &e) {
        throw ParseError(std::string(e.description()), e.source().begin.line);
    }
    RunConfig c;
    const fs::path base = fs::absolute(base_dir);
    auto table = [&](const std::string &name) -> const toml::table * {
        const auto *n = root.get(name);
        if (n && !n->is_table()) {
            throw ConfigError("'" + name + "' must be a table");
        }
        return n ? n->as_table() : nullptr;
    };
    {
        TableReader top(&root, "");
        top.get_path("fcidump", base, c.fcidump);
        top.get_path("operator", base, c.operator_file);
        top.get_path("output", base, c.output);
        top.get("jobs", c.jobs);
        for (const char *t : {"active_space", "ensemble", "solver", "optimizer", "orbitals", "scan",
                              "response", "exact"}) {
            top.has(t);
        }
    }
    {
        TableReader r(table("active_space"), "active_space");
        r.get("electrons", c.n_active_elec);
        r.get("orbitals", c.n_active_orb);
        if (const auto *a = r.array("indices")) {
            std::vector<int> idx;
            for (const auto &n : *a) {
                if (!n.is_integer()) {
                    throw ConfigError("'active_space.indices' must hold integers");
                }
                idx.push_back(static_cast<int>(*n.value<std::int64_t>()));
            }
            c.saoo.active_indices = idx;
        }
    }
    {
        TableReader r(table("ensemble"), "ensemble");
        if (const auto *a = r.array("weights")) {
            const auto w = number_array(*a, "ensemble.weights");
            if (w.size() != 2) {
                throw ConfigError("'ensemble.weights' must have two entries");
            }
            c.saoo.vqe.w0 = w[0];
            c.saoo.vqe.w1 = w[1];
        }
    }
    {
        TableReader r(table("solver"), "solver");
        std::string kind = to_string(c.saoo.solver);
        r.get("kind", kind);
        c.saoo.solver = parse_solver(kind);
        r.get("ansatz", c.ansatz);
        r.get("trotter_reps", c.saoo.vqe.trotter_reps);
    }
    {
        auto &o = c.saoo.vqe.optimizer;
        TableReader r(table("optimizer"), "optimizer");
        std::string method = to_string(o.method);
        r.get("method", method);
        o.method = parse_optimizer_method(method);
        r.get("max_iters", o.max_iters);
        r.get("tol_grad", o.tol_grad);
        r.get("tol_f", o.tol_f);
        r.get("gd_step", o.gd_step);
        r.get("seed", o.seed);
        r.get("particles", o.pso_particles);
        r.get("inertia", o.pso_inertia);
        r.get("cognitive", o.pso_cognitive);
        r.get("social", o.pso_social);
        r.get("stall_iters", o.pso_stall_iters);
        if (const auto *a = r.array("bounds")) {
            std::vector<std::pair<double, double>> b;
            for (const auto &n : *a) {
                const auto *pair = n.as_array();
                if (!pair) {
                    throw ConfigError("'optimizer.bounds' must hold [lo, hi] pairs");
                }
                const auto v = number_array(*pair, "optimizer.bounds");
                if (v.size() != 2 || !(v[0] < v[1])) {
                    throw ConfigError("'optimizer.bounds' entries must be [lo, hi] with lo < hi");
                }
                b.emplace_back(v[0], v[1]);
            }
            o.bounds = b;
        }
    }
    {
        auto &s = c.saoo;
        TableReader r(table("orbitals"), "orbitals");
        r.get("optimize", s.optimize_orbitals);
        r.get("include_active_active", s.include_active_active);
        r.get("max_macro_iters", s.max_macro_iters);
        r.get("tol_grad", s.tol_orbital_grad);
        r.get("tol_energy", s.tol_energy);
        r.get("trust_radius", s.trust_radius);
        r.get("hessian_step", s.hessian_fd_step);
    }
    {
        TableReader r(table("scan"), "scan");
        r.get_path("manifest", base, c.scan.manifest);
        r.get("warm_start", c.scan.warm_start);
        r.get("compare_exact", c.scan.compare_exact);
    }
    {
        auto &s = c.response;
        TableReader r(table("response"), "response");
        r.get_path("stencil", base, s.stencil);
        r.get_path("derivatives", base, s.derivatives);
        r.get_path("connection", base, s.connection);
        r.get("orbital_response", s.orbital_response);
        r.get("gap_floor", s.gap_floor);
        r.get("kappa_step", s.options.kappa_step);
        r.get("coordinate_step", s.options.coordinate_step);
        r.get("tol_grad", s.options.tol_grad);
    }
    {
        TableReader r(table("exact"), "exact");
        r.get("roots", c.exact_roots);
    }
    c.response.options.jobs = c.jobs;
    c.validate();
    return c;
}

RunConfig load_config(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
    } catch (const ParseError &e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

nlohmann::json config_to_json(const RunConfig &c) {
    using nlohmann::json;
    auto opt_path = [](const std::optional<fs::path> &p) {
        return p ? json(p->string()) : json(nullptr);
    };
    const auto &o = c.saoo.vqe.optimizer;
    json bounds = nullptr;
    if (o.bounds) {
        bounds = json::array();
        for (const auto &[lo, hi] : *o.bounds) {
            bounds.push_back({lo, hi});
        }
    }
    return {
        {"fcidump", opt_path(c.fcidump)},
        {"operator", opt_path(c.operator_file)},
        {"output", opt_path(c.output)},
        {"jobs", c.jobs},
        {"active_space",
         {{"electrons", c.n_active_elec},
          {"orbitals", c.n_active_orb},
          {"indices", c.saoo.active_indices ? json(*c.saoo.active_indices) : json(nullptr)}}},
        {"ensemble", {{"weights", {c.saoo.vqe.w0, c.saoo.vqe.w1}}}},
        {"solver",
         {{"kind", to_string(c.saoo.solver)},
          {"ansatz", c.ansatz},
          {"trotter_reps", c.saoo.vqe.trotter_reps}}},
        {"optimizer",
         {{"method", to_string(o.method)},
          {"max_iters", o.max_iters},
          {"tol_grad", o.tol_grad},
          {"tol_f", o.tol_f},
          {"gd_step", o.gd_step},
          {"seed", o.seed},
          {"particles", o.pso_particles},
          {"inertia", o.pso_inertia},
          {"cognitive", o.pso_cognitive},
          {"social", o.pso_social},
          {"stall_iters", o.pso_stall_iters},
          {"bounds", bounds}}},
        {"orbitals",
         {{"optimize", c.saoo.optimize_orbitals},
          {"include_active_active", c.saoo.include_active_active},
          {"max_macro_iters", c.saoo.max_macro_iters},
          {"tol_grad", c.saoo.tol_orbital_grad},
          {"tol_energy", c.saoo.tol_energy},
          {"trust_radius", c.saoo.trust_radius},
          {"hessian_step", c.saoo.hessian_fd_step}}},
        {"scan",
         {{"manifest", opt_path(c.scan.manifest)},
          {"warm_start", c.scan.warm_start},
          {"compare_exact", c.scan.compare_exact}}},
        {"response",
         {{"stencil", opt_path(c.response.stencil)},
          {"derivatives", opt_path(c.response.derivatives)},
          {"connection", opt_path(c.response.connection)},
          {"orbital_response", c.response.orbital_response},
          {"gap_floor", c.response.gap_floor},
          {"kappa_step", c.response.options.kappa_step},
          {"coordinate_step", c.response.options.coordinate_step},
          {"tol_grad", c.response.options.tol_grad}}},
        {"exact", {{"roots", c.exact_roots}}},
    };
}

std::string config_to_toml(const RunConfig &c) {
    // JSON echo → TOML: nulls are dropped, everything else maps one to one.
    const nlohmann::json j = config_to_json(c);
    std::ostringstream os;
    auto value = [&](const nlohmann::json &v, auto &&self) -> std::string {
        if (v.is_string()) {
            return toml_string(v.get<std::string>());
        }
        if (v.is_boolean()) {
            return v.get<bool>() ? "true" : "false";
        }
        if (v.is_number_unsigned()) {
            return std::to_string(v.get<std::uint64_t>());
        }
        if (v.is_number_integer()) {
            return std::to_string(v.get<std::int64_t>());
        }
        if (v.is_number_float()) {
            return toml_double(v.get<double>());
        }
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            s += (i ? ", " : "") + self(v[i], self);
        }
        return s + "]";
    };
    for (const auto &[k, v] : j.items()) {
        if (!v.is_object() && !v.is_null()) {
            os << k << " = " << value(v, value) << "\n";
        }
    }
    for (const auto &[k, v] : j.items()) {
        if (!v.is_object()) {
            continue;
        }
        os << "\n[" << k << "]\n";
        for (const auto &[kk, vv] : v.items()) {
            if (!vv.is_null()) {
                os << kk << " = " << value(vv, value) << "\n";
            }
        }
    }
    return os.str();
}

} // namespace saoovqe
