#include "saoovqe/fcidump.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "saoovqe/error.hpp"

namespace saoovqe {

namespace {

constexpr double kDuplicateTolerance = 1e-12;

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

std::vector<std::string> split_ws(const std::string &s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string tok; is >> tok;) {
        out.push_back(tok);
    }
    return out;
}

bool parse_double(std::string tok, double &out) {
    // Fortran writers sometimes emit 1.0D-03.
    std::replace(tok.begin(), tok.end(), 'D', 'E');
    std::replace(tok.begin(), tok.end(), 'd', 'e');
    const char *first = tok.data();
    if (!tok.empty() && tok.front() == '+') {
        ++first;
    }
    const char *last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_int(const std::string &tok, long &out) {
    const char *first = tok.data();
    const char *last = tok.data() + tok.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool is_data_line(const std::string &line) {
    auto toks = split_ws(line);
    if (toks.size() != 5) {
        return false;
    }
    double v;
    long i;
    return parse_double(toks[0], v) && parse_int(toks[1], i) && parse_int(toks[2], i) &&
           parse_int(toks[3], i) && parse_int(toks[4], i);
}

/// Shared implementation of the strict parser and the lint pass.
class FcidumpReader {
  public:
    FcidumpReader(bool collect, std::vector<FcidumpIssue> *errors,
                  std::vector<FcidumpIssue> *warnings)
        : collect_(collect), errors_(errors), warnings_(warnings) {}

    std::optional<SpatialIntegrals> run(std::istream &in) {
        std::vector<std::string> lines;
        for (std::string line; std::getline(in, line);) {
            lines.push_back(line);
        }
        std::size_t pos = 0;
        if (!read_header(lines, pos)) {
            return std::nullopt;
        }
        for (; pos < lines.size(); ++pos) {
            read_data_line(lines[pos], pos + 1);
        }
        if (failed_) {
            return std::nullopt;
        }
        return std::move(ints_);
    }

  private:
    void error(std::size_t line, const std::string &msg) {
        failed_ = true;
        if (!collect_) {
            throw ParseError(msg, line);
        }
        errors_->push_back({line, msg});
    }

    void warn(std::size_t line, const std::string &msg) {
        if (warnings_) {
            warnings_->push_back({line, msg});
        }
    }

    bool read_header(const std::vector<std::string> &lines, std::size_t &pos) {
        std::string header;
        std::size_t first = 0;
        while (pos < lines.size() && trim(lines[pos]).empty()) {
            ++pos;
        }
        first = pos + 1;
        const bool namelist = pos < lines.size() && trim(lines[pos]).starts_with("&");
        bool terminated = false;
        for (; pos < lines.size(); ++pos) {
            std::string t = trim(lines[pos]);
            if (!namelist && is_data_line(t)) {
                terminated = true;
                break;
            }
            std::string u = upper(t);
            const bool end = u.find("&END") != std::string::npos || u == "/" ||
                             (namelist && !u.empty() && u.back() == '/');
            header += ' ' + t;
            if (end) {
                ++pos;
                terminated = true;
                break;
            }
        }
        if (!terminated) {
            error(first, "FCIDUMP header is not terminated (expected &END or /)");
            return false;
        }
        return parse_header_fields(header, first);
    }

    bool parse_header_fields(std::string header, std::size_t line) {
        header = upper(header);
        for (const char *tag : {"&FCI", "&END"}) {
            for (auto at = header.find(tag); at != std::string::npos; at = header.find(tag)) {
                header.replace(at, std::string(tag).size(), " ");
            }
        }
        std::replace(header.begin(), header.end(), '/', ' ');
        std::replace(header.begin(), header.end(), ',', ' ');
        header = std::regex_replace(header, std::regex(R"(\s*=\s*)"), "=");

        std::map<std::string, std::vector<std::string>> fields;
        std::string key;
        for (const auto &tok : split_ws(header)) {
            const auto eq = tok.find('=');
            if (eq != std::string::npos) {
                key = tok.substr(0, eq);
                fields[key];
                if (eq + 1 < tok.size()) {
                    fields[key].push_back(tok.substr(eq + 1));
                }
            } else if (!key.empty()) {
                fields[key].push_back(tok);
            } else {
                error(line, "unexpected token '" + tok + "' in FCIDUMP header");
                return false;
            }
        }
        auto scalar = [&](const std::string &name, bool required, long fallback) -> long {
            auto it = fields.find(name);
            if (it == fields.end() || it->second.empty()) {
                if (required) {
                    error(line, "FCIDUMP header is missing " + name);
                }
                return fallback;
            }
            long v = 0;
            if (it->second.size() != 1 || !parse_int(it->second.front(), v)) {
                error(line, "FCIDUMP header field " + name + " is not an integer");
                return fallback;
            }
            return v;
        };
        const long norb = scalar("NORB", true, 0);
        const long nelec = scalar("NELEC", true, 0);
        const long ms2 = scalar("MS2", false, 0);
        const long isym = scalar("ISYM", false, 1);
        if (failed_) {
            return false;
        }
        if (norb < 1 || nelec < 0) {
            error(line, "FCIDUMP header has NORB < 1 or NELEC < 0");
            return false;
        }
        ints_ = SpatialIntegrals::zeros(static_cast<int>(norb), static_cast<int>(nelec),
                                        static_cast<int>(ms2));
        ints_.isym = static_cast<int>(isym);
        if (auto it = fields.find("ORBSYM"); it != fields.end()) {
            for (const auto &v : it->second) {
                long s = 0;
                if (!parse_int(v, s)) {
                    error(line, "ORBSYM entry '" + v + "' is not an integer");
                    return false;
                }
                ints_.orbsym.push_back(static_cast<int>(s));
            }
            if (!ints_.orbsym.empty() && ints_.orbsym.size() != static_cast<std::size_t>(norb)) {
                warn(line, "ORBSYM has " + std::to_string(ints_.orbsym.size()) +
                               " entries, expected " + std::to_string(norb));
            }
        }
        h_seen_.assign(static_cast<std::size_t>(norb * norb), false);
        g_seen_.assign(ints_.g.packed().size(), false);
        return true;
    }

    void read_data_line(const std::string &raw, std::size_t line) {
        const std::string t = trim(raw);
        if (t.empty()) {
            return;
        }
        auto toks = split_ws(t);
        if (toks.size() != 5) {
            error(line, "expected '<value> i j k l', got " + std::to_string(toks.size()) +
                            " fields");
            return;
        }
        double v = 0.0;
        if (!parse_double(toks[0], v)) {
            error(line, "non-numeric integral value '" + toks[0] + "'");
            return;
        }
        long idx[4];
        for (int k = 0; k < 4; ++k) {
            if (!parse_int(toks[k + 1], idx[k])) {
                error(line, "non-integer index '" + toks[k + 1] + "'");
                return;
            }
            if (idx[k] < 0 || idx[k] > ints_.n_orb) {
                error(line, "index " + std::to_string(idx[k]) + " out of range [0, " +
                                std::to_string(ints_.n_orb) + "]");
                return;
            }
        }
        const auto [i, j, k, l] = std::tuple{idx[0], idx[1], idx[2], idx[3]};
        if (i == 0 && j == 0 && k == 0 && l == 0) {
            if (core_seen_ && std::abs(ints_.e_core - v) > kDuplicateTolerance) {
                error(line, "inconsistent duplicate core energy");
                return;
            }
            core_seen_ = true;
            ints_.e_core = v;
        } else if (i > 0 && j > 0 && k == 0 && l == 0) {
            const auto p = static_cast<std::size_t>(i - 1), q = static_cast<std::size_t>(j - 1);
            const std::size_t slot = std::max(p, q) * ints_.n_orb + std::min(p, q);
            if (h_seen_[slot] && std::abs(ints_.h(p, q) - v) > kDuplicateTolerance) {
                error(line, "inconsistent duplicate one-electron integral (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
                return;
            }
            h_seen_[slot] = true;
            ints_.h(p, q) = v;
            ints_.h(q, p) = v;
        } else if (i > 0 && j > 0 && k > 0 && l > 0) {
            const std::size_t slot = SymmetricEri::slot(i - 1, j - 1, k - 1, l - 1);
            double &dst = ints_.g.packed()[slot];
            if (g_seen_[slot] && std::abs(dst - v) > kDuplicateTolerance) {
                error(line, "inconsistent duplicate two-electron integral (" +
                                std::to_string(i) + std::to_string(j) + "|" +
                                std::to_string(k) + std::to_string(l) + ")");
                return;
            }
            g_seen_[slot] = true;
            dst = v;
        } else if (i > 0 && j == 0 && k == 0 && l == 0) {
            warn(line, "orbital-energy line ignored");
        } else {
            error(line, "invalid index pattern");
        }
    }

    bool collect_;
    std::vector<FcidumpIssue> *errors_;
    std::vector<FcidumpIssue> *warnings_;
    bool failed_ = false;
    bool core_seen_ = false;
    SpatialIntegrals ints_;
    std::vector<bool> h_seen_;
    std::vector<bool> g_seen_;
};

} // namespace

SpatialIntegrals SpatialIntegrals::zeros(int n_orb, int n_elec, int ms2) {
    SpatialIntegrals s;
    s.n_orb = n_orb;
    s.n_elec = n_elec;
    s.ms2 = ms2;
    s.h = Matrix::Zero(n_orb, n_orb);
    s.g = SymmetricEri(static_cast<std::size_t>(n_orb));
    return s;
}

void SpatialIntegrals::validate() const {
    if (n_orb < 1 || n_elec < 0) {
        throw ConfigError("SpatialIntegrals: n_orb must be >= 1 and n_elec >= 0");
    }
    if (h.rows() != n_orb || h.cols() != n_orb ||
        g.dim() != static_cast<std::size_t>(n_orb)) {
        throw DimensionError("SpatialIntegrals: array dimensions do not match n_orb");
    }
    if (!std::isfinite(e_core) || !h.allFinite() ||
        !std::all_of(g.packed().begin(), g.packed().end(),
                     [](double x) { return std::isfinite(x); })) {
        throw NumericalError("SpatialIntegrals: non-finite integral");
    }
    if ((h - h.transpose()).cwiseAbs().maxCoeff() != 0.0) {
        throw NumericalError("SpatialIntegrals: h is not symmetric");
    }
}

bool operator==(const SpatialIntegrals &a, const SpatialIntegrals &b) {
    return a.n_orb == b.n_orb && a.n_elec == b.n_elec && a.ms2 == b.ms2 &&
           a.e_core == b.e_core && a.h == b.h && a.g == b.g;
}

std::string to_string(OrbitalConvention c) {
    return c == OrbitalConvention::FixedOrbital ? "fixed-orbital" : "tracked-orbital";
}

OrbitalConvention parse_convention(const std::string &tag) {
    if (tag == "fixed-orbital") {
        return OrbitalConvention::FixedOrbital;
    }
    if (tag == "tracked-orbital") {
        return OrbitalConvention::TrackedOrbital;
    }
    throw ParseError("unknown convention tag '" + tag + "'");
}

SpatialIntegrals parse_fcidump(std::istream &in) {
    FcidumpReader reader(false, nullptr, nullptr);
    return *reader.run(in);
}

SpatialIntegrals parse_fcidump_string(const std::string &text) {
    std::istringstream in(text);
    return parse_fcidump(in);
}

SpatialIntegrals read_fcidump(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open FCIDUMP file '" + path.string() + "'");
    }
    try {
        return parse_fcidump(in);
    } catch (const ParseError &e) {
        throw ParseError(path.string() + ": " + e.what(), e.line());
    }
}

std::optional<SpatialIntegrals> lint_fcidump(std::istream &in,
                                             std::vector<FcidumpIssue> &errors,
                                             std::vector<FcidumpIssue> &warnings) {
    FcidumpReader reader(true, &errors, &warnings);
    return reader.run(in);
}

std::string format_value(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
    std::string s(buf, ptr);
    if (s.size() < 24) {
        s.insert(0, 24 - s.size(), ' ');
    }
    return s;
}

namespace {

void append_line(std::string &out, double v, std::size_t i, std::size_t j, std::size_t k,
                 std::size_t l) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " %4zu %4zu %4zu %4zu\n", i, j, k, l);
    out += format_value(v);
    out += buf;
}

} // namespace

std::string write_fcidump(const SpatialIntegrals &ints) {
    const auto n = static_cast<std::size_t>(ints.n_orb);
    std::string out = "&FCI NORB=" + std::to_string(ints.n_orb) +
                      ",NELEC=" + std::to_string(ints.n_elec) +
                      ",MS2=" + std::to_string(ints.ms2) + ",\n ORBSYM=";
    for (std::size_t p = 0; p < n; ++p) {
        out += std::to_string(ints.orbsym.size() == n ? ints.orbsym[p] : 1) + ",";
    }
    out += "\n ISYM=" + std::to_string(ints.isym) + ",\n&END\n";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const std::size_t ij = SymmetricEri::pair_index(i, j);
            for (std::size_t k = 0; k < n; ++k) {
                for (std::size_t l = 0; l <= k; ++l) {
                    if (SymmetricEri::pair_index(k, l) > ij) {
                        continue;
                    }
                    const double v = ints.g(i, j, k, l);
                    if (v != 0.0) {
                        append_line(out, v, i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = ints.h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (v != 0.0) {
                append_line(out, v, i + 1, j + 1, 0, 0);
            }
        }
    }
    append_line(out, ints.e_core, 0, 0, 0, 0);
    return out;
}

void write_fcidump(const SpatialIntegrals &ints, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write '" + path.string() + "'");
    }
    out << write_fcidump(ints);
}

std::vector<ManifestEntry> read_manifest_entries(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open manifest '" + path.string() + "'");
    }
    const auto base = path.parent_path();
    std::vector<ManifestEntry> out;
    std::size_t lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        const auto hash = line.find('#');
        auto toks = split_ws(hash == std::string::npos ? line : line.substr(0, hash));
        if (toks.empty()) {
            continue;
        }
        if (toks.size() != 3) {
            throw ParseError(path.string() + ": expected '<label> <path> <convention>'", lineno);
        }
        ManifestEntry e;
        e.label = toks[0];
        e.path = base / toks[1];
        try {
            e.convention = parse_convention(toks[2]);
        } catch (const ParseError &err) {
            throw ParseError(path.string() + ": " + err.what(), lineno);
        }
        e.line = lineno;
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<DerivativeIntegralSet>
parse_derivative_manifest(const std::filesystem::path &path,
                          const SpatialIntegrals &reference) {
    std::vector<DerivativeIntegralSet> out;
    for (auto &entry : read_manifest_entries(path)) {
        if (!std::filesystem::exists(entry.path)) {
            throw ConfigError("derivative file '" + entry.path.string() + "' listed on line " +
                              std::to_string(entry.line) + " does not exist");
        }
        DerivativeIntegralSet set;
        set.coordinate_label = entry.label;
        set.convention = entry.convention;
        set.d = read_fcidump(entry.path);
        if (set.d.n_orb != reference.n_orb) {
            throw DimensionError("derivative set '" + entry.label + "' has NORB=" +
                                 std::to_string(set.d.n_orb) + ", reference has " +
                                 std::to_string(reference.n_orb));
        }
        out.push_back(std::move(set));
    }
    return out;
}

} // namespace saoovqe
