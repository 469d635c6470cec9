#include "saoovqe/pauli.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "saoovqe/error.hpp"

namespace saoovqe {

namespace {

int letter_code(std::uint64_t x, std::uint64_t z, int k) {
    const bool xb = (x >> k) & 1u, zb = (z >> k) & 1u;
    return xb ? (zb ? 2 : 1) : (zb ? 3 : 0);
}

constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

void check_qubits(int a, int b) {
    if (a != b) {
        throw DimensionError("Pauli operands act on " + std::to_string(a) + " and " +
                             std::to_string(b) + " qubits");
    }
}

} // namespace

PauliString::PauliString(int n_qubits, std::uint64_t x, std::uint64_t z)
    : n_(n_qubits), x_(x), z_(z) {
    if (n_qubits < 0 || n_qubits > 64) {
        throw ConfigError("PauliString supports up to 64 qubits");
    }
    const std::uint64_t mask = n_qubits == 64 ? ~0ull : ((1ull << n_qubits) - 1);
    if ((x & ~mask) || (z & ~mask)) {
        throw DimensionError("PauliString mask exceeds qubit count");
    }
}

PauliString PauliString::from_letters(std::string_view letters) {
    std::uint64_t x = 0, z = 0;
    for (std::size_t k = 0; k < letters.size(); ++k) {
        const std::uint64_t bit = 1ull << k;
        switch (letters[k]) {
        case 'I': break;
        case 'X': x |= bit; break;
        case 'Y': x |= bit; z |= bit; break;
        case 'Z': z |= bit; break;
        default: throw ConfigError(std::string("invalid Pauli letter '") + letters[k] + "'");
        }
    }
    return PauliString(static_cast<int>(letters.size()), x, z);
}

PauliString PauliString::single(int n_qubits, char letter, int qubit) {
    std::string s(static_cast<std::size_t>(n_qubits), 'I');
    if (qubit < 0 || qubit >= n_qubits) {
        throw DimensionError("qubit index out of range");
    }
    s[static_cast<std::size_t>(qubit)] = letter;
    return from_letters(s);
}

char PauliString::letter(int qubit) const { return "IXYZ"[letter_code(x_, z_, qubit)]; }

std::string PauliString::letters() const {
    std::string s;
    for (int k = 0; k < n_; ++k) {
        s += letter(k);
    }
    return s;
}

int PauliString::weight() const { return std::popcount(x_ | z_); }

int PauliString::y_count() const { return std::popcount(x_ & z_); }

bool operator<(const PauliString &a, const PauliString &b) {
    if (a.n_ != b.n_) {
        return a.n_ < b.n_;
    }
    for (int k = 0; k < a.n_; ++k) {
        const int ca = letter_code(a.x_, a.z_, k), cb = letter_code(b.x_, b.z_, k);
        if (ca != cb) {
            return ca < cb;
        }
    }
    return false;
}

std::pair<cplx, PauliString> multiply(const PauliString &a, const PauliString &b) {
    check_qubits(a.n_qubits(), b.n_qubits());
    // a·b = i^{ya+yb} X^xa Z^za X^xb Z^zb = i^{ya+yb} (-1)^{|za&xb|} X^x Z^z
    //     = i^{ya+yb-y} (-1)^{|za&xb|} · (i^{y} X^x Z^z)
    const std::uint64_t x = a.x_mask() ^ b.x_mask();
    const std::uint64_t z = a.z_mask() ^ b.z_mask();
    PauliString out(a.n_qubits(), x, z);
    int power = a.y_count() + b.y_count() - out.y_count() +
                2 * std::popcount(a.z_mask() & b.x_mask());
    power = ((power % 4) + 4) % 4;
    return {kIPow[power], out};
}

bool commutes(const PauliString &a, const PauliString &b) {
    const int anti = std::popcount(a.x_mask() & b.z_mask()) + std::popcount(a.z_mask() & b.x_mask());
    return anti % 2 == 0;
}

PauliSum PauliSum::identity(int n_qubits, cplx c) {
    PauliSum s(n_qubits);
    s.add(PauliString(n_qubits), c);
    return s;
}

PauliSum PauliSum::term(const PauliString &p, cplx c) {
    PauliSum s(p.n_qubits());
    s.add(p, c);
    return s;
}

void PauliSum::add(const PauliString &p, cplx c) {
    check_qubits(n_, p.n_qubits());
    terms_[p] += c;
}

cplx PauliSum::coefficient(const PauliString &p) const {
    auto it = terms_.find(p);
    return it == terms_.end() ? cplx{} : it->second;
}

bool PauliSum::is_hermitian(double tol) const {
    for (const auto &[p, c] : terms_) {
        if (std::abs(c.imag()) > tol) {
            return false;
        }
    }
    return true;
}

double PauliSum::max_abs_coefficient() const {
    double m = 0.0;
    for (const auto &[p, c] : terms_) {
        m = std::max(m, std::abs(c));
    }
    return m;
}

Eigen::MatrixXcd PauliSum::to_dense() const {
    if (n_ > 14) {
        throw ConfigError("to_dense: refusing to materialize more than 14 qubits");
    }
    const std::size_t dim = std::size_t{1} << n_;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
    for (const auto &[p, c] : terms_) {
        const cplx base = c * kIPow[p.y_count() % 4];
        for (std::size_t b = 0; b < dim; ++b) {
            const double sign = (std::popcount(b & p.z_mask()) & 1) ? -1.0 : 1.0;
            m(static_cast<Eigen::Index>(b ^ p.x_mask()), static_cast<Eigen::Index>(b)) +=
                base * sign;
        }
    }
    return m;
}

std::string PauliSum::to_string() const {
    std::ostringstream os;
    os.precision(12);
    bool first = true;
    for (const auto &[p, c] : terms_) {
        os << (first ? "" : " + ") << "(" << c.real();
        if (c.imag() != 0.0) {
            os << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i";
        }
        os << ")*" << p.letters();
        first = false;
    }
    return first ? "0" : os.str();
}

PauliSum &PauliSum::operator+=(const PauliSum &o) {
    check_qubits(n_, o.n_);
    for (const auto &[p, c] : o.terms_) {
        terms_[p] += c;
    }
    return *this;
}

PauliSum &PauliSum::operator-=(const PauliSum &o) {
    check_qubits(n_, o.n_);
    for (const auto &[p, c] : o.terms_) {
        terms_[p] -= c;
    }
    return *this;
}

PauliSum &PauliSum::operator*=(cplx c) {
    for (auto &[p, v] : terms_) {
        v *= c;
    }
    return *this;
}

PauliSum pauli_simplify(const PauliSum &a, double floor) {
    PauliSum out(a.n_qubits());
    for (const auto &[p, c] : a.terms()) {
        if (std::abs(c) >= floor) {
            out.add(p, c);
        }
    }
    return out;
}

PauliSum pauli_add(const PauliSum &a, const PauliSum &b) {
    PauliSum s = a;
    s += b;
    return pauli_simplify(s);
}

PauliSum pauli_mul(const PauliSum &a, const PauliSum &b) {
    check_qubits(a.n_qubits(), b.n_qubits());
    PauliSum out(a.n_qubits());
    for (const auto &[pa, ca] : a.terms()) {
        for (const auto &[pb, cb] : b.terms()) {
            auto [phase, p] = multiply(pa, pb);
            out.add(p, phase * ca * cb);
        }
    }
    return pauli_simplify(out);
}

PauliSum commutator(const PauliSum &a, const PauliSum &b) {
    PauliSum ab = pauli_mul(a, b);
    ab -= pauli_mul(b, a);
    return pauli_simplify(ab);
}

PauliSum operator+(PauliSum a, const PauliSum &b) {
    a += b;
    return a;
}

PauliSum operator-(PauliSum a, const PauliSum &b) {
    a -= b;
    return a;
}

PauliSum operator*(const PauliSum &a, const PauliSum &b) { return pauli_mul(a, b); }

PauliSum operator*(cplx c, PauliSum a) {
    a *= c;
    return a;
}

PauliSum parse_pauli_sum(std::istream &in) {
    PauliSum sum;
    int n = -1;
    std::size_t lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.resize(hash);
        }
        std::istringstream is(line);
        std::vector<std::string> toks;
        for (std::string t; is >> t;) {
            toks.push_back(t);
        }
        if (toks.empty()) {
            continue;
        }
        if (toks.size() != 2 && toks.size() != 3) {
            throw ParseError("expected '<re> [<im>] <LETTERS>'", lineno);
        }
        cplx c;
        try {
            std::size_t used = 0;
            const double re = std::stod(toks[0], &used);
            if (used != toks[0].size()) {
                throw std::invalid_argument("trailing");
            }
            double im = 0.0;
            if (toks.size() == 3) {
                im = std::stod(toks[1], &used);
                if (used != toks[1].size()) {
                    throw std::invalid_argument("trailing");
                }
            }
            c = cplx(re, im);
        } catch (const std::exception &) {
            throw ParseError("malformed coefficient", lineno);
        }
        PauliString p;
        try {
            p = PauliString::from_letters(toks.back());
        } catch (const ConfigError &e) {
            throw ParseError(e.what(), lineno);
        }
        if (p.n_qubits() == 0 || p.n_qubits() > 64) {
            throw ParseError("Pauli string must act on 1 to 64 qubits", lineno);
        }
        if (n < 0) {
            n = p.n_qubits();
            sum = PauliSum(n);
        } else if (p.n_qubits() != n) {
            throw DimensionError("line " + std::to_string(lineno) + ": Pauli string acts on " +
                                 std::to_string(p.n_qubits()) + " qubits, expected " +
                                 std::to_string(n));
        }
        sum.add(p, c);
    }
    if (n < 0) {
        throw ParseError("operator file has no terms");
    }
    return sum;
}

PauliSum read_pauli_sum(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open operator file '" + path.string() + "'");
    }
    return parse_pauli_sum(in);
}

} // namespace saoovqe
