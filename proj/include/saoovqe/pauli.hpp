#pragma once

#include <complex>
#include <filesystem>
#include <istream>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace saoovqe {

using cplx = std::complex<double>;

/// Coefficients below this magnitude are dropped by simplification.
inline constexpr double kSimplifyFloor = 1e-14;

/// Tensor product of single-qubit Paulis on at most 64 qubits, stored as
/// symplectic bit masks: qubit k carries X^x_k Z^z_k, with (1,1) meaning Y.
/// As an operator the string equals i^{|x&z|} X^x Z^z.
class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(int n_qubits) : n_(n_qubits) {}
    PauliString(int n_qubits, std::uint64_t x, std::uint64_t z);

    /// "XIZY": character k acts on qubit k.
    static PauliString from_letters(std::string_view letters);
    /// Single-letter operator, e.g. single(4, 'Z', 2) = Z_2 on four qubits.
    static PauliString single(int n_qubits, char letter, int qubit);

    int n_qubits() const noexcept { return n_; }
    std::uint64_t x_mask() const noexcept { return x_; }
    std::uint64_t z_mask() const noexcept { return z_; }
    char letter(int qubit) const;
    std::string letters() const;
    int weight() const;
    bool is_identity() const noexcept { return x_ == 0 && z_ == 0; }
    /// Number of Y letters.
    int y_count() const;

    /// Lexicographic over letters (I < X < Y < Z), qubit 0 most significant.
    friend bool operator<(const PauliString &a, const PauliString &b);
    friend bool operator==(const PauliString &a, const PauliString &b) = default;

  private:
    int n_ = 0;
    std::uint64_t x_ = 0;
    std::uint64_t z_ = 0;
};

/// Product of two strings: a·b = phase · result.
std::pair<cplx, PauliString> multiply(const PauliString &a, const PauliString &b);

/// Whether the two strings commute.
bool commutes(const PauliString &a, const PauliString &b);

/// Linear combination of Pauli strings sharing one qubit count.
class PauliSum {
  public:
    using Terms = std::map<PauliString, cplx>;

    PauliSum() = default;
    explicit PauliSum(int n_qubits) : n_(n_qubits) {}

    static PauliSum identity(int n_qubits, cplx c = 1.0);
    static PauliSum term(const PauliString &p, cplx c = 1.0);

    int n_qubits() const noexcept { return n_; }
    const Terms &terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool empty() const noexcept { return terms_.empty(); }

    /// Adds c·p, merging with an existing entry; no simplification.
    void add(const PauliString &p, cplx c);
    /// Coefficient of p (0 when absent).
    cplx coefficient(const PauliString &p) const;

    /// True when every coefficient has |Im| <= tol.
    bool is_hermitian(double tol = 1e-12) const;
    /// Largest coefficient magnitude (0 for the empty sum).
    double max_abs_coefficient() const;

    /// Dense 2^n × 2^n matrix, little-endian basis (bit k = qubit k).
    Eigen::MatrixXcd to_dense() const;

    std::string to_string() const;

    PauliSum &operator+=(const PauliSum &o);
    PauliSum &operator-=(const PauliSum &o);
    PauliSum &operator*=(cplx c);

  private:
    int n_ = 0;
    Terms terms_;
};

/// Merges duplicate strings and drops coefficients with |c| < floor.
PauliSum pauli_simplify(const PauliSum &a, double floor = kSimplifyFloor);
/// Sum and product, both simplified. Throw DimensionError on qubit mismatch.
PauliSum pauli_add(const PauliSum &a, const PauliSum &b);
PauliSum pauli_mul(const PauliSum &a, const PauliSum &b);
/// a·b − b·a, simplified.
PauliSum commutator(const PauliSum &a, const PauliSum &b);

PauliSum operator+(PauliSum a, const PauliSum &b);
PauliSum operator-(PauliSum a, const PauliSum &b);
PauliSum operator*(const PauliSum &a, const PauliSum &b);
PauliSum operator*(cplx c, PauliSum a);

/// Operator text: one term per line, `<re> <LETTERS>` or `<re> <im> <LETTERS>`,
/// letter k acting on qubit k; '#' starts a comment. Every string must have
/// the same length (DimensionError otherwise); malformed lines raise
/// ParseError with the line number.
PauliSum parse_pauli_sum(std::istream &in);
PauliSum read_pauli_sum(const std::filesystem::path &path);

} // namespace saoovqe
