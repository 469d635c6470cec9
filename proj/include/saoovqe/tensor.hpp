#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace saoovqe {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense rank-4 real array, row-major over (p, q, r, s).
class Tensor4 {
  public:
    Tensor4() = default;
    explicit Tensor4(std::size_t n) : n_(n), data_(n * n * n * n, 0.0) {}

    std::size_t dim() const noexcept { return n_; }

    double &operator()(std::size_t p, std::size_t q, std::size_t r, std::size_t s) {
        return data_[((p * n_ + q) * n_ + r) * n_ + s];
    }
    double operator()(std::size_t p, std::size_t q, std::size_t r, std::size_t s) const {
        return data_[((p * n_ + q) * n_ + r) * n_ + s];
    }

    std::vector<double> &data() noexcept { return data_; }
    const std::vector<double> &data() const noexcept { return data_; }

    Tensor4 &operator+=(const Tensor4 &o);
    Tensor4 &operator*=(double a);

  private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Two-electron integrals (pq|rs) in chemists' notation with the 8-fold
/// permutational symmetry built into the storage: every index permutation
/// resolves to one packed slot, so symmetry holds exactly.
class SymmetricEri {
  public:
    SymmetricEri() = default;
    explicit SymmetricEri(std::size_t n)
        : n_(n), data_(pair_count(pair_count(n)), 0.0) {}

    std::size_t dim() const noexcept { return n_; }

    static std::size_t pair_count(std::size_t n) { return n * (n + 1) / 2; }
    static std::size_t pair_index(std::size_t p, std::size_t q) {
        return p >= q ? p * (p + 1) / 2 + q : q * (q + 1) / 2 + p;
    }
    static std::size_t slot(std::size_t p, std::size_t q, std::size_t r, std::size_t s) {
        return pair_index(pair_index(p, q), pair_index(r, s));
    }

    double operator()(std::size_t p, std::size_t q, std::size_t r, std::size_t s) const {
        return data_[slot(p, q, r, s)];
    }
    double &at(std::size_t p, std::size_t q, std::size_t r, std::size_t s) {
        return data_[slot(p, q, r, s)];
    }

    std::vector<double> &packed() noexcept { return data_; }
    const std::vector<double> &packed() const noexcept { return data_; }

    Tensor4 unpack() const;
    /// Repacks a dense tensor, reading only the canonical representative.
    static SymmetricEri pack(const Tensor4 &t);

    bool operator==(const SymmetricEri &) const = default;

  private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Orthogonal-transforms both integral tensors: h' = Uᵀ h U and
/// (pq|rs)' = Σ U_ap U_bq U_cr U_ds (ab|cd).
Matrix transform_one_body(const Matrix &h, const Matrix &u);
SymmetricEri transform_two_body(const SymmetricEri &g, const Matrix &u);

} // namespace saoovqe
