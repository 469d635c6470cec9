#include "saoovqe/tensor.hpp"

#include "saoovqe/error.hpp"

namespace saoovqe {

Tensor4 &Tensor4::operator+=(const Tensor4 &o) {
    if (o.n_ != n_) {
        throw DimensionError("Tensor4 dimension mismatch");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += o.data_[i];
    }
    return *this;
}

Tensor4 &Tensor4::operator*=(double a) {
    for (auto &x : data_) {
        x *= a;
    }
    return *this;
}

Tensor4 SymmetricEri::unpack() const {
    Tensor4 t(n_);
    for (std::size_t p = 0; p < n_; ++p)
        for (std::size_t q = 0; q < n_; ++q)
            for (std::size_t r = 0; r < n_; ++r)
                for (std::size_t s = 0; s < n_; ++s)
                    t(p, q, r, s) = (*this)(p, q, r, s);
    return t;
}

SymmetricEri SymmetricEri::pack(const Tensor4 &t) {
    const std::size_t n = t.dim();
    SymmetricEri g(n);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q <= p; ++q)
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t s = 0; s <= r; ++s)
                    if (pair_index(r, s) <= pair_index(p, q))
                        g.at(p, q, r, s) = t(p, q, r, s);
    return g;
}

Matrix transform_one_body(const Matrix &h, const Matrix &u) {
    if (h.rows() != u.rows()) {
        throw DimensionError("transform_one_body: dimension mismatch");
    }
    Matrix out = u.transpose() * h * u;
    return 0.5 * (out + out.transpose());
}

SymmetricEri transform_two_body(const SymmetricEri &g, const Matrix &u) {
    const auto n = static_cast<Eigen::Index>(g.dim());
    if (u.rows() != n || u.cols() != n) {
        throw DimensionError("transform_two_body: dimension mismatch");
    }
    const Eigen::Index n3 = n * n * n;
    Tensor4 work = g.unpack();
    std::vector<double> tmp(work.data().size());
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    // Contract the last index, then rotate (a,b,c,s) -> (s,a,b,c); four
    // passes transform every index and restore the original order.
    for (int pass = 0; pass < 4; ++pass) {
        Eigen::Map<const RowMat> in(work.data().data(), n3, n);
        Eigen::Map<RowMat> out(tmp.data(), n3, n);
        out.noalias() = in * u;
        auto &dst = work.data();
        for (Eigen::Index abc = 0; abc < n3; ++abc) {
            for (Eigen::Index s = 0; s < n; ++s) {
                dst[s * n3 + abc] = tmp[abc * n + s];
            }
        }
    }
    return SymmetricEri::pack(work);
}

} // namespace saoovqe
