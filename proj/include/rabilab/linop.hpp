#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rabilab/basis.hpp"

namespace rabilab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<cplx>;
using Triplet = Eigen::Triplet<cplx>;

// Dense form is materialized eagerly up to this composite dimension; larger
// operators stay sparse-only (SP sweeps of the full model need n_b >~ 100).
inline constexpr int kDenseLimit = 4096;

// Immutable operator on a composite space. Always stores the sparse form;
// small operators additionally carry a dense copy so dense eigensolvers and
// test-side matrix algebra get it for free.
class LinOp {
  public:
    LinOp(BasisDescriptor basis, SpMat m) : basis_(std::move(basis)), sparse_(std::move(m)) {
        if (sparse_.rows() != sparse_.cols() || sparse_.rows() != basis_.dim())
            throw std::invalid_argument("LinOp: matrix size does not match basis (" +
                                        basis_.to_string() + ")");
        sparse_.makeCompressed();
        if (dim() <= kDenseLimit) dense_ = std::make_shared<Mat>(sparse_.toDense());
    }

    static LinOp from_triplets(BasisDescriptor basis, const std::vector<Triplet>& ts) {
        SpMat m(basis.dim(), basis.dim());
        m.setFromTriplets(ts.begin(), ts.end());
        return LinOp(std::move(basis), std::move(m));
    }
    static LinOp from_dense(BasisDescriptor basis, const Mat& m) {
        return LinOp(std::move(basis), m.sparseView());
    }
    static LinOp identity(BasisDescriptor basis) {
        SpMat m(basis.dim(), basis.dim());
        m.setIdentity();
        return LinOp(std::move(basis), std::move(m));
    }

    const BasisDescriptor& basis() const { return basis_; }
    int dim() const { return static_cast<int>(sparse_.rows()); }
    const SpMat& sparse() const { return sparse_; }
    bool has_dense() const { return static_cast<bool>(dense_); }
    const Mat& dense() const {
        if (!dense_)
            throw std::runtime_error("LinOp: dense form not kept above dimension " +
                                     std::to_string(kDenseLimit) + "; use sparse()");
        return *dense_;
    }
    Mat to_dense_copy() const { return dense_ ? *dense_ : Mat(sparse_.toDense()); }

    Vec apply(const Vec& v) const { return sparse_ * v; }

    cplx expectation(const Vec& v) const { return v.dot(sparse_ * v); }

    double max_abs() const {
        double m = 0;
        for (int k = 0; k < sparse_.outerSize(); ++k)
            for (SpMat::InnerIterator it(sparse_, k); it; ++it)
                m = std::max(m, std::abs(it.value()));
        return m;
    }

    // max |M - M^dagger| element.
    double hermiticity_defect() const {
        SpMat d = SpMat(sparse_.adjoint()) - sparse_;
        double m = 0;
        for (int k = 0; k < d.outerSize(); ++k)
            for (SpMat::InnerIterator it(d, k); it; ++it)
                m = std::max(m, std::abs(it.value()));
        return m;
    }
    bool is_hermitian(double rel_tol = 1e-12) const {
        double scale = max_abs();
        return hermiticity_defect() <= rel_tol * std::max(scale, 1.0);
    }

    LinOp adjoint() const { return LinOp(basis_, SpMat(sparse_.adjoint())); }

    friend LinOp operator+(const LinOp& x, const LinOp& y) {
        x.check_same_basis(y);
        return LinOp(x.basis_, SpMat(x.sparse_ + y.sparse_));
    }
    friend LinOp operator-(const LinOp& x, const LinOp& y) {
        x.check_same_basis(y);
        return LinOp(x.basis_, SpMat(x.sparse_ - y.sparse_));
    }
    friend LinOp operator*(cplx s, const LinOp& x) { return LinOp(x.basis_, SpMat(s * x.sparse_)); }
    friend LinOp operator*(double s, const LinOp& x) { return cplx(s, 0) * x; }
    friend LinOp operator*(const LinOp& x, const LinOp& y) {
        x.check_same_basis(y);
        return LinOp(x.basis_, SpMat(x.sparse_ * y.sparse_));
    }

    LinOp plus_scaled_identity(cplx s) const {
        SpMat id(dim(), dim());
        id.setIdentity();
        return LinOp(basis_, SpMat(sparse_ + s * id));
    }

  private:
    void check_same_basis(const LinOp& o) const {
        if (!(basis_ == o.basis_))
            throw std::invalid_argument("LinOp: basis mismatch (" + basis_.to_string() + " vs " +
                                        o.basis_.to_string() + ")");
    }

    BasisDescriptor basis_;
    SpMat sparse_;
    std::shared_ptr<const Mat> dense_;
};

inline LinOp commutator(const LinOp& x, const LinOp& y) { return x * y - y * x; }

inline double commutator_max_abs(const LinOp& x, const LinOp& y) {
    return commutator(x, y).max_abs();
}

// max |[H, P]| for diagonal P, evaluated over H's nonzeros only.
inline double commutator_with_diagonal_max_abs(const LinOp& h, const Eigen::VectorXd& diag) {
    if (diag.size() != h.dim()) throw std::invalid_argument("diagonal size mismatch");
    const SpMat& m = h.sparse();
    double mx = 0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it)
            mx = std::max(mx, std::abs(it.value() * (diag(it.col()) - diag(it.row()))));
    return mx;
}

inline SpMat sparse_kron(const SpMat& a, const SpMat& b) {
    SpMat out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Triplet> ts;
    ts.reserve(static_cast<size_t>(a.nonZeros()) * b.nonZeros());
    for (int ka = 0; ka < a.outerSize(); ++ka)
        for (SpMat::InnerIterator ia(a, ka); ia; ++ia)
            for (int kb = 0; kb < b.outerSize(); ++kb)
                for (SpMat::InnerIterator ib(b, kb); ib; ++ib)
                    ts.emplace_back(ia.row() * b.rows() + ib.row(),
                                    ia.col() * b.cols() + ib.col(), ia.value() * ib.value());
    out.setFromTriplets(ts.begin(), ts.end());
    return out;
}

}  // namespace rabilab
