#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "rabilab/linop.hpp"

namespace rabilab {

// Single-factor building blocks -------------------------------------------

// <n-1| a |n> = sqrt(n): zeros except the superdiagonal sqrt(1..cutoff).
inline SpMat fock_lowering(int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("fock_lowering: cutoff must be >= 0");
    SpMat m(cutoff + 1, cutoff + 1);
    std::vector<Triplet> ts;
    for (int n = 1; n <= cutoff; ++n) ts.emplace_back(n - 1, n, std::sqrt(double(n)));
    m.setFromTriplets(ts.begin(), ts.end());
    return m;
}

inline SpMat fock_raising(int cutoff) { return SpMat(fock_lowering(cutoff).adjoint()); }

inline SpMat fock_number(int cutoff) {
    SpMat m(cutoff + 1, cutoff + 1);
    std::vector<Triplet> ts;
    for (int n = 1; n <= cutoff; ++n) ts.emplace_back(n, n, double(n));
    m.setFromTriplets(ts.begin(), ts.end());
    return m;
}

// b + b^dagger.
inline SpMat fock_position(int cutoff) {
    SpMat b = fock_lowering(cutoff);
    return SpMat(b + SpMat(b.adjoint()));
}

enum class Pauli { x, y, z, plus, minus };

// 2x2 Pauli/ladder matrices in the ordered basis (|up>, |down>),
// sigma_z |up> = +|up>.
inline SpMat pauli(Pauli which) {
    SpMat m(2, 2);
    std::vector<Triplet> ts;
    const cplx i(0, 1);
    switch (which) {
        case Pauli::x: ts = {{0, 1, 1.0}, {1, 0, 1.0}}; break;
        case Pauli::y: ts = {{0, 1, -i}, {1, 0, i}}; break;
        case Pauli::z: ts = {{0, 0, 1.0}, {1, 1, -1.0}}; break;
        case Pauli::plus: ts = {{0, 1, 1.0}}; break;   // |up><down|
        case Pauli::minus: ts = {{1, 0, 1.0}}; break;  // |down><up|
    }
    m.setFromTriplets(ts.begin(), ts.end());
    return m;
}

// Composite-space embedding -------------------------------------------------

// op tensored with identities on all other factors, in (mode_a, mode_b, spin)
// order.
inline LinOp embed(const SpMat& op, Factor slot, const Truncation& trunc) {
    const BasisDescriptor basis = BasisDescriptor::of(trunc);
    if (slot == Factor::mode_a && !trunc.include_a())
        throw std::invalid_argument("embed: space has no mode_a factor");
    if (op.rows() != op.cols() || op.rows() != trunc.local_dim(slot))
        throw std::invalid_argument(
            "embed: operator dimension " + std::to_string(op.rows()) + " does not match " +
            factor_name(slot) + " local dimension " + std::to_string(trunc.local_dim(slot)));

    SpMat eye_template;
    SpMat acc;
    bool first = true;
    for (const auto& f : basis.factors) {
        SpMat piece;
        if (f.label == slot) {
            piece = op;
        } else {
            piece = SpMat(f.dim, f.dim);
            piece.setIdentity();
        }
        acc = first ? piece : sparse_kron(acc, piece);
        first = false;
    }
    return LinOp(basis, std::move(acc));
}

// Diagonal of Pi = exp{i pi [a^t a + b^t b + (1+sigma_z)/2]}: (-1)^(n_a+n_b+s)
// with s = 1 for |up>, 0 for |down>.
inline Eigen::VectorXd parity_diagonal(const Truncation& trunc) {
    Eigen::VectorXd d(trunc.dim());
    for (int na = 0; na < trunc.dim_a(); ++na)
        for (int nb = 0; nb < trunc.dim_b(); ++nb)
            for (int s = 0; s < 2; ++s) {
                int exc = na + nb + (s == 0 ? 1 : 0);
                d(trunc.encode(na, nb, s)) = (exc % 2 == 0) ? 1.0 : -1.0;
            }
    return d;
}

inline LinOp parity_operator(const Truncation& trunc) {
    Eigen::VectorXd d = parity_diagonal(trunc);
    std::vector<Triplet> ts;
    ts.reserve(trunc.dim());
    for (int i = 0; i < trunc.dim(); ++i) ts.emplace_back(i, i, d(i));
    return LinOp::from_triplets(BasisDescriptor::of(trunc), ts);
}

}  // namespace rabilab
