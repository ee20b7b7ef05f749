#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rabilab/hamiltonians.hpp"
#include "rabilab/model.hpp"

namespace rabilab {

struct SpectralResult {
    std::vector<double> eigenvalues;   // ascending, lowest k
    std::vector<Vec> eigenvectors;     // matching orthonormal vectors
    std::vector<double> residual_norms;
};

namespace detail {

// Deterministic start block: normalized all-ones plus an alternating-sign
// vector, modified Gram-Schmidt.
inline Eigen::MatrixXcd start_block(int dim, int cols) {
    Eigen::MatrixXcd v(dim, cols);
    for (int i = 0; i < dim; ++i) v(i, 0) = 1.0;
    if (cols > 1)
        for (int i = 0; i < dim; ++i) v(i, 1) = (i % 2 == 0) ? 1.0 : -1.0;
    for (int c = 2; c < cols; ++c) {
        v.col(c).setZero();
        for (int i = c; i < dim; i += cols) v(i, c) = 1.0;
    }
    for (int c = 0; c < cols; ++c) {
        for (int j = 0; j < c; ++j) v.col(c) -= v.col(j).dot(v.col(c)) * v.col(j);
        v.col(c).normalize();
    }
    return v;
}

inline SpectralResult dense_lowest(const Mat& h, int k) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("dense eigensolver failed to converge");
    SpectralResult r;
    for (int i = 0; i < k; ++i) {
        r.eigenvalues.push_back(es.eigenvalues()(i));
        r.eigenvectors.push_back(es.eigenvectors().col(i));
        r.residual_norms.push_back(
            (h * es.eigenvectors().col(i) - es.eigenvalues()(i) * es.eigenvectors().col(i))
                .norm());
    }
    return r;
}

// Block Lanczos with full reorthogonalization, templated on the scalar so
// real-symmetric operators (every builder here produces one) run in real
// arithmetic. Block size 2 resolves the quasi-degenerate SP ground pairs
// that plain Lanczos cannot separate.
template <class Scalar>
SpectralResult block_lanczos_lowest_t(const Eigen::SparseMatrix<Scalar>& h, int k, double tol,
                                      int max_vecs, long max_matvecs) {
    using MatT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using VecT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    const int dim = static_cast<int>(h.rows());
    const int p = std::min(2, dim);  // block size; doublets need 2
    const int want = std::min(k, dim);
    max_vecs = std::min(max_vecs, dim);

    MatT V(dim, max_vecs);                        // Lanczos basis, column blocks
    MatT T = MatT::Zero(max_vecs, max_vecs);      // projected H
    long matvecs = 0;
    double best_residual = HUGE_VAL;

    MatT blk = start_block(dim, p).real().template cast<Scalar>();
    int nv = 0;  // vectors in basis

    auto reorthogonalize = [&](MatT& w) {
        for (int pass = 0; pass < 2; ++pass) {
            if (nv == 0) break;
            w -= V.leftCols(nv) * (V.leftCols(nv).adjoint() * w).eval();
        }
    };

    auto append_block = [&](MatT w, MatT* b_out) -> bool {
        // QR with deterministic rank-repair: a deficient column is replaced by
        // a fresh pattern vector orthogonalized against everything.
        const int cols = static_cast<int>(w.cols());
        MatT q(dim, cols);
        MatT rmat = MatT::Zero(cols, cols);
        int fresh = 0;
        for (int c = 0; c < cols; ++c) {
            VecT col = w.col(c);
            for (int j = 0; j < c; ++j) {
                Scalar ov = q.col(j).dot(col);
                rmat(j, c) = ov;
                col -= ov * q.col(j);
            }
            double nrm = col.norm();
            if (nrm < 1e-10) {
                // basis exhausted in this direction; bring in a fresh vector
                VecT f = VecT::Zero(dim);
                f((nv + c + 7 * (++fresh)) % dim) = Scalar(1.0);
                col = f;
                if (nv > 0) col -= V.leftCols(nv) * (V.leftCols(nv).adjoint() * col).eval();
                for (int j = 0; j < c; ++j) col -= q.col(j).dot(col) * q.col(j);
                nrm = col.norm();
                if (nrm < 1e-12) return false;
                rmat(c, c) = Scalar(0.0);
                col /= nrm;
            } else {
                rmat(c, c) = Scalar(nrm);
                col /= nrm;
            }
            q.col(c) = col;
        }
        if (nv + cols > max_vecs) return false;
        V.middleCols(nv, cols) = q;
        if (b_out) *b_out = rmat;
        nv += cols;
        return true;
    };

    if (!append_block(blk, nullptr)) throw std::runtime_error("lanczos: cannot start basis");

    SpectralResult out;
    int step = 0, next_check = 4;
    while (true) {
        const int j0 = nv - p;  // start of newest block
        MatT w = h * V.middleCols(j0, p);
        matvecs += p;
        MatT a = V.middleCols(j0, p).adjoint() * w;
        w -= V.middleCols(j0, p) * a;
        if (j0 >= p) w -= V.middleCols(j0 - p, p) * (V.middleCols(j0 - p, p).adjoint() * w).eval();
        reorthogonalize(w);
        T.block(j0, j0, p, p) = a;
        ++step;

        // Ritz extraction with exact residuals; the projected eigensolve
        // costs O(nv^3), so the cadence stretches as the basis grows
        const bool do_check = nv >= want + p && (step >= next_check || nv + p > max_vecs ||
                                                 nv == dim || matvecs > max_matvecs - 2 * p);
        if (do_check) {
            next_check = step + std::max(4, nv / 48);
            Eigen::SelfAdjointEigenSolver<MatT> es(T.topLeftCorner(nv, nv));
            bool all_converged = true;
            std::vector<Vec> ritz_vecs;
            std::vector<double> ritz_vals, resids;
            for (int i = 0; i < want; ++i) {
                VecT x = V.leftCols(nv) * es.eigenvectors().col(i);
                x /= x.norm();
                VecT hx = h * x;
                ++matvecs;
                const double resid = (hx - Scalar(es.eigenvalues()(i)) * x).norm();
                ritz_vecs.push_back(x.template cast<cplx>());
                ritz_vals.push_back(es.eigenvalues()(i));
                resids.push_back(resid);
                best_residual = std::min(best_residual, resid);
                if (resid > tol) all_converged = false;
            }
            if (all_converged) {
                out.eigenvalues = std::move(ritz_vals);
                out.eigenvectors = std::move(ritz_vecs);
                out.residual_norms = std::move(resids);
                return out;
            }
        }
        if (matvecs > max_matvecs)
            throw std::runtime_error("lanczos: iteration budget exhausted, best residual " +
                                     std::to_string(best_residual));
        if (nv + p > max_vecs)
            throw std::runtime_error("lanczos: subspace limit reached, best residual " +
                                     std::to_string(best_residual));
        MatT bmat;
        const int prev_nv = nv;
        if (!append_block(w, &bmat))
            throw std::runtime_error("lanczos: basis exhausted, best residual " +
                                     std::to_string(best_residual));
        T.block(prev_nv, j0, p, p) = bmat;
        T.block(j0, prev_nv, p, p) = bmat.adjoint();
    }
}

inline bool sparse_is_real(const SpMat& m) {
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it)
            if (it.value().imag() != 0.0) return false;
    return true;
}

inline SpectralResult block_lanczos_lowest(const SpMat& h, int k, double tol, int max_vecs,
                                           long max_matvecs) {
    if (sparse_is_real(h)) {
        std::vector<Eigen::Triplet<double>> ts;
        ts.reserve(h.nonZeros());
        for (int c = 0; c < h.outerSize(); ++c)
            for (SpMat::InnerIterator it(h, c); it; ++it)
                ts.emplace_back(it.row(), it.col(), it.value().real());
        Eigen::SparseMatrix<double> hr(h.rows(), h.cols());
        hr.setFromTriplets(ts.begin(), ts.end());
        return block_lanczos_lowest_t<double>(hr, k, tol, max_vecs, max_matvecs);
    }
    return block_lanczos_lowest_t<cplx>(h, k, tol, max_vecs, max_matvecs);
}

}  // namespace detail

struct SolverOptions {
    double tol = 1e-8;
    int dense_limit = 1200;   // dense path at or below this dimension
    int max_vecs = 1100;
    long max_matvecs = 60000;
};

// k lowest eigenpairs of a Hermitian operator; dense below dense_limit,
// block Lanczos above. Deterministic for identical inputs.
inline SpectralResult lowest_eigenpairs(const LinOp& h, int k, const SolverOptions& opt = {}) {
    if (k < 1) throw std::invalid_argument("lowest_eigenpairs: k must be >= 1");
    if (k > h.dim()) throw std::invalid_argument("lowest_eigenpairs: k exceeds dimension");
    if (!h.is_hermitian())
        throw std::invalid_argument("lowest_eigenpairs: operator is not Hermitian (defect " +
                                    std::to_string(h.hermiticity_defect()) + ")");
    if (h.dim() <= opt.dense_limit && h.has_dense()) return detail::dense_lowest(h.dense(), k);
    if (h.dim() <= opt.dense_limit) return detail::dense_lowest(h.to_dense_copy(), k);
    return detail::block_lanczos_lowest(h.sparse(), k, opt.tol, opt.max_vecs, opt.max_matvecs);
}

// Force the iterative path regardless of dimension (oracle-equivalence tests).
inline SpectralResult lowest_eigenpairs_iterative(const LinOp& h, int k,
                                                  const SolverOptions& opt = {}) {
    if (!h.is_hermitian()) throw std::invalid_argument("operator is not Hermitian");
    return detail::block_lanczos_lowest(h.sparse(), k, opt.tol, opt.max_vecs, opt.max_matvecs);
}

// How mode-b expectation values are read off an eigenvector: rescale_r sets
// the exp(-4r) omega_b/omega_q prefactor; op_frame_r undoes a frame squeeze
// when the Hamiltonian was built in squeezed coordinates.
struct ObservableFrame {
    double rescale_r = 0.0;
    double op_frame_r = 0.0;

    static ObservableFrame bare() { return {}; }
    static ObservableFrame effective(const EffectiveParams& e) { return {e.r, 0.0}; }
    static ObservableFrame a2(const A2Params& q) { return {q.r_A, q.r_A}; }
    static ObservableFrame anisotropic(const AnisotropicParams& q) { return {q.r_prime, 0.0}; }
    static ObservableFrame squeezed_rabi(const EffectiveParams& e) { return {e.r, e.r}; }
};

struct GroundStateResult {
    double energy = 0;
    double n_b_rescaled = 0;
    double n_a_rescaled = 0;
    cplx b_coherence{0, 0};
    std::optional<std::pair<cplx, cplx>> broken_coherence;  // set when quasi-degenerate
    double parity_expectation = 0;
    double gap_01 = 0;
    Truncation truncation_used{0, 0, false};
    bool converged = false;
};

namespace detail {

// <b^t b> and <b^2 + b^t^2> of a state, with the operators embedded on the
// state's composite space.
struct ModeBReadout {
    double n;
    double x2_offdiag;  // <b^t^2 + b^2>
    cplx b;
};

inline ModeBReadout mode_b_readout(const Vec& v, const Truncation& t) {
    LinOp num = embed(fock_number(t.n_b_max()), Factor::mode_b, t);
    LinOp b = embed(fock_lowering(t.n_b_max()), Factor::mode_b, t);
    LinOp b2 = b * b;
    ModeBReadout r;
    r.n = num.expectation(v).real();
    r.b = b.expectation(v);
    r.x2_offdiag = 2 * b2.expectation(v).real();  // <b^2> + <b^t^2> = 2 Re<b^2>
    return r;
}

// occupation of the frame-undone mode: cosh(2r) <n> + sinh^2 r
// + sinh(2r)/2 <b^2 + b^t^2>
inline double unsqueeze_number(const ModeBReadout& m, double r) {
    if (r == 0) return m.n;
    return std::cosh(2 * r) * m.n + std::sinh(r) * std::sinh(r) +
           0.5 * std::sinh(2 * r) * m.x2_offdiag;
}

inline cplx unsqueeze_coherence(cplx b, double r) {
    if (r == 0) return b;
    return std::cosh(r) * b + std::sinh(r) * std::conj(b);
}

}  // namespace detail

// Ground-state observables from a k>=2 solve. Occupations of both modes are
// rescaled by exp(-4 rescale_r) omega_b/omega_q. When the two lowest states
// are quasi-degenerate the max-|<b>| combinations within the ground doublet
// are reported separately (the symmetry-broken coherences).
inline GroundStateResult ground_observables(const LinOp& h, const ModelParams& p,
                                            const Truncation& trunc,
                                            const ObservableFrame& frame,
                                            const SolverOptions& opt = {},
                                            double degeneracy_tol = 1e-3) {
    SpectralResult s = lowest_eigenpairs(h, 2, opt);
    GroundStateResult g;
    g.truncation_used = trunc;
    g.energy = s.eigenvalues[0];
    g.gap_01 = s.eigenvalues[1] - s.eigenvalues[0];

    const Vec& psi = s.eigenvectors[0];
    detail::ModeBReadout mb = detail::mode_b_readout(psi, trunc);
    const double fac = std::exp(-4 * frame.rescale_r) * p.omega_b() / p.omega_q();
    g.n_b_rescaled = fac * detail::unsqueeze_number(mb, frame.op_frame_r);
    g.b_coherence = detail::unsqueeze_coherence(mb.b, frame.op_frame_r);
    if (trunc.include_a()) {
        LinOp na = embed(fock_number(trunc.n_a_max()), Factor::mode_a, trunc);
        g.n_a_rescaled = fac * na.expectation(psi).real();
    }
    g.parity_expectation = parity_diagonal(trunc).dot(Eigen::VectorXd(psi.cwiseAbs2()));

    if (g.gap_01 < degeneracy_tol * p.omega_b()) {
        LinOp b = embed(fock_lowering(trunc.n_b_max()), Factor::mode_b, trunc);
        const Vec& psi1 = s.eigenvectors[1];
        cplx m01 = psi.dot(b.apply(psi1));
        cplx m10 = psi1.dot(b.apply(psi));
        cplx m00 = psi.dot(b.apply(psi));
        cplx m11 = psi1.dot(b.apply(psi1));
        // (psi0 +- psi1)/sqrt(2) extremize |<b>| for parity eigenpairs
        cplx plus = 0.5 * (m00 + m11 + m01 + m10);
        cplx minus = 0.5 * (m00 + m11 - m01 - m10);
        g.broken_coherence = {detail::unsqueeze_coherence(plus, frame.op_frame_r),
                              detail::unsqueeze_coherence(minus, frame.op_frame_r)};
    }
    return g;
}

struct DegeneracyInfo {
    double gap_01;
    bool quasi_degenerate;
};

inline DegeneracyInfo degeneracy_gap(const LinOp& h, double tol, double energy_scale = 1.0,
                                     const SolverOptions& opt = {}) {
    SpectralResult s = lowest_eigenpairs(h, 2, opt);
    DegeneracyInfo d;
    d.gap_01 = s.eigenvalues[1] - s.eigenvalues[0];
    d.quasi_degenerate = d.gap_01 < tol * energy_scale;
    return d;
}

// Escalates through a strictly increasing cutoff schedule until n_b and the
// ground energy move less than the tolerances between consecutive cutoffs.
inline GroundStateResult converge_in_truncation(
    const std::function<std::pair<LinOp, ObservableFrame>(const Truncation&)>& builder,
    const ModelParams& p, const std::vector<Truncation>& schedule, double observable_tol,
    const SolverOptions& opt = {}) {
    if (schedule.size() < 2)
        throw std::invalid_argument("converge_in_truncation: schedule needs >= 2 entries");
    for (size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i].n_b_max() <= schedule[i - 1].n_b_max() ||
            schedule[i].n_a_max() < schedule[i - 1].n_a_max())
            throw std::invalid_argument("converge_in_truncation: schedule must increase");

    std::optional<GroundStateResult> prev;
    GroundStateResult cur;
    for (const auto& t : schedule) {
        auto [h, frame] = builder(t);
        cur = ground_observables(h, p, t, frame, opt);
        if (prev && std::abs(cur.n_b_rescaled - prev->n_b_rescaled) < observable_tol &&
            std::abs(cur.energy - prev->energy) < observable_tol) {
            cur.converged = true;
            return cur;
        }
        prev = cur;
    }
    cur.converged = false;
    return cur;
}

}  // namespace rabilab
