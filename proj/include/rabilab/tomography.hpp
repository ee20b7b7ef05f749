#pragma once

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "rabilab/criticality.hpp"
#include "rabilab/model.hpp"
#include "rabilab/operators.hpp"

namespace rabilab {

struct DensityMatrix {
    Factor factor;
    Mat rho;  // Hermitian, PSD, unit trace within tolerance

    double trace_defect() const { return std::abs(rho.trace().real() - 1.0); }
    double purity() const { return (rho * rho).trace().real(); }
};

namespace detail {

// View a composite (mode_a? x mode_b x spin) state as indexed [na][nb][s].
struct CompositeView {
    const Vec& psi;
    const Truncation& t;
    cplx operator()(int na, int nb, int s) const { return psi(t.encode(na, nb, s)); }
};

}  // namespace detail

// Partial trace of a pure composite state onto one factor.
inline DensityMatrix reduce(const Vec& psi, const Truncation& trunc, Factor keep) {
    if (psi.size() != trunc.dim())
        throw std::invalid_argument("reduce: state size does not match truncation");
    const double nrm = psi.norm();
    if (std::abs(nrm - 1.0) > 1e-6)
        throw std::invalid_argument("reduce: state norm deviates from 1 by more than 1e-6");
    const int da = trunc.dim_a(), db = trunc.dim_b();
    detail::CompositeView v{psi, trunc};
    DensityMatrix out;
    out.factor = keep;
    if (keep == Factor::mode_b) {
        out.rho = Mat::Zero(db, db);
        for (int na = 0; na < da; ++na)
            for (int s = 0; s < 2; ++s)
                for (int i = 0; i < db; ++i)
                    for (int j = 0; j < db; ++j)
                        out.rho(i, j) += v(na, i, s) * std::conj(v(na, j, s));
    } else if (keep == Factor::spin) {
        out.rho = Mat::Zero(2, 2);
        for (int na = 0; na < da; ++na)
            for (int nb = 0; nb < db; ++nb)
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        out.rho(i, j) += v(na, nb, i) * std::conj(v(na, nb, j));
    } else {
        if (!trunc.include_a()) throw std::invalid_argument("reduce: no mode_a factor");
        out.rho = Mat::Zero(da, da);
        for (int nb = 0; nb < db; ++nb)
            for (int s = 0; s < 2; ++s)
                for (int i = 0; i < da; ++i)
                    for (int j = 0; j < da; ++j)
                        out.rho(i, j) += v(i, nb, s) * std::conj(v(j, nb, s));
    }
    return out;
}

// Conditional bosonic state after measuring the qubit along `spinor`
// (components ordered (up, down)). Returns the renormalized mode-b state and
// the outcome probability. Only (mode_b x spin) spaces are supported.
inline std::pair<Vec, double> project_qubit(const Vec& psi, const Truncation& trunc,
                                            const Eigen::Vector2cd& spinor) {
    if (trunc.include_a())
        throw std::invalid_argument("project_qubit: expected a (mode_b x spin) state");
    if (psi.size() != trunc.dim())
        throw std::invalid_argument("project_qubit: state size mismatch");
    if (std::abs(spinor.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("project_qubit: spinor must be normalized");
    const int db = trunc.dim_b();
    Vec phi(db);
    for (int nb = 0; nb < db; ++nb)
        phi(nb) = std::conj(spinor(0)) * psi(trunc.encode(0, nb, 0)) +
                  std::conj(spinor(1)) * psi(trunc.encode(0, nb, 1));
    const double prob = phi.squaredNorm();
    if (prob < 1e-12)
        throw std::runtime_error("measurement outcome has vanishing probability");
    phi /= std::sqrt(prob);
    return {phi, prob};
}

// Gaussian unitaries via the exact exponential of the truncated generator:
// the generator is eigendecomposed once, applications are O(n^2) and unitary
// to machine precision.
class GaussianUnitary {
  public:
    // displacement family: generator b^t - b; D(alpha) = exp(alpha (b^t - b))
    static GaussianUnitary displacement_family(int cutoff) {
        SpMat b = fock_lowering(cutoff);
        Mat gen = Mat(SpMat(b.adjoint()) - b);
        return GaussianUnitary(gen);
    }
    // squeeze family: generator (b^t^2 - b^2)/2; S(r) = exp(r (b^t^2 - b^2)/2)
    static GaussianUnitary squeeze_family(int cutoff) {
        SpMat b = fock_lowering(cutoff);
        SpMat b2 = SpMat(b * b);
        Mat gen = 0.5 * (Mat(SpMat(b2.adjoint())) - Mat(b2));
        return GaussianUnitary(gen);
    }

    // exp(s * generator) applied to v, for real s.
    Vec apply(double s, const Vec& v) const {
        Vec w = u_.adjoint() * v;
        for (int i = 0; i < w.size(); ++i) w(i) *= std::exp(cplx(0, s * lambda_(i)));
        return u_ * w;
    }

    // Phase-rotated displacement D(beta) = R(th) D(|beta|) R(th)^t with
    // R(th) = exp(i th n). `dagger` applies D(beta)^t instead.
    Vec apply_displacement(cplx beta, const Vec& v, bool dagger = false) const {
        const double s = std::abs(beta);
        if (s == 0) return v;
        const double th = std::arg(beta);
        const int n = static_cast<int>(v.size());
        Vec w(n);
        for (int i = 0; i < n; ++i) w(i) = v(i) * std::exp(cplx(0, -th * i));
        w = apply(dagger ? -s : s, w);
        for (int i = 0; i < n; ++i) w(i) *= std::exp(cplx(0, th * i));
        return w;
    }

  private:
    explicit GaussianUnitary(const Mat& antihermitian_gen) {
        // gen = i H with H Hermitian; exp(s gen) = U exp(i s lambda) U^t
        Mat h = cplx(0, -1) * antihermitian_gen;
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("GaussianUnitary: generator eigendecomposition failed");
        lambda_ = es.eigenvalues();
        u_ = es.eigenvectors();
    }
    Eigen::VectorXd lambda_;
    Mat u_;
};

struct WignerGrid {
    std::vector<double> x_values;
    std::vector<double> y_values;
    // values[iy][ix]; convention x = (b + b^t)/sqrt(2), y = (b - b^t)/(sqrt(2) i)
    std::vector<std::vector<double>> values;
    bool tail_warning = false;  // top-10% Fock population exceeded 1e-4

    double min_value() const {
        double m = HUGE_VAL;
        for (const auto& row : values)
            for (double v : row) m = std::min(m, v);
        return m;
    }
    double grid_integral() const {
        if (x_values.size() < 2 || y_values.size() < 2) return 0.0;
        const double dx = x_values[1] - x_values[0];
        const double dy = y_values[1] - y_values[0];
        double s = 0;
        for (const auto& row : values)
            for (double v : row) s += v;
        return s * dx * dy;
    }
};

struct WignerSpec {
    double x_min = -9, x_max = 9;
    double y_min = -9, y_max = 9;
    int nx = 201, ny = 201;
};

// W(x, y) = (1/pi) Tr[rho D(beta) Pi_F D(beta)^t], beta = (x + i y)/sqrt(2).
// The 1/pi prefactor carries the Jacobian of the (x, y) parametrization, so
// the grid integral over dx dy is 1 and vacuum peaks at 1/pi. The density
// matrix is eigen-decomposed once and each grid point costs O(n^2) per
// retained eigenvector. The kernel runs in a padded Fock space: displaced
// parity at |beta| needs levels out to (sqrt(n_support) + |beta|)^2, well
// beyond the state's own support.
inline WignerGrid wigner(const DensityMatrix& dm, const WignerSpec& spec) {
    const int n = static_cast<int>(dm.rho.rows());
    WignerGrid grid;
    grid.x_values.resize(spec.nx);
    grid.y_values.resize(spec.ny);
    for (int i = 0; i < spec.nx; ++i)
        grid.x_values[i] =
            spec.nx == 1 ? spec.x_min
                         : spec.x_min + (spec.x_max - spec.x_min) * i / double(spec.nx - 1);
    for (int i = 0; i < spec.ny; ++i)
        grid.y_values[i] =
            spec.ny == 1 ? spec.y_min
                         : spec.y_min + (spec.y_max - spec.y_min) * i / double(spec.ny - 1);

    // tail-population guard on the state's own cutoff
    double tail = 0;
    for (int i = static_cast<int>(0.9 * n); i < n; ++i) tail += dm.rho(i, i).real();
    grid.tail_warning = tail > 1e-4;

    // spectral decomposition of rho; keep components until the residual
    // weight is negligible against the 1e-10 reality/accuracy targets
    Eigen::SelfAdjointEigenSolver<Mat> es(dm.rho);
    std::vector<std::pair<double, Vec>> comps;
    double kept = 0;
    for (int i = n - 1; i >= 0; --i) {
        const double w = es.eigenvalues()(i);
        if (w <= 0) break;
        comps.emplace_back(w, es.eigenvectors().col(i));
        kept += w;
        if (dm.rho.trace().real() - kept < 1e-12) break;
    }

    // kernel head-room: pad to where the largest displacement still fits
    int support = 0;
    for (int i = 0; i < n; ++i)
        if (dm.rho(i, i).real() > 1e-14) support = i;
    double beta_max = 0;
    for (double x : {spec.x_min, spec.x_max})
        for (double y : {spec.y_min, spec.y_max})
            beta_max = std::max(beta_max, std::abs(cplx(x, y)) / std::sqrt(2.0));
    const int n_eval = std::max(
        n - 1, static_cast<int>(std::ceil(std::pow(std::sqrt(double(support + 1)) + beta_max + 2,
                                                   2))));
    for (auto& [w, v] : comps) {
        Vec padded = Vec::Zero(n_eval + 1);
        padded.head(n) = v;
        v = std::move(padded);
    }

    GaussianUnitary disp = GaussianUnitary::displacement_family(n_eval);
    Eigen::VectorXd par(n_eval + 1);
    for (int i = 0; i <= n_eval; ++i) par(i) = (i % 2 == 0) ? 1.0 : -1.0;

    grid.values.assign(spec.ny, std::vector<double>(spec.nx, 0.0));
    auto eval_row = [&](int iy) {
        for (int ix = 0; ix < spec.nx; ++ix) {
            const cplx beta(grid.x_values[ix] / std::sqrt(2.0),
                            grid.y_values[iy] / std::sqrt(2.0));
            double tot = 0;
            for (const auto& [w, v] : comps) {
                Vec u = disp.apply_displacement(beta, v, /*dagger=*/true);
                tot += w * par.dot(Eigen::VectorXd(u.cwiseAbs2()));
            }
            grid.values[iy][ix] = tot / M_PI;
        }
    };
    const unsigned n_threads = std::max(1u, std::thread::hardware_concurrency());
    if (n_threads == 1 || spec.ny < 4) {
        for (int iy = 0; iy < spec.ny; ++iy) eval_row(iy);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (int iy = next.fetch_add(1); iy < spec.ny; iy = next.fetch_add(1))
                    eval_row(iy);
            });
        for (auto& th : pool) th.join();
    }
    return grid;
}

// The analytic superradiant ground state: equal superposition of
// S(r) D(+-alpha) S(r_sp)|0> tensored with the matching spin states.
struct AnalyticCatState {
    Vec state;                 // composite (mode_b x spin), unit norm
    Vec branch_plus;           // bosonic component S(r)D(+alpha)S(r_sp)|0>
    Vec branch_minus;
    double renorm_defect;      // | pre-renormalization norm - 1 |, set by the
                               // physical branch overlap (the operators are
                               // exactly unitary, so truncation loses no norm)
    double tail_population;    // branch weight in the top 10% of Fock levels
    Truncation trunc{0, 0, false};
};

// S(r) D(+-alpha) S(r_sp)|0> tensored with c_down |down> +- c_up |up>,
// equal superposition, renormalized.
inline AnalyticCatState compose_cat(double alpha, double r, double r_sp, double c_down,
                                    double c_up, int cutoff) {
    GaussianUnitary disp = GaussianUnitary::displacement_family(cutoff);
    GaussianUnitary sq = GaussianUnitary::squeeze_family(cutoff);

    Vec vac = Vec::Zero(cutoff + 1);
    vac(0) = 1.0;
    Vec core = sq.apply(r_sp, vac);
    Vec plus = sq.apply(r, disp.apply(alpha, core));
    Vec minus = sq.apply(r, disp.apply(-alpha, core));

    AnalyticCatState cat;
    cat.tail_population = 0;
    for (int nb = static_cast<int>(0.9 * (cutoff + 1)); nb <= cutoff; ++nb)
        cat.tail_population += std::norm(plus(nb)) + std::norm(minus(nb));
    if (cat.tail_population > 1e-3)
        throw std::runtime_error("cutoff too small for cat amplitude (tail population " +
                                 std::to_string(cat.tail_population) + ")");

    const Truncation t = Truncation::b_only(cutoff);
    Vec psi = Vec::Zero(t.dim());
    // spin (up, down) ordering
    for (int nb = 0; nb <= cutoff; ++nb) {
        psi(t.encode(0, nb, 0)) += (plus(nb) - minus(nb)) * c_up / std::sqrt(2.0);
        psi(t.encode(0, nb, 1)) += (plus(nb) + minus(nb)) * c_down / std::sqrt(2.0);
    }
    const double nrm = psi.norm();
    cat.renorm_defect = std::abs(nrm - 1.0);
    cat.state = psi / nrm;
    cat.branch_plus = std::move(plus);
    cat.branch_minus = std::move(minus);
    cat.trunc = t;
    return cat;
}

inline AnalyticCatState analytic_cat(const ModelParams& p, int cutoff) {
    const EffectiveParams e = effective_params(p);
    const SpSolution sp = sp_solution(p, SpBranch::plus);  // throws in the NP
    return compose_cat(sp.alpha, e.r, sp.r_sp, sp.spin_down_coeff, sp.spin_up_coeff, cutoff);
}

// Mean squared cosine of the principal angles between two 2-dimensional
// subspaces, given as (column) vector pairs.
inline double subspace_overlap(const Vec& ed0, const Vec& ed1, const Vec& an0, const Vec& an1) {
    if (ed0.size() != an0.size() || ed1.size() != an1.size() || ed0.size() != ed1.size())
        throw std::invalid_argument("subspace_overlap: dimension mismatch");
    auto orthonormalize = [](Vec a, Vec b) {
        a.normalize();
        b -= a.dot(b) * a;
        b.normalize();
        Eigen::MatrixXcd q(a.size(), 2);
        q.col(0) = a;
        q.col(1) = b;
        return q;
    };
    Eigen::MatrixXcd qa = orthonormalize(ed0, ed1);
    Eigen::MatrixXcd qb = orthonormalize(an0, an1);
    Eigen::Matrix2cd m = qa.adjoint() * qb;
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
    const auto& sv = svd.singularValues();
    return (sv(0) * sv(0) + sv(1) * sv(1)) / 2;
}

}  // namespace rabilab
