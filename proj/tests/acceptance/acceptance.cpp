// Acceptance suite: every release gate in one binary.
//
//   acceptance        runs all criteria
//   acceptance N      runs criterion N only (1..9)
//
// Prints one [PASS]/[FAIL] line per criterion plus measured values, and
// exits nonzero when any checked criterion fails.

#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rabilab/figures.hpp"
#include "rabilab/spectra.hpp"
#include "rabilab/sweep.hpp"
#include "rabilab/tomography.hpp"

using namespace rabilab;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        detail += std::string("\n    [") + (ok ? "ok" : "FAIL") + "] " + what;
    }
};

int hw_workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

constexpr double kOmegaA = 40, kOmegaB = 1, kOmegaQ = 5;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
Outcome criterion1() {
    Outcome o;
    const double gc = critical_coupling_dimensionless(0.95);
    o.check(std::abs(gc - 0.3287) <= 1e-4,
            "g_tilde_c(0.95) = " + fmt(gc) + " within 1e-4 of 0.3287");
    return o;
}

// ---------------------------------------------------------------- criterion 2
Outcome criterion2() {
    Outcome o;
    SweepSpec s;
    s.model = SweepModel::effective;
    s.j_tilde = 0.95;
    s.axes = {{"g_tilde", 0.0, 0.65, 66}};
    s.trunc_n_b = {90, 130};
    SweepResult res = run_sweep(s, hw_workers(), true);

    double max_low = 0, nb_045 = 0, max_diff_tail = 0;
    bool all_solved = true;
    for (const auto& r : res.records) {
        const double gt = r.axis_values[0];
        if (!r.error.empty() || !r.n_b_numeric) {
            all_solved = false;
            o.check(false, "point g_tilde=" + fmt(gt) + " failed: " + r.error);
            continue;
        }
        const double nb = *r.n_b_numeric;
        if (gt <= 0.25 + 1e-9) max_low = std::max(max_low, nb);
        if (std::abs(gt - 0.45) < 1e-9) nb_045 = nb;
        if (gt >= 0.45 - 1e-9)
            max_diff_tail =
                std::max(max_diff_tail, std::abs(nb - order_parameter_dimensionless(gt, 0.95)));
    }
    o.check(all_solved, "all 66 points solved at cutoffs <= 130");
    o.check(max_low < 0.01,
            "(i) max ED n_b for g_tilde <= 0.25 is " + fmt(max_low) + " (require < 0.01)");
    o.check(nb_045 > 0.05, "(ii) ED n_b at g_tilde = 0.45 is " + fmt(nb_045) + " (> 0.05)");
    o.check(max_diff_tail < 0.05, "(iii) max |ED - analytic| on [0.45, 0.65] is " +
                                      fmt(max_diff_tail) + " (< 0.05)");
    return o;
}

// ---------------------------------------------------------------- criterion 3
Outcome criterion3() {
    Outcome o;
    const int n_pts = 66;
    const Truncation t_full = Truncation::with_a(16, 130);
    const Truncation t_eff = Truncation::b_only(130);
    SolverOptions opt;
    opt.tol = 1e-7;

    std::vector<double> nb_full(n_pts), nb_eff(n_pts), na_full(n_pts);
    std::vector<std::string> errors(n_pts);
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next.fetch_add(1); i < n_pts; i = next.fetch_add(1)) {
            const double gt = 0.65 * i / double(n_pts - 1);
            try {
                ModelParams p = params_from_tilde(kOmegaA, kOmegaB, kOmegaQ, gt, 0.95);
                ObservableFrame frame = ObservableFrame::effective(effective_params(p));
                GroundStateResult gf =
                    ground_observables(build_full(p, t_full), p, t_full, frame, opt);
                GroundStateResult ge =
                    ground_observables(build_effective(p, t_eff), p, t_eff, frame, opt);
                nb_full[i] = gf.n_b_rescaled;
                na_full[i] = gf.n_a_rescaled;
                nb_eff[i] = ge.n_b_rescaled;
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < hw_workers(); ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    double max_diff = 0, worst_ratio = 0;
    bool solver_ok = true;
    for (int i = 0; i < n_pts; ++i) {
        if (!errors[i].empty()) {
            solver_ok = false;
            o.check(false, "point " + std::to_string(i) + " failed: " + errors[i]);
            continue;
        }
        max_diff = std::max(max_diff, std::abs(nb_full[i] - nb_eff[i]));
        if (nb_full[i] > 0.1) worst_ratio = std::max(worst_ratio, na_full[i] / nb_full[i]);
    }
    o.check(solver_ok, "all 66 full-model points solved at cutoffs (16, 130)");
    o.check(max_diff < 0.03,
            "max |n_b(full) - n_b(effective)| = " + fmt(max_diff) + " (< 0.03)");
    o.check(worst_ratio < 0.2,
            "max n_a/n_b where n_b > 0.1 is " + fmt(worst_ratio) + " (< 1/5)");
    return o;
}

// ---------------------------------------------------------------- criterion 4
Outcome criterion4() {
    Outcome o;
    {  // (i) no-go at D~ = 1, J~ = 0.9
        bool analytic_zero = true;
        for (int i = 0; i < 60; ++i) {
            const double gt = 0.05 + (3.0 - 0.05) * i / 59.0;
            if (a2_order_parameter(gt, 0.9, 1.0) != 0.0) analytic_zero = false;
        }
        o.check(analytic_zero, "(i) analytic n_b^A = 0 on g_tilde in (0, 3]");

        SweepSpec s;
        s.model = SweepModel::effective_a2;
        s.j_tilde = 0.9;
        s.d_tilde = 1.0;
        s.axes = {{"g_tilde", 0.05, 3.0, 60}};
        s.trunc_n_b = {60, 80};
        SweepResult res = run_sweep(s, hw_workers(), true);
        double max_nb = 0;
        double argmax = 0;
        for (const auto& r : res.records)
            if (r.n_b_numeric && *r.n_b_numeric > max_nb) {
                max_nb = *r.n_b_numeric;
                argmax = r.axis_values[0];
            }
        o.check(max_nb < 0.01, "(i) max ED n_b = " + fmt(max_nb) + " at g_tilde = " +
                                   fmt(argmax) + " (require < 0.01)");
    }
    {  // (ii) reversed transition at D~ = 1.5, J~ = 1.03
        SweepSpec s;
        s.model = SweepModel::effective_a2;
        s.j_tilde = 1.03;
        s.d_tilde = 1.5;
        s.axes = {{"g_tilde", 0.25, 1.5, 26}};
        s.trunc_n_b = {240, 320};
        SweepResult res = run_sweep(s, hw_workers(), true);
        const double crossing = *a2_sp_window(1.03, 1.5).upper;

        double nb_first = 0, nb_last = 0, max_diff_away = 0, prev = 1e9;
        bool nonincreasing_above = true;
        for (const auto& r : res.records) {
            const double gt = r.axis_values[0];
            if (!r.n_b_numeric) {
                o.check(false, "(ii) point g_tilde=" + fmt(gt) + " failed: " + r.error);
                continue;
            }
            const double nb = *r.n_b_numeric;
            if (gt == 0.25) nb_first = nb;
            nb_last = nb;
            if (gt > crossing + 0.1) {
                if (nb > prev + 1e-9) nonincreasing_above = false;
                prev = nb;
            }
            if (std::abs(gt - crossing) > 0.1)
                max_diff_away =
                    std::max(max_diff_away, std::abs(nb - a2_order_parameter(gt, 1.03, 1.5)));
        }
        o.check(nb_first > 0.05,
                "(ii) ED n_b at g_tilde = 0.25 is " + fmt(nb_first) + " (> 0.05)");
        o.check(nonincreasing_above && nb_last < 0.01,
                "(ii) ED n_b drops below 0.01 above the crossing at g_tilde = " + fmt(crossing) +
                    " (final " + fmt(nb_last) + ")");
        o.check(max_diff_away < 0.05, "(ii) max |ED - analytic| away from the boundary is " +
                                          fmt(max_diff_away) + " (< 0.05)");
    }
    return o;
}

// ---------------------------------------------------------------- criterion 5
Outcome criterion5() {
    Outcome o;
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> gdist(0.01, 3.0), jdist(0.05, 0.995);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        const double gt = gdist(rng), jt = jdist(rng);
        const double direct = gt * jt / std::sqrt(1 - jt * jt);
        const double err =
            std::abs(a2_boundary_value(gt, jt, 0.0) - direct) / std::max(1.0, direct);
        worst = std::max(worst, err);
    }
    o.check(worst <= 1e-12,
            "max |B(g,J,0) - gJ/sqrt(1-J^2)| over 1e4 random points = " + fmt(worst));
    return o;
}

// ---------------------------------------------------------------- criterion 6
Outcome criterion6() {
    Outcome o;
    const int cutoff = 160;
    const Truncation t = Truncation::b_only(cutoff);
    WignerSpec spec;  // [-9, 9]^2, 201 points per side

    {  // fig6a: NP, reduced state
        ModelParams p(kOmegaA, kOmegaB, kOmegaQ, 2.0, 3.0);
        SpectralResult sol = lowest_eigenpairs(build_effective(p, t), 2);
        WignerGrid w = wigner(reduce(sol.eigenvectors[0], t, Factor::mode_b), spec);
        o.check(w.min_value() > -1e-4,
                "fig6a min W = " + fmt(w.min_value()) + " (> -1e-4, Gaussian)");
    }
    {  // fig6b: SP, qubit projected
        ModelParams p(kOmegaA, kOmegaB, kOmegaQ, 3.4, 3.0);
        SpectralResult sol = lowest_eigenpairs(build_effective(p, t), 2);
        Eigen::Vector2cd spinor(0.0, 1.0);  // (|down>_+ + |down>_-)/norm
        auto [phi, prob] = project_qubit(sol.eigenvectors[0], t, spinor);
        DensityMatrix rho{Factor::mode_b, phi * phi.adjoint()};
        WignerGrid w = wigner(rho, spec);
        o.check(w.min_value() < -0.01,
                "fig6b min W = " + fmt(w.min_value()) + " (< -0.01, fringes)");

        double best_p = -1, x_pos = 0, best_m = -1, x_neg = 0;
        for (size_t iy = 0; iy < w.y_values.size(); ++iy)
            for (size_t ix = 0; ix < w.x_values.size(); ++ix) {
                if (w.x_values[ix] >= 3.0 && w.values[iy][ix] > best_p) {
                    best_p = w.values[iy][ix];
                    x_pos = w.x_values[ix];
                }
                if (w.x_values[ix] <= -3.0 && w.values[iy][ix] > best_m) {
                    best_m = w.values[iy][ix];
                    x_neg = w.x_values[ix];
                }
            }
        const double dx = w.x_values[1] - w.x_values[0];
        o.check(std::abs(x_pos + x_neg) <= dx + 1e-12,
                "lobes mirror-symmetric: x = " + fmt(x_pos) + " and " + fmt(x_neg));
        EffectiveParams e = effective_params(p);
        SpSolution sp = sp_solution(p, SpBranch::plus);
        const double pred = std::sqrt(2.0) * std::exp(e.r) * sp.alpha;
        o.check(std::abs(x_pos - pred) / pred < 0.15, "lobe |x| = " + fmt(x_pos) +
                                                          " within 15% of sqrt(2) e^r alpha = " +
                                                          fmt(pred));
    }
    return o;
}

// ---------------------------------------------------------------- criterion 7
Outcome criterion7() {
    Outcome o;
    const std::vector<std::pair<double, double>> pairs = {{2.5, 3.5}, {3.5, 2.5}, {3.0, 3.0}};
    std::vector<std::vector<double>> curves;
    for (auto [j1, j2] : pairs) {
        SweepSpec s;
        s.model = SweepModel::anisotropic;
        s.j1 = j1;
        s.j2 = j2;
        s.axes = {{"g", 0.0, 4.0, 41}};
        s.trunc_n_b = {110, 150};
        SweepResult res = run_sweep(s, hw_workers(), true);
        std::vector<double> nb;
        for (const auto& r : res.records) {
            if (!r.n_b_numeric) {
                o.check(false, "fig8 point failed: " + r.error);
                nb.push_back(0);
            } else {
                nb.push_back(*r.n_b_numeric);
            }
        }
        curves.push_back(std::move(nb));
    }
    double pairwise = 0, pairwise_g = 0, bound_holds_until = 4.0;
    for (size_t i = 0; i < curves[0].size(); ++i) {
        const double g = 4.0 * i / double(curves[0].size() - 1);
        double d = std::max({std::abs(curves[0][i] - curves[1][i]),
                             std::abs(curves[0][i] - curves[2][i]),
                             std::abs(curves[1][i] - curves[2][i])});
        if (d > pairwise) {
            pairwise = d;
            pairwise_g = g;
        }
        if (d >= 0.05 && bound_holds_until == 4.0) bound_holds_until = g;
    }
    o.check(pairwise < 0.05, "fig8 curves: max pairwise |n_b| difference = " + fmt(pairwise) +
                                 " at g = " + fmt(pairwise_g) + " (require < 0.05 on [0, 4]; " +
                                 "bound holds up to g = " + fmt(bound_holds_until) + ")");

    ModelParams p(kOmegaA, kOmegaB, kOmegaQ, 2.5, 0.0);
    double lo = 2, hi = 0;
    for (int i = 0; i < 61; ++i)
        for (int j = 0; j < 61; ++j) {
            const double j1 = 1.0 + 3.0 * i / 60.0, j2 = 1.0 + 3.0 * j / 60.0;
            try {
                AnisotropicParams q = anisotropic_params(p, j1, j2);
                const double ratio = q.chi2r / q.chi1r;
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            } catch (const std::runtime_error&) {
                // unstable corner of the grid
            }
        }
    o.check(lo > 0.9 && hi < 1.1, "chi_2r/chi_1r on the stable fig7 grid in (" + fmt(lo) + ", " +
                                      fmt(hi) + ") (require within (0.9, 1.1))");
    return o;
}

// ---------------------------------------------------------------- criterion 8
Outcome criterion8() {
    Outcome o;
    ModelParams p = params_from_tilde(kOmegaA, kOmegaB, kOmegaQ, 0.5, 0.95);
    {  // parity commutation for every builder
        const Truncation tf = Truncation::with_a(10, 60);
        const Truncation tb = Truncation::b_only(60);
        double worst = commutator_with_diagonal_max_abs(build_full(p, tf), parity_diagonal(tf));
        worst = std::max(worst, commutator_with_diagonal_max_abs(build_effective(p, tb),
                                                                 parity_diagonal(tb)));
        worst = std::max(worst, commutator_with_diagonal_max_abs(build_squeezed_rabi(p, tb),
                                                                 parity_diagonal(tb)));
        ModelParams pa = params_from_tilde(kOmegaA, kOmegaB, kOmegaQ, 0.5, 1.03);
        worst = std::max(worst, commutator_with_diagonal_max_abs(
                                    build_effective_a2(pa, 1.5, tb), parity_diagonal(tb)));
        ModelParams pan(kOmegaA, kOmegaB, kOmegaQ, 2.5, 0.0);
        worst = std::max(worst, commutator_with_diagonal_max_abs(
                                    build_anisotropic_effective(pan, 2.5, 3.5, tb),
                                    parity_diagonal(tb)));
        o.check(worst < 1e-10, "parity commutation for all builders: max |[H, Pi]| = " +
                                   fmt(worst) + " (< 1e-10)");
    }
    {  // NP ground parity
        double worst = 0;
        const Truncation t = Truncation::b_only(130);
        for (double gt : {0.05, 0.15, 0.25}) {
            ModelParams q = params_from_tilde(kOmegaA, kOmegaB, kOmegaQ, gt, 0.95);
            GroundStateResult g = ground_observables(
                build_effective(q, t), q, t, ObservableFrame::effective(effective_params(q)));
            worst = std::max(worst, std::abs(g.parity_expectation - 1.0));
        }
        o.check(worst < 1e-8, "NP ground parity +1 within " + fmt(worst) + " (< 1e-8)");
    }
    {  // iterative vs dense oracle equivalence at dimensions <= 512
        double worst = 0;
        {
            Truncation t = Truncation::with_a(7, 15);  // dim 256
            LinOp h = build_full(p, t);
            SolverOptions opt;
            opt.tol = 1e-9;
            SpectralResult dense = lowest_eigenpairs(h, 4);
            SpectralResult lan = lowest_eigenpairs_iterative(h, 4, opt);
            for (int i = 0; i < 4; ++i)
                worst = std::max(worst, std::abs(lan.eigenvalues[i] - dense.eigenvalues[i]) /
                                            std::max(1.0, std::abs(dense.eigenvalues[i])));
        }
        {
            Truncation t = Truncation::b_only(200);  // dim 402
            LinOp h = build_effective(p, t);
            SolverOptions opt;
            opt.tol = 1e-9;
            SpectralResult dense = lowest_eigenpairs(h, 3);
            SpectralResult lan = lowest_eigenpairs_iterative(h, 3, opt);
            for (int i = 0; i < 3; ++i)
                worst = std::max(worst, std::abs(lan.eigenvalues[i] - dense.eigenvalues[i]) /
                                            std::max(1.0, std::abs(dense.eigenvalues[i])));
        }
        o.check(worst < 1e-8,
                "iterative vs dense eigenvalues (dims 256, 402): max rel diff = " + fmt(worst));
    }
    {  // variational monotonicity
        bool mono = true;
        double prev = 1e18;
        for (int nb : {40, 70, 100, 130}) {
            SpectralResult s = lowest_eigenpairs(
                build_effective(params_from_tilde(kOmegaA, kOmegaB, kOmegaQ, 0.55, 0.95),
                                Truncation::b_only(nb)),
                1);
            mono = mono && s.eigenvalues[0] <= prev + 1e-12;
            prev = s.eigenvalues[0];
        }
        o.check(mono, "ground energy nonincreasing in the cutoff");
    }
    {  // worker-count independence, byte for byte
        SweepSpec s;
        s.model = SweepModel::effective;
        s.j_tilde = 0.95;
        s.axes = {{"g_tilde", 0.1, 0.6, 8}};
        s.trunc_n_b = {60, 90};
        std::ostringstream a, b;
        write_csv(run_sweep(s, 1, true), a);
        write_csv(run_sweep(s, 4, true), b);
        o.check(a.str() == b.str(), "sweep output byte-identical for 1 and 4 workers");
    }
    return o;
}

// ---------------------------------------------------------------- criterion 9
Outcome criterion9() {
    Outcome o;
    double worst_c = 0, worst_f = 0;
    auto probe = [&](const EffectiveParams& e) {
        FnValidity v = fn_validity(e);
        worst_c = std::max(worst_c, v.c_over_xi * 5);
        worst_f = std::max(worst_f, v.f_over_chi * 5);
    };
    // fig2/fig3 line points
    for (int i = 1; i < 66; ++i)
        probe(effective_params(
            params_from_tilde(kOmegaA, kOmegaB, kOmegaQ, 0.65 * i / 65.0, 0.95)));
    // fig6 points
    probe(effective_params(ModelParams(kOmegaA, kOmegaB, kOmegaQ, 2.0, 3.0)));
    probe(effective_params(ModelParams(kOmegaA, kOmegaB, kOmegaQ, 3.4, 3.0)));
    // A^2 points: validity of the barred-model reduction
    for (int i = 0; i < 60; ++i) {
        const double gt = 0.05 + (3.0 - 0.05) * i / 59.0;
        A2Params q =
            a2_params(params_from_tilde(kOmegaA, kOmegaB, kOmegaQ, gt, 0.9), 1.0);
        probe(effective_params(q.barred(kOmegaB, kOmegaQ)));
    }
    for (int i = 0; i < 26; ++i) {
        const double gt = 0.25 + (1.5 - 0.25) * i / 25.0;
        A2Params q =
            a2_params(params_from_tilde(kOmegaA, kOmegaB, kOmegaQ, gt, 1.03), 1.5);
        probe(effective_params(q.barred(kOmegaB, kOmegaQ)));
    }
    o.check(worst_c < 1.0 && worst_f < 1.0,
            "isotropic reductions: max 5|C|/xi = " + fmt(worst_c) + ", max 5|F|/chi = " +
                fmt(worst_f) + " (both < 1)");

    // anisotropic reductions (fig7 grid at g = 2.5 and the fig8 curves)
    double worst_ca = 0, worst_fa = 0;
    auto probe_aniso = [&](const ModelParams& pp, double j1, double j2) {
        AnisotropicParams q = anisotropic_params(pp, j1, j2);
        const double c_prime =
            j1 * j2 / 2 * (1 / pp.delta_b() - 1 / pp.eta_b());
        const double f = -pp.g() * pp.g() / 2 * (1 / pp.delta_q() - 1 / pp.eta_q());
        if (q.xi2 > 0) worst_ca = std::max(worst_ca, 5 * std::abs(c_prime) / q.xi2);
        const double chi_min = std::min(q.chi1, q.chi2);
        if (chi_min > 0) worst_fa = std::max(worst_fa, 5 * std::abs(f) / chi_min);
    };
    for (int i = 0; i < 61; ++i)
        for (int j = 0; j < 61; ++j) {
            const double j1 = 1.0 + 3.0 * i / 60.0, j2 = 1.0 + 3.0 * j / 60.0;
            try {
                probe_aniso(ModelParams(kOmegaA, kOmegaB, kOmegaQ, 2.5, 0), j1, j2);
            } catch (const std::runtime_error&) {
            }
        }
    for (auto [j1, j2] : std::vector<std::pair<double, double>>{{2.5, 3.5}, {3.5, 2.5},
                                                                {3.0, 3.0}})
        for (int i = 1; i <= 40; ++i)
            probe_aniso(ModelParams(kOmegaA, kOmegaB, kOmegaQ, 4.0 * i / 40.0, 0), j1, j2);
    o.check(worst_ca < 1.0 && worst_fa < 1.0,
            "anisotropic reductions: max 5|C'|/xi2 = " + fmt(worst_ca) + ", max 5|F|/chi = " +
                fmt(worst_fa) + " (both < 1)");
    return o;
}

const char* kNames[10] = {"",
                          "critical point",
                          "order-parameter line sweep (effective ED)",
                          "full vs effective ED",
                          "A^2 no-go and reversal",
                          "boundary degeneration",
                          "Wigner signatures",
                          "anisotropy robustness",
                          "symmetry/solver properties",
                          "reduction-validity diagnostic"};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    if (argc > 1) {
        which.push_back(std::atoi(argv[1]));
        if (which[0] < 1 || which[0] > 9) {
            std::fprintf(stderr, "usage: acceptance [1..9]\n");
            return 2;
        }
    } else {
        for (int i = 1; i <= 9; ++i) which.push_back(i);
    }

    int failures = 0;
    for (int n : which) {
        Outcome o;
        switch (n) {
            case 1: o = criterion1(); break;
            case 2: o = criterion2(); break;
            case 3: o = criterion3(); break;
            case 4: o = criterion4(); break;
            case 5: o = criterion5(); break;
            case 6: o = criterion6(); break;
            case 7: o = criterion7(); break;
            case 8: o = criterion8(); break;
            case 9: o = criterion9(); break;
        }
        std::printf("[%s] criterion %d: %s%s\n", o.pass ? "PASS" : "FAIL", n, kNames[n],
                    o.detail.c_str());
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
