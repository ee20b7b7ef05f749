#include <catch2/catch_amalgamated.hpp>

#include "rabilab/criticality.hpp"
#include "rabilab/spectra.hpp"

using namespace rabilab;
using Catch::Approx;

namespace {
const double kOmegaA = 40.0, kOmegaB = 1.0, kOmegaQ = 5.0;

ModelParams fig3_params(double g_tilde) {
    return params_from_tilde(kOmegaA, kOmegaB, kOmegaQ, g_tilde, 0.95);
}

std::pair<LinOp, ObservableFrame> effective_builder(const ModelParams& p, const Truncation& t) {
    return {build_effective(p, t), ObservableFrame::effective(effective_params(p))};
}
}  // namespace

TEST_CASE("lowest_eigenpairs basics", "[spectra]") {
    SECTION("diagonal operator returns its smallest entries and unit vectors") {
        Truncation t = Truncation::b_only(4);
        std::vector<Triplet> ts;
        std::vector<double> d = {3.0, -1.0, 7.0, 0.5, 2.0, -4.0, 9.0, 1.0, 6.0, 5.0};
        for (int i = 0; i < 10; ++i) ts.emplace_back(i, i, d[i]);
        LinOp h = LinOp::from_triplets(BasisDescriptor::of(t), ts);
        SpectralResult s = lowest_eigenpairs(h, 3);
        REQUIRE(s.eigenvalues[0] == Approx(-4.0));
        REQUIRE(s.eigenvalues[1] == Approx(-1.0));
        REQUIRE(s.eigenvalues[2] == Approx(0.5));
        REQUIRE(std::abs(s.eigenvectors[0](5)) == Approx(1.0));
        for (double r : s.residual_norms) REQUIRE(r < 1e-12);
    }
    SECTION("2x2 closed form") {
        std::vector<Triplet> ts = {{0, 0, -2.5}, {1, 1, 2.5}, {0, 1, -0.8}, {1, 0, -0.8}};
        LinOp h = LinOp::from_triplets(BasisDescriptor::single(Factor::spin, 2), ts);
        SpectralResult s = lowest_eigenpairs(h, 2);
        const double root = std::sqrt(2.5 * 2.5 + 0.8 * 0.8);
        REQUIRE(s.eigenvalues[0] == Approx(-root).margin(1e-13));
        REQUIRE(s.eigenvalues[1] == Approx(root).margin(1e-13));
    }
    SECTION("non-Hermitian input is rejected") {
        std::vector<Triplet> ts = {{0, 1, 1.0}};
        LinOp h = LinOp::from_triplets(BasisDescriptor::single(Factor::spin, 2), ts);
        REQUIRE_THROWS_AS(lowest_eigenpairs(h, 1), std::invalid_argument);
    }
    SECTION("eigenvalues ascend and vectors are orthonormal") {
        LinOp h = build_effective(fig3_params(0.5), Truncation::b_only(60));
        SpectralResult s = lowest_eigenpairs(h, 5);
        for (int i = 1; i < 5; ++i) REQUIRE(s.eigenvalues[i] >= s.eigenvalues[i - 1]);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < i; ++j)
                REQUIRE(std::abs(s.eigenvectors[i].dot(s.eigenvectors[j])) < 1e-10);
    }
}

TEST_CASE("iterative solver matches dense diagonalization", "[spectra][lanczos]") {
    // composite dimension 256: full model at (7, 15)
    ModelParams p = fig3_params(0.45);
    Truncation t = Truncation::with_a(7, 15);
    LinOp h = build_full(p, t);
    REQUIRE(h.dim() == 256);
    SpectralResult dense = lowest_eigenpairs(h, 4);
    SpectralResult lan = lowest_eigenpairs_iterative(h, 4);
    for (int i = 0; i < 4; ++i) {
        REQUIRE(lan.eigenvalues[i] ==
                Approx(dense.eigenvalues[i]).epsilon(1e-8).margin(1e-10));
        REQUIRE(lan.residual_norms[i] < 1e-8);
    }

    SECTION("quasi-degenerate doublet is resolved") {
        // deep SP: the two lowest states split exponentially small
        ModelParams pd = fig3_params(0.62);
        Truncation td = Truncation::b_only(140);
        LinOp hd = build_effective(pd, td);
        SpectralResult d2 = lowest_eigenpairs(hd, 3);
        SpectralResult l2 = lowest_eigenpairs_iterative(hd, 3);
        REQUIRE(d2.eigenvalues[1] - d2.eigenvalues[0] < 1e-3);   // doublet
        REQUIRE(d2.eigenvalues[2] - d2.eigenvalues[1] > 1e-2);   // separated third
        for (int i = 0; i < 3; ++i)
            REQUIRE(l2.eigenvalues[i] == Approx(d2.eigenvalues[i]).margin(1e-8));
    }
    SECTION("deterministic across repeated runs") {
        SpectralResult a = lowest_eigenpairs_iterative(h, 2);
        SpectralResult b = lowest_eigenpairs_iterative(h, 2);
        REQUIRE(a.eigenvalues[0] == b.eigenvalues[0]);
        REQUIRE(a.eigenvalues[1] == b.eigenvalues[1]);
        REQUIRE((a.eigenvectors[0] - b.eigenvectors[0]).norm() == 0.0);
    }
}

TEST_CASE("ground observables", "[spectra]") {
    SECTION("decoupled model: empty, parity +1, energy -omega_q/2") {
        ModelParams p(40, 1, 5, 0, 0);
        Truncation t = Truncation::b_only(20);
        GroundStateResult g = ground_observables(build_effective(p, t), p, t,
                                                 ObservableFrame::effective(effective_params(p)));
        REQUIRE(g.energy == Approx(-2.5).margin(1e-12));
        REQUIRE(g.n_b_rescaled == Approx(0.0).margin(1e-12));
        REQUIRE(g.parity_expectation == Approx(1.0).margin(1e-10));
    }
    SECTION("NP point: small occupation, even parity, gap near eps_np") {
        ModelParams p = fig3_params(0.2);
        Truncation t = Truncation::b_only(130);
        GroundStateResult g = ground_observables(build_effective(p, t), p, t,
                                                 ObservableFrame::effective(effective_params(p)));
        REQUIRE(g.n_b_rescaled == Approx(0.01105351712814128).margin(2e-5));
        REQUIRE(g.parity_expectation == Approx(1.0).margin(1e-8));
        REQUIRE(!g.broken_coherence.has_value());
        ExcitationEnergies e = excitation_energies(p);
        REQUIRE(g.gap_01 == Approx(*e.eps_np).epsilon(0.02));
    }
    SECTION("frozen ground energies at fig-3 parameters") {
        Truncation t = Truncation::b_only(130);
        ModelParams p5 = fig3_params(0.5);
        GroundStateResult g5 = ground_observables(build_effective(p5, t), p5, t,
                                                  ObservableFrame::effective(effective_params(p5)));
        REQUIRE(g5.energy == Approx(-3.845872725062097).margin(1e-9));
        // within 2% of the closed-form SP ground energy
        SpSolution sp = sp_solution(p5, SpBranch::plus);
        REQUIRE(g5.energy == Approx(sp.e_g_tilde).epsilon(0.02));
    }
    SECTION("SP point: quasi-degenerate, broken coherence near exp(r) alpha") {
        ModelParams p(40, 1, 5, 3.4, 3.0);
        Truncation t = Truncation::b_only(160);
        GroundStateResult g = ground_observables(build_effective(p, t), p, t,
                                                 ObservableFrame::effective(effective_params(p)));
        REQUIRE(g.gap_01 < 1e-3);
        REQUIRE(g.broken_coherence.has_value());
        EffectiveParams e = effective_params(p);
        SpSolution sp = sp_solution(p, SpBranch::plus);
        const double pred = std::exp(e.r) * sp.alpha;  // 4.5641718
        REQUIRE(std::abs(g.broken_coherence->first) == Approx(pred).epsilon(0.02));
        REQUIRE(std::abs(g.broken_coherence->second) == Approx(pred).epsilon(0.02));
        // parity eigenstate itself carries no coherence
        REQUIRE(std::abs(g.b_coherence) < 1e-6);
    }
}

TEST_CASE("degeneracy gap", "[spectra]") {
    Truncation t = Truncation::b_only(140);
    SECTION("NP: not quasi-degenerate") {
        ModelParams p = fig3_params(0.2);
        DegeneracyInfo d = degeneracy_gap(build_effective(p, t), 1e-6, kOmegaB);
        REQUIRE(!d.quasi_degenerate);
    }
    SECTION("deep SP: quasi-degenerate, third state separated by about eps_sp") {
        ModelParams p = fig3_params(0.6);
        LinOp h = build_effective(p, t);
        DegeneracyInfo d = degeneracy_gap(h, 1e-3, kOmegaB);
        REQUIRE(d.quasi_degenerate);
        SpectralResult s = lowest_eigenpairs(h, 3);
        ExcitationEnergies e = excitation_energies(p);
        REQUIRE(s.eigenvalues[2] - s.eigenvalues[1] == Approx(*e.eps_sp).epsilon(0.15));
    }
}

TEST_CASE("truncation convergence escalation", "[spectra]") {
    ModelParams p = fig3_params(0.5);
    SECTION("bare Hamiltonian converges at the first comparison") {
        ModelParams p0(40, 1, 5, 0, 0);
        auto builder = [&](const Truncation& t) { return effective_builder(p0, t); };
        GroundStateResult g = converge_in_truncation(
            builder, p0, {Truncation::b_only(10), Truncation::b_only(20)}, 1e-6);
        REQUIRE(g.converged);
        REQUIRE(g.truncation_used.n_b_max() == 20);
    }
    SECTION("SP point: converged value independent of schedule granularity") {
        auto builder = [&](const Truncation& t) { return effective_builder(p, t); };
        GroundStateResult a = converge_in_truncation(
            builder, p, {Truncation::b_only(90), Truncation::b_only(130)}, 1e-3);
        GroundStateResult b = converge_in_truncation(
            builder, p,
            {Truncation::b_only(80), Truncation::b_only(105), Truncation::b_only(130)}, 1e-3);
        REQUIRE(a.converged);
        REQUIRE(b.converged);
        REQUIRE(a.n_b_rescaled == Approx(b.n_b_rescaled).margin(1e-3));
    }
    SECTION("deliberately tiny cutoffs stay unconverged in the deep SP") {
        auto builder = [&](const Truncation& t) { return effective_builder(p, t); };
        GroundStateResult g = converge_in_truncation(
            builder, p, {Truncation::b_only(4), Truncation::b_only(6)}, 1e-3);
        REQUIRE(!g.converged);
    }
    SECTION("schedule validation") {
        auto builder = [&](const Truncation& t) { return effective_builder(p, t); };
        REQUIRE_THROWS_AS(
            converge_in_truncation(builder, p, {Truncation::b_only(10)}, 1e-3),
            std::invalid_argument);
        REQUIRE_THROWS_AS(converge_in_truncation(
                              builder, p, {Truncation::b_only(10), Truncation::b_only(10)}, 1e-3),
                          std::invalid_argument);
    }
}

TEST_CASE("variational monotonicity in the cutoff", "[spectra]") {
    ModelParams p = fig3_params(0.55);
    double prev = 1e9;
    for (int nb : {40, 70, 100, 130}) {
        SpectralResult s = lowest_eigenpairs(build_effective(p, Truncation::b_only(nb)), 1);
        REQUIRE(s.eigenvalues[0] <= prev + 1e-12);
        prev = s.eigenvalues[0];
    }
}
