#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "rabilab/model.hpp"

namespace rabilab {

enum class PhaseLabel { NP, SP, UP, BOUNDARY };

inline const char* phase_name(PhaseLabel p) {
    switch (p) {
        case PhaseLabel::NP: return "NP";
        case PhaseLabel::SP: return "SP";
        case PhaseLabel::UP: return "UP";
        case PhaseLabel::BOUNDARY: return "BOUNDARY";
    }
    return "?";
}

// g_c in the classical-oscillator limit: sqrt(1 - J~^2) / J~.
inline double critical_coupling_dimensionless(double j_tilde) {
    if (j_tilde <= 0 || j_tilde >= 1)
        throw std::invalid_argument("critical_coupling_dimensionless: requires 0 < j_tilde < 1");
    return std::sqrt(1 - j_tilde * j_tilde) / j_tilde;
}

// Frequency-exact critical coupling from the vanishing normal-phase
// excitation energy.
inline double critical_coupling_dimensional(const ModelParams& p) {
    const EffectiveParams e = effective_params(p);  // throws when frame unstable
    const double Db = p.delta_b(), Dq = p.delta_q(), Eb = p.eta_b(), Eq = p.eta_q();
    const double num = std::sqrt(p.omega_q() * (p.omega_b() - 4 * e.xi));
    return num / (p.J() * (1 / Db + 1 / Eb + 1 / Dq + 1 / Eq));
}

// Order parameter in the classical-oscillator limit; 0 below threshold.
inline double order_parameter_dimensionless(double g_tilde, double j_tilde) {
    const double gc = critical_coupling_dimensionless(j_tilde);
    if (g_tilde <= gc) return 0.0;
    const double g2 = g_tilde * g_tilde, j2 = j_tilde * j_tilde;
    return g2 * j2 / (4 - 4 * j2) - (1 - j2) / (4 * g2 * j2);
}

// Frequency-exact order parameter; 0 below the dimensional threshold.
inline double order_parameter_exact(const ModelParams& p) {
    const EffectiveParams e = effective_params(p);
    if (p.g() <= critical_coupling_dimensional(p)) return 0.0;
    const double m = p.omega_q() * p.omega_b() - 4 * p.omega_q() * e.xi;
    return e.chi * e.chi / m - m / (16 * e.chi * e.chi);
}

// eps_np = sqrt(omega_r^2 - 4 chi_r^2 omega_r / omega_q), real only in the NP;
// eps_sp = sqrt(omega_r^2 - omega_q^2 omega_r^4 / (16 chi_r^4)), real only in
// the SP. The invalid branch is absent rather than NaN.
struct ExcitationEnergies {
    std::optional<double> eps_np;
    std::optional<double> eps_sp;
};

inline ExcitationEnergies excitation_energies(const ModelParams& p) {
    const EffectiveParams e = effective_params(p);
    ExcitationEnergies out;
    const double wr = e.omega_r, wq = p.omega_q(), cr = e.chi_r;
    const double arg_np = wr * wr - 4 * cr * cr * wr / wq;
    if (arg_np >= 0) out.eps_np = std::sqrt(arg_np);
    if (cr > 0) {
        const double arg_sp = wr * wr - wq * wq * wr * wr * wr * wr / (16 * cr * cr * cr * cr);
        if (arg_sp >= 0) out.eps_sp = std::sqrt(arg_sp);
    }
    return out;
}

struct NpSolution {
    double epsilon_np;
    double e_g;
    double r_np;
};

inline NpSolution np_solution(const ModelParams& p) {
    const EffectiveParams e = effective_params(p);
    const double wr = e.omega_r, wq = p.omega_q(), cr = e.chi_r;
    const double arg = 1 - 4 * cr * cr / (wq * wr);
    if (arg <= 0)
        throw std::runtime_error("np_solution: point is in the superradiant phase (g > g_c)");
    NpSolution s;
    s.r_np = -0.25 * std::log(arg);
    s.epsilon_np = std::sqrt(wr * wr - 4 * cr * cr * wr / wq);
    s.e_g = (s.epsilon_np - wr) / 2 - wq / 2 + e.c_r;
    return s;
}

enum class SpBranch { plus, minus };

struct SpSolution {
    double alpha;       // displacement; sign follows the branch
    double theta;       // spin-rotation angle, tan(2 theta) = -4 chi_r alpha / omega_q
    double r_sp;
    double epsilon_sp;
    double e_g_tilde;
    double spin_down_coeff;  // amplitude of |down> in |down>_+-
    double spin_up_coeff;    // amplitude of |up>, carries the +- sign
};

inline SpSolution sp_solution(const ModelParams& p, SpBranch branch) {
    const EffectiveParams e = effective_params(p);
    const double wr = e.omega_r, wq = p.omega_q(), cr = e.chi_r;
    const double chip2 = 4 * cr * cr / (wr * wq);  // chi_r'^2
    if (chip2 < 1)
        throw std::runtime_error("sp_solution: point is in the normal phase (g < g_c)");
    SpSolution s;
    const double sign = branch == SpBranch::plus ? 1.0 : -1.0;
    s.alpha = sign * std::sqrt(wq / (4 * wr) * (chip2 - 1 / chip2));
    s.theta = 0.5 * std::atan(-4 * cr * s.alpha / wq);
    s.r_sp = -0.25 * std::log(1 - wq * wq * wr * wr / (16 * cr * cr * cr * cr));
    s.epsilon_sp = std::sqrt(wr * wr - wq * wq * wr * wr * wr * wr / (16 * cr * cr * cr * cr));
    s.e_g_tilde = 0.5 * (s.epsilon_sp - wr) - cr * cr / wr - wq * wq * wr / (16 * cr * cr) + e.c_r;
    s.spin_down_coeff = std::sqrt(0.5 * (1 + wr * wq / (4 * cr * cr)));
    s.spin_up_coeff = sign * std::sqrt(0.5 * (1 - wr * wq / (4 * cr * cr)));
    return s;
}

// Left-hand side of the A^2 phase-boundary relation
// B = [g~ J~ / (1 + D~ g~^2)] / sqrt(1 - J~^2/(1 + D~ g~^2)); NP iff B < 1.
inline double a2_boundary_value(double g_tilde, double j_tilde, double d_tilde) {
    const double u = 1 + d_tilde * g_tilde * g_tilde;
    const double arg = 1 - j_tilde * j_tilde / u;
    if (arg <= 0)
        throw std::runtime_error("unstable phase: j_tilde > sqrt(1 + d_tilde g_tilde^2)");
    return g_tilde * j_tilde / u / std::sqrt(arg);
}

// Order parameter with the A^2 term; 0 when B < 1.
inline double a2_order_parameter(double g_tilde, double j_tilde, double d_tilde) {
    const double u = 1 + d_tilde * g_tilde * g_tilde;
    if (j_tilde > std::sqrt(u))
        throw std::runtime_error("unstable phase: j_tilde > sqrt(1 + d_tilde g_tilde^2)");
    if (a2_boundary_value(g_tilde, j_tilde, d_tilde) <= 1) return 0.0;
    const double v = u - j_tilde * j_tilde;
    const double g2j2 = g_tilde * g_tilde * j_tilde * j_tilde;
    return g2j2 / (4 * u * v) - u * v / (4 * g2j2);
}

inline PhaseLabel classify_phase(double g_tilde, double j_tilde, double d_tilde,
                                 double tol = 1e-6) {
    const double u = 1 + d_tilde * g_tilde * g_tilde;
    if (j_tilde * j_tilde >= u) return PhaseLabel::UP;
    if (g_tilde <= 0) return PhaseLabel::NP;
    const double b = a2_boundary_value(g_tilde, j_tilde, d_tilde);
    if (std::abs(b - 1) <= tol) return PhaseLabel::BOUNDARY;
    return b < 1 ? PhaseLabel::NP : PhaseLabel::SP;
}

// g~ roots of B(g~) = 1 at fixed (J~, D~): the SP window boundaries. For
// d_tilde = 0 there is a single threshold (the dimensionless g_c).
struct SpWindow {
    std::optional<double> lower;  // NP -> SP crossing
    std::optional<double> upper;  // SP -> NP crossing (reversed transition)
};

inline SpWindow a2_sp_window(double j_tilde, double d_tilde) {
    SpWindow w;
    const double j2 = j_tilde * j_tilde;
    if (d_tilde == 0) {
        if (j_tilde > 0 && j_tilde < 1) w.lower = critical_coupling_dimensionless(j_tilde);
        return w;
    }
    // B = 1 with u = g~^2:  d^2 u^2 + (2d - d j2 - j2) u + (1 - j2) = 0
    const double a = d_tilde * d_tilde;
    const double b = 2 * d_tilde - d_tilde * j2 - j2;
    const double c = 1 - j2;
    const double disc = b * b - 4 * a * c;
    if (disc < 0) return w;  // no SP at this J~
    const double sq = std::sqrt(disc);
    const double u1 = (-b - sq) / (2 * a), u2 = (-b + sq) / (2 * a);
    if (u1 > 0) w.lower = std::sqrt(u1);
    if (u2 > 0 && u2 != u1) w.upper = std::sqrt(u2);
    return w;
}

// The J~ above which no NP survives at couplings g~ >= g_min (the level set
// of B = 1 evaluated at the smallest plotted coupling). With g_min ~ 0.095
// this reproduces the reported 0.9978 threshold at d_tilde = 0.5. The nose of
// the SP region (tangency of max_g B = 1) is exposed separately.
inline double a2_np_extinction_j(double d_tilde, double g_min) {
    if (d_tilde <= 0 || g_min <= 0)
        throw std::invalid_argument("a2_np_extinction_j: requires d_tilde > 0 and g_min > 0");
    // solve B(g_min, J) = 1 for J^2: u fixed = 1 + d g^2
    const double u = 1 + d_tilde * g_min * g_min;
    // g^2 J^2 / (u (u - J^2)) = 1  =>  J^2 (g^2 + u) = u^2
    return std::sqrt(u * u / (g_min * g_min + u));
}

inline double a2_sp_nose_j(double d_tilde) {
    if (d_tilde <= 0 || d_tilde >= 1)
        throw std::invalid_argument("a2_sp_nose_j: tangency exists only for 0 < d_tilde < 1");
    const double s = (1 - d_tilde) / (1 + d_tilde);
    return std::sqrt(1 - s * s);
}

}  // namespace rabilab
