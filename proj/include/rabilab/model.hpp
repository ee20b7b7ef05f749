#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace rabilab {

// The five frequencies/couplings of the indirect Rabi model, in units where
// omega_b is typically 1. Detunings are exposed read-only.
class ModelParams {
  public:
    ModelParams(double omega_a, double omega_b, double omega_q, double g, double J)
        : omega_a_(omega_a), omega_b_(omega_b), omega_q_(omega_q), g_(g), J_(J) {
        if (omega_a <= 0 || omega_b <= 0 || omega_q <= 0)
            throw std::invalid_argument("ModelParams: frequencies must be > 0");
        if (g < 0 || J < 0) throw std::invalid_argument("ModelParams: couplings must be >= 0");
    }

    double omega_a() const { return omega_a_; }
    double omega_b() const { return omega_b_; }
    double omega_q() const { return omega_q_; }
    double g() const { return g_; }
    double J() const { return J_; }

    double delta_b() const { return omega_a_ - omega_b_; }
    double delta_q() const { return omega_a_ - omega_q_; }
    double eta_b() const { return omega_a_ + omega_b_; }
    double eta_q() const { return omega_a_ + omega_q_; }

    double g_tilde() const { return 2 * g_ / std::sqrt(omega_a_ * omega_q_); }
    double j_tilde() const { return 2 * J_ / std::sqrt(omega_a_ * omega_b_); }

    ModelParams with_g(double g) const { return {omega_a_, omega_b_, omega_q_, g, J_}; }
    ModelParams with_J(double J) const { return {omega_a_, omega_b_, omega_q_, g_, J}; }

  private:
    double omega_a_, omega_b_, omega_q_, g_, J_;
};

struct DimensionlessCouplings {
    double g_tilde;  // 2g / sqrt(omega_a omega_q)
    double j_tilde;  // 2J / sqrt(omega_a omega_b)

    static DimensionlessCouplings of(const ModelParams& p) {
        return {p.g_tilde(), p.j_tilde()};
    }
    ModelParams to_params(double omega_a, double omega_b, double omega_q) const {
        return {omega_a, omega_b, omega_q, g_tilde * std::sqrt(omega_a * omega_q) / 2,
                j_tilde * std::sqrt(omega_a * omega_b) / 2};
    }
};

inline ModelParams params_from_tilde(double omega_a, double omega_b, double omega_q,
                                     double g_tilde, double j_tilde) {
    return DimensionlessCouplings{g_tilde, j_tilde}.to_params(omega_a, omega_b, omega_q);
}

// Coefficients of the auxiliary-mode elimination and of the squeezed frame.
// chi couples (b+b^t) to sigma_x, xi squeezes mode b; c/f are the dropped
// remainder terms, kept as validity diagnostics.
struct EffectiveParams {
    double mu_q, nu_q, mu_b, nu_b;  // generator coefficients
    double chi, xi;
    double c_coeff, f_coeff;
    double r;                 // squeeze parameter, r = -ln(1 - 4 xi/omega_b)/4
    double omega_r, chi_r, c_r;
};

inline EffectiveParams effective_params(const ModelParams& p) {
    if (p.delta_b() <= 0 || p.delta_q() <= 0)
        throw std::invalid_argument(
            "effective_params: requires omega_a > omega_b and omega_a > omega_q");
    EffectiveParams e;
    const double Db = p.delta_b(), Dq = p.delta_q(), Eb = p.eta_b(), Eq = p.eta_q();
    e.mu_q = p.g() / Eq;
    e.nu_q = p.g() / Dq;
    e.mu_b = p.J() / Eb;
    e.nu_b = p.J() / Db;
    e.chi = p.g() * p.J() * (1 / Db + 1 / Eb + 1 / Dq + 1 / Eq) / 2;
    e.xi = p.J() * p.J() * (1 / Db + 1 / Eb) / 2;
    e.c_coeff = p.J() * p.J() / 2 * (1 / Db - 1 / Eb);
    e.f_coeff = -p.g() * p.g() / 2 * (1 / Dq - 1 / Eq);
    const double arg = 1 - 4 * e.xi / p.omega_b();
    if (arg <= 0)
        throw std::runtime_error("squeezed frame unstable: 1 - 4 xi/omega_b <= 0 (J too large)");
    e.r = -0.25 * std::log(arg);
    e.omega_r = p.omega_b() * std::exp(-2 * e.r);
    e.chi_r = e.chi * std::exp(e.r);
    e.c_r = p.omega_b() / 2 * (std::exp(-2 * e.r) - 1);
    return e;
}

// Validity of dropping the c/f remainder terms: both must be small against
// the couplings that are kept.
struct FnValidity {
    double c_over_xi;
    double f_over_chi;
    bool ok;
};

inline FnValidity fn_validity(const EffectiveParams& e) {
    FnValidity v{};
    v.c_over_xi = e.xi > 0 ? std::abs(e.c_coeff) / e.xi : (e.c_coeff == 0 ? 0 : HUGE_VAL);
    v.f_over_chi = e.chi > 0 ? std::abs(e.f_coeff) / e.chi : (e.f_coeff == 0 ? 0 : HUGE_VAL);
    v.ok = v.c_over_xi < 0.2 && v.f_over_chi < 0.2;
    return v;
}

// Renormalized model after absorbing the A^2 term D (a+a^t)^2 with
// D = d_tilde g^2 / omega_q, plus the effective-frame values that follow.
struct A2Params {
    double d_tilde;
    double r_a;                       // auxiliary squeeze, <= 0 for d_tilde >= 0
    double omega_a_bar, g_bar, j_bar;
    double r_A;
    double omega_r_A, chi_r_A;

    ModelParams barred(double omega_b, double omega_q) const {
        return {omega_a_bar, omega_b, omega_q, g_bar, j_bar};
    }
};

inline A2Params a2_params(const ModelParams& p, double d_tilde) {
    if (d_tilde < 0) throw std::invalid_argument("a2_params: d_tilde must be >= 0");
    A2Params q;
    q.d_tilde = d_tilde;
    q.r_a = -0.25 * std::log(1 + 4 * d_tilde * p.g() * p.g() / (p.omega_a() * p.omega_q()));
    q.omega_a_bar = p.omega_a() * std::exp(-2 * q.r_a);
    q.g_bar = p.g() * std::exp(q.r_a);
    q.j_bar = p.J() * std::exp(q.r_a);
    const double Db = q.omega_a_bar - p.omega_b(), Dq = q.omega_a_bar - p.omega_q();
    const double Eb = q.omega_a_bar + p.omega_b(), Eq = q.omega_a_bar + p.omega_q();
    if (Db <= 0 || Dq <= 0)
        throw std::invalid_argument("a2_params: renormalized detunings must be positive");
    const double arg = 1 - 2 * q.j_bar * q.j_bar * (1 / Db + 1 / Eb) / p.omega_b();
    if (arg <= 0) throw std::runtime_error("unstable phase: omega_r^A would not be real");
    q.r_A = -0.25 * std::log(arg);
    q.omega_r_A = p.omega_b() * std::exp(-2 * q.r_A);
    q.chi_r_A =
        q.g_bar * q.j_bar * std::exp(q.r_A) / 2 * (1 / Dq + 1 / Eq + 1 / Db + 1 / Eb);
    return q;
}

// Anisotropic hopping J1 (excitation-conserving) / J2 (counter-rotating):
// effective couplings of the two spin-flip channels plus their squeezed frame.
struct AnisotropicParams {
    double j1, j2;
    double chi1, chi2, xi1, xi2;
    double r_prime;
    double omega_r_prime, chi1r, chi2r, c_r_prime;
};

inline AnisotropicParams anisotropic_params(const ModelParams& p, double j1, double j2) {
    if (j1 < 0 || j2 < 0) throw std::invalid_argument("anisotropic_params: j1, j2 must be >= 0");
    if (p.delta_b() <= 0 || p.delta_q() <= 0)
        throw std::invalid_argument(
            "anisotropic_params: requires omega_a > omega_b and omega_a > omega_q");
    AnisotropicParams q;
    q.j1 = j1;
    q.j2 = j2;
    const double Db = p.delta_b(), Dq = p.delta_q(), Eb = p.eta_b(), Eq = p.eta_q();
    const double g = p.g();
    q.chi1 = (g * j2 / Eb + g * j1 / Db + g * j2 / Eq + g * j1 / Dq) / 2;
    q.chi2 = (g * j2 / Eb + g * j1 / Db + g * j2 / Dq + g * j1 / Eq) / 2;
    q.xi1 = (j2 * j2 / Eb + j1 * j1 / Db) / 2;
    q.xi2 = (j1 * j2 / Db + j1 * j2 / Eb) / 2;
    const double denom = p.omega_b() - 2 * q.xi1 + 2 * q.xi2;
    const double arg = 1 - 4 * q.xi2 / denom;
    if (denom <= 0 || arg <= 0)
        throw std::runtime_error("unstable regime: anisotropic squeezed frame is not real");
    q.r_prime = -0.25 * std::log(arg);
    const double e2 = std::exp(2 * q.r_prime), em2 = std::exp(-2 * q.r_prime);
    q.omega_r_prime = (p.omega_b() - 2 * q.xi1) * (e2 + em2) / 2 - q.xi2 * (e2 - em2);
    const double ep = std::exp(q.r_prime), em = std::exp(-q.r_prime);
    q.chi1r = (q.chi1 + q.chi2) * ep / 2 + (q.chi1 - q.chi2) * em / 2;
    q.chi2r = (q.chi1 + q.chi2) * ep / 2 - (q.chi1 - q.chi2) * em / 2;
    q.c_r_prime = p.omega_b() / 2 * ((e2 + em2) / 2 - 1) - q.xi1 * (e2 + em2) / 2 -
                  q.xi2 * (e2 - em2) / 2;
    return q;
}

}  // namespace rabilab
