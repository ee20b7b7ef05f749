#pragma once

#include "rabilab/model.hpp"
#include "rabilab/operators.hpp"

namespace rabilab {

// H = (omega_q/2) sigma_z + omega_a a^t a + omega_b b^t b
//     + g (a^t + a) sigma_x + J (a^t + a)(b^t + b)
inline LinOp build_full(const ModelParams& p, const Truncation& trunc) {
    if (!trunc.include_a())
        throw std::invalid_argument("full model requires auxiliary mode (include_a = true)");
    LinOp h = p.omega_q() / 2 * embed(pauli(Pauli::z), Factor::spin, trunc) +
              p.omega_a() * embed(fock_number(trunc.n_a_max()), Factor::mode_a, trunc) +
              p.omega_b() * embed(fock_number(trunc.n_b_max()), Factor::mode_b, trunc);
    LinOp xa = embed(fock_position(trunc.n_a_max()), Factor::mode_a, trunc);
    LinOp xb = embed(fock_position(trunc.n_b_max()), Factor::mode_b, trunc);
    LinOp sx = embed(pauli(Pauli::x), Factor::spin, trunc);
    return h + p.g() * (xa * sx) + p.J() * (xa * xb);
}

// H_eff = (omega_q/2) sigma_z + omega_b b^t b - chi (b^t + b) sigma_x
//         - xi (b^t + b)^2, on the (mode_b x spin) space.
inline LinOp build_effective(const ModelParams& p, const Truncation& trunc) {
    if (trunc.include_a())
        throw std::invalid_argument("build_effective expects a space without mode_a");
    const EffectiveParams e = effective_params(p);
    LinOp xb = embed(fock_position(trunc.n_b_max()), Factor::mode_b, trunc);
    LinOp sx = embed(pauli(Pauli::x), Factor::spin, trunc);
    return p.omega_q() / 2 * embed(pauli(Pauli::z), Factor::spin, trunc) +
           p.omega_b() * embed(fock_number(trunc.n_b_max()), Factor::mode_b, trunc) -
           e.chi * (xb * sx) - e.xi * (xb * xb);
}

// H_r = (omega_q/2) sigma_z + omega_r b^t b - chi_r (b + b^t) sigma_x + C_r.
// Unitarily equivalent to H_eff; the constant keeps energies comparable.
inline LinOp build_squeezed_rabi(const ModelParams& p, const Truncation& trunc) {
    if (trunc.include_a())
        throw std::invalid_argument("build_squeezed_rabi expects a space without mode_a");
    const EffectiveParams e = effective_params(p);
    LinOp xb = embed(fock_position(trunc.n_b_max()), Factor::mode_b, trunc);
    LinOp sx = embed(pauli(Pauli::x), Factor::spin, trunc);
    LinOp h = p.omega_q() / 2 * embed(pauli(Pauli::z), Factor::spin, trunc) +
              e.omega_r * embed(fock_number(trunc.n_b_max()), Factor::mode_b, trunc) -
              e.chi_r * (xb * sx);
    return h.plus_scaled_identity(e.c_r);
}

// H = (omega_q/2) sigma_z + omega_r^A b^t b - chi_r^A (b^t + b) sigma_x.
inline LinOp build_effective_a2(const ModelParams& p, double d_tilde, const Truncation& trunc) {
    if (trunc.include_a())
        throw std::invalid_argument("build_effective_a2 expects a space without mode_a");
    const A2Params q = a2_params(p, d_tilde);
    LinOp xb = embed(fock_position(trunc.n_b_max()), Factor::mode_b, trunc);
    LinOp sx = embed(pauli(Pauli::x), Factor::spin, trunc);
    return p.omega_q() / 2 * embed(pauli(Pauli::z), Factor::spin, trunc) +
           q.omega_r_A * embed(fock_number(trunc.n_b_max()), Factor::mode_b, trunc) -
           q.chi_r_A * (xb * sx);
}

// H = (omega_q/2) sigma_z + omega_b b^t b - chi2 (b^t s+ + b s-)
//     - chi1 (b^t s- + b s+) - xi2 (b^t^2 + b^2) - xi1 (b^t b + b b^t)
inline LinOp build_anisotropic_effective(const ModelParams& p, double j1, double j2,
                                         const Truncation& trunc) {
    if (trunc.include_a())
        throw std::invalid_argument("build_anisotropic_effective expects a space without mode_a");
    const AnisotropicParams q = anisotropic_params(p, j1, j2);
    const int nb = trunc.n_b_max();
    LinOp b = embed(fock_lowering(nb), Factor::mode_b, trunc);
    LinOp bd = embed(fock_raising(nb), Factor::mode_b, trunc);
    LinOp sp = embed(pauli(Pauli::plus), Factor::spin, trunc);
    LinOp sm = embed(pauli(Pauli::minus), Factor::spin, trunc);
    return p.omega_q() / 2 * embed(pauli(Pauli::z), Factor::spin, trunc) +
           p.omega_b() * embed(fock_number(nb), Factor::mode_b, trunc) -
           q.chi2 * (bd * sp + b * sm) - q.chi1 * (bd * sm + b * sp) -
           q.xi2 * (bd * bd + b * b) - q.xi1 * (bd * b + b * bd);
}

}  // namespace rabilab
