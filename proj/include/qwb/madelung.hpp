/*
 * madelung.hpp — polar decomposition ψ = R·exp(iS/ℏ) and the quantum
 * potential.
 *
 * Fields extracted from a normalized ψ:
 *   R = |ψ|          (nonnegative branch)
 *   S = ℏ·arg ψ      (continuous branch from unwrap_phase)
 *   ρ = R²           (∫ρ = 1 after normalization)
 *   v = (ℏ/m)·Im(ψ′/ψ)   current velocity  (= S′/m where S is smooth)
 *   u = (ℏ/2m)·ρ′/ρ      osmotic velocity  (= D·(log ρ)′)
 *   Q = −(ℏ²/2m)·(√ρ)″/√ρ  quantum potential
 *
 * The quantum potential has a second, algebraically equivalent form
 *   Q = −(ℏ²/8m)·[2ρ″/ρ − (ρ′/ρ)²]
 * and quantum_potential() returns both so the identity is checkable.
 *
 * Numerical policy: every division by ρ (or R) happens only on unmasked
 * points; masked points carry 0 in the derived fields and are excluded
 * from diagnostics.  Derivatives are always taken of ψ or ρ — never of
 * log ρ, √ρ as reconstructed tables, or unwrapped S — because those
 * develop seam kinks on a periodic box long before ρ itself does.
 * NodeContamination is raised when the masked set forms two or more
 * disjoint arcs on the ring: that means interior nodes, whose |ψ| kinks
 * pollute spectral derivatives globally.  A single arc is a benign tail
 * region (deeply decayed density around the periodic seam).
 */
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "phase.hpp"
#include "spectral.hpp"

namespace qwb {

struct MadelungFields {
    RealField R;     // √density
    RealField S;     // action (continuous phase branch × ℏ)
    RealField rho;   // probability density, ∫ρ = 1
    RealField v;     // current velocity S′/m
    RealField u;     // osmotic velocity D·(log ρ)′
    RealField Q;     // quantum potential
    NodeMask mask;   // points excluded from ρ-dividing diagnostics
    long winding = 0; // net phase turns around the periodic domain
};

struct QuantumPotentialPair {
    RealField a; // −(ℏ²/2m)(√ρ)″/√ρ
    RealField b; // −(ℏ²/8m)[2ρ″/ρ − (ρ′/ρ)²]
};

namespace detail {

// Number of maximal masked runs on the periodic ring (0 if none masked).
inline std::size_t masked_arc_count(const NodeMask &mask) {
    const std::size_t n = mask.flags.size();
    std::size_t arcs = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const bool prev = mask.flags[(j + n - 1) % n];
        if (mask.flags[j] && !prev) ++arcs;
    }
    if (arcs == 0 && mask.flags[0]) return 1; // fully masked ring
    return arcs;
}

// Both quantum-potential forms, no node gating (masked points get 0).
inline QuantumPotentialPair quantum_potential_forms(const RealField &rho,
                                                    const NodeMask &mask) {
    rho.require_finite("quantum_potential");
    const Grid &g = rho.grid;
    const double h2_2m = g.hbar * g.hbar / (2.0 * g.mass);
    const double h2_8m = g.hbar * g.hbar / (8.0 * g.mass);

    RealField R(g, 0.0, rho.time);
    for (std::size_t j = 0; j < g.n; ++j)
        R[j] = std::sqrt(std::max(rho[j], 0.0));
    const RealField R2 = spectral_derivative(R, 2);
    const RealField d1 = spectral_derivative(rho, 1);
    const RealField d2 = spectral_derivative(rho, 2);

    QuantumPotentialPair q{RealField(g, 0.0, rho.time),
                           RealField(g, 0.0, rho.time)};
    for (std::size_t j = 0; j < g.n; ++j) {
        if (mask.masked(j)) continue;
        q.a[j] = -h2_2m * R2[j] / R[j];
        const double lr = d1[j] / rho[j];
        q.b[j] = -h2_8m * (2.0 * d2[j] / rho[j] - lr * lr);
    }
    return q;
}

} // namespace detail

// Both forms of the quantum potential.  Interior nodes (≥ 2 masked arcs)
// make the spectral derivatives untrustworthy and raise NodeContamination.
inline QuantumPotentialPair quantum_potential(const RealField &rho,
                                              const NodeMask &mask) {
    if (detail::masked_arc_count(mask) >= 2)
        throw NodeContamination(
            "quantum_potential: density has interior node regions");
    return detail::quantum_potential_forms(rho, mask);
}

// Polar decomposition of ψ.  The state is normalized first (all derived
// fields except S are scale-invariant anyway; normalizing pins ∫ρ = 1
// even for snapshots of the non-unitary equation).
inline MadelungFields decompose(const WaveField &psi) {
    psi.require_finite("decompose");
    const Grid &g = psi.grid;
    const double nrm2 = norm_squared(psi);

    WaveField unit(g, psi.values, psi.time);
    if (nrm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(nrm2);
        for (auto &z : unit.values) z *= inv;
    }

    MadelungFields mf;
    mf.rho = unit.density();
    mf.mask = node_mask(mf.rho);

    auto phase = unwrap_phase(unit, mf.mask); // throws AllMasked on ψ ≡ 0
    mf.S = std::move(phase.S);
    mf.winding = phase.winding;

    mf.R = RealField(g, 0.0, psi.time);
    for (std::size_t j = 0; j < g.n; ++j) mf.R[j] = std::abs(unit[j]);

    // v and u from a single spectral derivative of ψ:
    //   ψ′/ψ = R′/R + iS′/ℏ  ⇒  v = (ℏ/m)·Im,  u = 2D·Re = (ℏ/2m)·ρ′/ρ
    const WaveField dpsi = spectral_derivative(unit, 1);
    mf.v = RealField(g, 0.0, psi.time);
    mf.u = RealField(g, 0.0, psi.time);
    const double D = g.diffusion();
    for (std::size_t j = 0; j < g.n; ++j) {
        if (mf.mask.masked(j)) continue;
        const cplx ratio = dpsi[j] / unit[j];
        mf.v[j] = (g.hbar / g.mass) * ratio.imag();
        mf.u[j] = 2.0 * D * ratio.real();
    }

    mf.Q = detail::quantum_potential_forms(mf.rho, mf.mask).a;
    return mf;
}

// Inverse map R·exp(iS/ℏ): reconstructs ψ up to a global phase.
inline WaveField recompose(const MadelungFields &mf) {
    const Grid &g = mf.rho.grid;
    WaveField psi(g, cplx{0.0, 0.0}, mf.rho.time);
    for (std::size_t j = 0; j < g.n; ++j)
        psi[j] = mf.R[j] * std::polar(1.0, mf.S[j] / g.hbar);
    return psi;
}

} // namespace qwb
