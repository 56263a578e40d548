/*
 * hydro_residuals.hpp — discrete residuals of the hydrodynamic form of the
 * wave equation, evaluated on trajectory snapshots.
 *
 * With ρ, v, S, Q from the polar decomposition, the continuum statements
 *   continuity : ∂_tρ + (ρv)′                      = 0
 *   quantum HJ : ∂_tS + (S′)²/2m + Q + V           = 0
 *   Euler      : ∂_t(ρv) + (ρv²)′ + (ρ/m)V′ + (ρ/m)Q′ = 0
 *   momentum   : ∂_t(mρv) + Π′ + ρV′               = 0,  Π = mρv² − σ
 * are evaluated with 2nd-order central time differences over three
 * consecutive snapshots and spectral space derivatives; the reported
 * numbers are L² norms divided by the size of the largest constituent
 * term (floored at 1), so they are dimensionless and should shrink as
 * O(dt²) under snapshot refinement.
 *
 * All norms are quoted on the evaluation region: points unmasked in the
 * whole window with ρ ≥ 1e−8 · max ρ.  Phase, velocity and ξ-arithmetic
 * degrade like (rounding)/|ψ| or (rounding)/ρ, so the decades just above
 * the 1e−12 node threshold measure rounding amplification rather than the
 * equations; four decades of headroom keeps that below the quoted levels.
 *
 * The quantum force is evaluated in its flux form
 *   ρQ′ = −σ′,  σ = mD²·(ρ″ − (ρ′)²/ρ) = mρD²(log ρ)″,  D = ℏ/2m,
 * which needs only derivatives of ρ itself: differentiating Q or log ρ as
 * assembled tables would pick up seam/mask kinks that spectral methods
 * smear globally.  The identity −σ′ = ρQ′ is exact algebra (it is also
 * exposed and verified separately in stress_tensors).
 *
 * The kinetic term uses S′ := m·v = ℏ·Im(ψ′/ψ) rather than a derivative
 * of the unwrapped S, which stays correct when the phase winds around the
 * periodic box.  ∂_tS uses the unwrapped series aligned to a common
 * 2πℏ branch at the densest grid point.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "madelung.hpp"
#include "phase.hpp"
#include "potential.hpp"
#include "spectral.hpp"
#include "trajectory.hpp"

namespace qwb {

struct HydroResiduals {
    double continuity = 0.0;
    double quantum_hj = 0.0;
    double euler = 0.0;
    double stress_balance = 0.0;
    double dt_used = 0.0;
};

struct StressReport {
    RealField sigma;         // quantum stress m·ρ·D²·(log ρ)″
    RealField Pi;            // momentum flux m·ρ·v² − σ
    RealField eta;           // dynamic viscosity field ½·m·D·ρ
    double mu = 0.0;         // kinematic viscosity D/2
    double balance_identity = 0.0; // max rel. gap between the two σ′ forms
};

struct LogDensityResiduals {
    double xi_continuity = 0.0;      // ∂_tξ + S″/m + ξ′S′/m
    double xi_hamilton_jacobi = 0.0; // ∂_tS − (ℏ²/4m)ξ″ − (ℏ²/8m)(ξ′)² + (S′)²/2m + V
    double continuity_match = 0.0;   // ξ-form vs ρ-form, same equation
    double hj_match = 0.0;           // ξ-form vs (R,S)-form, same equation
    double dt_used = 0.0;
};

namespace detail {

inline double masked_l2(const RealField &r, const NodeMask &mask) {
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j)
        if (!mask.masked(j)) s += r[j] * r[j];
    return std::sqrt(s * r.grid.dx());
}

// ρ-weighted L² over the evaluation region — the weight suppresses what is
// left of the low-density boundary smoothly.
inline double density_weighted_l2(const RealField &r, const RealField &rho,
                                  const NodeMask &mask) {
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j)
        if (!mask.masked(j)) s += rho[j] * r[j] * r[j];
    return std::sqrt(s * r.grid.dx());
}

inline double residual_scale(std::initializer_list<double> term_norms) {
    double scale = 1.0;
    for (double t : term_norms) scale = std::max(scale, t);
    return scale;
}

// σ = m·D²·(ρ″ − (ρ′)²/ρ), evaluated through ρ-derivatives only; the
// division is floored at the mask threshold, where both branches of σ are
// already at rounding level.
inline RealField stress_sigma(const RealField &rho, const NodeMask &mask) {
    const Grid &g = rho.grid;
    const RealField d1 = spectral_derivative(rho, 1);
    const RealField d2 = spectral_derivative(rho, 2);
    const double D = g.diffusion();
    const double mD2 = g.mass * D * D;
    RealField sigma(g, 0.0, rho.time);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double r = std::max(rho[j], mask.epsilon_rho);
        sigma[j] = mD2 * (d2[j] - d1[j] * d1[j] / r);
    }
    return sigma;
}

// Central window (i−1, i, i+1) around the middle snapshot, decomposed and
// with the action series branch-aligned at the densest common point.
struct SnapshotWindow {
    MadelungFields prev, mid, next;
    NodeMask union_mask;
    double dt = 0.0;
    std::size_t mid_index = 0;
};

inline SnapshotWindow central_window(const Trajectory &traj) {
    if (traj.size() < 3)
        throw InsufficientSnapshots(
            "central differences need >= 3 snapshots, got " +
            std::to_string(traj.size()));
    if (!(traj.snapshot_dt > 0.0))
        throw ConfigError("trajectory has no positive snapshot spacing");

    const std::size_t mid = traj.size() / 2;
    SnapshotWindow w{decompose(traj.snapshots[mid - 1]),
                     decompose(traj.snapshots[mid]),
                     decompose(traj.snapshots[mid + 1]),
                     NodeMask{},
                     traj.snapshot_dt,
                     mid};

    const Grid &g = w.mid.rho.grid;
    std::vector<bool> flags(g.n, false);
    for (std::size_t j = 0; j < g.n; ++j)
        flags[j] = w.prev.mask.masked(j) || w.mid.mask.masked(j) ||
                   w.next.mask.masked(j);
    w.union_mask = NodeMask(g, std::move(flags), w.mid.mask.epsilon_rho);

    // branch-align S at the densest point unmasked in all three snapshots
    std::size_t ref = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < g.n; ++j)
        if (!w.union_mask.masked(j) && w.mid.rho[j] > best) {
            best = w.mid.rho[j];
            ref = j;
        }
    std::vector<RealField> series{w.prev.S, w.mid.S, w.next.S};
    align_phase_series(series, ref);
    w.prev.S = std::move(series[0]);
    w.mid.S = std::move(series[1]);
    w.next.S = std::move(series[2]);
    return w;
}

// Evaluation region for residual norms: unmasked across the window and at
// least four density decades above the node threshold (see top comment).
inline NodeMask evaluation_mask(const SnapshotWindow &w,
                                double headroom = 1e-8) {
    const Grid &g = w.mid.rho.grid;
    double rho_max = 0.0;
    for (std::size_t j = 0; j < g.n; ++j)
        rho_max = std::max(rho_max, w.mid.rho[j]);
    std::vector<bool> flags(g.n, false);
    for (std::size_t j = 0; j < g.n; ++j)
        flags[j] =
            w.union_mask.masked(j) || w.mid.rho[j] < headroom * rho_max;
    return NodeMask(g, std::move(flags), w.union_mask.epsilon_rho);
}

inline RealField central_time_diff(const RealField &plus, const RealField &minus,
                                   double dt, double t_mid) {
    RealField out(plus.grid, 0.0, t_mid);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = (plus[j] - minus[j]) / (2.0 * dt);
    return out;
}

inline RealField pointwise_product(const RealField &a, const RealField &b) {
    RealField out(a.grid, 0.0, a.time);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = a[j] * b[j];
    return out;
}

} // namespace detail

// Residual norms of the four hydrodynamic statements at the middle
// snapshot of the trajectory.
inline HydroResiduals hydro_residuals(const Trajectory &traj,
                                      const PotentialSpec &V) {
    auto w = detail::central_window(traj);
    const Grid &g = w.mid.rho.grid;
    const double m = g.mass;
    const double t_mid = w.mid.rho.time;
    const NodeMask msk = detail::evaluation_mask(w);

    HydroResiduals out;
    out.dt_used = w.dt;
    const RealField grad_v = V.gradient();

    // continuity: ∂_tρ + (ρv)′
    {
        const RealField dt_rho =
            detail::central_time_diff(w.next.rho, w.prev.rho, w.dt, t_mid);
        const RealField flux =
            spectral_derivative(detail::pointwise_product(w.mid.rho, w.mid.v), 1);
        RealField r(g, 0.0, t_mid);
        for (std::size_t j = 0; j < g.n; ++j) r[j] = dt_rho[j] + flux[j];
        out.continuity = detail::masked_l2(r, msk) /
                         detail::residual_scale({detail::masked_l2(dt_rho, msk),
                                                 detail::masked_l2(flux, msk)});
    }

    // quantum HJ: ∂_tS + ½mv² + Q + V
    {
        const RealField dt_S =
            detail::central_time_diff(w.next.S, w.prev.S, w.dt, t_mid);
        RealField kin(g, 0.0, t_mid), r(g, 0.0, t_mid);
        for (std::size_t j = 0; j < g.n; ++j) {
            kin[j] = 0.5 * m * w.mid.v[j] * w.mid.v[j];
            r[j] = dt_S[j] + kin[j] + w.mid.Q[j] + V.values[j];
        }
        out.quantum_hj =
            detail::masked_l2(r, msk) /
            detail::residual_scale({detail::masked_l2(dt_S, msk),
                                    detail::masked_l2(kin, msk),
                                    detail::masked_l2(w.mid.Q, msk),
                                    detail::masked_l2(V.values, msk)});
    }

    // shared pieces for the two momentum statements
    const RealField mom_prev = detail::pointwise_product(w.prev.rho, w.prev.v);
    const RealField mom_next = detail::pointwise_product(w.next.rho, w.next.v);
    const RealField dt_mom =
        detail::central_time_diff(mom_next, mom_prev, w.dt, t_mid);
    const RealField rho_v2 = detail::pointwise_product(
        detail::pointwise_product(w.mid.rho, w.mid.v), w.mid.v);
    const RealField sigma = detail::stress_sigma(w.mid.rho, w.mid.mask);
    const RealField dsigma = spectral_derivative(sigma, 1);

    // Euler: ∂_t(ρv) + (ρv²)′ + (ρ/m)V′ + (ρ/m)Q′, with ρQ′ = −σ′
    {
        const RealField conv = spectral_derivative(rho_v2, 1);
        RealField force_v(g, 0.0, t_mid), force_q(g, 0.0, t_mid), r(g, 0.0, t_mid);
        for (std::size_t j = 0; j < g.n; ++j) {
            force_v[j] = w.mid.rho[j] * grad_v[j] / m;
            force_q[j] = -dsigma[j] / m;
            r[j] = dt_mom[j] + conv[j] + force_v[j] + force_q[j];
        }
        out.euler = detail::masked_l2(r, msk) /
                    detail::residual_scale({detail::masked_l2(dt_mom, msk),
                                            detail::masked_l2(conv, msk),
                                            detail::masked_l2(force_v, msk),
                                            detail::masked_l2(force_q, msk)});
    }

    // momentum flux: ∂_t(mρv) + Π′ + ρV′ with Π assembled before the derivative
    {
        RealField Pi(g, 0.0, t_mid);
        for (std::size_t j = 0; j < g.n; ++j)
            Pi[j] = m * rho_v2[j] - sigma[j];
        const RealField dPi = spectral_derivative(Pi, 1);
        RealField r(g, 0.0, t_mid), body(g, 0.0, t_mid);
        for (std::size_t j = 0; j < g.n; ++j) {
            body[j] = w.mid.rho[j] * grad_v[j];
            r[j] = m * dt_mom[j] + dPi[j] + body[j];
        }
        RealField m_dt_mom(g, 0.0, t_mid);
        for (std::size_t j = 0; j < g.n; ++j) m_dt_mom[j] = m * dt_mom[j];
        out.stress_balance =
            detail::masked_l2(r, msk) /
            detail::residual_scale({detail::masked_l2(m_dt_mom, msk),
                                    detail::masked_l2(dPi, msk),
                                    detail::masked_l2(body, msk)});
    }
    return out;
}

// Quantum stress σ, momentum flux Π, viscosities, and the pointwise check
// that the two forms of σ′ (direct derivative of σ vs m·D²·ρ·∂[ρ″/ρ −
// ½(ρ′/ρ)²]) coincide.  Interior nodes raise NodeContamination.  The
// two-route check differentiates the assembled ρ″/ρ table, so the reported
// balance_identity is at rounding level only when no points are masked;
// with a (benign) masked tail the table has a cliff at the mask boundary
// whose ringing inflates the number, and σ′ should instead be validated
// against a local stencil of Q (the σ, Π, η fields themselves are local
// algebra and remain accurate either way).
inline StressReport stress_tensors(const MadelungFields &mf) {
    if (detail::masked_arc_count(mf.mask) >= 2)
        throw NodeContamination("stress_tensors: density has interior nodes");
    const Grid &g = mf.rho.grid;
    const double D = g.diffusion();

    StressReport rep{detail::stress_sigma(mf.rho, mf.mask),
                     RealField(g, 0.0, mf.rho.time),
                     RealField(g, 0.0, mf.rho.time),
                     D / 2.0,
                     0.0};
    for (std::size_t j = 0; j < g.n; ++j) {
        rep.Pi[j] = g.mass * mf.rho[j] * mf.v[j] * mf.v[j] - rep.sigma[j];
        rep.eta[j] = 0.5 * g.mass * D * mf.rho[j];
    }

    // independent route: σ′ = m·D²·ρ·A′ with A = ρ″/ρ − ½(ρ′/ρ)²
    const RealField d1 = spectral_derivative(mf.rho, 1);
    const RealField d2 = spectral_derivative(mf.rho, 2);
    RealField A(g, 0.0, mf.rho.time);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double r = std::max(mf.rho[j], mf.mask.epsilon_rho);
        const double lr = d1[j] / r;
        A[j] = d2[j] / r - 0.5 * lr * lr;
    }
    const RealField dA = spectral_derivative(A, 1);
    const RealField lhs = spectral_derivative(rep.sigma, 1);

    double gap = 0.0, scale = 0.0;
    const double mD2 = g.mass * D * D;
    for (std::size_t j = 0; j < g.n; ++j) {
        if (mf.mask.masked(j)) continue;
        const double rhs = mD2 * mf.rho[j] * dA[j];
        gap = std::max(gap, std::abs(lhs[j] - rhs));
        scale = std::max(scale, std::abs(lhs[j]));
    }
    rep.balance_identity = gap / std::max(scale, 1e-30);
    return rep;
}

// Residuals of the log-density form: with ξ = log ρ,
//   ∂_tξ + S″/m + ξ′S′/m = 0   and
//   ∂_tS − (ℏ²/4m)ξ″ − (ℏ²/8m)(ξ′)² + (S′)²/2m + V = 0,
// plus cross-checks that each coincides with its (ρ,S)/(R,S) counterpart
// (same equations in different variables; the matches isolate the spatial
// algebra, sharing the time differences).
//
// Derivative routing: ξ′ = ρ′/ρ, ξ″ = ρ″/ρ − (ρ′/ρ)², ∂_tξ = ∂_tρ/ρ, and
// S″/m = v′ = (ℏ/m)·Im(ψ″/ψ − (ψ′/ψ)²) straight from the snapshot wave —
// the assembled v table is noise where ρ is near the node threshold and
// zeroed on masked points, so its spectral derivative would ring globally.
//
// The ξ-residual norms are quoted where ρ has at least four decades of
// headroom above the node threshold: every ξ-term divides by ρ, which
// amplifies snapshot rounding by 1/ρ, so the deepest tail decades carry no
// information about the equations.  The cross-form matches are ρ-weighted
// over the same region.
inline LogDensityResiduals log_density_form(const Trajectory &traj,
                                            const PotentialSpec &V) {
    auto w = detail::central_window(traj);
    if (detail::masked_arc_count(w.mid.mask) >= 2)
        throw NodeContamination("log_density_form: density has interior nodes");
    const Grid &g = w.mid.rho.grid;
    const double m = g.mass;
    const double h2 = g.hbar * g.hbar;
    const double t_mid = w.mid.rho.time;

    const RealField d1 = spectral_derivative(w.mid.rho, 1);
    const RealField d2 = spectral_derivative(w.mid.rho, 2);
    const RealField dt_rho =
        detail::central_time_diff(w.next.rho, w.prev.rho, w.dt, t_mid);
    const RealField dt_S =
        detail::central_time_diff(w.next.S, w.prev.S, w.dt, t_mid);

    // v′ through the wave itself (see header comment)
    const WaveField &psi = traj.snapshots[w.mid_index];
    const WaveField dpsi = spectral_derivative(psi, 1);
    const WaveField d2psi = spectral_derivative(psi, 2);
    RealField vprime(g, 0.0, t_mid);
    for (std::size_t j = 0; j < g.n; ++j) {
        if (w.mid.mask.masked(j)) continue;
        const cplx lg = dpsi[j] / psi[j];
        vprime[j] = (g.hbar / m) * std::imag(d2psi[j] / psi[j] - lg * lg);
    }

    const NodeMask eval = detail::evaluation_mask(w);

    LogDensityResiduals out;
    out.dt_used = w.dt;

    RealField r1(g, 0.0, t_mid);
    RealField r2(g, 0.0, t_mid), r2_match(g, 0.0, t_mid);
    RealField c_match(g, 0.0, t_mid);

    // ρ-form counterpart for the continuity match
    const RealField flux =
        spectral_derivative(detail::pointwise_product(w.mid.rho, w.mid.v), 1);

    std::vector<double> dtxi(g.n, 0.0), xi1(g.n, 0.0), xi2(g.n, 0.0);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double r = std::max(w.mid.rho[j], w.union_mask.epsilon_rho);
        dtxi[j] = dt_rho[j] / r;
        xi1[j] = d1[j] / r;
        xi2[j] = d2[j] / r - xi1[j] * xi1[j];
    }

    for (std::size_t j = 0; j < g.n; ++j) {
        const double r = std::max(w.mid.rho[j], w.union_mask.epsilon_rho);
        // ξ-continuity and its ρ-form counterpart (∂_tρ + (ρv)′)/ρ
        r1[j] = dtxi[j] + vprime[j] + xi1[j] * w.mid.v[j];
        c_match[j] = r1[j] - (dt_rho[j] + flux[j]) / r;
        // ξ-Hamilton–Jacobi and its (R,S)-form counterpart
        const double kin = 0.5 * m * w.mid.v[j] * w.mid.v[j];
        const double q_xi =
            -h2 / (4.0 * m) * xi2[j] - h2 / (8.0 * m) * xi1[j] * xi1[j];
        r2[j] = dt_S[j] + kin + q_xi + V.values[j];
        r2_match[j] = q_xi - w.mid.Q[j];
    }

    RealField dtxi_f(g, std::move(dtxi), t_mid);
    RealField xi_flux(g, 0.0, t_mid);
    for (std::size_t j = 0; j < g.n; ++j)
        xi_flux[j] = vprime[j] + xi1[j] * w.mid.v[j];
    out.xi_continuity = detail::masked_l2(r1, eval) /
                        detail::residual_scale({detail::masked_l2(dtxi_f, eval),
                                                detail::masked_l2(xi_flux, eval)});

    RealField q_field(g, std::move(xi2), t_mid); // reused: |q_xi| scale proxy
    for (std::size_t j = 0; j < g.n; ++j)
        q_field[j] = -h2 / (4.0 * m) * q_field[j] -
                     h2 / (8.0 * m) * xi1[j] * xi1[j];
    out.xi_hamilton_jacobi =
        detail::masked_l2(r2, eval) /
        detail::residual_scale({detail::masked_l2(dt_S, eval),
                                detail::masked_l2(q_field, eval),
                                detail::masked_l2(V.values, eval)});

    // density-weighted matches: the two formulations are the same algebra,
    // so their gap must sit at rounding level wherever ρ has weight
    const double q_scale = detail::residual_scale(
        {detail::density_weighted_l2(q_field, w.mid.rho, eval)});
    out.hj_match =
        detail::density_weighted_l2(r2_match, w.mid.rho, eval) / q_scale;
    const double c_scale = detail::residual_scale(
        {detail::density_weighted_l2(xi_flux, w.mid.rho, eval)});
    out.continuity_match =
        detail::density_weighted_l2(c_match, w.mid.rho, eval) / c_scale;
    return out;
}

} // namespace qwb
