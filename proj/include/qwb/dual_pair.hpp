/*
 * dual_pair.hpp — the dual-diffusion representation of a wave field.
 *
 * A node-free ψ = exp(R̂ + iS̄)  (R̂ = log|ψ|, S̄ = S/ℏ the dimensionless
 * phase) maps to the positive pair
 *   φ = exp(R̂ + S̄),   φ̂ = exp(R̂ − S̄),   φ·φ̂ = ρ,
 * which solve the forward/backward diffusion equations
 *   ℏ∂_tφ + (ℏ²/2m)φ″ + c̃φ = 0,    −ℏ∂_tφ̂ + (ℏ²/2m)φ̂″ + c̃φ̂ = 0
 * exactly when ψ solves the linear wave equation, with the creation/
 * annihilation term
 *   c̃ = −V − 2ℏ∂_tS̄ − (ℏ²/m)(S̄′)²  =  V + 2Q
 * (the second equality eliminates ∂_tS̄ through the quantum Hamilton–
 * Jacobi equation, so it holds on solutions; Q is the quantum potential).
 * Inversion: R̂ = ½log(φφ̂), S̄ = ½log(φ/φ̂).  In natural units (ℏ = m = 1)
 * the equations reduce to ∂_tφ + ½φ″ + cφ = 0 and −∂_tφ̂ + ½φ̂″ + cφ̂ = 0
 * with the inverse-time c equal to the energy-units c̃; the units flag
 * records which convention a pair is in and `natural` is only accepted on
 * grids with ℏ = m = 1 (one code path covers both).
 *
 * Numerical policy:
 *  - S̄ is shifted by its unmasked grid mean before exponentiation (the
 *    shift is recorded as `gauge`); a constant phase shift rescales φ, φ̂
 *    by reciprocal factors and changes nothing observable, but without the
 *    shift a drifting global phase would walk the exponentials toward
 *    overflow.  |R̂ ± S̄| > 300 after the shift raises Overflow.
 *  - For winding phases (plane waves) φ is not periodic, so the diffusion
 *    residuals are evaluated in log form — the equation divided by φ —
 *    with spatial derivatives taken from the periodic fields ψ′/ψ and
 *    ψ″/ψ (R̂′ = Re ψ′/ψ, S̄′ = Im ψ′/ψ, R̂″ + iS̄″ = ψ″/ψ − (ψ′/ψ)²),
 *    then re-weighted pointwise by the gauge-shifted φ (resp. φ̂).  This
 *    is identical to differentiating φ directly for non-winding states
 *    and well-defined for winding ones.
 *  - c̃ is computed in closed form V + 2Q in production: the time-
 *    difference route −V − 2∂_tS − m·v² injects O(dt²) differencing error
 *    into an equation that is itself residual-tested at O(dt²), and the
 *    closed form keeps the two error budgets separate.  Both routes are
 *    exposed side by side in creation_routes() — they agree at O(dt²) on
 *    linear-equation trajectories and split apart on trajectories of the
 *    nonlinear equations, which is a specificity check on the identity.
 *  - Norms follow the shared evaluation-region rule (unmasked across the
 *    window, ρ ≥ 1e−8·max ρ); see hydro_residuals.hpp.
 *
 * The drift-coupled variant (a ≠ 0) is deliberately unsupported: every
 * quantity here assumes a ≡ 0 and DriftUnsupported is raised otherwise.
 */
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "field_io.hpp"
#include "hydro_residuals.hpp"
#include "madelung.hpp"
#include "potential.hpp"
#include "spectral.hpp"
#include "trajectory.hpp"

namespace qwb {

enum class DualityUnits { natural, scaled };

inline const char *duality_units_name(DualityUnits u) {
    return u == DualityUnits::natural ? "natural" : "scaled";
}

struct DualPair {
    RealField phi;     // exp(R̂ + S̄ − gauge), > 0 on unmasked points
    RealField phi_hat; // exp(R̂ − S̄ + gauge), > 0 on unmasked points
    RealField c;       // creation/annihilation term V + 2Q (0 if not given V)
    NodeMask mask;     // carried over from the decomposition
    double drift_a = 0.0;
    double gauge = 0.0; // removed unmasked grid mean of S̄ = S/ℏ
    DualityUnits units = DualityUnits::scaled;
};

struct CreationRoutes {
    RealField closed;  // V + 2Q at the middle snapshot
    RealField direct;  // −V − 2∂_tS − m·v² from central time differences
    double mismatch = 0.0; // ρ-weighted relative L² gap on the eval region
    double dt_used = 0.0;
};

struct DualityResiduals {
    double res_phi = 0.0;     // relative L² residual of the forward equation
    double res_phi_hat = 0.0; // …of the backward equation
    double dt_used = 0.0;
};

namespace detail {

inline void require_no_drift(double a, const char *where) {
    if (a != 0.0)
        throw DriftUnsupported(std::string(where) + ": drift a = " +
                               std::to_string(a) + " (only a = 0 is supported)");
}

inline void require_units(const Grid &g, DualityUnits units, const char *where) {
    if (units == DualityUnits::natural && (g.hbar != 1.0 || g.mass != 1.0))
        throw ConfigError(std::string(where) +
                          ": natural units require hbar = m = 1 (grid has hbar = " +
                          std::to_string(g.hbar) + ", m = " +
                          std::to_string(g.mass) + ")");
}

// Unmasked grid mean of the dimensionless phase S̄ = S/ℏ.
inline double phase_gauge(const RealField &S, const NodeMask &mask) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < S.size(); ++j)
        if (!mask.masked(j)) {
            sum += S[j];
            ++count;
        }
    if (count == 0) throw AllMasked("dual pair: no unmasked points");
    return sum / (static_cast<double>(count) * S.grid.hbar);
}

} // namespace detail

// Closed-form creation/annihilation term c̃ = V + 2Q (energy units; equal
// to the inverse-time c on natural grids).  Masked points carry 0.
inline RealField creation_term(const MadelungFields &mf, const PotentialSpec &V,
                               double a = 0.0) {
    detail::require_no_drift(a, "creation_term");
    const Grid &g = mf.rho.grid;
    RealField c(g, 0.0, mf.rho.time);
    for (std::size_t j = 0; j < g.n; ++j) {
        if (mf.mask.masked(j)) continue;
        c[j] = V.values[j] + 2.0 * mf.Q[j];
    }
    return c;
}

// Map a decomposition to its dual pair.  The overload without a potential
// leaves c ≡ 0 (fill it with creation_term when V is known); the pair
// itself only needs ρ and S.
inline DualPair to_dual(const MadelungFields &mf,
                        DualityUnits units = DualityUnits::scaled) {
    const Grid &g = mf.rho.grid;
    detail::require_units(g, units, "to_dual");
    if (detail::masked_arc_count(mf.mask) >= 2)
        throw NodeContamination("to_dual: density has interior node regions");

    DualPair dp{RealField(g, 0.0, mf.rho.time),
                RealField(g, 0.0, mf.rho.time),
                RealField(g, 0.0, mf.rho.time),
                mf.mask,
                0.0,
                detail::phase_gauge(mf.S, mf.mask), // throws AllMasked
                units};

    for (std::size_t j = 0; j < g.n; ++j) {
        if (mf.mask.masked(j)) continue;
        const double lr = std::log(mf.R[j]);
        const double sp = mf.S[j] / g.hbar - dp.gauge;
        if (std::abs(lr + sp) > 300.0 || std::abs(lr - sp) > 300.0)
            throw Overflow("to_dual: |log R ± (S/hbar − gauge)| > 300 at x = " +
                           std::to_string(g.x(j)));
        dp.phi[j] = std::exp(lr + sp);
        dp.phi_hat[j] = std::exp(lr - sp);
    }
    return dp;
}

inline DualPair to_dual(const MadelungFields &mf, const PotentialSpec &V,
                        double a = 0.0,
                        DualityUnits units = DualityUnits::scaled) {
    detail::require_no_drift(a, "to_dual");
    DualPair dp = to_dual(mf, units);
    dp.c = creation_term(mf, V);
    return dp;
}

// Invert the pair to the wave it encodes:
//   ψ = exp(½log(φφ̂) + i·(½log(φ/φ̂) + gauge)).
// Masked points carry 0 — the pair stores nothing below the node
// threshold.  That zeroed band is a derivative cliff, so spectral
// re-derivation of v or Q from the reconstruction rings at the mask
// boundary; the faithful roundtrip comparisons are pointwise (wave values,
// density φφ̂, action ½ℏ·log(φ/φ̂) + ℏ·gauge), not re-differentiated fields.
inline WaveField from_dual(const DualPair &dp) {
    const Grid &g = dp.phi.grid;
    WaveField psi(g, cplx{0.0, 0.0}, dp.phi.time);
    bool any = false;
    for (std::size_t j = 0; j < g.n; ++j) {
        if (dp.mask.masked(j)) continue;
        if (!(dp.phi[j] > 0.0) || !(dp.phi_hat[j] > 0.0))
            throw ConfigError(
                "from_dual: phi and phi_hat must be positive on unmasked points");
        const double lr = 0.5 * std::log(dp.phi[j] * dp.phi_hat[j]);
        const double sp = 0.5 * std::log(dp.phi[j] / dp.phi_hat[j]) + dp.gauge;
        psi[j] = std::exp(lr) * std::polar(1.0, sp);
        any = true;
    }
    if (!any) throw AllMasked("from_dual: the pair carries no unmasked points");
    return psi;
}

// Both evaluation routes for c̃ at the middle snapshot of a trajectory,
// with their ρ-weighted relative gap.  On a linear-equation trajectory the
// routes agree at O(dt²); on a nonlinear trajectory the closed form keeps
// following V + 2Q while the time-difference form follows the actual phase
// dynamics, and the gap is O(1) — a specificity check that the identity
// really certifies the linear equation.
inline CreationRoutes creation_routes(const Trajectory &traj,
                                      const PotentialSpec &V, double a = 0.0) {
    detail::require_no_drift(a, "creation_routes");
    auto w = detail::central_window(traj);
    const Grid &g = w.mid.rho.grid;
    const double m = g.mass;
    const double t_mid = w.mid.rho.time;
    const NodeMask eval = detail::evaluation_mask(w);

    const RealField dt_S =
        detail::central_time_diff(w.next.S, w.prev.S, w.dt, t_mid);

    CreationRoutes out;
    out.dt_used = w.dt;
    out.closed = RealField(g, 0.0, t_mid);
    out.direct = RealField(g, 0.0, t_mid);
    RealField gap(g, 0.0, t_mid), kin(g, 0.0, t_mid), phase_rate(g, 0.0, t_mid);
    for (std::size_t j = 0; j < g.n; ++j) {
        if (w.union_mask.masked(j)) continue;
        kin[j] = m * w.mid.v[j] * w.mid.v[j];
        phase_rate[j] = 2.0 * dt_S[j];
        out.closed[j] = V.values[j] + 2.0 * w.mid.Q[j];
        out.direct[j] = -V.values[j] - phase_rate[j] - kin[j];
        gap[j] = out.closed[j] - out.direct[j];
    }

    const RealField &rho = w.mid.rho;
    out.mismatch = detail::density_weighted_l2(gap, rho, eval) /
                   detail::residual_scale(
                       {detail::density_weighted_l2(out.closed, rho, eval),
                        detail::density_weighted_l2(out.direct, rho, eval),
                        detail::density_weighted_l2(phase_rate, rho, eval),
                        detail::density_weighted_l2(kin, rho, eval),
                        detail::density_weighted_l2(V.values, rho, eval)});
    return out;
}

// Relative L² residuals of the forward/backward diffusion equations at the
// middle snapshot, evaluated in log form and re-weighted by the
// gauge-shifted φ, φ̂ (see header comment).  The three reported scales are
// the time term, the diffusion term, and the creation term of each
// equation, so a residual of 1e−8 means the equation balances to eight
// digits of its own largest member.
inline DualityResiduals verify_duality(const Trajectory &traj,
                                       const PotentialSpec &V, double a = 0.0,
                                       DualityUnits units = DualityUnits::scaled) {
    detail::require_no_drift(a, "verify_duality");
    auto w = detail::central_window(traj);
    const Grid &g = w.mid.rho.grid;
    detail::require_units(g, units, "verify_duality");
    if (detail::masked_arc_count(w.mid.mask) >= 2)
        throw NodeContamination("verify_duality: density has interior nodes");

    const double hb = g.hbar;
    const double m = g.mass;
    const double h2_2m = hb * hb / (2.0 * m);
    const double t_mid = w.mid.rho.time;
    const NodeMask eval = detail::evaluation_mask(w);

    const RealField dt_rho =
        detail::central_time_diff(w.next.rho, w.prev.rho, w.dt, t_mid);
    const RealField dt_S =
        detail::central_time_diff(w.next.S, w.prev.S, w.dt, t_mid);

    const WaveField &psi = traj.snapshots[w.mid_index];
    const WaveField dpsi = spectral_derivative(psi, 1);
    const WaveField d2psi = spectral_derivative(psi, 2);

    const double gauge = detail::phase_gauge(w.mid.S, w.mid.mask);

    RealField t1p(g, 0.0, t_mid), t2p(g, 0.0, t_mid), t3p(g, 0.0, t_mid);
    RealField t1h(g, 0.0, t_mid), t2h(g, 0.0, t_mid), t3h(g, 0.0, t_mid);
    RealField rp(g, 0.0, t_mid), rh(g, 0.0, t_mid);

    for (std::size_t j = 0; j < g.n; ++j) {
        if (w.mid.mask.masked(j)) continue;
        const double lr = std::log(w.mid.R[j]);
        const double sp = w.mid.S[j] / hb - gauge;
        if (std::abs(lr + sp) > 300.0 || std::abs(lr - sp) > 300.0)
            throw Overflow("verify_duality: |log R ± (S/hbar − gauge)| > 300");
        const double wp = std::exp(lr + sp);
        const double wh = std::exp(lr - sp);

        const cplx lg = dpsi[j] / psi[j];
        const cplx q2 = d2psi[j] / psi[j] - lg * lg;
        const double Rd1 = lg.real(), Sd1 = lg.imag();
        const double Rd2 = q2.real(), Sd2 = q2.imag();

        const double rt = 0.5 * dt_rho[j] / w.mid.rho[j]; // ∂_t R̂ = ½ ∂_tρ/ρ
        const double st = dt_S[j] / hb;                   // ∂_t S̄
        const double ctld = V.values[j] + 2.0 * w.mid.Q[j];

        const double fwd = (Rd1 + Sd1) * (Rd1 + Sd1) + Rd2 + Sd2; // φ″/φ
        const double bwd = (Rd1 - Sd1) * (Rd1 - Sd1) + Rd2 - Sd2; // φ̂″/φ̂

        t1p[j] = hb * (rt + st) * wp;
        t2p[j] = h2_2m * fwd * wp;
        t3p[j] = ctld * wp;
        rp[j] = t1p[j] + t2p[j] + t3p[j];

        t1h[j] = -hb * (rt - st) * wh;
        t2h[j] = h2_2m * bwd * wh;
        t3h[j] = ctld * wh;
        rh[j] = t1h[j] + t2h[j] + t3h[j];
    }

    DualityResiduals out;
    out.dt_used = w.dt;
    out.res_phi = detail::masked_l2(rp, eval) /
                  detail::residual_scale({detail::masked_l2(t1p, eval),
                                          detail::masked_l2(t2p, eval),
                                          detail::masked_l2(t3p, eval)});
    out.res_phi_hat = detail::masked_l2(rh, eval) /
                      detail::residual_scale({detail::masked_l2(t1h, eval),
                                              detail::masked_l2(t2h, eval),
                                              detail::masked_l2(t3h, eval)});
    return out;
}

// ── serialization (replay support) ───────────────────────────────────────────

inline json to_json(const DualPair &dp) {
    json flags = json::array();
    for (bool f : dp.mask.flags) flags.push_back(f ? 1 : 0);
    return json{{"phi", to_json(dp.phi)},
                {"phi_hat", to_json(dp.phi_hat)},
                {"c", to_json(dp.c)},
                {"mask", std::move(flags)},
                {"epsilon_rho", dp.mask.epsilon_rho},
                {"drift_a", dp.drift_a},
                {"gauge", dp.gauge},
                {"units", duality_units_name(dp.units)}};
}

inline DualPair dual_from_json(const json &j) {
    DualPair dp;
    dp.phi = real_from_json(j.at("phi"));
    dp.phi_hat = real_from_json(j.at("phi_hat"));
    dp.c = real_from_json(j.at("c"));
    std::vector<bool> flags;
    for (const auto &f : j.at("mask")) flags.push_back(f.get<int>() != 0);
    if (flags.size() != dp.phi.grid.n)
        throw ConfigError("dual_from_json: mask length mismatch");
    dp.mask = NodeMask(dp.phi.grid, std::move(flags),
                       j.value("epsilon_rho", 0.0));
    dp.drift_a = j.value("drift_a", 0.0);
    dp.gauge = j.value("gauge", 0.0);
    const std::string u = j.value("units", "scaled");
    dp.units = (u == "natural") ? DualityUnits::natural : DualityUnits::scaled;
    return dp;
}

} // namespace qwb
