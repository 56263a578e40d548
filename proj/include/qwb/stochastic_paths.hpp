/*
 * stochastic_paths.hpp — trajectory ensembles over an evolved wave field:
 * deterministic guidance-equation paths and forward/backward diffusion
 * ensembles, with drift estimation back out of the sample paths.
 *
 * Guidance paths follow dx/dt = v(x,t) = (ℏ/m)·Im(ψ′/ψ), integrated with
 * classical RK4 on velocity fields interpolated linearly in space and time
 * between snapshots.  Initializing from ρ = |ψ(t0)|² makes the ensemble
 * equivariant: the position histogram tracks |ψ(t)|² for all later times.
 *
 * Diffusion ensembles follow the Euler–Maruyama discretization of
 *   dx = b₊(x,t)·dt + dξ,   ⟨dξ²⟩ = 2D·dt,   b₊ = v + (D/D_grid)·u,
 * whose Fokker–Planck equation ∂ρ + div(ρb₊) = DΔρ reduces to the wave
 * continuity equation for every D (the osmotic term div(ρ·D∇log ρ) cancels
 * DΔρ identically) — so the marginals stay |ψ(t)|² for any diffusion
 * strength, ℏ/2m being the canonical choice.  The backward ensemble (mean
 * backward drift b₋ = v − u) is simulated as the reversed-time forward
 * process: y(s) with drift β = (D/D_grid)·u − v at physical time t = T−s
 * has exactly the law whose backward conditional increments average to b₋,
 * and its marginals again track |ψ(t)|².  Slices are stored in physical
 * time order either way.
 *
 * Drift estimation bins conditional increments on a coarse grid (bin width
 * 4·dx): forward increments conditioned on their start point estimate b₊,
 * backward increments conditioned on their end point estimate b₋, and
 *   v̂ = ½(b̂₊ + b̂₋),   û = ½(b̂₊ − b̂₋)
 * recover the current and osmotic velocities, with û expected to match
 * D·(log ρ)′ on well-populated bins.  The complex combination v̂ − iû
 * estimates the complex velocity −2iD·(log ψ)′.  Bins with fewer than 20
 * samples in either direction are reported with zeroed estimates, never
 * errored.
 *
 * Randomness is counter-based: every path derives its own splitmix64
 * stream from (seed, path index), so results are bit-reproducible and
 * independent of evaluation order.  Normals come from Box–Muller.
 *
 * Node handling: masked cells (ρ below the node threshold) carry the
 * velocity of the nearest unmasked point; a path that steps into a masked
 * arc is reflected off the entry edge, and if it still ends masked the
 * position stands and a consecutive-steps counter runs — more than 10
 * consecutive masked steps raises NodeTrap.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "field_io.hpp"
#include "grid.hpp"
#include "madelung.hpp"
#include "trajectory.hpp"

namespace qwb {

// ── types ─────────────────────────────────────────────────────────────────────

enum class PathKind { bohm, nelson_forward, nelson_backward };

inline const char *path_kind_name(PathKind k) {
    switch (k) {
        case PathKind::bohm: return "bohm";
        case PathKind::nelson_forward: return "nelson_forward";
        case PathKind::nelson_backward: return "nelson_backward";
    }
    return "?";
}

// How an ensemble is seeded and how finely it integrates: `substeps`
// integrator steps per stored snapshot interval.
struct SampleSpec {
    std::uint64_t seed = 1;
    std::size_t substeps = 1;
};

struct PathEnsemble {
    Grid grid;
    std::size_t n_paths = 0;
    std::size_t n_times = 0;
    std::vector<double> positions; // row-major: [path * n_times + slice]
    std::uint64_t seed = 0;
    double dt = 0.0;          // spacing between stored slices
    double t0 = 0.0;          // physical time of slice 0
    double diffusion_d = 0.0; // D of the process (0 for deterministic paths)
    PathKind kind = PathKind::bohm;

    double at(std::size_t path, std::size_t slice) const {
        return positions[path * n_times + slice];
    }
    double &at(std::size_t path, std::size_t slice) {
        return positions[path * n_times + slice];
    }
    // All path positions at one stored time.
    std::vector<double> slice(std::size_t k) const {
        std::vector<double> s(n_paths);
        for (std::size_t i = 0; i < n_paths; ++i) s[i] = at(i, k);
        return s;
    }
};

// Binned drift estimates on the coarse bin grid (bin width 4·dx; the field
// coordinates are bin centers).  `ci_width` is the 95% half-width for
// v_est and u_est; b_plus/b_minus carry √2 of it.  counts[b] is the
// smaller of the two directional sample counts in bin b; bins with
// counts < 20 have all estimates zeroed.
struct DriftEstimate {
    RealField b_plus;
    RealField b_minus;
    RealField v_est;
    RealField u_est;
    RealField ci_width;
    std::vector<std::size_t> counts;

    bool populated(std::size_t b) const { return counts[b] >= 20; }
};

// ── counter-based randomness ──────────────────────────────────────────────────

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t &state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Independent stream for one path: mix the path index into the seed so
// streams are reproducible regardless of evaluation order or chunking.
inline std::uint64_t path_stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0xbf58476d1ce4e5b9ull * (index + 1));
    splitmix64(s); // one warm-up round decorrelates nearby indices
    return s;
}

// Uniform on (0,1): 53 random bits, shifted off zero.
inline double uniform01(std::uint64_t &state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 +
           0x1.0p-54;
}

// Standard normal via Box–Muller (two uniforms per draw, no caching, so
// the stream position is a pure function of the draw count).
inline double standard_normal(std::uint64_t &state) {
    const double u1 = uniform01(state);
    const double u2 = uniform01(state);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * M_PI * u2);
}

// ── sampling and geometry ─────────────────────────────────────────────────────

// Inverse-CDF sampler on the grid: each grid value owns the cell centered
// on its point (midpoint convention, O(dx²) faithful to the continuum
// density), so the CDF is piecewise linear and inversion is exact.
struct GridSampler {
    const Grid grid;
    std::vector<double> cdf; // length n+1, cdf[0] = 0, cdf[n] = 1

    explicit GridSampler(const RealField &rho) : grid(rho.grid) {
        cdf.resize(grid.n + 1);
        cdf[0] = 0.0;
        for (std::size_t j = 0; j < grid.n; ++j)
            cdf[j + 1] = cdf[j] + std::max(rho[j], 0.0);
        const double total = cdf[grid.n];
        if (!(total > 0.0))
            throw ConfigError("GridSampler: density has no mass to sample");
        for (auto &c : cdf) c /= total;
    }

    double draw(std::uint64_t &state) const {
        const double u = uniform01(state);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t j =
            std::min(static_cast<std::size_t>(it - cdf.begin() - 1),
                     grid.n - 1);
        const double span = cdf[j + 1] - cdf[j];
        const double frac = span > 0.0 ? (u - cdf[j]) / span : 0.5;
        const double x =
            grid.x0 + (static_cast<double>(j) + frac - 0.5) * grid.dx();
        return grid.x0 + std::fmod(x - grid.x0 + grid.length, grid.length);
    }
};

inline double wrap_position(const Grid &g, double x) {
    const double r = std::fmod(x - g.x0, g.length);
    return g.x0 + (r < 0.0 ? r + g.length : r);
}

// Shortest signed displacement a→b on the ring.
inline double min_image(const Grid &g, double a, double b) {
    double d = std::fmod(b - a, g.length);
    if (d < -0.5 * g.length) d += g.length;
    if (d >= 0.5 * g.length) d -= g.length;
    return d;
}

// Cell whose left edge is grid point j.
inline std::size_t cell_of(const Grid &g, double x) {
    const double f = (wrap_position(g, x) - g.x0) / g.dx();
    const auto j = static_cast<std::size_t>(f);
    return j >= g.n ? g.n - 1 : j;
}

// ── interpolated drift fields along a trajectory ──────────────────────────────

// Per-snapshot current (v) and osmotic (u) tables with masked entries
// filled from the nearest unmasked point, plus the raw masks for node
// bookkeeping.  Evaluation interpolates linearly in space and in time.
struct FlowTable {
    Grid grid;
    double t0 = 0.0;
    double snapshot_dt = 0.0;
    std::vector<std::vector<double>> v; // [snapshot][point], extended
    std::vector<std::vector<double>> u;
    std::vector<NodeMask> masks;

    explicit FlowTable(const Trajectory &traj)
        : grid(traj.initial().grid),
          t0(traj.initial().time),
          snapshot_dt(traj.snapshot_dt) {
        const std::size_t m = traj.size();
        v.reserve(m);
        u.reserve(m);
        masks.reserve(m);
        for (std::size_t i = 0; i < m; ++i) {
            const MadelungFields mf = decompose(traj.snapshots[i]);
            v.push_back(extend(mf.v, mf.mask));
            u.push_back(extend(mf.u, mf.mask));
            masks.push_back(mf.mask);
        }
    }

    // Fill masked entries with the nearest unmasked value (ties resolve to
    // the left); periodic distance.
    static std::vector<double> extend(const RealField &f,
                                      const NodeMask &mask) {
        const std::size_t n = f.size();
        std::vector<double> out(n);
        for (std::size_t j = 0; j < n; ++j) {
            if (!mask.masked(j)) {
                out[j] = f[j];
                continue;
            }
            for (std::size_t d = 1; d <= n; ++d) {
                const std::size_t left = (j + n - (d % n)) % n;
                const std::size_t right = (j + d) % n;
                if (!mask.masked(left)) {
                    out[j] = f[left];
                    break;
                }
                if (!mask.masked(right)) {
                    out[j] = f[right];
                    break;
                }
            }
        }
        return out;
    }

    std::size_t last_interval() const { return v.size() - 2; }

    // Linear interpolation of one snapshot's table at position x.
    double space_lerp(const std::vector<double> &tab, double x) const {
        const double f = (wrap_position(grid, x) - grid.x0) / grid.dx();
        std::size_t j = static_cast<std::size_t>(f);
        if (j >= grid.n) j = grid.n - 1;
        const double w = f - static_cast<double>(j);
        const std::size_t k = (j + 1) % grid.n;
        return (1.0 - w) * tab[j] + w * tab[k];
    }

    // θ ∈ [0,1] across snapshot interval i → i+1.
    double current(double x, std::size_t i, double theta) const {
        return (1.0 - theta) * space_lerp(v[i], x) +
               theta * space_lerp(v[i + 1], x);
    }
    double osmotic(double x, std::size_t i, double theta) const {
        return (1.0 - theta) * space_lerp(u[i], x) +
               theta * space_lerp(u[i + 1], x);
    }

    bool masked_at(std::size_t snapshot, double x) const {
        return masks[snapshot].masked(cell_of(grid, x));
    }
};

// Apply the node policy to a proposed move x_old → x_new within snapshot
// interval i (mask of the interval's left snapshot).  Returns the settled
// position; bumps `trapped` when it ends masked, resets it otherwise.
inline double settle_step(const FlowTable &flow, std::size_t snapshot,
                          double x_old, double x_new, int &trapped) {
    const Grid &g = flow.grid;
    x_new = wrap_position(g, x_new);
    if (!flow.masked_at(snapshot, x_new)) {
        trapped = 0;
        return x_new;
    }
    if (!flow.masked_at(snapshot, x_old)) {
        // entered a masked arc: reflect off the edge it came through
        const NodeMask &mask = flow.masks[snapshot];
        const double step = min_image(g, x_old, x_new);
        std::size_t c = cell_of(g, x_new);
        double edge;
        if (step >= 0.0) { // entered from the left: find the arc's left edge
            while (mask.masked((c + g.n - 1) % g.n)) c = (c + g.n - 1) % g.n;
            edge = g.x0 + static_cast<double>(c) * g.dx();
        } else { // entered from the right: the arc's right edge
            while (mask.masked((c + 1) % g.n)) c = (c + 1) % g.n;
            edge = g.x0 + static_cast<double>(c + 1) * g.dx();
        }
        const double reflected =
            wrap_position(g, 2.0 * edge - wrap_position(g, x_new));
        if (!flow.masked_at(snapshot, reflected)) {
            trapped = 0;
            return reflected;
        }
    }
    if (++trapped > 10)
        throw NodeTrap("path spent more than 10 consecutive steps inside a "
                       "masked node region");
    return x_new;
}

} // namespace detail

// ── guidance-equation paths ───────────────────────────────────────────────────

// Integrate dx/dt = v(x,t) for n_paths initial points sampled from
// |ψ(·,t0)|², storing positions at every snapshot time.
inline PathEnsemble bohm_trajectories(const Trajectory &traj,
                                      const SampleSpec &spec,
                                      std::size_t n_paths) {
    if (traj.size() < 2)
        throw InsufficientSnapshots(
            "bohm_trajectories: need at least 2 snapshots to integrate");
    if (n_paths == 0)
        throw ConfigError("bohm_trajectories: n_paths must be positive");
    if (spec.substeps == 0)
        throw ConfigError("bohm_trajectories: substeps must be positive");

    const detail::FlowTable flow(traj);
    const detail::GridSampler sampler(traj.initial().density());
    const Grid &g = flow.grid;
    const std::size_t n_times = traj.size();
    const double h = flow.snapshot_dt / static_cast<double>(spec.substeps);

    PathEnsemble ens;
    ens.grid = g;
    ens.n_paths = n_paths;
    ens.n_times = n_times;
    ens.positions.resize(n_paths * n_times);
    ens.seed = spec.seed;
    ens.dt = flow.snapshot_dt;
    ens.t0 = flow.t0;
    ens.diffusion_d = 0.0;
    ens.kind = PathKind::bohm;

    for (std::size_t i = 0; i < n_paths; ++i) {
        std::uint64_t rng = detail::path_stream(spec.seed, i);
        double x = sampler.draw(rng);
        ens.at(i, 0) = x;
        int trapped = 0;
        for (std::size_t s = 0; s + 1 < n_times; ++s) {
            for (std::size_t sub = 0; sub < spec.substeps; ++sub) {
                const double th0 =
                    static_cast<double>(sub) / static_cast<double>(spec.substeps);
                const double half = 0.5 / static_cast<double>(spec.substeps);
                const double k1 = flow.current(x, s, th0);
                const double k2 = flow.current(x + 0.5 * h * k1, s, th0 + half);
                const double k3 = flow.current(x + 0.5 * h * k2, s, th0 + half);
                const double k4 =
                    flow.current(x + h * k3, s, th0 + 2.0 * half);
                const double x_new =
                    x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                if (!std::isfinite(x_new))
                    throw NonFinite("bohm_trajectories: path diverged");
                x = detail::settle_step(flow, s, x, x_new, trapped);
            }
            ens.at(i, s + 1) = x;
        }
    }
    return ens;
}

// ── diffusion ensembles ───────────────────────────────────────────────────────

// Euler–Maruyama ensemble with forward drift v + (D/D_grid)·u, or the
// reversed-time realization of the backward process (drift b₋ = v − u in
// the mean-backward-derivative sense).  D = 0 requests the grid's ℏ/2m.
inline PathEnsemble nelson_ensemble(const Trajectory &traj, double D,
                                    std::size_t n_paths, PathKind direction,
                                    const SampleSpec &spec = {}) {
    if (direction == PathKind::bohm)
        throw ConfigError(
            "nelson_ensemble: direction must be nelson_forward or "
            "nelson_backward");
    if (D < 0.0)
        throw ConfigError("nelson_ensemble: diffusion must be nonnegative");
    if (traj.size() < 2)
        throw InsufficientSnapshots(
            "nelson_ensemble: need at least 2 snapshots to integrate");
    if (n_paths == 0)
        throw ConfigError("nelson_ensemble: n_paths must be positive");
    if (spec.substeps == 0)
        throw ConfigError("nelson_ensemble: substeps must be positive");

    const detail::FlowTable flow(traj);
    const Grid &g = flow.grid;
    if (D == 0.0) D = g.diffusion();
    const double osmotic_scale = D / g.diffusion();
    const bool forward = direction == PathKind::nelson_forward;
    const std::size_t n_times = traj.size();
    const double h = flow.snapshot_dt / static_cast<double>(spec.substeps);
    const double noise = std::sqrt(2.0 * D * h);

    const detail::GridSampler sampler(
        forward ? traj.initial().density() : traj.final().density());

    PathEnsemble ens;
    ens.grid = g;
    ens.n_paths = n_paths;
    ens.n_times = n_times;
    ens.positions.resize(n_paths * n_times);
    ens.seed = spec.seed;
    ens.dt = flow.snapshot_dt;
    ens.t0 = flow.t0;
    ens.diffusion_d = D;
    ens.kind = direction;

    for (std::size_t i = 0; i < n_paths; ++i) {
        std::uint64_t rng = detail::path_stream(spec.seed, i);
        double x = sampler.draw(rng);
        int trapped = 0;
        if (forward) {
            ens.at(i, 0) = x;
            for (std::size_t s = 0; s + 1 < n_times; ++s) {
                for (std::size_t sub = 0; sub < spec.substeps; ++sub) {
                    const double th = static_cast<double>(sub) /
                                      static_cast<double>(spec.substeps);
                    const double drift =
                        flow.current(x, s, th) +
                        osmotic_scale * flow.osmotic(x, s, th);
                    const double x_new =
                        x + drift * h + noise * detail::standard_normal(rng);
                    if (!std::isfinite(x_new))
                        throw NonFinite("nelson_ensemble: path diverged");
                    x = detail::settle_step(flow, s, x, x_new, trapped);
                }
                ens.at(i, s + 1) = x;
            }
        } else {
            // march s = n_times-1 → 0 with drift (D/D_g)·u − v; slices land
            // in physical order
            ens.at(i, n_times - 1) = x;
            for (std::size_t s = n_times - 1; s > 0; --s) {
                for (std::size_t sub = 0; sub < spec.substeps; ++sub) {
                    const double th = 1.0 - static_cast<double>(sub) /
                                                static_cast<double>(spec.substeps);
                    const double drift =
                        osmotic_scale * flow.osmotic(x, s - 1, th) -
                        flow.current(x, s - 1, th);
                    const double x_new =
                        x + drift * h + noise * detail::standard_normal(rng);
                    if (!std::isfinite(x_new))
                        throw NonFinite("nelson_ensemble: path diverged");
                    x = detail::settle_step(flow, s - 1, x, x_new, trapped);
                }
                ens.at(i, s - 1) = x;
            }
        }
    }
    return ens;
}

// ── drift estimation ──────────────────────────────────────────────────────────

// Recover b₊, b₋, v, u from a paired forward/backward ensemble by binned
// conditional increments.  Forward increments condition on their start
// point; backward increments on their end point (the later time), which is
// exactly the mean-backward-derivative conditioning.
inline DriftEstimate estimate_drifts(const PathEnsemble &fwd,
                                     const PathEnsemble &bwd) {
    if (fwd.kind != PathKind::nelson_forward ||
        bwd.kind != PathKind::nelson_backward)
        throw ConfigError(
            "estimate_drifts: expects a (nelson_forward, nelson_backward) "
            "pair");
    const Grid &g = fwd.grid;
    if (bwd.grid.n != g.n || bwd.grid.x0 != g.x0 ||
        bwd.grid.length != g.length)
        throw ConfigError("estimate_drifts: ensembles live on different boxes");
    if (fwd.dt != bwd.dt || fwd.n_times != bwd.n_times)
        throw ConfigError(
            "estimate_drifts: ensembles sampled on different time lattices");
    if (fwd.n_paths < 100 || bwd.n_paths < 100)
        throw ConfigError(
            "estimate_drifts: statistical estimates need at least 100 paths");
    if (g.n % 4 != 0)
        throw ConfigError(
            "estimate_drifts: grid size must be divisible by the bin width "
            "(4 cells)");

    const std::size_t nb = g.n / 4;
    const double bin_w = 4.0 * g.dx();
    // bins partition the box; the bin grid's coordinates are bin centers
    const Grid bins(nb, g.x0 + 0.5 * bin_w, g.length, g.hbar, g.mass);

    struct Acc {
        double sum = 0.0, sumsq = 0.0;
        std::size_t n = 0;
        void add(double v) {
            sum += v;
            sumsq += v * v;
            ++n;
        }
        double mean() const { return sum / static_cast<double>(n); }
        double sem() const { // standard error of the mean
            if (n < 2) return 0.0;
            const double m = mean();
            const double var =
                (sumsq - static_cast<double>(n) * m * m) /
                static_cast<double>(n - 1);
            return std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
        }
    };
    std::vector<Acc> plus(nb), minus(nb);

    auto bin_of = [&](double x) {
        const std::size_t b = detail::cell_of(g, x) / 4;
        return b >= nb ? nb - 1 : b;
    };

    for (std::size_t i = 0; i < fwd.n_paths; ++i)
        for (std::size_t k = 0; k + 1 < fwd.n_times; ++k) {
            const double x = fwd.at(i, k);
            plus[bin_of(x)].add(detail::min_image(g, x, fwd.at(i, k + 1)));
        }
    for (std::size_t i = 0; i < bwd.n_paths; ++i)
        for (std::size_t k = 1; k < bwd.n_times; ++k) {
            const double x = bwd.at(i, k);
            minus[bin_of(x)].add(detail::min_image(g, bwd.at(i, k - 1), x));
        }

    DriftEstimate est;
    est.b_plus = RealField(bins, 0.0);
    est.b_minus = RealField(bins, 0.0);
    est.v_est = RealField(bins, 0.0);
    est.u_est = RealField(bins, 0.0);
    est.ci_width = RealField(bins, 0.0);
    est.counts.resize(nb);

    const double dt = fwd.dt;
    for (std::size_t b = 0; b < nb; ++b) {
        est.counts[b] = std::min(plus[b].n, minus[b].n);
        if (est.counts[b] < 20) continue; // underpopulated: reported, zeroed
        const double bp = plus[b].mean() / dt;
        const double bm = minus[b].mean() / dt;
        est.b_plus[b] = bp;
        est.b_minus[b] = bm;
        est.v_est[b] = 0.5 * (bp + bm);
        est.u_est[b] = 0.5 * (bp - bm);
        const double se_p = plus[b].sem() / dt;
        const double se_m = minus[b].sem() / dt;
        est.ci_width[b] =
            1.96 * 0.5 * std::sqrt(se_p * se_p + se_m * se_m);
    }
    return est;
}

// ── goodness of fit ───────────────────────────────────────────────────────────

// Kolmogorov–Smirnov distance between a position sample and the model
// density on the grid (piecewise-linear CDF on cells centered at the grid
// points — the same midpoint convention the sampler uses).
inline double kolmogorov_smirnov(std::vector<double> sample,
                                 const RealField &rho) {
    if (sample.empty())
        throw ConfigError("kolmogorov_smirnov: empty sample");
    const Grid &g = rho.grid;
    std::vector<double> cdf(g.n + 1, 0.0);
    for (std::size_t j = 0; j < g.n; ++j)
        cdf[j + 1] = cdf[j] + std::max(rho[j], 0.0);
    const double total = cdf[g.n];
    if (!(total > 0.0))
        throw ConfigError("kolmogorov_smirnov: model density has no mass");
    for (auto &c : cdf) c /= total;

    // work in the coordinate measured from the first cell's left edge so
    // the sample ordering and the model CDF share the same circular cut
    const double lo = g.x0 - 0.5 * g.dx();
    for (auto &x : sample) {
        x = std::fmod(x - lo, g.length);
        if (x < 0.0) x += g.length;
    }
    auto model_cdf = [&](double y) {
        const double f = y / g.dx();
        std::size_t j = static_cast<std::size_t>(f);
        if (j >= g.n) j = g.n - 1;
        const double w = f - static_cast<double>(j);
        return cdf[j] + w * (cdf[j + 1] - cdf[j]);
    };

    std::sort(sample.begin(), sample.end());
    const double N = static_cast<double>(sample.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double F = model_cdf(sample[i]);
        worst = std::max(worst, std::abs((static_cast<double>(i) + 1.0) / N - F));
        worst = std::max(worst, std::abs(F - static_cast<double>(i) / N));
    }
    return worst;
}

// ── serialization ─────────────────────────────────────────────────────────────

namespace detail {

template <typename T>
void put_raw(std::ofstream &out, const T &v) {
    out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}
template <typename T>
T get_raw(std::ifstream &in, const char *who) {
    T v;
    in.read(reinterpret_cast<char *>(&v), sizeof(T));
    if (!in) throw Error(std::string(who) + ": truncated ensemble file");
    return v;
}

} // namespace detail

// Compact binary layout: magic "QWBPE001", then the header (n_paths,
// n_times, dt, seed, followed by kind/diffusion/t0 and the box), then the
// row-major position matrix.  Native endianness; bit-exact round trip.
inline void save_ensemble(const PathEnsemble &ens, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("save_ensemble: cannot open " + path);
    out.write("QWBPE001", 8);
    detail::put_raw(out, static_cast<std::uint64_t>(ens.n_paths));
    detail::put_raw(out, static_cast<std::uint64_t>(ens.n_times));
    detail::put_raw(out, ens.dt);
    detail::put_raw(out, ens.seed);
    detail::put_raw(out, static_cast<std::uint8_t>(ens.kind));
    detail::put_raw(out, ens.diffusion_d);
    detail::put_raw(out, ens.t0);
    detail::put_raw(out, static_cast<std::uint64_t>(ens.grid.n));
    detail::put_raw(out, ens.grid.x0);
    detail::put_raw(out, ens.grid.length);
    detail::put_raw(out, ens.grid.hbar);
    detail::put_raw(out, ens.grid.mass);
    out.write(reinterpret_cast<const char *>(ens.positions.data()),
              static_cast<std::streamsize>(ens.positions.size() *
                                           sizeof(double)));
    if (!out) throw Error("save_ensemble: write failed for " + path);
}

inline PathEnsemble load_ensemble(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("load_ensemble: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "QWBPE001", 8) != 0)
        throw Error("load_ensemble: " + path + " is not an ensemble file");
    PathEnsemble ens;
    ens.n_paths = detail::get_raw<std::uint64_t>(in, "load_ensemble");
    ens.n_times = detail::get_raw<std::uint64_t>(in, "load_ensemble");
    ens.dt = detail::get_raw<double>(in, "load_ensemble");
    ens.seed = detail::get_raw<std::uint64_t>(in, "load_ensemble");
    ens.kind =
        static_cast<PathKind>(detail::get_raw<std::uint8_t>(in, "load_ensemble"));
    ens.diffusion_d = detail::get_raw<double>(in, "load_ensemble");
    ens.t0 = detail::get_raw<double>(in, "load_ensemble");
    const auto n = detail::get_raw<std::uint64_t>(in, "load_ensemble");
    const auto x0 = detail::get_raw<double>(in, "load_ensemble");
    const auto length = detail::get_raw<double>(in, "load_ensemble");
    const auto hbar = detail::get_raw<double>(in, "load_ensemble");
    const auto mass = detail::get_raw<double>(in, "load_ensemble");
    ens.grid = Grid(n, x0, length, hbar, mass);
    ens.positions.resize(ens.n_paths * ens.n_times);
    in.read(reinterpret_cast<char *>(ens.positions.data()),
            static_cast<std::streamsize>(ens.positions.size() *
                                         sizeof(double)));
    if (!in) throw Error("load_ensemble: truncated ensemble file");
    return ens;
}

// Long-format CSV for small runs: one row per (path, stored time).
inline void export_ensemble_csv(const PathEnsemble &ens,
                                const std::string &path) {
    std::ofstream out(path);
    if (!out) throw Error("export_ensemble_csv: cannot open " + path);
    out << "path,time,position\n";
    for (std::size_t i = 0; i < ens.n_paths; ++i)
        for (std::size_t k = 0; k < ens.n_times; ++k)
            out << i << ',' << fmt_double(ens.t0 + static_cast<double>(k) * ens.dt)
                << ',' << fmt_double(ens.at(i, k)) << '\n';
    if (!out) throw Error("export_ensemble_csv: write failed for " + path);
}

} // namespace qwb
