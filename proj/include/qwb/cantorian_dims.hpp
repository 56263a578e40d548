/*
 * cantorian_dims.hpp — dimension arithmetic for a Cantor-backbone
 * hierarchy, plus a random Cantor-set generator with a box-counting
 * dimension estimator.
 *
 * A backbone set with dimension d₀ ∈ [½,1) generates the bi-infinite
 * hierarchy d⁽ⁿ⁾ = 1/d₀ⁿ⁻¹ (so d⁽¹⁾ = 1 and consecutive levels scale by
 * 1/d₀).  Two averages over the hierarchy,
 *   n̄ = (1+d₀)/(1−d₀)   and   d̄ = 1/(d₀(1−d₀)),
 * differ by (d₀²+d₀−1)/(d₀(1−d₀)) — they coincide exactly when d₀ is the
 * golden mean φ = (√5−1)/2, where both equal d⁽⁴⁾ = 1/φ³ = 4+φ³ ≈ 4.236.
 * The normalization d₀(1−d₀)·d̄ = 1 holds identically, and d̄ attains its
 * minimum 4 at d₀ = ½.  A gamma-integral variant −2/log d₀ of n̄ is
 * reported alongside (it matches n̄ to first order in 1−d₀).  d̄ is a
 * formal symbol, not an expectation of the hierarchy — the arithmetic is
 * implemented as written without that claim.
 *
 * The generator draws x uniform on [0,1] and y uniform on [x,1], keeps
 * [0,x] and [y,1], and recurses on both rescaled pieces; the limiting set
 * has dimension φ almost surely.  Box counting fits log N(ε) against
 * log(1/ε) over dyadic ε, with the window capped before the count
 * saturates at one box per interval and before ε resolves below the
 * typical interval width (past either cap the slope bends away from the
 * fractal regime toward 1).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "field_io.hpp"
#include "stochastic_paths.hpp"

namespace qwb {

// ── types ─────────────────────────────────────────────────────────────────────

inline double golden_mean() { return 0.5 * (std::sqrt(5.0) - 1.0); }

struct CantorBackbone {
    double d0;

    explicit CantorBackbone(double d0_) : d0(d0_) {
        if (!(d0 >= 0.5) || !(d0 < 1.0))
            throw ConfigError(
                "CantorBackbone: dimension must lie in [1/2, 1)");
    }
};

struct IntervalSet {
    std::vector<std::pair<double, double>> intervals; // ordered, interiors disjoint
    int depth = 0;
    std::uint64_t seed = 0;
    std::size_t degenerate_resamples = 0; // cuts redrawn for collapsing a piece
};

struct DimensionAverages {
    double n_avg;       // (1+d₀)/(1−d₀)
    double d_avg;       // 1/(d₀(1−d₀))
    double n_avg_gamma; // −2/log d₀, the gamma-integral variant
};

// Residuals of the golden-mean identities; each should vanish to within a
// few ulps of the quantities involved.
struct GoldenReport {
    double phi;
    double quadratic;  // |φ² + φ − 1|
    double reciprocal; // |1 + φ − 1/φ|
    double cubic;      // |1/φ³ − (2+φ)/φ|  (both equal 3+2φ)
    double average;    // |1/(φ(1−φ)) − (4+φ³)|
    double inverse;    // |4 + φ³ − 1/φ³|
    double ratio;      // |(1+φ)/(1−φ) − 1/φ³|

    double worst() const {
        return std::max({quadratic, reciprocal, cubic, average, inverse, ratio});
    }
};

struct BoxCountFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    std::vector<std::pair<double, std::size_t>> counts; // (ε, N(ε)), ε dyadic
    std::size_t octaves = 0; // log2(ε_max/ε_min) of the fitted window
};

// ── hierarchy arithmetic ──────────────────────────────────────────────────────

// n-th hierarchy dimension 1/d₀ⁿ⁻¹; n may be negative (the hierarchy is
// bi-infinite, shrinking toward the empty set as n → −∞).
inline double cantor_dimension(const CantorBackbone &b, int n) {
    return std::pow(b.d0, -(n - 1));
}

inline DimensionAverages averages(const CantorBackbone &b) {
    const double d0 = b.d0;
    return {(1.0 + d0) / (1.0 - d0), 1.0 / (d0 * (1.0 - d0)),
            -2.0 / std::log(d0)};
}

inline GoldenReport golden_identities() {
    const double phi = golden_mean();
    GoldenReport r;
    r.phi = phi;
    r.quadratic = std::abs(phi * phi + phi - 1.0);
    r.reciprocal = std::abs(1.0 + phi - 1.0 / phi);
    r.cubic = std::abs(1.0 / (phi * phi * phi) - (2.0 + phi) / phi);
    r.average = std::abs(1.0 / (phi * (1.0 - phi)) -
                         (4.0 + phi * phi * phi));
    r.inverse = std::abs(4.0 + phi * phi * phi -
                         1.0 / (phi * phi * phi));
    r.ratio = std::abs((1.0 + phi) / (1.0 - phi) -
                       1.0 / (phi * phi * phi));
    return r;
}

// ── random Cantor construction ────────────────────────────────────────────────

namespace detail {

// A cut rule maps a RNG stream to the pair (x, y), 0 < x ≤ y < 1: the
// children of [a,b] are the rescaled [0,x] and [y,1].
using CutRule =
    std::function<std::pair<double, double>(std::uint64_t &)>;

inline IntervalSet build_interval_set(std::uint64_t seed, int depth,
                                      const CutRule &rule) {
    if (depth < 8 || depth > 20)
        throw ConfigError("interval set depth must lie in [8, 20]");
    IntervalSet set;
    set.depth = depth;
    set.seed = seed;
    std::uint64_t rng = path_stream(seed, 0);
    set.intervals.push_back({0.0, 1.0});
    std::vector<std::pair<double, double>> next;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int level = 0; level < depth; ++level) {
        // a kept piece must survive all remaining splits, so its width may
        // not drop below machine width times 4^(splits still to come):
        // the factor 4 per level keeps the feasible cut region at least
        // half the unit square, so resampling succeeds quickly even for
        // pieces riding their floor
        const double floor_w =
            eps * std::ldexp(1.0, 2 * (depth - level - 1));
        next.clear();
        next.reserve(2 * set.intervals.size());
        for (const auto &[a, b] : set.intervals) {
            const double w = b - a;
            double r1 = 0.0, l2 = 0.0;
            bool ok = false;
            for (int attempt = 0; attempt < 256; ++attempt) {
                const auto [x, y] = rule(rng);
                // evaluate in stored coordinates so endpoint rounding
                // cannot sneak a collapsed piece through
                r1 = a + x * w;
                l2 = a + y * w;
                if (r1 - a > floor_w && b - l2 > floor_w && l2 >= r1) {
                    ok = true;
                    break;
                }
                ++set.degenerate_resamples;
            }
            if (!ok)
                throw DegenerateInterval(
                    "random_cantor: kept interval collapsed below machine "
                    "width and resampling did not recover");
            next.push_back({a, r1});
            next.push_back({l2, b});
        }
        set.intervals.swap(next);
    }
    return set;
}

} // namespace detail

// Random recursive construction: x ~ U[0,1], y ~ U[x,1]; keep [0,x] and
// [y,1] rescaled into each parent.  The limit set has dimension φ a.s.
inline IntervalSet random_cantor(std::uint64_t seed, int depth) {
    return detail::build_interval_set(
        seed, depth, [](std::uint64_t &rng) {
            const double x = detail::uniform01(rng);
            const double y = x + (1.0 - x) * detail::uniform01(rng);
            return std::pair<double, double>{x, y};
        });
}

// Deterministic validation variants for the estimator.
inline IntervalSet middle_thirds_set(int depth) {
    return detail::build_interval_set(0, depth, [](std::uint64_t &) {
        return std::pair<double, double>{1.0 / 3.0, 2.0 / 3.0};
    });
}

inline IntervalSet full_interval_set(int depth) {
    // cut at the midpoint with no gap: the union stays [0,1]
    return detail::build_interval_set(0, depth, [](std::uint64_t &) {
        return std::pair<double, double>{0.5, 0.5};
    });
}

// ── box-counting dimension ────────────────────────────────────────────────────

inline BoxCountFit box_dimension(const IntervalSet &set) {
    if (set.intervals.empty())
        throw ConfigError("box_dimension: empty interval set");

    // dyadic grid counts: number of boxes [i·ε, (i+1)·ε) touched by the
    // union (intervals are ordered, so one sweep with a last-box cursor
    // avoids double counting)
    auto count_boxes = [&](int k) {
        const double inv_eps = std::ldexp(1.0, k); // 1/ε = 2^k
        const long long top = (1ll << k) - 1;
        long long last = -1;
        std::size_t n = 0;
        for (const auto &[a, b] : set.intervals) {
            long long i0 = static_cast<long long>(std::floor(a * inv_eps));
            long long i1 = static_cast<long long>(std::floor(b * inv_eps));
            i0 = std::clamp(i0, 0ll, top);
            i1 = std::clamp(i1, 0ll, top);
            i0 = std::max(i0, last + 1);
            if (i1 >= i0) {
                n += static_cast<std::size_t>(i1 - i0 + 1);
                last = i1;
            }
        }
        return n;
    };

    // fit window: start at ε = 1/4; stop before the count saturates (half
    // the intervals resolved) or ε drops below the typical (geometric
    // mean) interval width — beyond either the slope leaves the fractal
    // regime and bends toward 1
    double log_w = 0.0;
    for (const auto &[a, b] : set.intervals) log_w += std::log2(b - a);
    log_w /= static_cast<double>(set.intervals.size());
    const int k_width = static_cast<int>(std::floor(-log_w));
    const double saturation =
        0.5 * static_cast<double>(set.intervals.size());

    BoxCountFit fit;
    const int k_lo = 2;
    for (int k = k_lo; k <= std::min(k_width, 40); ++k) {
        const std::size_t n = count_boxes(k);
        if (static_cast<double>(n) > saturation && k > k_lo) break;
        fit.counts.push_back({std::ldexp(1.0, -k), n});
    }
    if (fit.counts.size() < 5)
        throw ConfigError(
            "box_dimension: fewer than 4 octaves available before the "
            "count saturates");
    fit.octaves = fit.counts.size() - 1;

    // least squares of log N against log(1/ε)
    const std::size_t m = fit.counts.size();
    std::vector<double> xs(m), ys(m);
    for (std::size_t i = 0; i < m; ++i) {
        xs[i] = std::log(1.0 / fit.counts[i].first);
        ys[i] = std::log(static_cast<double>(fit.counts[i].second));
    }
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= static_cast<double>(m);
    ybar /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    fit.slope = sxy / sxx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ys[i] - ybar - fit.slope * (xs[i] - xbar);
        ss_res += r * r;
    }
    fit.stderr_slope =
        m > 2 ? std::sqrt(ss_res / static_cast<double>(m - 2) / sxx) : 0.0;
    return fit;
}

// ── external interface ────────────────────────────────────────────────────────

// (ε, count) pairs for external replotting.
inline void write_box_counts_csv(const BoxCountFit &fit,
                                 const std::string &path) {
    std::ofstream out(path);
    if (!out) throw Error("write_box_counts_csv: cannot open " + path);
    out << "epsilon,count\n";
    for (const auto &[eps, n] : fit.counts)
        out << fmt_double(eps) << ',' << n << '\n';
    if (!out) throw Error("write_box_counts_csv: write failed for " + path);
}

} // namespace qwb
