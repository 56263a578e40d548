/*
 * test_fields.cpp — grid/field substrate: spectral derivatives, quadrature,
 * phase unwrapping, node masking, and CSV/JSON round-trips.
 */
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>

#include "qwb/errors.hpp"
#include "qwb/field.hpp"
#include "qwb/field_io.hpp"
#include "qwb/grid.hpp"
#include "qwb/phase.hpp"
#include "qwb/spectral.hpp"

#include "test_helpers.hpp"

using namespace qwb;
using qwb::testing::gaussian_packet;
using qwb::testing::random_bandlimited;
using qwb::testing::random_wave;

TEST_CASE("grid invariants are enforced at construction") {
    CHECK_THROWS_AS(Grid(17, 0.0, 1.0), std::invalid_argument);  // not a power of two
    CHECK_THROWS_AS(Grid(8, 0.0, 1.0), std::invalid_argument);   // below 16
    CHECK_THROWS_AS(Grid(64, 0.0, -1.0), std::invalid_argument); // length ≤ 0
    CHECK_THROWS_AS(Grid(64, 0.0, 1.0, 0.0), std::invalid_argument);  // ℏ ≤ 0
    CHECK_THROWS_AS(Grid(64, 0.0, 1.0, 1.0, -2.0), std::invalid_argument); // m ≤ 0

    Grid g(64, -5.0, 10.0);
    CHECK(g.dx() == Catch::Approx(10.0 / 64.0));
    CHECK(g.x(0) == -5.0);
    CHECK(g.diffusion() == Catch::Approx(0.5));
    CHECK(g.wavenumber(1) == Catch::Approx(2.0 * M_PI / 10.0));
    CHECK(g.wavenumber(63) == Catch::Approx(-2.0 * M_PI / 10.0));
    CHECK(g.wrap(-5.0 + 10.0 + 0.25) == Catch::Approx(-4.75));
    CHECK(g.wrap(-5.25) == Catch::Approx(4.75));
}

TEST_CASE("spectral derivative reproduces band-limited closed forms") {
    Grid g(128, 0.0, 2.0 * M_PI);

    SECTION("sin --> cos, order 1") {
        RealField f(g), expect(g);
        const double k = 2.0 * M_PI / g.length; // = 1
        for (std::size_t j = 0; j < g.n; ++j) {
            f[j] = std::sin(k * g.x(j));
            expect[j] = k * std::cos(k * g.x(j));
        }
        RealField df = spectral_derivative(f, 1);
        for (std::size_t j = 0; j < g.n; ++j)
            CHECK(df[j] == Catch::Approx(expect[j]).margin(1e-12));
    }

    SECTION("constant --> zero") {
        RealField f(g, 3.7);
        RealField df = spectral_derivative(f, 1);
        for (double v : df.values) CHECK(std::abs(v) < 1e-13);
    }

    SECTION("exp(ikx) is an eigenfunction of the second derivative") {
        const double k = 2.0 * M_PI * 3.0 / g.length;
        WaveField f(g);
        for (std::size_t j = 0; j < g.n; ++j)
            f[j] = std::polar(1.0, k * g.x(j));
        WaveField d2 = spectral_derivative(f, 2);
        for (std::size_t j = 0; j < g.n; ++j)
            CHECK(std::abs(d2[j] - (-k * k) * f[j]) < 1e-10);
    }

    SECTION("rejects bad order and non-finite input") {
        RealField f(g, 1.0);
        CHECK_THROWS_AS(spectral_derivative(f, 3), std::invalid_argument);
        CHECK_THROWS_AS(spectral_derivative(f, 0), std::invalid_argument);
        f[5] = std::nan("");
        CHECK_THROWS_AS(spectral_derivative(f, 1), NonFinite);
    }
}

TEST_CASE("finite-difference oracle agrees with the spectral path") {
    Grid g(256, -10.0, 20.0);
    RealField f = random_bandlimited(g, 6, 42u);
    RealField ds = spectral_derivative(f, 1);
    RealField dfd = finite_difference_derivative(f, 1);
    // central differences are O(dx²); with dx ≈ 0.078 and k ≤ 6 modes the
    // pointwise gap stays well below k³dx²/6 ≈ 7e-3
    for (std::size_t j = 0; j < g.n; ++j)
        CHECK(std::abs(ds[j] - dfd[j]) < 1e-2);
    REQUIRE(l2_norm(ds) > 0.1); // non-degenerate check data
}

TEST_CASE("quadrature: periodic rectangle rule") {
    Grid g(256, -5.0, 10.0);

    SECTION("constant field integrates to c·L") {
        RealField f(g, 1.0);
        CHECK(quadrature(f) == Catch::Approx(10.0).epsilon(1e-14));
    }

    SECTION("normalized Gaussian integrates to one") {
        const double sigma = 0.8;
        RealField f(g);
        for (std::size_t j = 0; j < g.n; ++j) {
            const double x = g.x(j);
            f[j] = std::exp(-x * x / (2.0 * sigma * sigma)) /
                   (sigma * std::sqrt(2.0 * M_PI));
        }
        CHECK(quadrature(f) == Catch::Approx(1.0).margin(1e-10));
    }

    SECTION("full-period sine cancels") {
        RealField f(g);
        for (std::size_t j = 0; j < g.n; ++j)
            f[j] = std::sin(2.0 * M_PI * (g.x(j) - g.x0) / g.length);
        CHECK(std::abs(quadrature(f)) < 1e-12);
    }

    SECTION("rejects non-finite input") {
        RealField f(g, 1.0);
        f[0] = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(quadrature(f), NonFinite);
    }
}

TEST_CASE("Parseval: quadrature(|f|^2) equals spectral power") {
    Grid g(128, 0.0, 7.0);
    for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
        WaveField f = random_wave(g, 10, seed);
        RealField f2 = f.density();
        const double lhs = quadrature(f2);
        const double rhs = spectral_power(f);
        CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-10);
    }
}

TEST_CASE("derivative composition: d(d f) = d^2 f on band-limited fields") {
    Grid g(128, -3.0, 6.0);
    for (unsigned seed : {11u, 12u, 13u}) {
        RealField f = random_bandlimited(g, 8, seed);
        RealField twice = spectral_derivative(spectral_derivative(f, 1), 1);
        RealField second = spectral_derivative(f, 2);
        const double scale = l2_norm(second);
        REQUIRE(scale > 1e-6);
        double diff = 0.0;
        for (std::size_t j = 0; j < g.n; ++j)
            diff = std::max(diff, std::abs(twice[j] - second[j]));
        CHECK(diff / scale < 1e-8);
    }
}

TEST_CASE("node mask thresholds at 1e-12 of the density peak") {
    Grid g(64, -8.0, 16.0);
    WaveField psi = gaussian_packet(g, 0.0, 0.5);
    NodeMask mask = node_mask(psi);
    CHECK(mask.epsilon_rho > 0.0);
    CHECK_FALSE(mask.all_masked());
    // a σ = 0.5 Gaussian on [−8,8) has tails below 1e−12·peak near the edges
    CHECK(mask.masked_count() > 0);
    CHECK_FALSE(mask.masked(g.n / 2));
    CHECK(mask.masked_mass(psi.density()) < 1e-10);
}

TEST_CASE("unwrap_phase: plane wave carries linear S and recorded winding") {
    Grid g(64, -2.0, 4.0, 0.7); // ℏ ≠ 1 to exercise the action scaling
    const int mode = 3;
    const double k = 2.0 * M_PI * mode / g.length;
    WaveField psi(g);
    for (std::size_t j = 0; j < g.n; ++j)
        psi[j] = std::polar(1.0, k * (g.x(j) - g.x0));
    auto up = unwrap_phase(psi, node_mask(psi));
    CHECK(up.winding == mode);
    for (std::size_t j = 0; j < g.n; ++j)
        CHECK(up.S[j] ==
              Catch::Approx(g.hbar * k * (g.x(j) - g.x0)).margin(1e-10));
}

TEST_CASE("unwrap_phase: real positive field has identically zero phase") {
    Grid g(32, 0.0, 1.0);
    WaveField psi(g, cplx{0.3, 0.0});
    auto up = unwrap_phase(psi, node_mask(psi));
    CHECK(up.winding == 0);
    for (double s : up.S.values) CHECK(s == 0.0);
}

TEST_CASE("unwrap_phase matches the accumulated arg-difference oracle") {
    Grid g(256, -10.0, 20.0);
    WaveField psi = gaussian_packet(g, 0.0, 1.5, 1.3); // non-grid k, no winding? k·L/2π = 4.14 → winding 4
    NodeMask mask = node_mask(psi);
    auto up = unwrap_phase(psi, mask);

    // oracle: accumulate arg(ψ_{j+1}/ψ_j) from the first unmasked point
    std::size_t j0 = 0;
    while (mask.masked(j0)) ++j0;
    double acc = std::arg(psi[j0]);
    double max_err = std::abs(up.S[j0] - g.hbar * acc);
    for (std::size_t s = 1; s < g.n; ++s) {
        const std::size_t j = (j0 + s) % g.n;
        acc += std::arg(psi[j] / psi[(j0 + s - 1) % g.n]);
        if (!mask.masked(j))
            max_err = std::max(max_err, std::abs(up.S[j] - g.hbar * acc));
    }
    CHECK(max_err < 1e-10);
}

TEST_CASE("unwrap_phase round-trips R,S composition up to 2*pi*hbar") {
    Grid g(128, 0.0, 10.0, 2.0);
    RealField S0 = random_bandlimited(g, 5, 77u, 0.9);
    WaveField psi(g);
    for (std::size_t j = 0; j < g.n; ++j)
        psi[j] = std::polar(1.0 + 0.0 * j, S0[j] / g.hbar);
    auto up = unwrap_phase(psi, node_mask(psi));
    CHECK(up.winding == 0);
    const double two_pi_hbar = 2.0 * M_PI * g.hbar;
    const double offset = up.S[0] - S0[0];
    const double snapped = offset - two_pi_hbar * std::round(offset / two_pi_hbar);
    CHECK(std::abs(snapped) < 1e-10);
    for (std::size_t j = 0; j < g.n; ++j)
        CHECK(up.S[j] - S0[j] == Catch::Approx(offset).margin(1e-9));
}

TEST_CASE("unwrap_phase masks: interpolation across a node and AllMasked") {
    Grid g(64, -4.0, 8.0);
    WaveField psi(g);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.x(j);
        psi[j] = std::polar(std::exp(-x * x), 0.3 * x);
    }
    // zero out a small arc to force a masked gap
    psi[10] = psi[11] = cplx{0.0, 0.0};
    NodeMask mask = node_mask(psi);
    REQUIRE(mask.masked(10));
    REQUIRE(mask.masked(11));
    auto up = unwrap_phase(psi, mask);
    CHECK(up.interpolated[10]);
    CHECK(up.interpolated[11]);
    CHECK_FALSE(up.interpolated[12]);
    CHECK(std::isfinite(up.S[10]));

    WaveField zero(g, cplx{0.0, 0.0});
    CHECK_THROWS_AS(unwrap_phase(zero, node_mask(zero)), AllMasked);
}

TEST_CASE("field serialization round-trips: JSON exact, CSV to 1e-15") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "qwb_io_test";
    fs::create_directories(dir);

    Grid g(64, -3.25, 6.5, 0.9, 1.7);
    WaveField psi = random_wave(g, 7, 5u);
    psi.time = 0.375;
    RealField rho = psi.density();

    SECTION("JSON envelope") {
        WaveField back = wave_from_json(to_json(psi));
        REQUIRE(back.grid == psi.grid);
        CHECK(back.time == psi.time);
        for (std::size_t j = 0; j < g.n; ++j) CHECK(back[j] == psi[j]);

        RealField rback = real_from_json(to_json(rho));
        for (std::size_t j = 0; j < g.n; ++j) CHECK(rback[j] == rho[j]);
    }

    SECTION("CSV wave field") {
        const auto path = (dir / "wave.csv").string();
        write_csv(psi, path);
        WaveField back = read_wave_csv(path, g.hbar, g.mass, psi.time);
        REQUIRE(back.size() == psi.size());
        for (std::size_t j = 0; j < g.n; ++j) {
            CHECK(std::abs(back[j].real() - psi[j].real()) <=
                  1e-15 * std::abs(psi[j].real()));
            CHECK(std::abs(back[j].imag() - psi[j].imag()) <=
                  1e-15 * std::abs(psi[j].imag()));
        }
    }

    SECTION("CSV real field") {
        const auto path = (dir / "real.csv").string();
        write_csv(rho, path);
        RealField back = read_real_csv(path, g.hbar, g.mass, rho.time);
        REQUIRE(back.size() == rho.size());
        for (std::size_t j = 0; j < g.n; ++j)
            CHECK(std::abs(back[j] - rho[j]) <= 1e-15 * std::abs(rho[j]));
    }
}
