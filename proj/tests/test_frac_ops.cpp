#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "tsfrac/tsfrac.hpp"

using namespace tsfrac;

namespace {

std::shared_ptr<const Grid> unit_grid(double mesh) {
    return testutil::make_grid(single_interval(0, 1), mesh);
}

std::shared_ptr<const Grid> z_grid(int n) {
    return testutil::make_grid(integer_scale(0, n), 1.0);
}

/// A time scale with two intervals and one isolated point between them.
TimeScale mixed_scale() {
    return TimeScale({ClosedInterval{0.0, 0.4}, IsolatedPoint{0.6},
                      ClosedInterval{0.8, 1.3}});
}

} // namespace

TEST_CASE("fractional order domain", "[frac]") {
    CHECK_THROWS_AS(FracOrder(0.0), Error);
    CHECK_THROWS_AS(FracOrder(1.0), Error);
    CHECK_THROWS_AS(FracOrder(1.5), Error);
    CHECK(FracOrder(0.5).value() == 0.5);
}

TEST_CASE("fractional integral", "[frac]") {
    SECTION("zero integrand") {
        auto g = unit_grid(0.05);
        auto f = GridFunction::sample(g, [](double) { return 0.0; });
        for (std::size_t i = 0; i < g->size(); ++i)
            CHECK(frac_integral(f, FracOrder(0.5), 0, i) == 0.0);
    }
    SECTION("constant on the unit interval: exact kernel moments telescope") {
        auto g = unit_grid(0.01);
        auto f = GridFunction::sample(g, [](double) { return 1.0; });
        const double expect = 2.0 / std::sqrt(kPi); // 1^w / Gamma(w+1), w = 1/2
        CHECK(frac_integral(f, FracOrder(0.5), 0, g->size() - 1) ==
              Catch::Approx(expect).epsilon(1e-13));
        // exactness is mesh independent
        auto gc = unit_grid(0.25);
        auto fc = GridFunction::sample(gc, [](double) { return 1.0; });
        CHECK(frac_integral(fc, FracOrder(0.5), 0, gc->size() - 1) ==
              Catch::Approx(expect).epsilon(1e-13));
    }
    SECTION("power rule under mesh refinement") {
        // J^w theta = theta^(1+w) / Gamma(2+w) on the real line; the
        // midpoint approximation against the singular kernel converges at
        // order 2-w, so halving the mesh cuts the error by ~2^1.5
        const double exact = 1.0 / std::tgamma(2.5);
        const auto value_at = [](double mesh) {
            auto g = unit_grid(mesh);
            auto f = GridFunction::sample(g, [](double x) { return x; });
            return frac_integral(f, FracOrder(0.5), 0, g->size() - 1);
        };
        const double e1 = std::abs(value_at(1e-2) - exact);
        const double e2 = std::abs(value_at(5e-3) - exact);
        CHECK(e1 < 1e-3);
        CHECK(e1 / e2 > 2.0);
    }
    SECTION("integer scale matches the explicit sum") {
        auto g = z_grid(3);
        auto f = GridFunction::sample(g, [](double) { return 1.0; });
        double expect = 0.0;
        for (int t = 1; t <= 3; ++t)
            expect += std::pow(3.0 - (t - 1.0), -0.5);
        expect /= std::tgamma(0.5);
        CHECK(frac_integral(f, FracOrder(0.5), 0, 3) ==
              Catch::Approx(expect).epsilon(1e-14));
    }
    SECTION("order check") {
        auto g = unit_grid(0.5);
        auto f = GridFunction::sample(g, [](double) { return 1.0; });
        CHECK_THROWS_AS(frac_integral(f, FracOrder(0.5), 2, 0),
                        NodesOutOfOrder);
    }
}

TEST_CASE("Caputo derivative", "[frac]") {
    SECTION("annihilates constants on a mixed scale") {
        auto g = testutil::make_grid(mixed_scale(), 0.05);
        auto f = GridFunction::sample(g, [](double) { return 4.25; });
        for (std::size_t i = 1; i < g->size(); ++i)
            CHECK(std::abs(caputo_nabla(f, FracOrder(0.5), 0, i)) <= 1e-14);
    }
    SECTION("linear function on the unit interval is exact") {
        // derivative channel is exactly 1, then constants telescope
        auto g = unit_grid(1e-2);
        auto f = GridFunction::sample(g, [](double x) { return x; });
        const double expect = 1.0 / std::tgamma(1.5);
        CHECK(caputo_nabla(f, FracOrder(0.5), 0, g->size() - 1) ==
              Catch::Approx(expect).epsilon(1e-13));
    }
    SECTION("integer scale matches the explicit sum") {
        auto g = z_grid(3);
        auto f = GridFunction::sample(g, [](double x) { return x; });
        double expect = 0.0;
        for (int t = 1; t <= 3; ++t)
            expect += std::pow(3.0 - (t - 1.0), -0.5);
        expect /= std::tgamma(0.5);
        CHECK(caputo_nabla(f, FracOrder(0.5), 0, 3) ==
              Catch::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("Riemann-Liouville derivative", "[frac]") {
    SECTION("zero function") {
        auto g = unit_grid(0.05);
        auto f = GridFunction::sample(g, [](double) { return 0.0; });
        CHECK(rl_nabla(f, FracOrder(0.5), 0, g->size() - 1) == 0.0);
    }
    SECTION("constant does not annihilate") {
        auto g = unit_grid(1e-3);
        auto f = GridFunction::sample(g, [](double) { return 1.0; });
        const std::size_t i = *g->find(0.5);
        const double expect = std::pow(0.5, -0.5) / std::tgamma(0.5);
        CHECK(rl_nabla(f, FracOrder(0.5), 0, i) ==
              Catch::Approx(expect).margin(1e-3));
    }
    SECTION("agrees with Caputo when f vanishes at the lower limit") {
        auto g = unit_grid(1e-3);
        auto f = GridFunction::sample(g, [](double x) { return std::sin(x); });
        for (double theta : {0.25, 0.5, 0.75, 1.0}) {
            const std::size_t i = *g->find(theta);
            CHECK(rl_nabla(f, FracOrder(0.5), 0, i) ==
                  Catch::Approx(caputo_nabla(f, FracOrder(0.5), 0, i))
                      .margin(5e-3));
        }
    }
}

TEST_CASE("Caputo via the RL route", "[frac]") {
    SECTION("constants vanish") {
        auto g = testutil::make_grid(mixed_scale(), 0.05);
        auto f = GridFunction::sample(g, [](double) { return 3.0; });
        CHECK(caputo_via_rl(f, FracOrder(0.5), 0, g->size() - 1) == 0.0);
    }
    SECTION("identical code path when the shift vanishes") {
        auto g = testutil::make_grid(mixed_scale(), 0.05);
        auto f = GridFunction::sample(
            g, [](double x) { return x * (1.3 - x); }); // f(0) = 0
        for (std::size_t i = 1; i < g->size(); ++i)
            CHECK(caputo_via_rl(f, FracOrder(0.4), 0, i) ==
                  rl_nabla(f, FracOrder(0.4), 0, i));
    }
    SECTION("constant offset is annihilated") {
        auto g = unit_grid(1e-3);
        auto f = GridFunction::sample(g, [](double x) { return 1.0 + x; });
        const double expect = 1.0 / std::tgamma(1.5);
        CHECK(caputo_via_rl(f, FracOrder(0.5), 0, g->size() - 1) ==
              Catch::Approx(expect).margin(1e-3));
    }
}

TEST_CASE("the two Caputo routes agree on smooth functions", "[frac]") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    auto g = unit_grid(1e-3);

    for (int trial = 0; trial < 5; ++trial) {
        const double c0 = coeff(rng), c1 = coeff(rng), c2 = coeff(rng),
                     c3 = coeff(rng);
        auto f = GridFunction::sample(g, [&](double x) {
            return c0 + c1 * x + c2 * x * x + c3 * x * x * x;
        });
        for (double theta : {0.05, 0.2, 0.5, 0.8, 1.0}) {
            const std::size_t i = *g->find(theta);
            CHECK(caputo_nabla(f, FracOrder(0.5), 0, i) ==
                  Catch::Approx(caputo_via_rl(f, FracOrder(0.5), 0, i))
                      .margin(5e-3));
        }
    }
    SECTION("on a mixed scale the routes agree up to the first gap") {
        auto gm = testutil::make_grid(mixed_scale(), 1e-3);
        auto f = GridFunction::sample(
            gm, [](double x) { return std::cos(2 * x) + x; });
        for (double theta : {0.2, 0.3, 0.4}) {
            const std::size_t i = *gm->find(theta);
            CHECK(caputo_nabla(f, FracOrder(0.5), 0, i) ==
                  Catch::Approx(caputo_via_rl(f, FracOrder(0.5), 0, i))
                      .margin(5e-3));
        }
    }
    SECTION("past a gap the routes differ by a stable structural amount") {
        // The Taylor-remainder identity behind the RL route leans on the
        // composition law, which power kernels only satisfy on continuous
        // runs; across scattered points the two routes settle on values a
        // fixed distance apart. Pinned here so the gap is visible, not an
        // accuracy bug.
        const auto diff_at = [](double mesh, double theta) {
            auto gm = testutil::make_grid(mixed_scale(), mesh);
            auto f = GridFunction::sample(
                gm, [](double x) { return std::cos(2 * x) + x; });
            const std::size_t i = *gm->find(theta);
            return caputo_nabla(f, FracOrder(0.5), 0, i) -
                   caputo_via_rl(f, FracOrder(0.5), 0, i);
        };
        const double d1 = diff_at(2e-3, 1.3);
        const double d2 = diff_at(5e-4, 1.3);
        CHECK(std::abs(d1) > 1e-3);
        CHECK(d1 == Catch::Approx(d2).margin(5e-4)); // stable under refinement
    }
}

TEST_CASE("discrete operators reproduce exact finite sums",
          "[frac][oracle]") {
    std::mt19937 rng(314);
    std::uniform_int_distribution<int> val(-3, 3);
    auto g = z_grid(8);

    for (double w : {0.25, 0.5, 0.75}) {
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> vals(9);
            for (auto& v : vals)
                v = val(rng);
            GridFunction f(g, vals);
            for (int theta = 1; theta <= 8; ++theta) {
                CHECK(frac_integral(f, FracOrder(w), 0, theta) ==
                      Catch::Approx(oracle::frac_integral_z(vals, w, theta))
                          .margin(1e-12));
                CHECK(caputo_nabla(f, FracOrder(w), 0, theta) ==
                      Catch::Approx(oracle::caputo_z(vals, w, theta))
                          .margin(1e-12));
                CHECK(rl_nabla(f, FracOrder(w), 0, theta) ==
                      Catch::Approx(oracle::rl_z(vals, w, theta))
                          .margin(1e-12));
            }
        }
    }
}

TEST_CASE("composition of fractional integrals", "[frac][oracle]") {
    auto compose = [](const GridFunction& f, double w, double u) {
        auto g = f.grid_ptr();
        std::vector<double> inner(g->size(), 0.0);
        for (std::size_t i = 1; i < g->size(); ++i)
            inner[i] = frac_integral(f, FracOrder(u), 0, i);
        GridFunction fi(g, inner);
        return frac_integral(fi, FracOrder(w), 0, g->size() - 1);
    };

    SECTION("matches the exact double sum on the integer scale") {
        auto g = z_grid(8);
        std::vector<double> vals{0, 1, -2, 3, 1, 0, 2, -1, 1};
        GridFunction f(g, vals);
        for (auto [w, u] : {std::pair{0.25, 0.5}, {0.3, 0.4}, {0.2, 0.2}}) {
            CHECK(compose(f, w, u) ==
                  Catch::Approx(
                      oracle::composed_frac_integral_z(vals, w, u, 8))
                      .margin(1e-12));
        }
    }
    SECTION("semigroup defect vanishes under mesh refinement") {
        const auto defect = [&](double mesh) {
            auto g = unit_grid(mesh);
            auto f =
                GridFunction::sample(g, [](double x) { return 1.0 + x; });
            const double lhs = compose(f, 0.3, 0.4);
            const double rhs = frac_integral(f, FracOrder(0.7), 0,
                                             g->size() - 1);
            return std::abs(lhs - rhs);
        };
        const double d1 = defect(4e-2);
        const double d2 = defect(1e-2);
        CHECK(d2 < d1);
        CHECK(d2 < 5e-3);
    }
    SECTION("power kernels do not satisfy the identity on discrete points") {
        // On the integer scale the composed operator keeps a coefficient
        // 1/(Gamma(w)Gamma(u)) on f(theta) where the single operator has
        // 1/Gamma(w+u); the gap is structural, not a quadrature artifact.
        auto g = z_grid(8);
        auto f = GridFunction::sample(g, [](double) { return 1.0; });
        const double lhs = compose(f, 0.3, 0.4);
        const double rhs = frac_integral(f, FracOrder(0.7), 0, 8);
        CHECK(std::abs(lhs - rhs) > 0.1);
    }
}

TEST_CASE("derivative of the fractional integral", "[frac][oracle]") {
    SECTION("recovers the function on a continuous interval") {
        auto g = unit_grid(1e-3);
        auto f = GridFunction::sample(
            g, [](double x) { return 1.0 + 0.5 * std::sin(2 * x); });
        for (double theta : {0.1, 0.4, 0.7, 1.0}) {
            const std::size_t i = *g->find(theta);
            std::vector<double> ji(g->size(), 0.0);
            for (std::size_t t = 1; t <= i; ++t)
                ji[t] = frac_integral(f, FracOrder(0.5), 0, t);
            GridFunction jif(g, ji);
            CHECK(rl_nabla(jif, FracOrder(0.5), 0, i) ==
                  Catch::Approx(f[i]).margin(5e-3));
        }
    }
    SECTION("matches the brute-force composition on the integer scale") {
        auto g = z_grid(8);
        std::vector<double> vals{0, 2, 1, -1, 3, 0, 1, 2, -2};
        GridFunction f(g, vals);
        for (double w : {0.25, 0.5, 0.75}) {
            std::vector<double> ji(g->size(), 0.0);
            for (std::size_t t = 1; t < g->size(); ++t)
                ji[t] = frac_integral(f, FracOrder(w), 0, t);
            GridFunction jif(g, ji);
            for (int theta = 2; theta <= 8; ++theta) {
                // oracle: nabla difference of J^(1-w) applied to J^w f
                std::vector<double> jz(9, 0.0);
                for (int t = 1; t <= 8; ++t)
                    jz[t] = oracle::frac_integral_z(vals, w, t);
                const double expect =
                    oracle::frac_integral_z(jz, 1.0 - w, theta) -
                    oracle::frac_integral_z(jz, 1.0 - w, theta - 1);
                CHECK(rl_nabla(jif, FracOrder(w), 0, theta) ==
                      Catch::Approx(expect).margin(1e-10));
            }
        }
    }
}

TEST_CASE("results vary continuously in the order", "[frac]") {
    auto g = unit_grid(5e-3);
    auto f = GridFunction::sample(g, [](double x) { return x; });
    const std::size_t last = g->size() - 1;
    double prev = 0.0;
    bool first = true;
    for (double w = 0.05; w <= 0.95 + 1e-12; w += 0.05) {
        const double v = caputo_nabla(f, FracOrder(w), 0, last);
        CHECK(std::isfinite(v));
        if (!first)
            CHECK(std::abs(v - prev) < 0.1);
        prev = v;
        first = false;
    }
}
