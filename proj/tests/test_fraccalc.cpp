#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hilfer/fraccalc.hpp"
#include "hilfer/special.hpp"

using namespace hilfer::fraccalc;
using hilfer::special::gamma_fn;

namespace {

// weighted samples of (s-a)^{delta-1} with the natural weight
SampledFn power_fn(double a, double b, double delta, int n, double grading = 0.0) {
    double w = delta < 1.0 ? delta : 1.0;
    double r = grading > 0.0 ? grading : std::max(2.0, 1.0 / w);
    auto grid = graded_grid(a, b, n, r);
    std::vector<double> vals(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) vals[j] = std::pow(grid[j] - a, delta - w);
    return SampledFn(a, w, grid, std::move(vals));
}

}  // namespace

TEST_CASE("HilferOrder composite parameter") {
    HilferOrder caputo(0.4, 1.0);
    CHECK(caputo.lam == 1.0);
    HilferOrder rl(0.4, 0.0);
    CHECK(rl.lam == doctest::Approx(0.4));
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> umu(0.01, 0.99), unu(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        double mu = umu(rng), nu = unu(rng);
        HilferOrder o(mu, nu);
        CHECK(o.lam == doctest::Approx(mu + nu - mu * nu).epsilon(1e-15));
        CHECK(o.lam > 0.0);
        CHECK(o.lam <= 1.0);
    }
    CHECK_THROWS_AS(HilferOrder(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(HilferOrder(1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(HilferOrder(0.5, 1.5), std::invalid_argument);
}

TEST_CASE("SampledFn validation") {
    CHECK_THROWS_AS(SampledFn(0.0, 1.0, {0.0, 1.0}, {1.0}), GridError);
    CHECK_THROWS_AS(SampledFn(0.0, 1.0, {0.1, 1.0}, {1.0, 1.0}), GridError);
    CHECK_THROWS_AS(SampledFn(0.0, 1.0, {0.0, 0.0}, {1.0, 1.0}), GridError);
    CHECK_THROWS_AS(SampledFn(0.0, 3.0, {0.0, 1.0}, {1.0, 1.0}), GridError);
}

TEST_CASE("fractional integral of powers, closed form") {
    // I^0.4 applied to 1 at t - t0 = 1 is 1/Gamma(1.4)
    CHECK(frac_integral_power(0.4, 1.0, 1.0, 0.0) ==
          doctest::Approx(1.0 / gamma_fn(1.4)).epsilon(1e-14));
    CHECK(1.0 / gamma_fn(1.4) == doctest::Approx(1.1270604979860277).epsilon(1e-14));
    // corollary identity: I^mu (t-t0)^{-mu} = Gamma(1-mu), independent of t
    CHECK(frac_integral_power(0.4, 0.6, 2.0, 0.0) ==
          doctest::Approx(gamma_fn(0.6)).epsilon(1e-14));
    CHECK(frac_integral_power(0.4, 0.6, 17.0, 13.5) ==
          doctest::Approx(gamma_fn(0.6)).epsilon(1e-14));
    // limit t -> t0
    CHECK(frac_integral_power(0.4, 1.0, 0.0, 0.0) == 0.0);
    CHECK_THROWS_AS(frac_integral_power(0.4, 1.0, -0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(frac_integral_power(0.4, -1.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("Hilfer derivative of powers, closed form") {
    HilferOrder o1(0.4, 1.0);
    CHECK(hilfer_deriv_power(o1, o1.lam, 1.7, 0.0) == 0.0);
    HilferOrder o2(0.4, 0.5);
    CHECK(hilfer_deriv_power(o2, o2.lam, 1.0, 0.0) == 0.0);
    CHECK(hilfer_deriv_power(o2, 1.0, 1.0, 0.0) ==
          doctest::Approx(1.0 / gamma_fn(0.6)).epsilon(1e-14));
    CHECK(1.0 / gamma_fn(0.6) == doctest::Approx(0.67150497244207336).epsilon(1e-14));
    HilferOrder o3(0.4, 0.0);
    CHECK(hilfer_deriv_power(o3, 2.0, 1.0, 0.0) ==
          doctest::Approx(gamma_fn(2.0) / gamma_fn(1.6)).epsilon(1e-14));
    CHECK(gamma_fn(2.0) / gamma_fn(1.6) == doctest::Approx(1.1191749540701223).epsilon(1e-14));
    // 1/Gamma at a pole: delta - mu a non-positive integer gives 0
    HilferOrder o4(0.5, 0.7);
    CHECK(hilfer_deriv_power(o4, 0.5, 1.0, 0.0) == 0.0);  // delta - mu = 0
    CHECK_THROWS_AS(hilfer_deriv_power(o1, 1.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("product-integration quadrature against closed forms") {
    SampledFn ones = power_fn(0.0, 2.0, 1.0, 128);
    CHECK(std::fabs(frac_integral_quad(0.4, ones, 1.0) -
                    frac_integral_power(0.4, 1.0, 1.0, 0.0)) < 1e-4);
    SampledFn lin = power_fn(0.0, 2.0, 2.0, 128);
    // I^0.4 s at t=0.5 equals G(0.5,0)/Gamma(0.4) = 0.30505433361730023
    CHECK(std::fabs(frac_integral_quad(0.4, lin, 0.5) - 0.30505433361730023) < 1e-4);
    // zero function maps to exactly zero
    auto grid = graded_grid(0.0, 2.0, 64, 1.0);
    SampledFn zero(0.0, 1.0, grid, std::vector<double>(grid.size(), 0.0));
    CHECK(frac_integral_quad(0.4, zero, 1.3) == 0.0);
}

TEST_CASE("quadrature preconditions") {
    SampledFn f = power_fn(0.0, 1.0, 1.0, 16);
    CHECK_THROWS_AS(frac_integral_quad(0.4, f, 0.0), GridError);
    CHECK_THROWS_AS(frac_integral_quad(0.4, f, 1.5), GridError);
    CHECK_THROWS_AS(frac_integral_quad(1.4, f, 0.5), std::invalid_argument);
    auto g3 = graded_grid(0.0, 1.0, 3, 1.0);
    SampledFn tiny(0.0, 1.0, g3, std::vector<double>(g3.size(), 1.0));
    CHECK_THROWS_AS(hilfer_deriv_quad(HilferOrder(0.4, 0.5), tiny, 1.0), InsufficientGridError);
}

TEST_CASE("linearity of the quadrature functional") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto grid = graded_grid(0.0, 1.0, 48, 2.0);
    std::vector<double> fv(grid.size()), gv(grid.size()), hv(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        fv[j] = u(rng);
        gv[j] = u(rng);
    }
    double alpha = 0.37, beta = -1.21;
    for (std::size_t j = 0; j < grid.size(); ++j) hv[j] = alpha * fv[j] + beta * gv[j];
    SampledFn F(0.0, 0.8, grid, fv), G(0.0, 0.8, grid, gv), H(0.0, 0.8, grid, hv);
    for (double t : {0.3, 0.7, 1.0}) {
        double lhs = frac_integral_quad(0.45, H, t);
        double rhs = alpha * frac_integral_quad(0.45, F, t) + beta * frac_integral_quad(0.45, G, t);
        CHECK(std::fabs(lhs - rhs) <= 1e-10 * (1.0 + std::fabs(lhs)));
    }
}

TEST_CASE("quadrature error halves (or hits roundoff) under refinement") {
    for (double delta : {0.7, 1.0, 1.5, 2.0}) {
        double want = frac_integral_power(0.45, delta, 1.0, 0.0);
        double e64 = std::fabs(frac_integral_quad(0.45, power_fn(0.0, 1.0, delta, 64), 1.0) - want);
        double e128 =
            std::fabs(frac_integral_quad(0.45, power_fn(0.0, 1.0, delta, 128), 1.0) - want);
        CHECK(e128 <= std::max(0.5 * e64, 5e-13));
    }
}

TEST_CASE("Hilfer derivative quadrature: spec cases") {
    {
        HilferOrder o(0.4, 0.6);
        auto grid = graded_grid(0.0, 1.0, 128, std::max(2.0, 1.0 / o.lam));
        SampledFn f(0.0, o.lam, grid, std::vector<double>(grid.size(), 1.0));
        CHECK(std::fabs(hilfer_deriv_quad(o, f, 1.0)) < 5e-3);  // (t)^{lam-1} -> 0
    }
    {
        HilferOrder o(0.4, 0.3);
        SampledFn f = power_fn(0.0, 1.0, 1.0, 128);
        CHECK(std::fabs(hilfer_deriv_quad(o, f, 1.0) - 1.0 / gamma_fn(0.6)) < 5e-3);
    }
    {
        SampledFn f = power_fn(0.0, 1.0, 3.0, 128);  // (s)^2
        for (double nu : {0.0, 0.5, 1.0}) {
            HilferOrder o(0.55, nu);
            CHECK(std::fabs(hilfer_deriv_quad(o, f, 1.0) - hilfer_deriv_power(o, 3.0, 1.0, 0.0)) <
                  5e-3);
        }
    }
}

TEST_CASE("nu = 0 collapses to the Riemann-Liouville derivative d/dt I^{1-mu}") {
    // independent path: difference quotient of the fractional integral
    double mu = 0.45;
    HilferOrder o(mu, 0.0);
    auto grid = graded_grid(0.0, 1.5, 192, 2.0);
    std::vector<double> vals(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
        vals[j] = grid[j] * grid[j] + 0.5 * grid[j];  // smooth test function
    SampledFn f(0.0, 1.0, grid, vals);
    for (double t : {0.6, 1.0, 1.3}) {
        double h = 1e-4;
        double rl = (frac_integral_quad(1.0 - mu, f, t + h) - frac_integral_quad(1.0 - mu, f, t - h)) /
                    (2.0 * h);
        CHECK(std::fabs(hilfer_deriv_quad(o, f, t) - rl) < 5e-3);
    }
}

TEST_CASE("composition identities") {
    {
        // f = s - t0, nu = 1: correction vanishes (I^0 is identity, f(t0) = 0)
        HilferOrder o(0.4, 1.0);
        SampledFn f = power_fn(0.0, 1.0, 2.0, 128);
        auto [r1, r2] = composition_residuals(o, f, 1.0);
        CHECK(r1 < 1e-2);
        CHECK(r2 < 1e-2);
    }
    {
        // zero function: both residuals exactly zero
        auto grid = graded_grid(0.0, 1.0, 64, 2.0);
        SampledFn z(0.0, 1.0, grid, std::vector<double>(grid.size(), 0.0));
        auto [r1, r2] = composition_residuals(HilferOrder(0.4, 0.5), z, 1.0);
        CHECK(r1 == 0.0);
        CHECK(r2 == 0.0);
    }
    {
        // f = (s-t0)^{lam-1}: D(I f) reproduces f, and I(D f) needs the full correction
        HilferOrder o(0.4, 0.5);
        auto grid = graded_grid(0.0, 1.0, 128, std::max(2.0, 1.0 / o.lam));
        SampledFn f(0.0, o.lam, grid, std::vector<double>(grid.size(), 1.0));
        auto [r1, r2] = composition_residuals(o, f, 1.0);
        CHECK(r1 < 1e-2);
        CHECK(r2 < 1e-2);
    }
}

TEST_CASE("composition residuals improve with refinement") {
    HilferOrder o(0.6, 0.5);
    auto make = [&](int n) { return power_fn(0.0, 1.0, 2.0, n); };
    auto [a1, a2] = composition_residuals(o, make(64), 1.0);
    auto [b1, b2] = composition_residuals(o, make(128), 1.0);
    CHECK(b1 <= std::max(a1, 1e-10));
    CHECK(b2 <= std::max(0.9 * a2, 1e-8));
}
