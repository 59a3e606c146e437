#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "selfgrav/minimize.hpp"
#include "selfgrav/radial.hpp"
#include "selfgrav/reduction.hpp"
#include "selfgrav/steady.hpp"

using namespace selfgrav;

namespace {

constexpr double pi = std::numbers::pi;

// Closed-form oracle for Phi(rho) = rho^2 (so g(lambda) = lambda/2):
// w solves Delta w = -2 pi w, hence w(r) = w_c sin(a r)/(a r) with a = sqrt(2 pi),
// first zero R = pi/a = sqrt(pi/2); M = -R^2 w'(R) = w_c R; for w_c = sqrt(2 pi)
// the mass is exactly pi. Frozen values:
constexpr double oracle_R = 1.2533141373155003;   // sqrt(pi/2)
constexpr double oracle_wc = 2.5066282746310005;  // sqrt(2 pi)
// int Phi(rho) = pi R / 2, E_pot = -(3/2) pi R, H = -pi R:
constexpr double oracle_internal = 1.9687012432153025;
constexpr double oracle_epot = -5.9061037296459074;
constexpr double oracle_h = -3.9374024864306049;

GFunction linear_g() { return GFunction::power_law(0.5, 1.0); }
ConvexScalarFunction quadratic_phi() { return ConvexScalarFunction::power_law(1.0, 2.0); }

} // namespace

TEST_CASE("closed-form n=1 state: radius, mass and profile") {
    const auto prof = shoot(linear_g(), oracle_wc);
    CHECK(prof.radius() == Catch::Approx(oracle_R).epsilon(1e-8));
    CHECK(prof.mass() == Catch::Approx(pi).epsilon(1e-8));
    CHECK(prof.multiplier() == Catch::Approx(-pi / oracle_R).epsilon(1e-8));

    const double a = std::sqrt(2.0 * pi);
    for (double r : {0.1, 0.4, 0.8, 1.1, 1.2}) {
        const double exact = oracle_wc * std::sin(a * r) / (a * r);
        CHECK(prof.w(r) == Catch::Approx(exact).epsilon(1e-9));
    }
    // m(r) = -r^2 w'(r) = w_c (sin(ar)/a - r cos(ar))
    for (double r : {0.3, 0.9, 1.2}) {
        const double exact = oracle_wc * (std::sin(a * r) / a - r * std::cos(a * r));
        CHECK(prof.enclosed_mass(r) == Catch::Approx(exact).epsilon(1e-8));
    }
}

TEST_CASE("shoot rejects exhausted or empty right-hand sides") {
    // g identically zero near the center value: no curvature, no finite radius
    const auto flat = GFunction::tabulated({0.5, 1.0, 2.0, 3.0}, {0.0, 0.0, 0.0, 1.0});
    CHECK_THROWS_AS(shoot(flat, 0.8), unbounded_profile_error);

    // w_c outside the tabulated domain
    CHECK_THROWS_AS(shoot(flat, 10.0), domain_cutoff_error);

    // supercritical homogeneous degree: w never reaches zero
    CHECK_THROWS_AS(shoot(GFunction::power_law(1.0, 5.0), 1.0), unbounded_profile_error);

    CHECK_THROWS_AS(shoot(linear_g(), -1.0), invalid_parameter_error);
}

TEST_CASE("mass is strictly increasing in the central value (k=1 polytrope)") {
    const auto g = emden_rhs(make_polytrope_q(1.0));
    double last = 0.0;
    for (double wc : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        const auto prof = shoot(g, wc);
        CHECK(prof.mass() > last);
        CHECK(prof.radius() > 0.0);
        CHECK(std::isfinite(prof.radius()));
        last = prof.mass();
    }
}

TEST_CASE("solve_steady reproduces the closed-form state at mass pi") {
    const auto st = solve_steady(quadratic_phi(), linear_g(), pi);
    CHECK(st.mass == Catch::Approx(pi).epsilon(1e-8));
    CHECK(st.support_radius == Catch::Approx(oracle_R).epsilon(1e-8));
    CHECK(st.multiplier == Catch::Approx(-pi / oracle_R).epsilon(1e-8));
    // central value w(0) = E_0 - U(0) = w_c
    CHECK(st.multiplier - st.potential.value_at(0.0) == Catch::Approx(oracle_wc).epsilon(1e-7));

    CHECK(st.energy.internal == Catch::Approx(oracle_internal).epsilon(1e-7));
    CHECK(st.energy.epot == Catch::Approx(oracle_epot).epsilon(1e-7));
    CHECK(st.energy.reduced_total == Catch::Approx(oracle_h).epsilon(1e-7));
}

TEST_CASE("scaling route and bisection route agree") {
    const auto phi = phi_from_q(make_polytrope_q(1.0));
    const auto g = emden_rhs(make_polytrope_q(1.0));
    const double M = 1.0;

    SolveOptions scaling;
    SolveOptions bisection;
    bisection.force_bisection = true;
    bisection.mass_rtol = 1e-10;
    const auto a = solve_steady(phi, g, M, scaling);
    const auto b = solve_steady(phi, g, M, bisection);

    CHECK(a.mass == Catch::Approx(M).epsilon(1e-8));
    CHECK(b.mass == Catch::Approx(M).epsilon(1e-8));

    // L1 distance between the two densities
    double l1 = 0.0;
    const auto& grid = a.density.grid();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        l1 += std::abs(a.density.value(i) - b.density.value_at(grid.node(i))) *
              grid.volume_weights()[i];
    }
    CHECK(l1 <= 1e-6 * M);
    CHECK(a.energy.reduced_total ==
          Catch::Approx(b.energy.reduced_total).epsilon(1e-8));
}

TEST_CASE("steady states for the tested polytropic range") {
    for (double n : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        const auto phi = ConvexScalarFunction::power_law(1.0, 1.0 + 1.0 / n);
        const auto m = [&] {
            const double p = phi.power_exponent();
            return GFunction::power_law(std::pow(1.0 / (phi.power_coeff() * p), n), n);
        }();
        const auto st = solve_steady(phi, m, 1.0);
        CHECK(st.mass == Catch::Approx(1.0).epsilon(1e-9));
        CHECK(st.energy.reduced_total < 0.0);
        CHECK(st.multiplier < 0.0);

        // rho nonincreasing in r
        for (std::size_t i = 0; i + 1 < st.density.size(); ++i)
            CHECK(st.density.value(i + 1) <= st.density.value(i) * (1.0 + 1e-12) + 1e-300);

        // multiplier continuity at the support edge: U(R) = E_0
        CHECK(st.potential.value_at(st.support_radius) ==
              Catch::Approx(st.multiplier).epsilon(1e-6));

        // support bound R <= R_0 = -(3/5) M^2 / H
        const double r0 = -0.6 * st.mass * st.mass / st.energy.reduced_total;
        CHECK(st.support_radius <= r0);
    }
}

TEST_CASE("solver self consistency: Euler-Lagrange residual") {
    const auto q = make_polytrope_q(1.0);
    const auto phi = phi_from_q(q);
    const auto g = emden_rhs(q);
    const auto st = solve_steady(phi, g, 1.0);
    CHECK(euler_lagrange_residual(st, g) <= 1e-6);
}

TEST_CASE("a uniform ball is far from equilibrium") {
    const auto g = emden_rhs(make_polytrope_q(1.0));
    const auto grid = make_graded_grid(600, 3.0);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = grid.node(i) <= 1.0 ? 1.0 : 0.0;
    SteadyState fake;
    fake.density = RadialDensity(grid, std::move(v));
    fake.mass = fake.density.mass();
    fake.support_radius = 1.0;
    fake.multiplier = -fake.mass / 1.0;
    CHECK(euler_lagrange_residual(fake, g) > 0.1);
}

TEST_CASE("residual is invariant under the solution-covariant scaling") {
    // for homogeneous g of degree n the family rho -> beta^n rho(gamma x),
    // U -> beta U(gamma x), E0 -> beta E0 with gamma = beta^((n-1)/2) maps the
    // Euler-Lagrange relation onto itself, so the relative defect is unchanged
    const double n = 2.5;
    const auto g = GFunction::power_law(0.9, n);
    const auto grid = make_graded_grid(500, 3.0);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = grid.node(i) <= 1.2 ? 0.8 : 0.0;

    SteadyState base;
    base.density = RadialDensity(grid, std::move(v));
    base.mass = base.density.mass();
    base.multiplier = -base.mass / 1.2;

    const double beta = 1.7;
    const double gamma = std::pow(beta, (n - 1.0) / 2.0);
    SteadyState scaled;
    scaled.density = scale_density(base.density, std::pow(beta, n), gamma);
    scaled.mass = scaled.density.mass();
    scaled.multiplier = beta * base.multiplier;

    const double r_base = euler_lagrange_residual(base, g);
    const double r_scaled = euler_lagrange_residual(scaled, g);
    CHECK(r_base > 0.01); // meaningfully far from a solution
    CHECK(r_scaled == Catch::Approx(r_base).epsilon(1e-10));
}

TEST_CASE("minimality spot-check against same-mass competitors") {
    const auto q = make_polytrope_q(1.0);
    const auto phi = phi_from_q(q);
    const auto g = emden_rhs(q);
    const double M = 1.0;
    const auto st = solve_steady(phi, g, M);
    const double h = st.energy.reduced_total;

    // uniform balls of several radii
    for (double R : {0.5 * st.support_radius, st.support_radius, 2.0 * st.support_radius}) {
        const auto ball = uniform_ball(M, R, 512);
        CHECK(h <= reduced_energy(phi, ball));
    }
    // gaussian bump normalized to the same mass
    const auto& grid = st.density.grid();
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.node(i) / (0.5 * st.support_radius);
        v[i] = std::exp(-x * x);
    }
    RadialDensity bump(grid, v);
    const double f = M / bump.mass();
    for (auto& x : v) x *= f;
    CHECK(h <= reduced_energy(phi, RadialDensity(grid, v)));

    // mass-preserving rescalings of the minimizer itself
    for (double b : {0.8, 1.25}) {
        const auto rescaled = scale_density(st.density, b * b * b, b);
        CHECK(rescaled.mass() == Catch::Approx(M).epsilon(1e-12));
        CHECK(h <= reduced_energy(phi, rescaled));
    }
}

TEST_CASE("mass doubling obeys the homogeneous energy power law") {
    const auto q = make_polytrope_q(1.0); // n = 2.5
    const auto phi = phi_from_q(q);
    const auto g = emden_rhs(q);
    const double n = g.degree();
    const auto h1 = solve_steady(phi, g, 1.0).energy.reduced_total;
    const auto h2 = solve_steady(phi, g, 2.0).energy.reduced_total;
    const double exact = std::pow(2.0, (5.0 - n) / (3.0 - n));
    CHECK(h2 / h1 == Catch::Approx(exact).epsilon(1e-7));
    // and in particular h_{2M} <= 2^{5/3} h_M
    CHECK(h2 <= std::pow(2.0, 5.0 / 3.0) * h1);
}

TEST_CASE("solve_steady input validation") {
    CHECK_THROWS_AS(solve_steady(quadratic_phi(), linear_g(), -1.0), invalid_parameter_error);
    CHECK_THROWS_AS(solve_steady(quadratic_phi(), GFunction::power_law(1.0, 3.0), 1.0),
                    unbounded_profile_error);
}
