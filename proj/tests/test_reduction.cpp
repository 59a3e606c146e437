#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "selfgrav/convex.hpp"
#include "selfgrav/reduction.hpp"

using namespace selfgrav;

namespace {

// Frozen oracle values, computed ahead of the build by brute-force quadrature
// of c_k = 4 pi sqrt(2) (k/(k+1))^k int_0^1 (1-s)^k sqrt(s) ds:
constexpr double c_k_05 = 4.0292491242993493;  // = pi^2 sqrt(2) / (2 sqrt(3))
constexpr double c_k_10 = 2.3695375670177953;  // = 8 pi sqrt(2) / 15
constexpr double c_k_14 = 1.7358539348645237;
// Phi coefficients c_phi = n/(n+1) c_k^{-1/n}, n = k + 3/2:
constexpr double c_phi_05 = 0.33212126303408927;
constexpr double c_phi_10 = 0.50583226168233242;
constexpr double c_phi_14 = 0.61481243066314763;

/// Brute-force oracle, independent of the library quadrature: plain composite
/// Simpson of 4 pi sqrt(2) (k/(k+1))^k int_0^1 (1-s)^k sqrt(s) ds.
double emden_coefficient_oracle(double k, std::size_t panels = 2'000'000) {
    const auto f = [k](double s) { return std::pow(1.0 - s, k) * std::sqrt(s); };
    const double h = 1.0 / static_cast<double>(panels);
    double sum = f(0.0) + f(1.0);
    for (std::size_t i = 1; i < panels; ++i)
        sum += (i % 2 ? 4.0 : 2.0) * f(static_cast<double>(i) * h);
    const double integral = sum * h / 3.0;
    return four_pi_sqrt2 * std::pow(k / (k + 1.0), k) * integral;
}

ConvexScalarFunction tabulate(const ConvexScalarFunction& f, double lo = 1e-8, double hi = 1e4,
                              std::size_t n = 500) {
    const auto x = log_spaced(lo, hi, n);
    std::vector<double> v(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = f.value(x[i]);
        d[i] = f.derivative(x[i]);
    }
    return ConvexScalarFunction::tabulated(x, v, d, true);
}

/// Least-squares slope of log(phi) against log(rho).
double loglog_slope(const ConvexScalarFunction& phi, double lo, double hi, std::size_t n = 200) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double x : log_spaced(lo, hi, n)) {
        const double lx = std::log(x), ly = std::log(phi.value(x));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = static_cast<double>(n);
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

} // namespace

TEST_CASE("oracle self-check: frozen constants match the brute-force quadrature") {
    // the sqrt endpoint cusp limits composite Simpson to ~h^{3/2}
    CHECK(emden_coefficient_oracle(0.5) == Catch::Approx(c_k_05).epsilon(1e-8));
    CHECK(emden_coefficient_oracle(1.0) == Catch::Approx(c_k_10).epsilon(1e-8));
    CHECK(emden_coefficient_oracle(1.4) == Catch::Approx(c_k_14).epsilon(1e-8));
}

TEST_CASE("emden_rhs reproduces the oracle constants") {
    struct Case {
        double k, c;
    };
    for (const auto& [k, c] : {Case{0.5, c_k_05}, Case{1.0, c_k_10}, Case{1.4, c_k_14}}) {
        const auto g = emden_rhs(make_polytrope_q(k));
        REQUIRE(g.homogeneous());
        CHECK(g.degree() == Catch::Approx(k + 1.5).epsilon(1e-14));
        CHECK(g.coeff() == Catch::Approx(c).epsilon(1e-8));
        // against the independent oracle at the criterion tolerance
        CHECK(g.coeff() == Catch::Approx(emden_coefficient_oracle(k)).epsilon(1e-6));
        CHECK(g(0.0) == 0.0);
        CHECK(g(-1.0) == 0.0);
        CHECK(g(2.0) == Catch::Approx(c * std::pow(2.0, k + 1.5)).epsilon(1e-10));
    }
}

TEST_CASE("velocity reduction of a pure power conjugate") {
    // Q*(l) = l^{1+k}, k=1: Phi*(l) = 4 pi sqrt2 B(3,3/2) l^{7/2}, B(3,3/2)=16/105
    const auto q_star = ConvexScalarFunction::power_law(1.0, 2.0);
    const auto phi_star = velocity_reduce(q_star);
    REQUIRE(phi_star.is_power_law());
    CHECK(phi_star.power_exponent() == Catch::Approx(3.5).epsilon(1e-14));
    const double expected = four_pi_sqrt2 * 16.0 / 105.0;
    CHECK(phi_star.power_coeff() == Catch::Approx(expected).epsilon(1e-9));
}

TEST_CASE("zero case and exponent bookkeeping") {
    const auto phi_star = velocity_reduce(ConvexScalarFunction::power_law(2.0, 2.4));
    CHECK(eval_plus(phi_star, -1.0) == 0.0);
    CHECK(eval_plus(phi_star, 0.0) == 0.0);
    // degree 1+k lifts to k+5/2 = (1+k) + 3/2
    CHECK(phi_star.power_exponent() == Catch::Approx(2.4 + 1.5).epsilon(1e-14));
}

TEST_CASE("phi_from_q closes the polytrope family") {
    struct Case {
        double k, c_phi;
    };
    for (const auto& [k, c] : {Case{0.5, c_phi_05}, Case{1.0, c_phi_10}, Case{1.4, c_phi_14}}) {
        const auto phi = phi_from_q(make_polytrope_q(k));
        const double n = k + 1.5;
        REQUIRE(phi.is_power_law());
        CHECK(phi.power_exponent() == Catch::Approx(1.0 + 1.0 / n).epsilon(1e-12));
        CHECK(phi.power_coeff() == Catch::Approx(c).epsilon(1e-8));
        CHECK(phi.value(0.0) == 0.0);
        CHECK(phi.derivative(0.0) == 0.0);
    }
}

TEST_CASE("fitted log-log slope of Phi for k=1 is 1.4") {
    const auto phi = phi_from_q(make_polytrope_q(1.0));
    CHECK(loglog_slope(phi, 1e-4, 1e2) == Catch::Approx(1.4).epsilon(1e-6));
}

TEST_CASE("reduction consistency: (Phi*)' equals g") {
    for (double k : {0.5, 1.0, 1.4}) {
        const auto q = make_polytrope_q(k);
        const auto phi_star = velocity_reduce(conjugate(q));
        const auto g = emden_rhs(q);
        for (double lam : {0.01, 0.3, 1.0, 7.0}) {
            CHECK(phi_star.derivative(lam) == Catch::Approx(g(lam)).epsilon(1e-6));
        }
    }
}

TEST_CASE("tabulated pipeline tracks the analytic one") {
    const auto q = make_polytrope_q(1.0);
    const auto phi_exact = phi_from_q(q);
    const auto phi_tab = phi_from_q(tabulate(q));
    for (double x : {1e-3, 1e-1, 1.0, 10.0, 500.0}) {
        CHECK(phi_tab.value(x) == Catch::Approx(phi_exact.value(x)).epsilon(2e-5));
    }
    const auto g_tab = emden_rhs(tabulate(q));
    const auto g_exact = emden_rhs(q);
    for (double lam : {1e-2, 1.0, 30.0}) {
        CHECK(g_tab(lam) == Catch::Approx(g_exact(lam)).epsilon(2e-5));
    }
}

TEST_CASE("per-point velocity minimizer") {
    const auto q = make_polytrope_q(1.0);

    SECTION("empty support for lambda <= 0") {
        const auto p = per_point_velocity_minimizer(q, -0.5);
        CHECK(p.support_radius == 0.0);
        for (double v : p.density) CHECK(v == 0.0);
    }

    SECTION("k=1, lambda=1: profile (1 - v^2/2)/2 with support sqrt(2)") {
        const double lam = 1.0;
        const auto p = per_point_velocity_minimizer(q, lam);
        CHECK(p.support_radius == Catch::Approx(std::sqrt(2.0)).epsilon(1e-14));
        for (std::size_t i = 0; i < p.speed.size(); ++i) {
            const double expect = std::max(lam - 0.5 * p.speed[i] * p.speed[i], 0.0) / 2.0;
            CHECK(p.density[i] == Catch::Approx(expect).margin(1e-12));
        }
    }

    SECTION("its velocity integral reproduces g(lambda)") {
        const auto g = emden_rhs(q);
        for (double lam : {0.2, 1.0, 3.0}) {
            CHECK(velocity_profile_mass(q, lam) == Catch::Approx(g(lam)).epsilon(1e-8));
        }
        CHECK(velocity_profile_mass(q, 1.0) ==
              Catch::Approx(8.0 * std::numbers::pi * std::numbers::sqrt2 / 15.0).epsilon(1e-9));
    }
}

TEST_CASE("growth sandwich transfers from Q to Phi") {
    // Q sandwiched between two polytropes => computed Phi sandwiched with the
    // reduced exponents on the same side
    const double k = 1.0;
    const auto phi = phi_from_q(make_polytrope_q(k));
    const auto lo = phi_from_q(make_polytrope_q(k, 0.5));
    const auto hi = phi_from_q(make_polytrope_q(k, 2.0));
    for (double x : log_spaced(1e-4, 1e3, 50)) {
        CHECK(phi.value(x) <= hi.value(x) * (1 + 1e-12));
        CHECK(phi.value(x) >= lo.value(x) * (1 - 1e-12));
    }
}
