#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "selfgrav/convex.hpp"
#include "selfgrav/interp.hpp"

using namespace selfgrav;

namespace {

/// Independent conjugate oracle: dense grid search of sup_r (lambda r - h(r)).
double conjugate_grid_sup(const ConvexScalarFunction& h, double lambda, double r_max,
                          std::size_t n = 400001) {
    double best = 0.0; // r = 0 always admissible, h(0) = 0
    for (std::size_t i = 1; i < n; ++i) {
        const double r = r_max * static_cast<double>(i) / static_cast<double>(n - 1);
        best = std::max(best, lambda * r - h.value(r));
    }
    return best;
}

/// Sample a power law into tables, losing the analytic structure.
ConvexScalarFunction tabulate(const ConvexScalarFunction& f, double lo = 1e-8, double hi = 1e4,
                              std::size_t n = 400) {
    const auto x = log_spaced(lo, hi, n);
    std::vector<double> v(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = f.value(x[i]);
        d[i] = f.derivative(x[i]);
    }
    return ConvexScalarFunction::tabulated(x, v, d, true);
}

} // namespace

TEST_CASE("polytropic Q has the exact power form") {
    const auto q1 = make_polytrope_q(1.0);
    CHECK(q1.power_exponent() == 2.0);
    CHECK(q1.value(3.0) == 9.0);
    CHECK(q1.derivative(3.0) == 6.0);
    CHECK(q1.inverse_derivative(6.0) == Catch::Approx(3.0).epsilon(1e-14));

    const auto qhalf = make_polytrope_q(0.5);
    CHECK(qhalf.power_exponent() == 3.0);
    CHECK(qhalf.value(2.0) == 8.0);

    CHECK(q1.value(0.0) == 0.0);
    CHECK(q1.derivative(0.0) == 0.0);
}

TEST_CASE("polytropic admissibility edge") {
    // construction succeeds at k = 3/2 but the reduced exponent n = 3 is flagged
    CHECK_NOTHROW(make_polytrope_q(1.5));
    CHECK_FALSE(polytrope_k_admissible(1.5));
    CHECK(polytrope_k_admissible(1.0));
    CHECK_THROWS_AS(make_polytrope_q(0.0), invalid_parameter_error);
    CHECK_THROWS_AS(make_polytrope_q(-2.0), invalid_parameter_error);
}

TEST_CASE("negative arguments are a domain flag, not a value") {
    const auto q = make_polytrope_q(1.0);
    CHECK_FALSE(q.in_domain(-1.0));
    CHECK_THROWS_AS(q.value(-1.0), domain_cutoff_error);
    CHECK(eval_plus(conjugate(q), -1.0) == 0.0); // Q*(lambda) = 0 for lambda < 0
}

TEST_CASE("conjugate of f^2 is lambda^2/4, against the grid-sup oracle") {
    const auto q = make_polytrope_q(1.0);
    const auto qs = conjugate(q);
    CHECK(qs.power_exponent() == Catch::Approx(2.0).epsilon(1e-14));
    CHECK(qs.power_coeff() == Catch::Approx(0.25).epsilon(1e-14));
    for (double lam : {0.3, 1.0, 2.5}) {
        const double oracle = conjugate_grid_sup(q, lam, 5.0 * lam);
        CHECK(qs.value(lam) == Catch::Approx(oracle).epsilon(1e-6));
        CHECK(qs.value(lam) == Catch::Approx(lam * lam / 4.0).epsilon(1e-12));
    }
}

TEST_CASE("double conjugation restores the function") {
    for (double k : {0.5, 1.0, 1.4}) {
        const auto q = make_polytrope_q(k, 0.7);
        const auto qss = conjugate(conjugate(q));
        CHECK(qss.power_exponent() == Catch::Approx(q.power_exponent()).epsilon(1e-12));
        CHECK(qss.power_coeff() == Catch::Approx(q.power_coeff()).epsilon(1e-12));
    }
    // tabulated route
    const auto qt = tabulate(make_polytrope_q(1.0));
    const auto qtss = conjugate(conjugate(qt));
    for (double x : {1e-3, 0.1, 1.0, 10.0, 100.0}) {
        CHECK(qtss.value(x) == Catch::Approx(qt.value(x)).epsilon(1e-8));
    }
}

TEST_CASE("conjugate duality (Q*)' = (Q')^{-1} on samples") {
    const auto qt = tabulate(make_polytrope_q(1.4, 1.3));
    const auto qs = conjugate(qt);
    const auto& lams = qs.sample_abscissae();
    for (std::size_t i = 0; i < lams.size(); i += 7) {
        const double lhs = qs.derivative(lams[i]);
        const double rhs = qt.inverse_derivative(lams[i]);
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-8));
    }
}

TEST_CASE("non-convex sample tables are rejected") {
    std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    std::vector<double> concave{1.0, 3.0, 4.0, 4.5}; // decreasing slopes
    std::vector<double> d{1.0, 2.0, 3.0, 4.0};
    CHECK_THROWS_AS(ConvexScalarFunction::tabulated(x, concave, d), invariant_violation_error);

    std::vector<double> v{1.0, 2.0, 4.0, 8.0};
    std::vector<double> bad_d{1.0, 2.0, 2.0, 4.0}; // not strictly increasing
    CHECK_THROWS_AS(ConvexScalarFunction::tabulated(x, v, bad_d), invariant_violation_error);
}

TEST_CASE("tabulated cutoff is enforced") {
    const auto qt = tabulate(make_polytrope_q(1.0), 1e-6, 1e2);
    CHECK_THROWS_AS(qt.value(1e3), domain_cutoff_error);
    CHECK_THROWS_AS(qt.inverse_derivative(1e9), domain_cutoff_error);
    CHECK_NOTHROW(qt.value(50.0));
}

TEST_CASE("growth envelope sandwiches the generated Phi") {
    const auto phi = ConvexScalarFunction::power_law(0.51, 1.4); // n = 2.5
    const auto env = GrowthEnvelope::from_power_law(phi);
    CHECK(env.n() == Catch::Approx(2.5).epsilon(1e-12));
    CHECK_NOTHROW(env.validate_against(phi));

    const auto envt = GrowthEnvelope::fit(tabulate(phi), 1.0, 1.0);
    CHECK(envt.n() == Catch::Approx(2.5).epsilon(1e-3));
    CHECK_NOTHROW(envt.validate_against(tabulate(phi)));
}

TEST_CASE("growth envelope rejects exponents outside (0,3)") {
    CHECK_THROWS_AS(GrowthEnvelope(3.0, 1.0, 0.0, 1.0, 1.0, 1.0), invalid_parameter_error);
    CHECK_THROWS_AS(GrowthEnvelope(-0.5, 1.0, 0.0, 1.0, 1.0, 1.0), invalid_parameter_error);
}
