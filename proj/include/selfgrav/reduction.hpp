#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "selfgrav/convex.hpp"
#include "selfgrav/errors.hpp"
#include "selfgrav/interp.hpp"
#include "selfgrav/quadrature.hpp"

namespace selfgrav {

inline constexpr double four_pi_sqrt2 = 4.0 * std::numbers::pi * std::numbers::sqrt2;

/// The monotone map g(lambda) = (Phi')^{-1}_+(lambda): zero for lambda <= 0,
/// strictly increasing where defined. This is the right-hand side of the
/// semilinear radial Poisson equation satisfied by minimizers.
///
/// For polytropic input the map is an exact power law g = c lambda^n and the
/// homogeneity metadata (c, n) is kept; general input is tabulated with
/// monotone interpolation.
class GFunction {
public:
    static GFunction power_law(double coeff, double n) {
        if (!(coeff > 0.0) || !(n > 0.0))
            throw invalid_parameter_error("GFunction::power_law: need coeff > 0 and n > 0");
        GFunction g;
        g.homogeneous_ = true;
        g.coeff_ = coeff;
        g.n_ = n;
        g.lambda_max_ = std::numeric_limits<double>::infinity();
        return g;
    }

    static GFunction tabulated(std::vector<double> lambda, std::vector<double> values) {
        if (lambda.size() < 2 || values.size() != lambda.size())
            throw invalid_parameter_error("GFunction::tabulated: need matching tables");
        for (std::size_t i = 0; i + 1 < lambda.size(); ++i)
            if (!(lambda[i] < lambda[i + 1]) || values[i + 1] < values[i])
                throw invariant_violation_error("GFunction::tabulated: table not increasing");
        GFunction g;
        g.homogeneous_ = false;
        g.lambda_max_ = lambda.back();
        g.interp_ = MonotoneCubic(lambda, values);
        g.head_exp_ = values[0] > 0.0 && values[1] > 0.0
                          ? std::log(values[1] / values[0]) / std::log(lambda[1] / lambda[0])
                          : 1.0;
        return g;
    }

    /// g(lambda); zero on lambda <= 0.
    double operator()(double lambda) const {
        if (lambda <= 0.0) return 0.0;
        if (homogeneous_) return coeff_ * std::pow(lambda, n_);
        if (lambda > lambda_max_ * (1.0 + 1e-12))
            throw domain_cutoff_error("GFunction: lambda beyond tabulated range");
        if (lambda < interp_.x_min())
            return interp_.values().front() *
                   std::pow(lambda / interp_.x_min(), head_exp_);
        return interp_(std::min(lambda, lambda_max_));
    }

    /// Inverse map on values > 0 (g is strictly increasing there).
    double inverse(double value) const {
        if (value <= 0.0) return 0.0;
        if (homogeneous_) return std::pow(value / coeff_, 1.0 / n_);
        const auto f = [this](double l) { return (*this)(l); };
        return bisect_monotone(f, interp_.x_min(), lambda_max_, value,
                               1e-14 * lambda_max_);
    }

    bool homogeneous() const { return homogeneous_; }
    double coeff() const { return coeff_; }
    /// Homogeneity degree n (= k + 3/2 for a polytropic Q).
    double degree() const { return n_; }
    double lambda_max() const { return lambda_max_; }

private:
    bool homogeneous_ = true;
    double coeff_ = 1.0;
    double n_ = 1.0;
    double lambda_max_ = std::numeric_limits<double>::infinity();
    MonotoneCubic interp_;
    double head_exp_ = 1.0;
};

namespace detail {

/// Velocity-sphere integral  4 pi sqrt(2) * int_0^lambda F(lambda - E) sqrt(E) dE
/// after the substitution E = lambda s^2 that removes the sqrt endpoint:
///   = 4 pi sqrt(2) * 2 lambda^{3/2} int_0^1 F(lambda (1-s^2)) s^2 ds.
template <class F>
double velocity_integral(F&& f, double lambda, double rel_tol = 1e-11) {
    if (lambda <= 0.0) return 0.0;
    const auto integrand = [&](double s) { return f(lambda * (1.0 - s * s)) * s * s; };
    const double inner = integrate_rel(integrand, 0.0, 1.0, rel_tol);
    return four_pi_sqrt2 * 2.0 * std::pow(lambda, 1.5) * inner;
}

} // namespace detail

/// Phi*(lambda) = int Q*(lambda - |v|^2/2) dv, the velocity reduction of the
/// conjugate. Quadrature-based even for power-law input (the exact power
/// structure is kept, the constant is measured once at lambda = 1).
inline ConvexScalarFunction velocity_reduce(const ConvexScalarFunction& q_star,
                                            const TableRange& range = {}) {
    if (q_star.is_power_law()) {
        const double c1 = detail::velocity_integral(
            [&](double y) { return q_star.value(y); }, 1.0);
        if (c1 < 0.0)
            throw internal_consistency_error("velocity_reduce: negative quadrature result");
        // degree 1+k in lambda lifts to degree k+5/2
        return ConvexScalarFunction::power_law(c1, q_star.power_exponent() + 1.5);
    }
    const double lam_hi = std::min(q_star.cutoff(), range.hi);
    const auto lam = log_spaced(range.lo, lam_hi, range.n);
    std::vector<double> val(lam.size()), der(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) {
        val[i] = detail::velocity_integral([&](double y) { return q_star.value(y); }, lam[i]);
        // (Phi*)'(lambda) = int (Q*)'(lambda - |v|^2/2) dv with (Q*)' = (Q')^{-1}
        der[i] = detail::velocity_integral(
            [&](double y) { return q_star.derivative(y); }, lam[i]);
        if (val[i] < 0.0 || der[i] < 0.0)
            throw internal_consistency_error("velocity_reduce: negative quadrature result");
    }
    return ConvexScalarFunction::tabulated(lam, val, der, true);
}

/// The Emden-Fowler right-hand side g(lambda) = (Phi')^{-1}_+(lambda)
///   = 4 pi sqrt(2) int_0^lambda (Q')^{-1}(lambda - E) sqrt(E) dE.
/// For polytropic Q(f) = f^(1+1/k) this is c_k lambda^(k+3/2) and the constant
/// is determined by one quadrature at lambda = 1.
inline GFunction emden_rhs(const ConvexScalarFunction& q, const TableRange& range = {}) {
    const auto qp_inv = [&](double y) { return q.inverse_derivative(y); };
    if (q.is_power_law()) {
        const double k = 1.0 / (q.power_exponent() - 1.0);
        const double c = detail::velocity_integral(qp_inv, 1.0);
        return GFunction::power_law(c, k + 1.5);
    }
    const double lam_hi = std::min(q.derivative_range_max(), range.hi);
    const auto lam = log_spaced(range.lo, lam_hi, range.n);
    std::vector<double> val(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i)
        val[i] = detail::velocity_integral(qp_inv, lam[i]);
    return GFunction::tabulated(lam, val);
}

/// Phi = conjugate(velocity_reduce(conjugate(Q))): the cost of realizing a
/// spatial density rho as a velocity average, per unit volume. Strictly convex
/// with Phi(0) = Phi'(0) = 0; a polytropic Q with exponent parameter k yields a
/// pure power with exponent 1 + 1/(k + 3/2).
inline ConvexScalarFunction phi_from_q(const ConvexScalarFunction& q,
                                       const TableRange& range = {}) {
    return conjugate(velocity_reduce(conjugate(q), range));
}

/// The optimal velocity profile at a point where the cutoff energy excess is
/// lambda: g0(v) = (Q')^{-1}(lambda - |v|^2/2) for |v| < sqrt(2 lambda), zero
/// beyond. Its velocity integral equals g(lambda) from emden_rhs.
struct VelocityProfile {
    std::vector<double> speed;   // |v| samples
    std::vector<double> density; // g0(|v|)
    double support_radius = 0.0; // sqrt(2 lambda)
};

inline VelocityProfile per_point_velocity_minimizer(const ConvexScalarFunction& q, double lambda,
                                                    std::size_t samples = 257) {
    VelocityProfile p;
    if (lambda <= 0.0) {
        p.speed.assign({0.0});
        p.density.assign({0.0});
        return p;
    }
    p.support_radius = std::sqrt(2.0 * lambda);
    p.speed.resize(samples);
    p.density.resize(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double u = p.support_radius * static_cast<double>(i) /
                         static_cast<double>(samples - 1);
        p.speed[i] = u;
        p.density[i] = q.inverse_derivative(lambda - 0.5 * u * u);
    }
    p.density.back() = 0.0;
    return p;
}

/// int g0(v) dv of the per-point minimizer, by direct 1-D quadrature in |v|.
inline double velocity_profile_mass(const ConvexScalarFunction& q, double lambda) {
    if (lambda <= 0.0) return 0.0;
    const double vmax = std::sqrt(2.0 * lambda);
    const auto f = [&](double u) {
        return u * u * q.inverse_derivative(std::max(lambda - 0.5 * u * u, 0.0));
    };
    return 4.0 * std::numbers::pi * integrate_rel(f, 0.0, vmax, 1e-11);
}

} // namespace selfgrav
