#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "selfgrav/convex.hpp"
#include "selfgrav/energy_report.hpp"
#include "selfgrav/errors.hpp"
#include "selfgrav/quadrature.hpp"
#include "selfgrav/radial.hpp"
#include "selfgrav/reduction.hpp"
#include "selfgrav/steady.hpp"

namespace selfgrav {

namespace detail {

/// Moments of an isotropic velocity profile. With t = |v|^2/2 and the depth
/// profile F(d) = f at d = lambda - t,
///   int (|v|^2/2)^p F(lambda - t) dv
///     = 4 pi sqrt(2) * 2 lambda^(p+3/2) int_0^1 F(lambda(1-s^2)) s^(2p+2) ds,
/// the substitution t = lambda s^2 removing the sqrt edge of the measure.
template <class F>
double velocity_moment(F&& f, double lambda, int p, double rel_tol = 1e-11) {
    if (lambda <= 0.0) return 0.0;
    const auto integrand = [&](double s) {
        return f(lambda * (1.0 - s * s)) * std::pow(s, 2 * p + 2);
    };
    const double inner = integrate_rel(integrand, 0.0, 1.0, rel_tol);
    return four_pi_sqrt2 * 2.0 * std::pow(lambda, p + 1.5) * inner;
}

} // namespace detail

/// Phase-space steady state f_0(x,v) = F((E_0 - E)_+) with the particle energy
/// E = |v|^2/2 + U_0(x). Isotropy collapses the six-dimensional object to the
/// depth profile F on [0, w_c] plus the radial potential; the (r,E) table view
/// is generated on demand.
class PhaseSpaceState {
public:
    /// Depth profile kinds: a power law F(d) = c d^k (from a polytropic Q or a
    /// direct ansatz with -1 < k), or a table.
    struct PowerProfile {
        double c;
        double k;
    };

    static PhaseSpaceState from_power_profile(PowerProfile p, const SteadyState& state,
                                              std::optional<ConvexScalarFunction> q = {}) {
        PhaseSpaceState ps;
        ps.power_ = p;
        ps.q_ = std::move(q);
        ps.state_ = &state;
        return ps;
    }

    static PhaseSpaceState from_table(MonotoneCubic depth_profile, const SteadyState& state,
                                      std::optional<ConvexScalarFunction> q = {}) {
        PhaseSpaceState ps;
        ps.table_ = std::move(depth_profile);
        ps.q_ = std::move(q);
        ps.state_ = &state;
        return ps;
    }

    const SteadyState& state() const { return *state_; }
    double multiplier() const { return state_->multiplier; }
    bool has_casimir() const { return q_.has_value(); }
    const ConvexScalarFunction& q() const {
        if (!q_) throw model_mismatch_error("PhaseSpaceState: no Q attached to this profile");
        return *q_;
    }

    /// Depth profile F(d); f_0 at energy E is F((E_0 - E)_+).
    double depth_value(double d) const {
        if (d <= 0.0) return 0.0;
        if (power_) return power_->c * std::pow(d, power_->k);
        return std::max((*table_)(d), 0.0);
    }

    /// f_0(r, E); zero wherever E >= E_0, and only E >= U_0(r) is physical.
    double value(double r, double E) const {
        const double u0 = state_->potential.value_at(std::max(r, 0.0));
        if (E < u0) return 0.0; // below the potential floor: empty phase space
        return depth_value(state_->multiplier - E);
    }

    /// Spatial density of f_0 at radius r by velocity quadrature.
    double velocity_integral_at(double r) const {
        const double lam = state_->multiplier - state_->potential.value_at(r);
        return detail::velocity_moment([this](double d) { return depth_value(d); }, lam, 0);
    }

    bool is_power() const { return power_.has_value(); }
    const PowerProfile& power() const { return *power_; }

private:
    std::optional<PowerProfile> power_;
    std::optional<MonotoneCubic> table_;
    std::optional<ConvexScalarFunction> q_;
    const SteadyState* state_ = nullptr;
};

/// Lift a reduced minimizer to phase space: f_0 = (Q')^{-1}((E_0 - E)_+).
/// The supplied Q must generate the state's model; the lift is checked by
/// comparing the velocity integral of f_0 with rho_0 at the grid nodes
/// (both vanish where U_0 >= E_0).
inline PhaseSpaceState lift(const ConvexScalarFunction& q, const SteadyState& state,
                            double consistency_tol = 1e-6) {
    PhaseSpaceState ps = [&] {
        if (q.is_power_law()) {
            const double k = 1.0 / (q.power_exponent() - 1.0);
            const double c = std::pow(1.0 / (q.power_coeff() * q.power_exponent()), k);
            return PhaseSpaceState::from_power_profile({c, k}, state, q);
        }
        const double w_c = state.multiplier - state.potential.value_at(0.0);
        const auto d = log_spaced(1e-10 * w_c, w_c, 400);
        std::vector<double> f(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) f[i] = q.inverse_derivative(d[i]);
        return PhaseSpaceState::from_table(MonotoneCubic(d, f), state, q);
    }();

    // model consistency: int f_0 dv must reproduce rho_0
    const auto& rho = state.density;
    const double scale = std::max(rho.value(0), 1e-300);
    const std::size_t stride = std::max<std::size_t>(1, rho.size() / 64);
    for (std::size_t i = 0; i < rho.size(); i += stride) {
        const double got = ps.velocity_integral_at(rho.grid().node(i));
        if (std::abs(got - rho.value(i)) > consistency_tol * scale)
            throw model_mismatch_error(
                "lift: velocity integral of f_0 does not reproduce rho_0; "
                "the supplied Q does not generate this state's model");
    }
    return ps;
}

namespace detail {

/// Radial integral of a per-node energy density against the grid volume
/// weights: sum_i dens(w_i) V_i.
template <class Dens>
double radial_energy(const SteadyState& st, Dens&& dens) {
    const auto& w = st.density.grid().volume_weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < st.w.size(); ++i)
        if (st.w[i] > 0.0) sum += dens(st.w[i]) * w[i];
    return sum;
}

} // namespace detail

/// E_kin(f) = (1/2) int int |v|^2 f dv dx through the isotropic-energy
/// representation. Power-law profiles use one unit quadrature plus exact
/// homogeneous scaling (the moment has degree k + 5/2 in lambda).
inline double kinetic_energy(const PhaseSpaceState& f) {
    const auto& st = f.state();
    if (f.is_power()) {
        const double unit =
            detail::velocity_moment([&f](double d) { return f.depth_value(d); }, 1.0, 1);
        const double deg = f.power().k + 2.5;
        return detail::radial_energy(st, [&](double lam) { return unit * std::pow(lam, deg); });
    }
    return detail::radial_energy(st, [&](double lam) {
        return detail::velocity_moment([&f](double d) { return f.depth_value(d); }, lam, 1);
    });
}

/// Casimir energy int int Q(f) dv dx with the same velocity measure.
inline double casimir_energy(const ConvexScalarFunction& q, const PhaseSpaceState& f) {
    const auto& st = f.state();
    const auto qf = [&](double d) {
        const double v = f.depth_value(d);
        return v > 0.0 ? q.value(v) : 0.0;
    };
    if (f.is_power() && q.is_power_law()) {
        // Q(c d^k) is again a power; one unit quadrature fixes the constant
        const double unit = detail::velocity_moment(qf, 1.0, 0);
        const double deg = f.power().k * q.power_exponent() + 1.5;
        return detail::radial_energy(st, [&](double lam) { return unit * std::pow(lam, deg); });
    }
    return detail::radial_energy(st, [&](double lam) { return detail::velocity_moment(qf, lam, 0); });
}

/// Full energy report of a lifted state: the reduced entries from the state,
/// the phase-space entries from the lift.
inline EnergyReport phase_space_report(const ConvexScalarFunction& q, const PhaseSpaceState& f) {
    EnergyReport rep = f.state().energy;
    rep.casimir = casimir_energy(q, f);
    rep.kinetic = kinetic_energy(f);
    rep.total = *rep.casimir + *rep.kinetic + rep.epot;
    rep.gap = *rep.total - rep.reduced_total;
    return rep;
}

/// Reduction gap H_C(f_0) - H_C^r(rho_0). Nonnegative up to quadrature noise
/// for any admissible competitor and ~0 for lifted minimizers.
inline double reduction_gap(const ConvexScalarFunction& q, const ConvexScalarFunction& phi,
                            const SteadyState& state) {
    (void)phi; // the state's report already carries int Phi(rho)
    const PhaseSpaceState f = lift(q, state);
    return *phase_space_report(q, f).gap;
}

/// Energy report of the velocity-broadened competitor
///   f_beta(x, v) = beta^{-3} f_0(x, v/beta),
/// which preserves the spatial density exactly while moving kinetic-Casimir
/// cost off the per-point optimum: its gap is positive for beta != 1.
inline EnergyReport broadened_competitor_report(const ConvexScalarFunction& q,
                                                const PhaseSpaceState& f, double beta) {
    if (!(beta > 0.0))
        throw invalid_parameter_error("broadened_competitor_report: beta must be positive");
    const auto& st = f.state();
    EnergyReport rep = st.energy;
    const double kin = kinetic_energy(f) * beta * beta;

    double cas;
    if (q.is_power_law()) {
        cas = casimir_energy(q, f) * std::pow(beta, -3.0 / (1.0 / (q.power_exponent() - 1.0)));
    } else {
        const double b3 = std::pow(beta, 3.0);
        const auto qfb = [&](double d) {
            const double v = f.depth_value(d) / b3;
            return v > 0.0 ? b3 * q.value(v) : 0.0;
        };
        cas = detail::radial_energy(st, [&](double lam) {
            return detail::velocity_moment(qfb, lam, 0);
        });
    }
    rep.kinetic = kin;
    rep.casimir = cas;
    rep.total = kin + cas + rep.epot;
    rep.gap = *rep.total - rep.reduced_total;
    return rep;
}

} // namespace selfgrav
