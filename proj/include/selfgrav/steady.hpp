#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "selfgrav/convex.hpp"
#include "selfgrav/energy_report.hpp"
#include "selfgrav/errors.hpp"
#include "selfgrav/ode.hpp"
#include "selfgrav/radial.hpp"
#include "selfgrav/reduction.hpp"

namespace selfgrav {

/// Solver knobs for the radial shooting integration.
struct ShootOptions {
    double rel_tol = 1e-11;       ///< local error control of the embedded pair
    double zero_rtol = 1e-12;     ///< relative accuracy of the first-zero radius
    double r_max_factor = 200.0;  ///< give up beyond this multiple of the core scale
    std::size_t max_steps = 200000;
};

/// Solution of  w'' + (2/r) w' = -4 pi g(w_+),  w(0)=w_c, w'(0)=0, integrated
/// to the first zero R of w. Here w(r) = E_0 - U_0(r); the enclosed mass is
/// m(r) = -r^2 w'(r), so the total mass and multiplier come out as
/// M = -R^2 w'(R) and E_0 = -M/R.
class ShootingProfile {
public:
    ShootingProfile(double w_c, double radius, double mass, std::vector<OdeStep> steps,
                    double series_curv)
        : w_c_(w_c), radius_(radius), mass_(mass), steps_(std::move(steps)),
          series_curv_(series_curv) {
        if (!(mass_ > 0.0))
            throw internal_consistency_error("ShootingProfile: nonpositive mass");
    }

    double central_value() const { return w_c_; }
    double radius() const { return radius_; }
    double mass() const { return mass_; }
    double multiplier() const { return -mass_ / radius_; }

    /// w(r) on [0, R]; 0 at R, series near the center, Hermite elsewhere.
    double w(double r) const {
        if (r <= 0.0) return w_c_;
        if (r >= radius_) return 0.0;
        if (steps_.empty() || r < steps_.front().r0) return w_c_ - series_curv_ * r * r;
        return hermite_eval(*find_step(r), 0, r);
    }

    /// Enclosed mass m(r) = -r^2 w'(r); equals M at and beyond R.
    double enclosed_mass(double r) const {
        if (r <= 0.0) return 0.0;
        if (r >= radius_) return mass_;
        if (steps_.empty() || r < steps_.front().r0)
            return 2.0 * series_curv_ * r * r * r; // -y with y = -2 a2 r^3
        return -hermite_eval(*find_step(r), 1, r);
    }

    const std::vector<OdeStep>& steps() const { return steps_; }

private:
    const OdeStep* find_step(double r) const {
        auto it = std::upper_bound(steps_.begin(), steps_.end(), r,
                                   [](double rv, const OdeStep& s) { return rv < s.r1; });
        if (it == steps_.end()) return &steps_.back();
        return &*it;
    }

    double w_c_;
    double radius_;
    double mass_;
    std::vector<OdeStep> steps_;
    double series_curv_; // (2 pi / 3) g(w_c)
};

/// Integrate the radial equation from a regular center until the first zero of
/// w. State vector is (w, y) with y = r^2 w', which carries the enclosed mass
/// directly and avoids differentiating the profile:
///   w' = y / r^2,   y' = -4 pi r^2 g(w_+).
inline ShootingProfile shoot(const GFunction& g, double w_c, const ShootOptions& opt = {}) {
    if (!(w_c > 0.0)) throw invalid_parameter_error("shoot: w_c must be positive");
    if (w_c > g.lambda_max() * (1.0 + 1e-12))
        throw domain_cutoff_error("shoot: w_c beyond the domain of g");
    const double g_c = g(w_c);
    if (!(g_c > 0.0))
        throw unbounded_profile_error("shoot: g vanishes at the center value, profile stays flat");

    const auto rhs = [&g](double r, const std::array<double, 2>& s) -> std::array<double, 2> {
        return {s[1] / (r * r), -four_pi * r * r * g(std::max(s[0], 0.0))};
    };

    const double curv = 2.0 * std::numbers::pi / 3.0 * g_c;   // w ~ w_c - curv r^2
    const double core_scale = std::sqrt(w_c / curv);
    const double r_max = opt.r_max_factor * core_scale;

    // series start; the quartic correction is O((r0/core_scale)^4) relative
    double r = 1e-5 * core_scale;
    std::array<double, 2> y{w_c - curv * r * r, -2.0 * curv * r * r * r};

    DormandPrince integ(rhs, opt.rel_tol, {1e-14 * w_c, 1e-14 * w_c * core_scale});
    std::vector<OdeStep> steps;
    steps.reserve(4096);

    double h = 0.1 * core_scale;
    auto dy = rhs(r, y);
    std::size_t n = 0;
    while (r < r_max) {
        if (++n > opt.max_steps)
            throw stiffness_error("shoot: step budget exhausted");
        h = std::min(h, r_max - r + 0.1 * h);
        if (h < 1e-14 * core_scale)
            throw stiffness_error("shoot: step size underflow");
        const auto res = integ.step(r, y, dy, h);
        if (res.err > 1.0) {
            h *= std::clamp(0.9 * std::pow(res.err, -0.2), 0.1, 0.5);
            continue;
        }
        if (res.y[0] <= 0.0) {
            // first zero inside this step: shrink the step size until w lands
            // on zero; single RK steps are smooth in h, so bisection is exact
            double lo = 0.0, hi = h;
            auto land = res;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const auto trial = integ.step(r, y, dy, mid);
                if (trial.y[0] > 0.0)
                    lo = mid;
                else {
                    hi = mid;
                    land = trial;
                }
                if ((hi - lo) < opt.zero_rtol * (r + hi) ||
                    std::abs(land.y[0]) < 1e-13 * w_c)
                    break;
            }
            const double R = r + hi;
            steps.push_back(OdeStep{r, R, y, land.y, dy, land.dy_end});
            const double mass = -land.y[1];
            return ShootingProfile(w_c, R, mass, std::move(steps), curv);
        }
        steps.push_back(OdeStep{r, r + h, y, res.y, dy, res.dy_end});
        r += h;
        y = res.y;
        dy = res.dy_end;
        h *= std::clamp(0.9 * std::pow(std::max(res.err, 1e-10), -0.2), 1.0, 5.0);
    }
    throw unbounded_profile_error(
        "shoot: no zero of w before r_max; g may grow too fast (n >= 3) or vanish");
}

/// A computed minimizer bundle: the density, its potential, the cutoff energy
/// E_0, support radius, mass and the energy bookkeeping.
struct SteadyState {
    RadialDensity density;
    RadialPotential potential;
    std::vector<double> w; ///< w(r_i) = E_0 - U_0(r_i), clipped at 0 outside
    double multiplier = 0.0;
    double support_radius = 0.0;
    double mass = 0.0;
    EnergyReport energy;
};

struct SolveOptions {
    std::size_t grid_nodes = 2000;
    double grid_margin = 1.5;    ///< grid extends to margin * max(R, R_0 estimate)
    double mass_rtol = 1e-8;     ///< relative mass matching (bisection route)
    bool force_bisection = false; ///< skip the exact scaling family (cross-validation)
    ShootOptions shoot;
};

/// Sample a shooting profile onto a graded grid and assemble the steady state
/// with its energy report.
inline SteadyState assemble_state(const ConvexScalarFunction& phi, const GFunction& g,
                                  const ShootingProfile& prof, const SolveOptions& opt = {}) {
    const double R = prof.radius();
    const double M = prof.mass();
    const double E0 = prof.multiplier();

    // conservative support bound R_0 = -(3/5) M^2 / h using this state's energy
    // as the upper bound for the infimum; fall back to margin * R if positive
    double r_out = opt.grid_margin * R;
    const RadialGrid grid = make_graded_grid(opt.grid_nodes, r_out, R);

    const std::size_t n = grid.size();
    std::vector<double> rho(n, 0.0), u(n, 0.0), w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid.node(i);
        if (r < R) {
            w[i] = prof.w(r);
            rho[i] = g(w[i]);
            u[i] = E0 - w[i];
        } else {
            w[i] = 0.0;
            rho[i] = 0.0;
            u[i] = -M / (r > 0.0 ? r : R);
        }
    }
    SteadyState st;
    st.density = RadialDensity(grid, std::move(rho));
    st.potential = RadialPotential(grid, std::move(u), st.density.enclosed_mass_nodes(),
                                   st.density.mass());
    st.w = std::move(w);
    st.multiplier = E0;
    st.support_radius = R;
    st.mass = st.density.mass();
    st.energy.internal = internal_energy(phi, st.density);
    st.energy.epot = potential_energy(st.density);
    st.energy.reduced_total = st.energy.internal + st.energy.epot;
    return st;
}

/// Match a prescribed total mass. For a homogeneous g = c lambda^n the exact
/// scaling family w -> beta w(beta^((n-1)/2) r), which multiplies the mass by
/// beta^((3-n)/2), maps a single reference profile to the target in one step;
/// otherwise the central value is found by bisection on the (increasing)
/// mass-versus-w_c map.
inline SteadyState solve_steady(const ConvexScalarFunction& phi, const GFunction& g, double mass,
                                const SolveOptions& opt = {}) {
    if (!(mass > 0.0)) throw invalid_parameter_error("solve_steady: mass must be positive");

    if (g.homogeneous() && !opt.force_bisection) {
        const double n = g.degree();
        if (!(n < 3.0))
            throw unbounded_profile_error("solve_steady: homogeneous degree n >= 3 has no "
                                           "mass-parametrized family");
        const auto ref = shoot(g, 1.0, opt.shoot);
        const double beta = std::pow(mass / ref.mass(), 2.0 / (3.0 - n));
        const auto prof = shoot(g, beta, opt.shoot);
        return assemble_state(phi, g, prof, opt);
    }

    // bracket the target mass on the w_c axis
    const double wc_cap = std::isfinite(g.lambda_max()) ? g.lambda_max() : 1e12;
    double lo = 1e-6 * std::min(wc_cap, 1.0), hi = std::min(1.0, wc_cap);
    double m_lo = shoot(g, lo, opt.shoot).mass();
    double m_hi = shoot(g, hi, opt.shoot).mass();
    int guard = 0;
    while (m_lo > mass) {
        lo *= 0.25;
        if (++guard > 60) throw bracket_failure_error("solve_steady: mass below reachable range");
        m_lo = shoot(g, lo, opt.shoot).mass();
    }
    while (m_hi < mass) {
        hi = std::min(hi * 4.0, wc_cap);
        m_hi = shoot(g, hi, opt.shoot).mass();
        if (++guard > 60 || (hi >= wc_cap && m_hi < mass))
            throw bracket_failure_error("solve_steady: mass not attainable within the domain of g");
    }
    double w_best = hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double m_mid = shoot(g, mid, opt.shoot).mass();
        if (std::abs(m_mid - mass) <= opt.mass_rtol * mass) {
            w_best = mid;
            break;
        }
        (m_mid < mass ? lo : hi) = mid;
        w_best = 0.5 * (lo + hi);
    }
    return assemble_state(phi, g, shoot(g, w_best, opt.shoot), opt);
}

/// Self-consistency of an assembled state: recompute the potential of rho by
/// quadrature and measure the Euler-Lagrange defect
///   max_i |rho_i - g((E_0 - U_i)_+)| / max(rho(0), 1e-300).
/// For solver output this ties the ODE route to the quadrature route; a state
/// that does not satisfy the equation scores O(1).
inline double euler_lagrange_residual(const SteadyState& state, const GFunction& g) {
    const RadialPotential u = potential_from_density(state.density);
    const double scale = std::max(state.density.value(0), 1e-300);
    double worst = 0.0;
    for (std::size_t i = 0; i < state.density.size(); ++i) {
        const double lam = state.multiplier - u.value(i);
        const double expect = g(std::max(lam, 0.0));
        worst = std::max(worst, std::abs(state.density.value(i) - expect));
    }
    return worst / scale;
}

} // namespace selfgrav
