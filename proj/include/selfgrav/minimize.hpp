#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "selfgrav/convex.hpp"
#include "selfgrav/errors.hpp"
#include "selfgrav/radial.hpp"
#include "selfgrav/reduction.hpp"
#include "selfgrav/steady.hpp"

namespace selfgrav {

/// Outcome of the direct constrained minimization.
struct MinimizerResult {
    RadialDensity density;
    double multiplier = 0.0;
    std::vector<double> energy_trajectory;
    std::vector<double> residual_trajectory;
    std::vector<double> mass_outside_trajectory; ///< mass beyond the diagnostic radius
    double diagnostic_radius = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    EnergyReport energy;
};

struct MinimizeOptions {
    std::size_t max_iterations = 600;
    double residual_tol = 1e-9;     ///< relative Euler-Lagrange residual
    double energy_tol = 1e-13;      ///< relative energy decrement for the stop test
    double tau_initial = 0.5;       ///< damping of the fixed-point update
    double tau_floor = 1e-3;
    double mass_rtol = 1e-12;       ///< multiplier bisection target
    std::optional<double> initial_radius;    ///< uniform-ball initializer radius
    std::optional<double> diagnostic_radius; ///< concentration diagnostic radius
};

namespace detail {

/// Choose E_0 so that int g((E_0 - U)_+) dx = mass. The map E_0 -> mass is
/// continuous and strictly increasing on (min U, 0), vanishing at min U.
inline double match_multiplier(const GFunction& g, const RadialGrid& grid,
                               const std::vector<double>& u, double mass, double rel_tol) {
    const auto& w = grid.volume_weights();
    const auto mass_of = [&](double e0) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            s += g(std::max(e0 - u[i], 0.0)) * w[i];
        return s;
    };
    double lo = *std::min_element(u.begin(), u.end());
    double hi = 0.0;
    if (std::isfinite(g.lambda_max()))
        hi = std::min(hi, lo + g.lambda_max()); // keep g evaluations inside its table
    if (mass_of(hi) < mass)
        throw multiplier_error("match_multiplier: prescribed mass exceeds the attainable "
                               "range on this grid");
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double m = mass_of(mid);
        if (std::abs(m - mass) <= rel_tol * mass) return mid;
        (m < mass ? lo : hi) = mid;
    }
    return mid;
}

} // namespace detail

/// Direct minimization of the reduced functional over densities of fixed mass
/// by a damped fixed point on the Euler-Lagrange map: given rho_i, compute its
/// potential U_i, pick the multiplier E_0 by bisection so the updated density
/// has the right mass, then blend rho_{i+1} = (1-tau) rho_i + tau g((E_0-U_i)_+).
/// Steps that would raise the energy are retried with halved damping.
inline MinimizerResult minimize_reduced(const ConvexScalarFunction& phi, const GFunction& g,
                                        double mass, const RadialGrid& grid,
                                        const MinimizeOptions& opt = {}) {
    if (!(mass > 0.0)) throw invalid_parameter_error("minimize_reduced: mass must be positive");
    const std::size_t n = grid.size();

    const double r_ball = opt.initial_radius.value_or(0.25 * grid.r_max());
    const double rho_c = mass / (four_pi / 3.0 * r_ball * r_ball * r_ball);
    std::vector<double> rho(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        rho[i] = grid.node(i) <= r_ball ? rho_c : 0.0;
    {
        // normalize the sampled ball to the exact prescribed mass
        RadialDensity trial(grid, rho);
        const double f = mass / trial.mass();
        for (double& v : rho) v *= f;
    }

    const double r_diag = opt.diagnostic_radius.value_or(0.5 * grid.r_max());

    MinimizerResult out;
    out.diagnostic_radius = r_diag;
    RadialDensity current(grid, rho);
    double energy = reduced_energy(phi, current);
    double tau = opt.tau_initial;
    double e0 = 0.0;
    double residual = std::numeric_limits<double>::infinity();

    out.energy_trajectory.push_back(energy);
    out.mass_outside_trajectory.push_back(current.mass() - current.enclosed_mass(r_diag));

    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
        const RadialPotential u = potential_from_density(current);
        e0 = detail::match_multiplier(g, grid, u.values(), mass, opt.mass_rtol);

        std::vector<double> target(n);
        double scale = 1e-300;
        residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            target[i] = g(std::max(e0 - u.value(i), 0.0));
            scale = std::max(scale, current.value(i));
        }
        for (std::size_t i = 0; i < n; ++i)
            residual = std::max(residual, std::abs(current.value(i) - target[i]));
        residual /= std::max(current.value(0), 1e-300);
        out.residual_trajectory.push_back(residual);

        const double prev_energy = energy;
        bool accepted = false;
        while (!accepted) {
            std::vector<double> next(n);
            for (std::size_t i = 0; i < n; ++i)
                next[i] = (1.0 - tau) * current.value(i) + tau * target[i];
            RadialDensity cand(grid, std::move(next));
            const double cand_energy = reduced_energy(phi, cand);
            if (cand_energy <= prev_energy + 1e-14 * std::abs(prev_energy)) {
                current = std::move(cand);
                energy = cand_energy;
                accepted = true;
            } else {
                tau *= 0.5;
                if (tau < opt.tau_floor)
                    throw convergence_error(
                        "minimize_reduced: energy stopped decreasing at the damping floor",
                        out.energy_trajectory);
            }
        }
        tau = std::min(tau * 1.3, 1.0);

        out.energy_trajectory.push_back(energy);
        out.mass_outside_trajectory.push_back(current.mass() - current.enclosed_mass(r_diag));
        out.iterations = it + 1;

        const double decrement = std::abs(prev_energy - energy);
        if (residual <= opt.residual_tol &&
            decrement <= opt.energy_tol * std::abs(energy)) {
            out.converged = true;
            break;
        }
    }

    out.density = std::move(current);
    out.multiplier = e0;
    out.energy.internal = internal_energy(phi, out.density);
    out.energy.epot = potential_energy(out.density);
    out.energy.reduced_total = out.energy.internal + out.energy.epot;
    if (!out.converged)
        throw convergence_error("minimize_reduced: iteration budget exhausted",
                                out.energy_trajectory);
    return out;
}

/// Spherically symmetric decreasing rearrangement. The node samples are
/// treated as atoms (value, volume) against the grid's volume measure, sorted
/// by decreasing value, and laid out from the center outward as a step
/// profile on the slab edges given by cumulative volume. The multiset of
/// atoms is unchanged, so the mass and every integral of the form
/// int F(rho) dx are preserved exactly; an already nonincreasing profile is
/// returned unchanged.
inline RadialDensity rearrange_decreasing(const RadialDensity& rho) {
    const auto& v = rho.values();
    const bool nonincreasing = std::adjacent_find(v.begin(), v.end(), [](double a, double b) {
                                   return b > a;
                               }) == v.end();
    if (nonincreasing) return rho;

    std::vector<std::pair<double, double>> atoms; // (value, volume)
    if (rho.kind() == ProfileKind::Step) {
        for (std::size_t i = 1; i < v.size(); ++i) {
            const double a = rho.grid().node(i - 1), b = rho.grid().node(i);
            atoms.emplace_back(v[i], four_pi / 3.0 * (b * b * b - a * a * a));
        }
    } else {
        const auto& w = rho.grid().volume_weights();
        for (std::size_t i = 0; i < v.size(); ++i) atoms.emplace_back(v[i], w[i]);
    }
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    std::vector<double> nodes{0.0}, vals{atoms.front().first};
    double volume = 0.0;
    for (const auto& [value, vol] : atoms) {
        volume += vol;
        nodes.push_back(std::cbrt(3.0 * volume / four_pi));
        vals.push_back(value);
    }
    // merge numerically coincident edges produced by zero-volume atoms
    std::vector<double> nn{nodes.front()};
    std::vector<double> vv{vals.front()};
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (nodes[i] > nn.back() * (1.0 + 1e-15) + 1e-300) {
            nn.push_back(nodes[i]);
            vv.push_back(vals[i]);
        }
    }
    return RadialDensity(RadialGrid(std::move(nn)), std::move(vv), ProfileKind::Step);
}

/// Both sides of one of the quantitative estimates, with the constants used.
struct SplitReport {
    double lhs = 0.0;          ///< the quantity being bounded
    double rhs = 0.0;          ///< the bound
    bool satisfied = false;
    // context, populated per estimate
    double mass_inside = 0.0;
    double mass_outside = 0.0;
    double split_radius = 0.0;
    double r0 = 0.0;            ///< -(3/5) M^2 / h
    double i1 = 0.0, i2 = 0.0, i3 = 0.0;
    double constant_a = 0.0, constant_b = 0.0;
    double interaction_cross = 0.0;
};

/// Lower bound of the reduced energy in terms of the internal energy
/// (coercivity): H >= int Phi - C_A - C_B (int Phi)^(n/3), with the constants
/// assembled from the growth envelope through the Hardy-Littlewood-Sobolev
/// bound for the Coulomb kernel plus interpolation of L^p norms:
///   -E_pot <= (C_hls/2) ||rho||_{6/5}^2
///          <= (C_hls/2) M^{(5-n)/3} ||rho||_{1+1/n}^{(n+1)/3}
///          <= C_A + C_B (int Phi)^{n/3}.
inline SplitReport coercivity_bound(const GrowthEnvelope& env, const ConvexScalarFunction& phi,
                                    const RadialDensity& rho) {
    // sharp constant for int int f(x) g(y)/|x-y| <= C ||f||_{6/5} ||g||_{6/5}
    const double c_hls = 2.2940107035415990;
    const double n = env.n();
    const double mass = rho.mass();
    const double c1 = 0.5 * c_hls;
    const double c_a = env.rho_large() > 0.0
                           ? c1 * std::pow(mass, 5.0 / 3.0) * std::cbrt(env.rho_large())
                           : 0.0;
    const double c_b = c1 * std::pow(mass, (5.0 - n) / 3.0) * std::pow(env.c_lower(), -n / 3.0);

    const double internal = internal_energy(phi, rho);
    const double h = internal + potential_energy(rho);

    SplitReport rep;
    rep.constant_a = c_a;
    rep.constant_b = c_b;
    rep.lhs = h;
    rep.rhs = internal - c_a - c_b * std::pow(internal, n / 3.0);
    rep.satisfied = rep.lhs >= rep.rhs - 1e-12 * std::max(1.0, std::abs(rep.rhs));
    return rep;
}

/// Symmetric splitting estimate: with m the mass outside the ball of radius R
/// and R_0 = -(3/5) M^2 / h_upper built from an upper bound h_upper <= 0 for
/// the infimum,
///   H(rho) >= h_upper + [1/R_0 - 1/R] (M - m) m
/// (replacing the infimum by h_upper weakens the bound; both sides are
/// reported). Also checks the interior/exterior interaction against (M-m)m/R.
inline SplitReport splitting_bound_sym(const ConvexScalarFunction& phi, const RadialDensity& rho,
                                       double split_radius, double h_upper) {
    if (!(split_radius > 0.0))
        throw invalid_parameter_error("splitting_bound_sym: R must be positive");
    if (!(h_upper < 0.0))
        throw invalid_parameter_error("splitting_bound_sym: h_upper must be negative");

    const double mass = rho.mass();
    const double m_in = rho.enclosed_mass(split_radius);
    const double m_out = mass - m_in;
    const double r0 = -0.6 * mass * mass / h_upper;

    SplitReport rep;
    rep.split_radius = split_radius;
    rep.mass_inside = m_in;
    rep.mass_outside = m_out;
    rep.r0 = r0;
    rep.lhs = reduced_energy(phi, rho);
    rep.rhs = h_upper + (1.0 / r0 - 1.0 / split_radius) * m_in * m_out;
    rep.satisfied = rep.lhs >= rep.rhs - 1e-10 * std::max(1.0, std::abs(rep.rhs));

    // cross term of the interior/exterior split, bounded by (M-m) m / R
    const auto& g = rho.grid();
    std::vector<double> inner(rho.size(), 0.0), outer(rho.size(), 0.0);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double r = rho.kind() == ProfileKind::Step && i > 0 ? g.node(i - 1) : g.node(i);
        (r <= split_radius ? inner[i] : outer[i]) = rho.value(i);
    }
    const RadialDensity rho_in(g, std::move(inner), rho.kind());
    const RadialDensity rho_out(g, std::move(outer), rho.kind());
    rep.interaction_cross = interaction_energy(rho_in, rho_out);
    return rep;
}

/// Three-zone decomposition of -2 E_pot by pair distance:
///   I_1: |x-y| <= 1/R,  I_2: 1/R < |x-y| < R,  I_3: |x-y| >= R   (R > 1),
/// by direct double radial quadrature, together with the lower bound on the
/// central-ball mass evaluated at shift a = 0 (radial specialization):
///   int_{B_R} rho >= (1/(R M)) (-2 E_pot - M^2/R - C ||rho||^2_{1+1/n} R^{-(5-n)/(n+1)}),
/// where C = (8 pi / (5-n))^(2/(n+1)) comes from the Young/Hoelder chain.
inline SplitReport split_potential_estimate(const ConvexScalarFunction& phi,
                                            const GrowthEnvelope& env, const RadialDensity& rho,
                                            double split_radius) {
    if (!(split_radius > 1.0))
        throw invalid_parameter_error("split_potential_estimate: the estimate needs R > 1");

    const auto& g = rho.grid();
    // resolve the density into thin shells (sub-dividing grid cells); two
    // shells of mass w at radii r, s interact through the angular average
    //   w_p w_q / (2 r s) * |[|r-s|, r+s] \cap zone|
    // which sums the exact shell-shell energy when the zones tile [0, inf).
    constexpr std::size_t target_shells = 6000;
    const std::size_t sub = std::max<std::size_t>(1, target_shells / (g.size() - 1));
    std::vector<double> rs, wgt;
    rs.reserve((g.size() - 1) * sub);
    wgt.reserve((g.size() - 1) * sub);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        for (std::size_t j = 0; j < sub; ++j) {
            const double a = g.node(i) + (g.node(i + 1) - g.node(i)) * j / sub;
            const double b = g.node(i) + (g.node(i + 1) - g.node(i)) * (j + 1) / sub;
            const double mid = 0.5 * (a + b);
            const double w = rho.value_at(mid) * four_pi / 3.0 * (b * b * b - a * a * a);
            if (w > 0.0) {
                rs.push_back(mid);
                wgt.push_back(w);
            }
        }
    }

    const double d_lo = 1.0 / split_radius, d_hi = split_radius;
    const auto overlap = [](double a, double b, double lo, double hi) {
        return std::max(0.0, std::min(b, hi) - std::max(a, lo));
    };
    double i1 = 0.0, i2 = 0.0, i3 = 0.0;
    for (std::size_t p = 0; p < rs.size(); ++p) {
        for (std::size_t q = 0; q < rs.size(); ++q) {
            const double lo = std::abs(rs[p] - rs[q]);
            const double hi = rs[p] + rs[q];
            const double base = wgt[p] * wgt[q] / (2.0 * rs[p] * rs[q]);
            i1 += base * overlap(lo, hi, 0.0, d_lo);
            i2 += base * overlap(lo, hi, d_lo, d_hi);
            i3 += base * overlap(lo, hi, d_hi, std::numeric_limits<double>::infinity());
        }
    }

    const double mass = rho.mass();
    const double n = env.n();
    const double c_young = std::pow(8.0 * std::numbers::pi / (5.0 - n), 2.0 / (n + 1.0));
    const double norm = rho.lp_norm(1.0 + 1.0 / n);
    const double i1_bound = c_young * norm * norm * std::pow(split_radius, -(5.0 - n) / (n + 1.0));

    SplitReport rep;
    rep.split_radius = split_radius;
    rep.i1 = i1;
    rep.i2 = i2;
    rep.i3 = i3;
    rep.constant_a = c_young;
    rep.constant_b = i1_bound;
    rep.mass_inside = rho.enclosed_mass(split_radius);
    rep.mass_outside = mass - rep.mass_inside;
    rep.lhs = rep.mass_inside; // centered ball mass
    rep.rhs = (-2.0 * potential_energy(rho) - mass * mass / split_radius - i1_bound) /
              (split_radius * mass);
    rep.satisfied = rep.lhs >= rep.rhs - 1e-10 * std::max(1.0, std::abs(rep.rhs));
    (void)phi;
    return rep;
}

/// Scaling sub-additivity of the infimum: h at fraction * M versus the
/// 5/3-power law, using the best steady-state energies as h estimates.
struct SubadditivityReport {
    double fraction = 0.0;
    double h_full = 0.0;
    double h_fraction = 0.0;
    double power_bound = 0.0; ///< (fraction)^{5/3} h_full
    bool satisfied = false;
    std::optional<double> exact_ratio; ///< homogeneous scaling prediction
};

inline std::vector<SubadditivityReport> subadditivity_check(
    const ConvexScalarFunction& phi, const GFunction& g, double mass,
    const std::vector<double>& fractions, const SolveOptions& opt = {}) {
    const SteadyState full = solve_steady(phi, g, mass, opt);
    std::vector<SubadditivityReport> out;
    for (double f : fractions) {
        if (!(f > 0.0 && f <= 1.0))
            throw invalid_parameter_error("subadditivity_check: fractions must lie in (0,1]");
        SubadditivityReport rep;
        rep.fraction = f;
        rep.h_full = full.energy.reduced_total;
        rep.h_fraction = f == 1.0
                             ? rep.h_full
                             : solve_steady(phi, g, f * mass, opt).energy.reduced_total;
        rep.power_bound = std::pow(f, 5.0 / 3.0) * rep.h_full;
        rep.satisfied = rep.h_fraction >= rep.power_bound - 1e-10 * std::abs(rep.power_bound);
        if (g.homogeneous())
            rep.exact_ratio = std::pow(f, (5.0 - g.degree()) / (3.0 - g.degree()));
        out.push_back(rep);
    }
    return out;
}

} // namespace selfgrav
