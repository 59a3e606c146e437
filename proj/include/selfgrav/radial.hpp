#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include "selfgrav/convex.hpp"
#include "selfgrav/errors.hpp"

namespace selfgrav {

inline constexpr double four_pi = 4.0 * std::numbers::pi;

/// Radial quadrature grid: nodes 0 = r_0 < r_1 < ... < r_N together with
/// volume weights (against 4 pi r^2 dr) and line weights (against dr).
/// The volume weights are those of the piecewise-linear hat functions, so
/// sum(f_i * V_i) is the exact integral of the piecewise-linear interpolant
/// of the samples f_i.
class RadialGrid {
public:
    RadialGrid() = default;

    explicit RadialGrid(std::vector<double> nodes) : r_(std::move(nodes)) {
        if (r_.size() < 2 || r_.front() != 0.0)
            throw invalid_parameter_error("RadialGrid: need nodes starting at r=0");
        for (std::size_t i = 0; i + 1 < r_.size(); ++i)
            if (!(r_[i] < r_[i + 1]))
                throw invariant_violation_error("RadialGrid: nodes must be strictly increasing");
        vol_.assign(r_.size(), 0.0);
        line_.assign(r_.size(), 0.0);
        for (std::size_t i = 0; i + 1 < r_.size(); ++i) {
            const double a = r_[i], b = r_[i + 1], h = b - a;
            // exact moments of the two hat functions against 4 pi r^2 on [a,b]
            const double left = (std::pow(b, 4) / 12.0 - std::pow(a, 3) * b / 3.0 +
                                 std::pow(a, 4) / 4.0) / h;
            const double right = (std::pow(b, 4) / 4.0 - a * std::pow(b, 3) / 3.0 +
                                  std::pow(a, 4) / 12.0) / h;
            vol_[i] += four_pi * left;
            vol_[i + 1] += four_pi * right;
            line_[i] += 0.5 * h;
            line_[i + 1] += 0.5 * h;
        }
    }

    std::size_t size() const { return r_.size(); }
    double node(std::size_t i) const { return r_[i]; }
    double r_max() const { return r_.back(); }
    const std::vector<double>& nodes() const { return r_; }
    const std::vector<double>& volume_weights() const { return vol_; }
    const std::vector<double>& line_weights() const { return line_; }

    friend bool operator==(const RadialGrid& a, const RadialGrid& b) { return a.r_ == b.r_; }

private:
    std::vector<double> r_;
    std::vector<double> vol_, line_;
};

/// Graded grid: clustered near the origin, and near the support edge when one
/// is supplied; a coarser exterior section extends to r_max.
inline RadialGrid make_graded_grid(std::size_t n_nodes, double r_max,
                                   std::optional<double> edge = std::nullopt) {
    if (n_nodes < 16 || !(r_max > 0.0))
        throw invalid_parameter_error("make_graded_grid: need n_nodes >= 16 and r_max > 0");
    std::vector<double> r;
    r.reserve(n_nodes);
    if (edge && *edge > 0.0 && *edge < r_max) {
        const std::size_t n_in = (n_nodes * 3) / 4;
        const std::size_t n_out = n_nodes - n_in;
        constexpr double a = 0.7; // end-clustering strength
        for (std::size_t i = 0; i < n_in; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(n_in);
            r.push_back(*edge * (t - a / (2.0 * std::numbers::pi) *
                                         std::sin(2.0 * std::numbers::pi * t)));
        }
        for (std::size_t j = 0; j <= n_out; ++j) {
            const double u = static_cast<double>(j) / static_cast<double>(n_out);
            r.push_back(*edge + (r_max - *edge) * u);
        }
    } else {
        constexpr double p = 1.5;
        for (std::size_t i = 0; i < n_nodes; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(n_nodes - 1);
            r.push_back(r_max * std::pow(t, p));
        }
    }
    r.front() = 0.0;
    r.back() = r_max;
    return RadialGrid(std::move(r));
}

/// How samples are interpreted between nodes.
enum class ProfileKind {
    PiecewiseLinear, ///< node samples, linear in between
    Step             ///< values[i] is the constant density on (r_{i-1}, r_i]
};

namespace detail {

/// Coefficients of the enclosed mass m(r) = alpha + beta r^3 + gamma r^4 on one
/// cell [a,b]; m_a is the enclosed mass at the left edge.
struct MassCellCoeffs {
    double alpha, beta, gamma;
};

inline MassCellCoeffs mass_cell_coeffs(double a, double b, double rho_a, double rho_b,
                                       double m_a, ProfileKind kind) {
    if (kind == ProfileKind::Step) {
        const double beta = four_pi / 3.0 * rho_b; // slab value is carried by the right node
        return {m_a - beta * a * a * a, beta, 0.0};
    }
    const double s = (rho_b - rho_a) / (b - a);
    const double beta = four_pi / 3.0 * (rho_a - s * a);
    const double gamma = std::numbers::pi * s;
    return {m_a - beta * a * a * a - gamma * a * a * a * a, beta, gamma};
}

inline double mass_cell_eval(const MassCellCoeffs& c, double r) {
    return c.alpha + c.beta * r * r * r + c.gamma * r * r * r * r;
}

/// Exact integral of m1(r) m2(r) / r^2 over [a,b] for two mass polynomials.
inline double mass_pair_integral(const MassCellCoeffs& c1, const MassCellCoeffs& c2, double a,
                                 double b) {
    const auto F = [&](double r) {
        const double r2 = r * r, r3 = r2 * r;
        double out = (c1.alpha * c2.beta + c2.alpha * c1.beta) * r2 / 2.0 +
                     (c1.alpha * c2.gamma + c2.alpha * c1.gamma) * r3 / 3.0 +
                     c1.beta * c2.beta * r2 * r3 / 5.0 +
                     (c1.beta * c2.gamma + c2.beta * c1.gamma) * r3 * r3 / 6.0 +
                     c1.gamma * c2.gamma * r3 * r3 * r / 7.0;
        if (r > 0.0) out -= c1.alpha * c2.alpha / r;
        return out;
    };
    // alpha vanishes on the first cell (m(0)=0), so F is finite at r=0
    return F(b) - F(a);
}

/// Exact integral of r * rho(r) over [a,b] (for the potential tail).
inline double tail_cell_integral(double a, double b, double rho_a, double rho_b,
                                 ProfileKind kind) {
    if (kind == ProfileKind::Step) return rho_b * (b * b - a * a) / 2.0;
    const double s = (rho_b - rho_a) / (b - a);
    return rho_a * (b * b - a * a) / 2.0 + s * (b * b * b - a * a * a) / 3.0 -
           s * a * (b * b - a * a) / 2.0;
}

} // namespace detail

/// Nonnegative mass density on a radial grid. The total mass, enclosed-mass
/// profile and all integrals are exact for the stored representation
/// (piecewise-linear interpolant or step profile).
class RadialDensity {
public:
    RadialDensity() = default;

    RadialDensity(RadialGrid grid, std::vector<double> values,
                  ProfileKind kind = ProfileKind::PiecewiseLinear)
        : grid_(std::move(grid)), rho_(std::move(values)), kind_(kind) {
        if (rho_.size() != grid_.size())
            throw invalid_parameter_error("RadialDensity: values/grid size mismatch");
        for (double v : rho_)
            if (v < 0.0 || !std::isfinite(v))
                throw invariant_violation_error("RadialDensity: values must be finite and >= 0");
        rebuild_cumulative();
    }

    const RadialGrid& grid() const { return grid_; }
    ProfileKind kind() const { return kind_; }
    const std::vector<double>& values() const { return rho_; }
    double value(std::size_t i) const { return rho_[i]; }
    std::size_t size() const { return rho_.size(); }

    double mass() const { return mass_; }

    /// Largest node radius with positive density.
    double support_radius() const {
        for (std::size_t i = rho_.size(); i-- > 0;)
            if (rho_[i] > 0.0) return grid_.node(i);
        return 0.0;
    }

    /// Enclosed mass 4 pi int_0^r s^2 rho(s) ds, exact for the representation;
    /// constant equal to the total mass beyond the grid.
    double enclosed_mass(double r) const {
        if (r <= 0.0) return 0.0;
        if (r >= grid_.r_max()) return mass_;
        const std::size_t i = locate_cell(grid_.nodes(), r);
        const auto c = cell_coeffs(i);
        return detail::mass_cell_eval(c, r);
    }

    /// Enclosed mass at node i (cached, exact).
    double enclosed_mass_node(std::size_t i) const { return m_[i]; }
    const std::vector<double>& enclosed_mass_nodes() const { return m_; }

    detail::MassCellCoeffs cell_coeffs(std::size_t cell) const {
        return detail::mass_cell_coeffs(grid_.node(cell), grid_.node(cell + 1), rho_[cell],
                                        rho_[cell + 1], m_[cell], kind_);
    }

    /// Density value at an arbitrary radius (by the stored representation).
    double value_at(double r) const {
        if (r < 0.0) throw invalid_parameter_error("RadialDensity::value_at: r < 0");
        if (r >= grid_.r_max()) return rho_.back();
        const std::size_t i = locate_cell(grid_.nodes(), r);
        if (kind_ == ProfileKind::Step) return r <= grid_.node(i) ? rho_[i] : rho_[i + 1];
        const double t = (r - grid_.node(i)) / (grid_.node(i + 1) - grid_.node(i));
        return rho_[i] + t * (rho_[i + 1] - rho_[i]);
    }

    /// Integral of F(rho) dx; exact for step profiles, and for node profiles it
    /// is the exact integral of the piecewise-linear interpolant of F(rho_i).
    template <class F>
    double integrate_function(F&& f) const {
        double sum = 0.0;
        if (kind_ == ProfileKind::Step) {
            for (std::size_t i = 1; i < rho_.size(); ++i) {
                const double a = grid_.node(i - 1), b = grid_.node(i);
                sum += f(rho_[i]) * four_pi / 3.0 * (b * b * b - a * a * a);
            }
        } else {
            const auto& w = grid_.volume_weights();
            for (std::size_t i = 0; i < rho_.size(); ++i) sum += f(rho_[i]) * w[i];
        }
        return sum;
    }

    /// L^p norm (int rho^p dx)^(1/p).
    double lp_norm(double p) const {
        const double s = integrate_function([p](double v) { return std::pow(v, p); });
        return std::pow(s, 1.0 / p);
    }

private:
    void rebuild_cumulative() {
        const std::size_t n = rho_.size();
        m_.assign(n, 0.0);
        mass_ = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const auto c = detail::mass_cell_coeffs(grid_.node(i), grid_.node(i + 1), rho_[i],
                                                    rho_[i + 1], m_[i], kind_);
            m_[i + 1] = detail::mass_cell_eval(c, grid_.node(i + 1));
        }
        mass_ = m_.back();
    }

    RadialGrid grid_;
    std::vector<double> rho_;
    ProfileKind kind_ = ProfileKind::PiecewiseLinear;
    std::vector<double> m_;
    double mass_ = 0.0;
};

/// Free-function form of the enclosed-mass accessor.
inline double enclosed_mass(const RadialDensity& rho, double r) {
    if (r < 0.0) throw invalid_parameter_error("enclosed_mass: r must be >= 0");
    return rho.enclosed_mass(r);
}

/// Gravitational potential induced by a radial density, with the boundary
/// normalization U -> 0 at infinity:
///   U(r) = -m(r)/r - 4 pi int_r^inf s rho(s) ds.
/// Beyond the grid U(r) = -M/r exactly.
class RadialPotential {
public:
    RadialPotential() = default;

    RadialPotential(RadialGrid grid, std::vector<double> u, std::vector<double> m, double mass)
        : grid_(std::move(grid)), u_(std::move(u)), m_(std::move(m)), mass_(mass) {
        if (u_.size() != grid_.size() || m_.size() != grid_.size())
            throw invalid_parameter_error("RadialPotential: size mismatch");
        for (std::size_t i = 0; i + 1 < u_.size(); ++i)
            if (u_[i + 1] < u_[i] - 1e-12 * std::abs(u_[i]))
                throw invariant_violation_error("RadialPotential: U must be nondecreasing");
    }

    const RadialGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return u_; }
    double value(std::size_t i) const { return u_[i]; }
    double total_mass() const { return mass_; }
    const std::vector<double>& enclosed_mass_nodes() const { return m_; }

    /// Potential at an arbitrary radius: -M/r beyond the grid, the exact
    /// vacuum form U_i + m (1/r_i - 1/r) across cells that carry no mass, and
    /// linear interpolation where there is mass.
    double value_at(double r) const {
        if (r >= grid_.r_max()) return -mass_ / r;
        if (r <= 0.0) return u_.front();
        const std::size_t i = locate_cell(grid_.nodes(), r);
        if (std::abs(m_[i + 1] - m_[i]) <= 1e-12 * std::max(mass_, 1e-300) &&
            grid_.node(i) > 0.0) {
            return u_[i] + m_[i] * (1.0 / grid_.node(i) - 1.0 / r);
        }
        const double t = (r - grid_.node(i)) / (grid_.node(i + 1) - grid_.node(i));
        return u_[i] + t * (u_[i + 1] - u_[i]);
    }

private:
    RadialGrid grid_;
    std::vector<double> u_;
    std::vector<double> m_;
    double mass_ = 0.0;
};

/// Solve the radial Poisson problem for the potential of rho.
inline RadialPotential potential_from_density(const RadialDensity& rho) {
    const auto& g = rho.grid();
    const std::size_t n = g.size();
    std::vector<double> tail(n, 0.0); // 4 pi int_{r_i}^{r_N} s rho(s) ds
    for (std::size_t i = n - 1; i-- > 0;) {
        tail[i] = tail[i + 1] +
                  four_pi * detail::tail_cell_integral(g.node(i), g.node(i + 1), rho.value(i),
                                                       rho.value(i + 1), rho.kind());
    }
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = g.node(i);
        const double interior = (i == 0) ? 0.0 : rho.enclosed_mass_node(i) / r;
        u[i] = -interior - tail[i];
    }
    return RadialPotential(g, std::move(u), rho.enclosed_mass_nodes(), rho.mass());
}

/// E_pot(rho) = -(1/2) int_0^inf m(r)^2 / r^2 dr, exact for the representation
/// (including the exterior contribution -M^2/(2 r_N)).
inline double potential_energy(const RadialDensity& rho) {
    const auto& g = rho.grid();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        const auto c = rho.cell_coeffs(i);
        sum += detail::mass_pair_integral(c, c, g.node(i), g.node(i + 1));
    }
    const double M = rho.mass();
    sum += M * M / g.r_max();
    return -0.5 * sum;
}

/// Independent route to E_pot through the potential: -(1/8 pi) int |grad U|^2 dx
/// with grad U obtained by finite differences of the node values of U.
inline double potential_energy_gradient_route(const RadialPotential& u) {
    const auto& g = u.grid();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        const double h = g.node(i + 1) - g.node(i);
        const double du = (u.value(i + 1) - u.value(i)) / h;
        const double rm = 0.5 * (g.node(i) + g.node(i + 1));
        sum += du * du * rm * rm * h;
    }
    const double M = u.total_mass();
    sum += M * M / g.r_max();
    return -0.5 * sum;
}

/// int Phi(rho(x)) dx >= 0. Densities above the trusted cutoff of Phi raise
/// domain_cutoff_error.
inline double internal_energy(const ConvexScalarFunction& phi, const RadialDensity& rho) {
    return rho.integrate_function([&phi](double v) { return phi.value(v); });
}

/// Unsigned Coulomb interaction int int rho1(x) rho2(y)/|x-y| dx dy
///   = int_0^inf m1(r) m2(r) / r^2 dr   (spherical symmetry),
/// exact for the stored representations. Requires a common grid.
inline double interaction_energy(const RadialDensity& rho1, const RadialDensity& rho2) {
    if (!(rho1.grid() == rho2.grid()) || rho1.kind() != rho2.kind())
        throw incompatible_grid_error("interaction_energy: densities not on a common grid");
    const auto& g = rho1.grid();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i)
        sum += detail::mass_pair_integral(rho1.cell_coeffs(i), rho2.cell_coeffs(i), g.node(i),
                                          g.node(i + 1));
    sum += rho1.mass() * rho2.mass() / g.r_max();
    return sum;
}

/// Reduced energy of a spatial density:
///   H_C^r(rho) = int Phi(rho) dx + E_pot(rho),
/// optionally in the field of a fixed exterior density rho_e, which contributes
/// the (attractive) cross term  -int int rho(x) rho_e(y)/|x-y| dx dy.
inline double reduced_energy(const ConvexScalarFunction& phi, const RadialDensity& rho,
                             const RadialDensity* exterior = nullptr) {
    double e = internal_energy(phi, rho) + potential_energy(rho);
    if (exterior) e -= interaction_energy(rho, *exterior);
    return e;
}

/// Rescaled density rho_bar(x) = a rho(b x) on the rescaled grid; the mass
/// scales exactly by a b^-3 and E_pot by a^2 b^-5.
inline RadialDensity scale_density(const RadialDensity& rho, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw invalid_parameter_error("scale_density: a and b must be positive");
    std::vector<double> nodes = rho.grid().nodes();
    for (double& r : nodes) r /= b;
    std::vector<double> vals = rho.values();
    for (double& v : vals) v *= a;
    return RadialDensity(RadialGrid(std::move(nodes)), std::move(vals), rho.kind());
}

/// Uniform ball of mass M and radius R as an exact step profile.
inline RadialDensity uniform_ball(double mass, double radius, std::size_t n_cells = 64,
                                  double grid_r_max = 0.0) {
    if (!(mass > 0.0) || !(radius > 0.0))
        throw invalid_parameter_error("uniform_ball: mass and radius must be positive");
    const double rho_c = mass / (four_pi / 3.0 * radius * radius * radius);
    std::vector<double> nodes, vals;
    nodes.push_back(0.0);
    vals.push_back(rho_c);
    for (std::size_t i = 1; i <= n_cells; ++i) {
        nodes.push_back(radius * static_cast<double>(i) / static_cast<double>(n_cells));
        vals.push_back(rho_c);
    }
    if (grid_r_max > radius) {
        nodes.push_back(grid_r_max);
        vals.push_back(0.0);
    }
    return RadialDensity(RadialGrid(std::move(nodes)), std::move(vals), ProfileKind::Step);
}

} // namespace selfgrav
