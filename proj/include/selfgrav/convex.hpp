#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "selfgrav/errors.hpp"
#include "selfgrav/interp.hpp"

namespace selfgrav {

/// A convex C1 function h on [0,inf) with h(0)=h'(0)=0, evaluable together with
/// its derivative and the inverse of its derivative. Implicitly extended by
/// +infinity on (-inf,0); that extension is a domain flag, never a sentinel value.
///
/// Two representations:
///   - power law  h(x) = coeff * x^exponent  (exponent > 1, coeff > 0), closed
///     under Legendre conjugation with exact constants;
///   - sample table on log-spaced abscissae with monotone cubic interpolation
///     and a trusted-domain cutoff.
class ConvexScalarFunction {
public:
    enum class Kind { PowerLaw, Tabulated };

    static ConvexScalarFunction power_law(double coeff, double exponent) {
        if (!(coeff > 0.0) || !(exponent > 1.0))
            throw invalid_parameter_error(
                "ConvexScalarFunction::power_law: need coeff > 0 and exponent > 1");
        ConvexScalarFunction f;
        f.kind_ = Kind::PowerLaw;
        f.coeff_ = coeff;
        f.exponent_ = exponent;
        f.cutoff_ = std::numeric_limits<double>::infinity();
        f.superlinear_ = true;
        return f;
    }

    /// Build from sample tables. Checks the type invariants: nondecreasing
    /// convex values, strictly increasing derivative. The superlinearity of the
    /// underlying function cannot be verified from a finite table and is taken
    /// as a declared flag.
    static ConvexScalarFunction tabulated(std::vector<double> abscissae,
                                          std::vector<double> values,
                                          std::vector<double> derivatives,
                                          bool superlinear = true) {
        const std::size_t n = abscissae.size();
        if (n < 4 || values.size() != n || derivatives.size() != n)
            throw invalid_parameter_error(
                "ConvexScalarFunction::tabulated: need >= 4 matching samples");
        if (!(abscissae.front() > 0.0))
            throw invalid_parameter_error(
                "ConvexScalarFunction::tabulated: abscissae must be positive");
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!(abscissae[i] < abscissae[i + 1]))
                throw invariant_violation_error("tabulated: abscissae not strictly increasing");
            if (values[i + 1] < values[i])
                throw invariant_violation_error("tabulated: values not nondecreasing");
            if (!(derivatives[i] < derivatives[i + 1]))
                throw invariant_violation_error("tabulated: derivative not strictly increasing");
        }
        // discrete convexity: second differences of the values
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double dl = (values[i] - values[i - 1]) / (abscissae[i] - abscissae[i - 1]);
            const double dr = (values[i + 1] - values[i]) / (abscissae[i + 1] - abscissae[i]);
            if (dr < dl * (1.0 - 1e-12) - 1e-14)
                throw invariant_violation_error("tabulated: sample table is not convex");
        }
        if (values.front() < 0.0 || derivatives.front() < 0.0)
            throw invariant_violation_error("tabulated: negative value or derivative sample");

        ConvexScalarFunction f;
        f.kind_ = Kind::Tabulated;
        f.cutoff_ = abscissae.back();
        f.superlinear_ = superlinear;
        f.x_ = abscissae;
        f.v_ = values;
        f.d_ = derivatives;
        f.value_interp_ = MonotoneCubic(f.x_, f.v_);
        f.deriv_interp_ = MonotoneCubic(f.x_, f.d_);
        // power-law model of the first two samples, used on [0, x_min]
        f.head_exp_v_ = head_exponent(f.x_, f.v_);
        f.head_exp_d_ = head_exponent(f.x_, f.d_);
        return f;
    }

    Kind kind() const { return kind_; }
    bool is_power_law() const { return kind_ == Kind::PowerLaw; }
    double power_coeff() const { return coeff_; }
    double power_exponent() const { return exponent_; }

    /// Largest trusted abscissa.
    double cutoff() const { return cutoff_; }
    bool superlinear() const { return superlinear_; }

    /// True iff x is in the finite-value domain [0, cutoff].
    bool in_domain(double x) const { return x >= 0.0 && x <= cutoff_; }

    /// Value h(x), x in [0, cutoff]. The extension by +infinity on x<0 is a
    /// domain flag: evaluation there raises domain_cutoff_error.
    double value(double x) const {
        check_domain(x);
        if (kind_ == Kind::PowerLaw) return coeff_ * std::pow(x, exponent_);
        if (x < x_.front()) return head_eval(v_.front(), head_exp_v_, x);
        return value_interp_(x);
    }

    /// Derivative h'(x), x in [0, cutoff].
    double derivative(double x) const {
        check_domain(x);
        if (kind_ == Kind::PowerLaw) {
            if (x == 0.0) return 0.0; // exponent > 1
            return coeff_ * exponent_ * std::pow(x, exponent_ - 1.0);
        }
        if (x < x_.front()) return head_eval(d_.front(), head_exp_d_, x);
        return deriv_interp_(x);
    }

    /// Inverse of the derivative: the unique x >= 0 with h'(x) = y, for
    /// y in [0, h'(cutoff)]. Strict monotonicity of h' is a type invariant.
    double inverse_derivative(double y) const {
        if (y <= 0.0) return 0.0;
        if (kind_ == Kind::PowerLaw)
            return std::pow(y / (coeff_ * exponent_), 1.0 / (exponent_ - 1.0));
        const double dmax = d_.back();
        if (y > dmax * (1.0 + 1e-12))
            throw domain_cutoff_error("inverse_derivative: argument beyond derivative range");
        if (y >= dmax) return x_.back();
        if (y <= d_.front()) {
            // invert the small-x power-law head
            if (head_exp_d_ <= 0.0) return x_.front();
            return x_.front() * std::pow(y / d_.front(), 1.0 / head_exp_d_);
        }
        // bisection in log x resolves the argument to 1e-12 relative across
        // the whole (decades-wide) table
        const auto f = [this](double t) { return deriv_interp_(std::exp(t)); };
        return std::exp(
            bisect_monotone(f, std::log(x_.front()), std::log(x_.back()), y, 1e-12));
    }

    /// Largest derivative value that inverse_derivative accepts.
    double derivative_range_max() const {
        if (kind_ == Kind::PowerLaw) return std::numeric_limits<double>::infinity();
        return d_.back();
    }

    const std::vector<double>& sample_abscissae() const { return x_; }
    const std::vector<double>& sample_values() const { return v_; }
    const std::vector<double>& sample_derivatives() const { return d_; }

private:
    static double head_exponent(const std::vector<double>& x, const std::vector<double>& y) {
        // slope of the first decade in log-log, used to extend below x_min
        if (y[0] <= 0.0 || y[1] <= 0.0) return 1.0;
        return std::log(y[1] / y[0]) / std::log(x[1] / x[0]);
    }

    double head_eval(double y0, double p, double x) const {
        if (x <= 0.0) return 0.0;
        return y0 * std::pow(x / x_.front(), p);
    }

    void check_domain(double x) const {
        if (x < 0.0)
            throw domain_cutoff_error("ConvexScalarFunction: x < 0 is outside the finite domain");
        if (x > cutoff_ * (1.0 + 1e-12))
            throw domain_cutoff_error("ConvexScalarFunction: x beyond the trusted cutoff");
    }

    Kind kind_ = Kind::PowerLaw;
    double coeff_ = 1.0;
    double exponent_ = 2.0;
    double cutoff_ = std::numeric_limits<double>::infinity();
    bool superlinear_ = true;

    std::vector<double> x_, v_, d_;
    MonotoneCubic value_interp_, deriv_interp_;
    double head_exp_v_ = 1.0, head_exp_d_ = 1.0;
};

/// Default log-spaced sample range for tabulated functions.
struct TableRange {
    double lo = 1e-8;
    double hi = 1e4;
    std::size_t n = 400;
};

/// The polytropic ansatz Q(f) = f^(1+1/k), k > 0, with exact derivative and
/// inverse derivative. The admissible range for the reduction is 0 < k < 3/2
/// (so that n = k+3/2 stays below 3); construction outside it succeeds and the
/// caller can query admissibility.
inline ConvexScalarFunction make_polytrope_q(double k, double coeff = 1.0) {
    if (!(k > 0.0))
        throw invalid_parameter_error("make_polytrope_q: k must be positive");
    return ConvexScalarFunction::power_law(coeff, 1.0 + 1.0 / k);
}

/// True iff the polytropic exponent k lands in the admissible window 0<k<3/2.
inline bool polytrope_k_admissible(double k) { return k > 0.0 && k < 1.5; }

/// Legendre transform h*(lambda) = sup_{r>=0} (lambda r - h(r)).
/// For lambda <= 0 the supremum is attained at r=0 and h* vanishes; for
/// lambda > 0 it is attained at r = (h')^{-1}(lambda). Power laws conjugate to
/// power laws with exact constants; tables conjugate to tables sampled over
/// the image of the derivative.
inline ConvexScalarFunction conjugate(const ConvexScalarFunction& h,
                                      std::size_t table_samples = 400) {
    if (!h.superlinear())
        throw invalid_parameter_error(
            "conjugate: input must be declared superlinear (h(r)/r -> inf)");
    if (h.is_power_law()) {
        const double p = h.power_exponent();
        const double a = h.power_coeff();
        const double q = p / (p - 1.0);
        const double b = (1.0 - 1.0 / p) * std::pow(a * p, -1.0 / (p - 1.0));
        return ConvexScalarFunction::power_law(b, q);
    }
    const auto& x = h.sample_abscissae();
    const double lam_lo = std::max(h.derivative(x.front()), 1e-300);
    const double lam_hi = h.derivative_range_max();
    if (!(lam_hi > lam_lo))
        throw invariant_violation_error("conjugate: degenerate derivative range");
    const auto lam = log_spaced(lam_lo, lam_hi, table_samples);
    std::vector<double> val(lam.size()), der(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) {
        const double r = h.inverse_derivative(lam[i]);
        val[i] = lam[i] * r - h.value(r);
        der[i] = r; // (h*)' = (h')^{-1}
    }
    return ConvexScalarFunction::tabulated(lam, val, der, true);
}

/// Evaluate a conjugate-type function extended by zero on (-inf, 0]:
/// Q* and Phi* vanish for lambda <= 0.
inline double eval_plus(const ConvexScalarFunction& h, double lambda) {
    if (lambda <= 0.0) return 0.0;
    return h.value(lambda);
}

/// Power-law growth envelope of Phi: a lower bound with exponent 1+1/n valid
/// for rho >= rho_large and an upper bound with exponent 1+1/n_prime valid for
/// rho <= rho_small. Houses the constants of the coercivity chain.
class GrowthEnvelope {
public:
    GrowthEnvelope(double n, double c_lower, double rho_large, double n_prime, double c_upper,
                   double rho_small)
        : n_(n), c_lower_(c_lower), rho_large_(rho_large), n_prime_(n_prime), c_upper_(c_upper),
          rho_small_(rho_small) {
        if (!(n > 0.0 && n < 3.0) || !(n_prime > 0.0 && n_prime < 3.0))
            throw invalid_parameter_error("GrowthEnvelope: exponents must lie in (0,3)");
        if (!(c_lower > 0.0 && c_upper > 0.0))
            throw invalid_parameter_error("GrowthEnvelope: constants must be positive");
    }

    /// Exact envelope of a pure power law Phi = c rho^(1+1/n): both bounds are
    /// global (thresholds 0 resp. +inf) with the same constant.
    static GrowthEnvelope from_power_law(const ConvexScalarFunction& phi) {
        if (!phi.is_power_law())
            throw invalid_parameter_error("GrowthEnvelope::from_power_law: phi is not a power law");
        const double n = 1.0 / (phi.power_exponent() - 1.0);
        return GrowthEnvelope(n, phi.power_coeff(), 0.0, n, phi.power_coeff(),
                              std::numeric_limits<double>::infinity());
    }

    /// Fit an envelope to a tabulated Phi: exponents from the log-log slopes of
    /// the last/first decade, constants from the extreme ratios over the
    /// declared validity ranges.
    static GrowthEnvelope fit(const ConvexScalarFunction& phi, double rho_large,
                              double rho_small) {
        if (phi.is_power_law()) return from_power_law(phi);
        const auto& x = phi.sample_abscissae();
        const auto slope = [&phi](double a, double b) {
            return std::log(phi.value(b) / phi.value(a)) / std::log(b / a);
        };
        const double p_hi = slope(x.back() / 10.0, x.back());
        const double p_lo = slope(x.front(), x.front() * 10.0);
        const double n = 1.0 / (p_hi - 1.0);
        const double np = 1.0 / (p_lo - 1.0);
        double c_low = std::numeric_limits<double>::infinity();
        double c_up = 0.0;
        for (double xi : x) {
            const double r = phi.value(xi) / std::pow(xi, 1.0 + 1.0 / n);
            const double ru = phi.value(xi) / std::pow(xi, 1.0 + 1.0 / np);
            if (xi >= rho_large) c_low = std::min(c_low, r);
            if (xi <= rho_small) c_up = std::max(c_up, ru);
        }
        // margin for interpolation wiggle between the fitted samples
        return GrowthEnvelope(n, c_low * (1.0 - 1e-6), rho_large, np, c_up * (1.0 + 1e-6),
                              rho_small);
    }

    /// Checks the sandwich on a sample grid; throws on violation.
    void validate_against(const ConvexScalarFunction& phi, std::size_t samples = 200) const {
        const double lo = phi.is_power_law() ? 1e-8 : phi.sample_abscissae().front();
        const double hi = phi.is_power_law() ? 1e4 : phi.cutoff();
        for (double x : log_spaced(lo, hi, samples)) {
            const double v = phi.value(x);
            if (x >= rho_large_ && v < lower_bound(x) * (1.0 - 1e-9))
                throw invariant_violation_error("GrowthEnvelope: lower bound violated");
            if (x <= rho_small_ && v > upper_bound(x) * (1.0 + 1e-9))
                throw invariant_violation_error("GrowthEnvelope: upper bound violated");
        }
    }

    double lower_bound(double rho) const { return c_lower_ * std::pow(rho, 1.0 + 1.0 / n_); }
    double upper_bound(double rho) const { return c_upper_ * std::pow(rho, 1.0 + 1.0 / n_prime_); }

    double n() const { return n_; }
    double n_prime() const { return n_prime_; }
    double c_lower() const { return c_lower_; }
    double c_upper() const { return c_upper_; }
    double rho_large() const { return rho_large_; }
    double rho_small() const { return rho_small_; }

private:
    double n_, c_lower_, rho_large_;
    double n_prime_, c_upper_, rho_small_;
};

} // namespace selfgrav
