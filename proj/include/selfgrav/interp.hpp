#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "selfgrav/errors.hpp"

namespace selfgrav {

/// Index of the cell [x[i], x[i+1]] containing xq, clamped to the valid range.
inline std::size_t locate_cell(const std::vector<double>& x, double xq) {
    if (x.size() < 2) throw invalid_parameter_error("locate_cell: need at least two nodes");
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::ptrdiff_t i = (it - x.begin()) - 1;
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(x.size()) - 2);
    return static_cast<std::size_t>(i);
}

/// Piecewise-linear interpolation; constant extrapolation outside the abscissae.
inline double lerp_table(const std::vector<double>& x, const std::vector<double>& y, double xq) {
    if (xq <= x.front()) return y.front();
    if (xq >= x.back()) return y.back();
    const std::size_t i = locate_cell(x, xq);
    const double t = (xq - x[i]) / (x[i + 1] - x[i]);
    return y[i] + t * (y[i + 1] - y[i]);
}

/// Monotone cubic Hermite interpolant (Fritsch-Carlson slope limiting).
/// Preserves monotonicity of the data; C1 everywhere.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw invalid_parameter_error("MonotoneCubic: need matching tables with >= 2 points");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1]))
                throw invariant_violation_error("MonotoneCubic: abscissae must be strictly increasing");

        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);

        m_.assign(n, 0.0);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                // weighted harmonic mean keeps the interpolant monotone
                const double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
                const double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
                m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        // clamp endpoint slopes (Fritsch-Carlson) so no overshoot in the first/last cell
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                m_[i] = m_[i + 1] = 0.0;
            } else {
                const double a = m_[i] / d[i];
                const double b = m_[i + 1] / d[i];
                const double s = a * a + b * b;
                if (s > 9.0) {
                    const double t = 3.0 / std::sqrt(s);
                    m_[i] = t * a * d[i];
                    m_[i + 1] = t * b * d[i];
                }
            }
        }
    }

    double operator()(double xq) const {
        const std::size_t i = locate_cell(x_, xq);
        const double h = x_[i + 1] - x_[i];
        const double t = (xq - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1;
        const double h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2;
        const double h11 = t3 - t2;
        return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
    }

    /// Derivative of the interpolant.
    double derivative(double xq) const {
        const std::size_t i = locate_cell(x_, xq);
        const double h = x_[i + 1] - x_[i];
        const double t = (xq - x_[i]) / h;
        const double t2 = t * t;
        const double g00 = (6 * t2 - 6 * t) / h;
        const double g10 = 3 * t2 - 4 * t + 1;
        const double g01 = (-6 * t2 + 6 * t) / h;
        const double g11 = 3 * t2 - 2 * t;
        return g00 * y_[i] + g10 * m_[i] + g01 * y_[i + 1] + g11 * m_[i + 1];
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    const std::vector<double>& abscissae() const { return x_; }
    const std::vector<double>& values() const { return y_; }

private:
    std::vector<double> x_, y_, m_;
};

/// Solve f(x)=target for monotone f on [lo,hi] by bisection; tol is absolute in x.
template <class F>
double bisect_monotone(F&& f, double lo, double hi, double target, double xtol,
                       int max_iter = 200) {
    double flo = f(lo) - target;
    double fhi = f(hi) - target;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0)
        throw bracket_failure_error("bisect_monotone: target not bracketed");
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid) - target;
        if (fm == 0.0 || (hi - lo) < xtol) return mid;
        if (flo * fm <= 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

/// n log-spaced samples on [lo, hi], lo > 0.
inline std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0 && hi > lo) || n < 2)
        throw invalid_parameter_error("log_spaced: need 0 < lo < hi and n >= 2");
    std::vector<double> out(n);
    const double la = std::log(lo), lb = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

} // namespace selfgrav
