#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "selfgrav/errors.hpp"

namespace selfgrav {

/// One accepted step of the radial integration, with endpoint derivatives for
/// cubic Hermite dense output.
struct OdeStep {
    double r0, r1;
    std::array<double, 2> y0, y1;   // state at the ends
    std::array<double, 2> d0, d1;   // derivatives at the ends
};

/// Cubic Hermite evaluation of component c of a stored step at radius r.
inline double hermite_eval(const OdeStep& s, std::size_t c, double r) {
    const double h = s.r1 - s.r0;
    const double t = (r - s.r0) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * s.y0[c] + (t3 - 2 * t2 + t) * h * s.d0[c] +
           (-2 * t3 + 3 * t2) * s.y1[c] + (t3 - t2) * h * s.d1[c];
}

/// Embedded Dormand-Prince 5(4) pair for a 2-component system, with adaptive
/// step control. The right-hand side is f(r, y) -> dy/dr.
template <class RHS>
class DormandPrince {
public:
    DormandPrince(RHS rhs, double rel_tol, std::array<double, 2> abs_scale)
        : rhs_(std::move(rhs)), rtol_(rel_tol), scale_(abs_scale) {}

    /// Single trial step of size h from (r, y); returns (y_new, err_norm).
    struct StepResult {
        std::array<double, 2> y;
        std::array<double, 2> dy_end;
        double err;
    };

    StepResult step(double r, const std::array<double, 2>& y,
                    const std::array<double, 2>& dy, double h) const {
        // Dormand-Prince coefficients
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        const auto& k1 = dy;
        const auto k2 = rhs_(r + c2 * h, axpy(y, h, {a21 * k1[0], a21 * k1[1]}));
        const auto k3 = rhs_(r + c3 * h, axpy(y, h, comb({a31, a32}, k1, k2)));
        const auto k4 = rhs_(r + c4 * h, axpy(y, h, comb({a41, a42, a43}, k1, k2, k3)));
        const auto k5 = rhs_(r + c5 * h, axpy(y, h, comb({a51, a52, a53, a54}, k1, k2, k3, k4)));
        const auto k6 = rhs_(r + h, axpy(y, h, comb({a61, a62, a63, a64, a65}, k1, k2, k3, k4, k5)));

        std::array<double, 2> y5{};
        for (std::size_t c = 0; c < 2; ++c)
            y5[c] = y[c] + h * (b1 * k1[c] + b3 * k3[c] + b4 * k4[c] + b5 * k5[c] + b6 * k6[c]);
        const auto k7 = rhs_(r + h, y5);

        double err = 0.0;
        for (std::size_t c = 0; c < 2; ++c) {
            const double e = h * (e1 * k1[c] + e3 * k3[c] + e4 * k4[c] + e5 * k5[c] +
                                  e6 * k6[c] + e7 * k7[c]);
            const double sc = scale_[c] + rtol_ * std::abs(y5[c]);
            err = std::max(err, std::abs(e) / sc);
        }
        return {y5, k7, err / rtol_};
    }

private:
    static std::array<double, 2> axpy(const std::array<double, 2>& y, double h,
                                      const std::array<double, 2>& k) {
        return {y[0] + h * k[0], y[1] + h * k[1]};
    }
    template <class... K>
    static std::array<double, 2> comb(std::initializer_list<double> w, const K&... ks) {
        std::array<double, 2> out{0.0, 0.0};
        const std::array<const std::array<double, 2>*, sizeof...(K)> ptrs{&ks...};
        std::size_t i = 0;
        for (double wi : w) {
            out[0] += wi * (*ptrs[i])[0];
            out[1] += wi * (*ptrs[i])[1];
            ++i;
        }
        return out;
    }

    RHS rhs_;
    double rtol_;
    std::array<double, 2> scale_;
};

} // namespace selfgrav
