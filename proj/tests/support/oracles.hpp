#pragma once

// Reference computations written without the library's quadrature, root finding or
// integrators, so that agreement with them is evidence rather than self-consistency.

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

namespace gsi::oracle {

struct Well {
    double W_m = 1.0;
    double L = 1.0;
    double z_m = 0.5;

    [[nodiscard]] double W(double z) const {
        if (z <= 0.0) return W_m;
        const double u = (z_m - z) * L / (z_m * (L - z));
        return W_m * u * u;
    }
    // W(z) = e^2 solved by hand on either side of the well bottom.
    [[nodiscard]] double right_turn(double e) const {
        const double q = std::abs(e) / std::sqrt(W_m);
        return z_m * L * (1.0 + q) / (L + q * z_m);
    }
    [[nodiscard]] double left_turn(double e) const {
        const double q = std::abs(e) / std::sqrt(W_m);
        if (q >= 1.0) return 0.0;
        return z_m * L * (1.0 - q) / (L - q * z_m);
    }
};

// Composite midpoint rule refined once and Richardson-extrapolated (fourth order for smooth f).
inline double midpoint(const std::function<double(double)>& f, double a, double b, int n) {
    auto rule = [&](int m) {
        const double h = (b - a) / m;
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += f(a + (i + 0.5) * h);
        return s * h;
    };
    const double coarse = rule(n), fine = rule(2 * n);
    return (4.0 * fine - coarse) / 3.0;
}

// Integral of g(z) / sqrt(e^2 - W(z)) over one pass between the turning points.
// Free passes use z = z_- - s^2; trapped ones z = c + d sin(theta).
inline double pass_integral(const Well& w, double e, const std::function<double(double)>& g, int n = 200000) {
    const double hi = w.right_turn(e), lo = w.left_turn(e);
    const double e2 = e * e;
    if (lo == 0.0) {
        const double top = std::sqrt(hi);
        return midpoint(
            [&](double s) {
                const double z = hi - s * s;
                return 2.0 * s * g(z) / std::sqrt(e2 - w.W(z));
            },
            0.0, top, n);
    }
    const double c = 0.5 * (lo + hi), d = 0.5 * (hi - lo);
    return midpoint(
        [&](double t) {
            const double z = c + d * std::sin(t);
            return d * std::cos(t) * g(z) / std::sqrt(e2 - w.W(z));
        },
        -0.5 * std::numbers::pi, 0.5 * std::numbers::pi, n);
}

inline double crossing_time(const Well& w, double e) {
    return pass_integral(w, e, [](double) { return 1.0; });
}

// Constant kernel nu0: loss rate 2 pi nu0 exp(-W/2).
inline double optical_depth_constant(const Well& w, double e, double nu0) {
    return 2.0 * std::numbers::pi * nu0 * pass_integral(w, e, [&w](double z) { return std::exp(-0.5 * w.W(z)); });
}

inline double accommodation_constant(const Well& w, double v_z, double nu0) {
    const double e = std::sqrt(v_z * v_z + w.W_m);
    return 1.0 - std::exp(-2.0 * optical_depth_constant(w, e, nu0));
}

inline double maxwellian(double vx, double vz) { return std::exp(-0.5 * (vx * vx + vz * vz)); }

} // namespace gsi::oracle
