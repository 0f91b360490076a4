/// @file
/// @brief Quadrature with inverse-square-root endpoint singularities,
/// bracketed root finding, and event-terminated adaptive ODE tracing.
#pragma once

#include "gsi/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace gsi::numerics {

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 1000;
    /// Ends where the integrand may diverge like distance^{-1/2}.
    bool singular_lower = false;
    bool singular_upper = false;

    void validate() const;
    [[nodiscard]] QuadratureSpec with_singular_ends(bool lower, bool upper) const {
        QuadratureSpec s = *this;
        s.singular_lower = lower;
        s.singular_upper = upper;
        return s;
    }
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double estimate, double bound)
        : NumericalError(what), estimate_(estimate), bound_(bound) {}
    [[nodiscard]] double best_estimate() const noexcept { return estimate_; }
    [[nodiscard]] double error_bound() const noexcept { return bound_; }

private:
    double estimate_;
    double bound_;
};

namespace detail {

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
    int piece;
    friend bool operator<(const Segment& a, const Segment& b) { return a.error < b.error; }
};

// Kronrod 15 / Gauss 7 pair on [lo, hi]; the difference of the two rules is the error estimate.
template <class G>
Segment gk15(const G& g, double lo, double hi, int piece) {
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
    using gauss = boost::math::quadrature::gauss<double, 7>;
    const auto& x = kronrod::abscissa();
    const auto& wk = kronrod::weights();
    const auto& wg = gauss::weights();
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double f0 = g(mid);
    double k = f0 * wk[0];
    double gs = f0 * wg[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double pair = g(mid + half * x[i]) + g(mid - half * x[i]);
        k += pair * wk[i];
        if (i % 2 == 0) gs += pair * wg[i / 2];
    }
    const double err = std::max(std::abs(k - gs), 2.0 * std::numeric_limits<double>::epsilon() * std::abs(k));
    return {lo, hi, half * k, half * err, piece};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) over the ends of u-substituted pieces.
///
/// Flagged ends use x = end +/- u^2 so that (distance)^{-1/2} behaviour becomes a
/// bounded integrand in u. With both ends flagged the interval is split at its midpoint.
template <class F>
QuadratureResult integrate_singular_detailed(const F& f, double a, double b, const QuadratureSpec& spec) {
    spec.validate();
    if (!(a < b)) {
        throw PreconditionError("integrate_singular: requires a < b");
    }
    // piece 0: plain x; piece 1: x = a + u^2 ; piece 2: x = b - u^2
    auto plain = [&](double x) { return f(x); };
    auto from_lower = [&](double u) { return 2.0 * u * f(a + u * u); };
    auto from_upper = [&](double u) { return 2.0 * u * f(b - u * u); };
    auto eval = [&](double lo, double hi, int piece) {
        switch (piece) {
        case 1: return detail::gk15(from_lower, lo, hi, piece);
        case 2: return detail::gk15(from_upper, lo, hi, piece);
        default: return detail::gk15(plain, lo, hi, piece);
        }
    };

    std::priority_queue<detail::Segment> heap;
    if (spec.singular_lower && spec.singular_upper) {
        const double half = std::sqrt(0.5 * (b - a));
        heap.push(eval(0.0, half, 1));
        heap.push(eval(0.0, half, 2));
    } else if (spec.singular_lower) {
        heap.push(eval(0.0, std::sqrt(b - a), 1));
    } else if (spec.singular_upper) {
        heap.push(eval(0.0, std::sqrt(b - a), 2));
    } else {
        heap.push(eval(a, b, 0));
    }

    // Segments narrower than the resolution of x are not split again: their integrand
    // values are dominated by round-off in x, so their error is reported but not chased.
    const double resolution = 256.0 * std::numeric_limits<double>::epsilon() *
                              std::max({std::abs(a), std::abs(b), b - a});
    auto x_width = [](const detail::Segment& s) {
        return s.piece == 0 ? s.hi - s.lo : (s.hi - s.lo) * (s.hi + s.lo);
    };
    int subdivisions = static_cast<int>(heap.size());
    double frozen_value = 0.0, frozen_error = 0.0;
    auto totals = [&heap] {
        auto copy = heap;
        double v = 0.0, e = 0.0;
        while (!copy.empty()) {
            v += copy.top().value;
            e += copy.top().error;
            copy.pop();
        }
        return std::pair{v, e};
    };
    auto [value, error] = totals();
    while (!heap.empty() && error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value + frozen_value))) {
        const detail::Segment worst = heap.top();
        heap.pop();
        if (x_width(worst) <= resolution) {
            frozen_value += worst.value;
            frozen_error += worst.error;
            value -= worst.value;
            error -= worst.error;
            continue;
        }
        if (subdivisions >= spec.max_subdivisions) {
            throw QuadratureError("integrate_singular: no convergence after " + std::to_string(subdivisions) +
                                      " subdivisions",
                                  value + frozen_value, error + frozen_error);
        }
        const double mid = 0.5 * (worst.lo + worst.hi);
        const detail::Segment left = eval(worst.lo, mid, worst.piece);
        const detail::Segment right = eval(mid, worst.hi, worst.piece);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
        if (subdivisions % 64 == 0) {
            // refresh running sums to shed accumulated cancellation
            std::tie(value, error) = totals();
        }
    }
    value += frozen_value;
    error = std::max(error, 0.0) + frozen_error;
    if (!std::isfinite(value)) {
        throw QuadratureError("integrate_singular: non-finite integrand", value, error);
    }
    return {value, error, subdivisions};
}

template <class F>
double integrate_singular(const F& f, double a, double b, const QuadratureSpec& spec) {
    return integrate_singular_detailed(f, a, b, spec).value;
}

/// Bisection on a bracket [lo, hi]; throws PreconditionError if g(lo), g(hi) share a sign.
template <class G>
double find_root_monotone(const G& g, double lo, double hi, double tol) {
    if (!(lo <= hi) || !(tol > 0.0)) {
        throw PreconditionError("find_root_monotone: requires lo <= hi and tol > 0");
    }
    const double glo = g(lo);
    const double ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if (std::signbit(glo) == std::signbit(ghi)) {
        throw PreconditionError("find_root_monotone: endpoints do not bracket a root");
    }
    auto done = [tol](double x0, double x1) { return std::abs(x1 - x0) <= tol; };
    const auto [left, right] = boost::math::tools::bisect(g, lo, hi, done);
    return 0.5 * (left + right);
}

struct OdeSpec {
    /// Absolute and relative per-step error target.
    double step_tol = 1e-12;
    long max_steps = 200000;
    /// Width in time to which the stopping event is bracketed.
    double event_tol = 1e-14;
    double initial_step = 1e-3;
    /// Keep every accepted state (only useful for diagnostics).
    bool keep_path = false;

    void validate() const;
};

template <std::size_t N>
struct OdeResult {
    std::array<double, N> state{};
    double time = 0.0;
    long steps = 0;
};

template <std::size_t N>
class OdeError : public NumericalError {
public:
    OdeError(const std::string& what, std::vector<std::array<double, N>> partial, double time)
        : NumericalError(what), partial_(std::move(partial)), time_(time) {}
    /// Accepted states up to the failure (at least the last one).
    [[nodiscard]] const std::vector<std::array<double, N>>& partial_trajectory() const noexcept { return partial_; }
    [[nodiscard]] double time() const noexcept { return time_; }

private:
    std::vector<std::array<double, N>> partial_;
    double time_;
};

/// Integrate x' = field(x) with Dormand-Prince 5(4) and dense output until the
/// first sign change of stop(x). A zero of stop at the start does not count.
template <std::size_t N, class Field, class Stop>
OdeResult<N> trace_ode(const std::array<double, N>& initial, const Field& field, const Stop& stop,
                       const OdeSpec& spec) {
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, N>;
    spec.validate();

    auto system = [&field](const State& x, State& dxdt, double /*t*/) { dxdt = field(x); };
    auto stepper =
        odeint::make_dense_output(spec.step_tol, spec.step_tol, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(initial, 0.0, spec.initial_step);

    std::vector<State> path;
    if (spec.keep_path) path.push_back(initial);

    double g_prev = stop(initial);
    State probe{};
    for (long step = 1; step <= spec.max_steps; ++step) {
        const auto [t0, t1] = stepper.do_step(system);
        const State& x1 = stepper.current_state();
        if (spec.keep_path) path.push_back(x1);
        const double g1 = stop(x1);
        const bool crossed = g_prev != 0.0 && (g1 == 0.0 || std::signbit(g1) != std::signbit(g_prev));
        if (crossed) {
            double lo = t0, hi = t1;
            while (hi - lo > spec.event_tol) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                stepper.calc_state(mid, probe);
                const double gm = stop(probe);
                if (gm != 0.0 && std::signbit(gm) == std::signbit(g_prev)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            OdeResult<N> out;
            out.time = hi;
            if (hi == t1) {
                out.state = x1;
            } else {
                stepper.calc_state(hi, out.state);
            }
            out.steps = step;
            return out;
        }
        if (g1 != 0.0) g_prev = g1;
    }
    if (!spec.keep_path) path.push_back(stepper.current_state());
    throw OdeError<N>("trace_ode: maximum number of steps exceeded", std::move(path), stepper.current_time());
}

} // namespace gsi::numerics
