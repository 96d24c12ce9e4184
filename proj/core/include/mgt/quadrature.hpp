#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>

#include "mgt/errors.hpp"

namespace mgt {

/// Fixed 8-point Gauss-Legendre rule on [a, b].
template <std::invocable<double> F>
double gauss8(F&& f, double a, double b) {
    // Nodes/weights for [-1, 1].
    static constexpr std::array<double, 4> x = {
        0.18343464249564980494, 0.52553240991632898582,
        0.79666647741362673959, 0.96028985649753623168};
    static constexpr std::array<double, 4> w = {
        0.36268378337836198297, 0.31370664587788728734,
        0.22238103445337447054, 0.10122853629037625915};
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
        s += w[i] * (f(c - h * x[i]) + f(c + h * x[i]));
    return s * h;
}

/// Composite 8-point Gauss rule with n equal panels.
template <std::invocable<double> F>
double composite_gauss8(F&& f, double a, double b, std::size_t n_panels) {
    double s = 0.0;
    const double h = (b - a) / static_cast<double>(n_panels);
    for (std::size_t i = 0; i < n_panels; ++i)
        s += gauss8(f, a + static_cast<double>(i) * h, a + static_cast<double>(i + 1) * h);
    return s;
}

namespace detail {

template <typename F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol)
        return left + right + err / 15.0;
    if (depth <= 0)
        throw NumericalError("adaptive quadrature failed to converge on [" +
                             std::to_string(a) + ", " + std::to_string(b) + "]");
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson quadrature. Throws NumericalError if the recursion depth
/// is exhausted before the local error estimate meets the tolerance.
template <std::invocable<double> F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-12, int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// log(exp(a) + exp(b)) without overflow; tolerates -inf arguments.
inline double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

} // namespace mgt
