#pragma once

// Test-side oracles, independent of the library's quadrature and closed-form
// code paths: a self-refining composite Simpson rule with Richardson control.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace testsup {

inline double simpson_fixed(const std::function<double(double)>& f, double a, double b,
                            int panels) {
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    int panels = 64;
    double prev = simpson_fixed(f, a, b, panels);
    for (int it = 0; it < 16; ++it) {
        panels *= 2;
        const double cur = simpson_fixed(f, a, b, panels);
        if (std::abs(cur - prev) <= tol * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    throw std::runtime_error("test quadrature did not converge");
}

// integral over (a, inf) of an exponentially decaying integrand
inline double integrate_tail(const std::function<double(double)>& f, double a, double span,
                             double tol = 1e-12) {
    double acc = 0.0, lo = a;
    for (int block = 0; block < 16; ++block) {
        const double piece = integrate(f, lo, lo + span, tol);
        acc += piece;
        lo += span;
        if (std::abs(piece) <= tol * (1.0 + std::abs(acc))) break;
    }
    return acc;
}

} // namespace testsup
