#pragma once

#include <cstddef>
#include <vector>

#include "mgt/kernels.hpp"
#include "mgt/spectral.hpp"

namespace mgt {

/// Sampled element of the weighted history space
///   M = L^2_{-g'}((0, inf); H^1),
/// with norm ||eta||_M^2 = int_0^inf -g'(s) ||eta(s)||_1^2 ds approximated by
/// the trapezoidal rule on the grid.  The grid is strictly increasing with
/// first point > 0 and should extend past where the weight is negligible.
struct HistoryFunction {
    std::vector<double> s;
    std::vector<ModalVector> val;

    std::size_t points() const { return s.size(); }
    std::size_t modes() const { return val.empty() ? 0 : val.front().size(); }
    void validate() const;
};

/// Element of D(T) = { eta in M : eta' in M, eta(0) = 0 } for the generator
/// T = -d/ds of the right-translation semigroup; carries sampled derivative
/// values alongside the function values.
struct DomainTElement : HistoryFunction {
    std::vector<ModalVector> dval;
};

/// <eta1, eta2>_M = int_0^inf -g'(s) <eta1(s), eta2(s)>_1 ds by the weighted
/// trapezoidal rule.  Grids must match.
double m_inner(const MemoryKernel& kernel, const Spectrum& spec, const HistoryFunction& a,
               const HistoryFunction& b);

double m_norm_sq(const MemoryKernel& kernel, const Spectrum& spec, const HistoryFunction& a);

struct GeneratorIdentity {
    double lhs = 0.0; ///< <T eta, eta>_M
    double rhs = 0.0; ///< -1/2 int g''(s) ||eta(s)||_1^2 ds
    double gap = 0.0;
};

/// Both sides of the generator identity
///   <T eta, eta>_M = -1/2 int_0^inf g''(s) ||eta(s)||_1^2 ds
/// by quadrature on the element's grid.  The right-hand side integrates
/// piece-aware (one-sided g'' values at kernel breakpoints), so the gap
/// decays at the full O(ds^2) trapezoidal rate also for piecewise kernels
/// whose breakpoints lie on the grid.  Throws if eta(0) = 0 fails to hold
/// within tolerance at the left end of the grid.
GeneratorIdentity generator_identity_check(const MemoryKernel& kernel, const Spectrum& spec,
                              const DomainTElement& eta);

/// Linear interpolation of the sampled history at x >= 0, extrapolating
/// linearly to s = 0 from the first two samples and clamping beyond the end.
ModalVector sample_history(const HistoryFunction& eta, double x);

/// [R(t) eta](s) = 0 for s <= t, eta(s - t) for s > t, on the same grid.
HistoryFunction right_translate(const HistoryFunction& eta, double t);

/// Mild solution of d/dt eta^t = T eta^t + f(t) with eta^0 = eta0:
///   eta^t(s) = int_{t-s}^t f(y) dy            for s <= t,
///              eta0(s - t) + int_0^t f(y) dy  for s > t,
/// with trapezoidal time integrals of f sampled on the uniform grid
/// f[k] ~ f(k dt); t must lie on that grid.
HistoryFunction mild_solution(const HistoryFunction& eta0, const std::vector<ModalVector>& f,
                              double dt, double t);

/// Default grid: geometric refinement of (s_min, s_geo] followed by a uniform
/// cover up to s_max, with the kernel's breakpoints merged in.
std::vector<double> make_history_grid(const MemoryKernel& kernel, double s_max,
                                      std::size_t n_uniform, std::size_t n_geometric = 128,
                                      double s_min = 1e-6);

/// Inserts cell midpoints (halves every spacing; keeps breakpoints in place).
std::vector<double> refine_grid(const std::vector<double>& s);

} // namespace mgt
