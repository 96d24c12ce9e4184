#include "mgt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mgt/solver.hpp"

namespace mgt {

void MgtParams::validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0))
        throw ParameterError("alpha, beta, gamma must all be strictly positive");
}

double stability_number(const MgtParams& p) { return p.varkappa(); }

Spectrum::Spectrum(std::vector<double> eigenvalues) : lambda_(std::move(eigenvalues)) {
    if (lambda_.empty()) throw ParameterError("spectrum must contain at least one eigenvalue");
    for (double l : lambda_)
        if (!(l > 0.0)) throw ParameterError("eigenvalues of A must be strictly positive");
    if (!std::is_sorted(lambda_.begin(), lambda_.end()))
        throw ParameterError("eigenvalues must be nondecreasing");
}

Spectrum Spectrum::dirichlet1d(std::size_t n_modes) {
    std::vector<double> l(n_modes);
    for (std::size_t j = 0; j < n_modes; ++j) {
        const double jp = std::numbers::pi * static_cast<double>(j + 1);
        l[j] = jp * jp;
    }
    return Spectrum(std::move(l));
}

double sigma_norm_sq(const Spectrum& spec, const ModalVector& x, double sigma) {
    return sigma_inner(spec, x, x, sigma);
}

double sigma_inner(const Spectrum& spec, const ModalVector& a, const ModalVector& b,
                   double sigma) {
    if (a.size() != spec.size() || b.size() != spec.size())
        throw ParameterError("modal vector dimension does not match the spectrum");
    double acc = 0.0;
    if (sigma == 0.0) {
        for (std::size_t j = 0; j < spec.size(); ++j) acc += a.c[j] * b.c[j];
    } else if (sigma == 1.0) {
        for (std::size_t j = 0; j < spec.size(); ++j) acc += spec[j] * a.c[j] * b.c[j];
    } else {
        for (std::size_t j = 0; j < spec.size(); ++j)
            acc += std::pow(spec[j], sigma) * a.c[j] * b.c[j];
    }
    return acc;
}

double h_norm_sq(const Spectrum& spec, const State& z) {
    return sigma_norm_sq(spec, z.u, 1.0) + sigma_norm_sq(spec, z.v, 1.0) +
           sigma_norm_sq(spec, z.w, 0.0);
}

double star_norm_sq(const MgtParams& p, double kappa_mass, const Spectrum& spec, const State& z) {
    p.validate();
    if (!(kappa_mass < p.gamma)) throw RegimeError("star norm requires kappa < gamma");
    const double vk = p.varkappa();
    if (!(vk > 0.0)) throw RegimeError("star norm requires the subcritical regime");
    double acc = 0.0;
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const double va = z.v.c[j] + p.alpha * z.u.c[j];
        const double wa = z.w.c[j] + p.alpha * z.v.c[j];
        acc += (p.gamma - kappa_mass) / p.alpha * spec[j] * va * va +
               vk * spec[j] * z.v.c[j] * z.v.c[j] + wa * wa;
    }
    return acc;
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Subcritical: return "subcritical";
        case Regime::Critical: return "critical";
        case Regime::Supercritical: return "supercritical";
    }
    return "unknown";
}

RegimeInfo classify_regime(const MgtParams& p, const MemoryKernel& kernel) {
    p.validate();
    const double vk = p.varkappa();
    const double kappa = kernel.kappa();
    Regime regime;
    if (std::abs(vk) <= 1e-12 * std::max(p.beta, p.gamma / p.alpha))
        regime = Regime::Critical;
    else
        regime = vk > 0.0 ? Regime::Subcritical : Regime::Supercritical;
    return RegimeInfo{regime, kappa < p.gamma, vk, kappa};
}

double modal_residual(const MgtParams& p, const MemoryKernel& kernel, double lambda,
                      std::span<const double> u_history, double dt, double u, double v, double w,
                      double wprime, double rho, double u0) {
    p.validate();
    if (u_history.empty())
        throw ParameterError("modal residual needs the sampled history up to t");
    const double t = dt * static_cast<double>(u_history.size() - 1);
    const double conv = convolve_history(kernel, u_history, dt);
    double r = wprime + p.alpha * w + p.beta * lambda * v + p.gamma * lambda * u - lambda * conv;
    if (rho > 0.0) r -= lambda * Q_rho(kernel, RhoCutoff{rho}, t) * u0;
    return r;
}

} // namespace mgt
