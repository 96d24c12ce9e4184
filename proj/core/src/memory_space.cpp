#include "mgt/memory_space.hpp"

#include <algorithm>
#include <cmath>

namespace mgt {

void HistoryFunction::validate() const {
    if (s.empty() || s.size() != val.size())
        throw ParameterError("history function needs matching nonempty grids and values");
    if (!(s.front() > 0.0)) throw ParameterError("history grid must start above 0");
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (!(s[i] < s[i + 1])) throw ParameterError("history grid must be strictly increasing");
}

namespace {

void require_matching(const HistoryFunction& a, const HistoryFunction& b) {
    if (a.s.size() != b.s.size() || a.modes() != b.modes())
        throw ParameterError("history functions live on different grids");
    for (std::size_t i = 0; i < a.s.size(); ++i)
        if (a.s[i] != b.s[i]) throw ParameterError("history functions live on different grids");
}

} // namespace

double m_inner(const MemoryKernel& kernel, const Spectrum& spec, const HistoryFunction& a,
               const HistoryFunction& b) {
    a.validate();
    b.validate();
    require_matching(a, b);
    const std::size_t n = a.s.size();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i)
        f[i] = -kernel.gp(a.s[i]) * sigma_inner(spec, a.val[i], b.val[i], 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        acc += 0.5 * (f[i] + f[i + 1]) * (a.s[i + 1] - a.s[i]);
    return acc;
}

double m_norm_sq(const MemoryKernel& kernel, const Spectrum& spec, const HistoryFunction& a) {
    return m_inner(kernel, spec, a, a);
}

GeneratorIdentity generator_identity_check(const MemoryKernel& kernel, const Spectrum& spec,
                              const DomainTElement& eta) {
    eta.validate();
    if (eta.dval.size() != eta.s.size())
        throw ParameterError("domain element needs sampled derivative values");

    // eta(0) = 0: check the first sample and its linear extrapolation to 0.
    double max_norm = 0.0;
    for (const auto& v : eta.val) max_norm = std::max(max_norm, sigma_norm_sq(spec, v, 1.0));
    max_norm = std::sqrt(max_norm);
    const double n0 = std::sqrt(sigma_norm_sq(spec, eta.val.front(), 1.0));
    double extrap = n0;
    if (eta.s.size() > 1) {
        const double t = eta.s[0] / (eta.s[1] - eta.s[0]);
        ModalVector e0 = ModalVector::zero(eta.modes());
        for (std::size_t j = 0; j < eta.modes(); ++j)
            e0.c[j] = eta.val[0].c[j] - t * (eta.val[1].c[j] - eta.val[0].c[j]);
        extrap = std::sqrt(sigma_norm_sq(spec, e0, 1.0));
    }
    const double tol = 1e-2 * max_norm + 1e-12;
    if (extrap > tol && n0 > 0.5 * max_norm)
        throw ParameterError("element is not in D(T): eta(0) != 0");

    // lhs = <T eta, eta>_M with T eta = -eta'
    const std::size_t n = eta.s.size();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i)
        f[i] = -kernel.gp(eta.s[i]) * (-sigma_inner(spec, eta.dval[i], eta.val[i], 1.0));
    double lhs = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        lhs += 0.5 * (f[i] + f[i + 1]) * (eta.s[i + 1] - eta.s[i]);

    // rhs = -1/2 int g''(s) ||eta(s)||_1^2 ds, one-sided g'' per cell so that
    // jumps of g'' sitting on grid nodes do not degrade the order
    double rhs = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double na = sigma_norm_sq(spec, eta.val[i], 1.0);
        const double nb = sigma_norm_sq(spec, eta.val[i + 1], 1.0);
        const double ga = kernel.gpp_side(eta.s[i], /*from_right=*/true);
        const double gb = kernel.gpp_side(eta.s[i + 1], /*from_right=*/false);
        rhs += 0.5 * (ga * na + gb * nb) * (eta.s[i + 1] - eta.s[i]);
    }
    rhs *= -0.5;
    return GeneratorIdentity{lhs, rhs, std::abs(lhs - rhs)};
}

ModalVector sample_history(const HistoryFunction& eta, double x) {
    const std::size_t n = eta.s.size();
    const std::size_t nm = eta.modes();
    ModalVector out = ModalVector::zero(nm);
    if (n == 1) {
        out = eta.val[0];
        return out;
    }
    std::size_t i;
    double frac;
    if (x <= eta.s.front()) {
        // extrapolate linearly toward s = 0
        i = 0;
        frac = (x - eta.s[0]) / (eta.s[1] - eta.s[0]); // <= 0
    } else if (x >= eta.s.back()) {
        out = eta.val.back();
        return out;
    } else {
        const auto it = std::upper_bound(eta.s.begin(), eta.s.end(), x);
        i = static_cast<std::size_t>(it - eta.s.begin()) - 1;
        frac = (x - eta.s[i]) / (eta.s[i + 1] - eta.s[i]);
    }
    for (std::size_t j = 0; j < nm; ++j)
        out.c[j] = eta.val[i].c[j] + frac * (eta.val[i + 1].c[j] - eta.val[i].c[j]);
    return out;
}

HistoryFunction right_translate(const HistoryFunction& eta, double t) {
    eta.validate();
    if (!(t >= 0.0)) throw ParameterError("translation time must be nonnegative");
    HistoryFunction out;
    out.s = eta.s;
    out.val.resize(eta.s.size());
    for (std::size_t i = 0; i < eta.s.size(); ++i) {
        if (eta.s[i] <= t)
            out.val[i] = ModalVector::zero(eta.modes());
        else
            out.val[i] = sample_history(eta, eta.s[i] - t);
    }
    return out;
}

HistoryFunction mild_solution(const HistoryFunction& eta0, const std::vector<ModalVector>& f,
                              double dt, double t) {
    eta0.validate();
    if (!(dt > 0.0)) throw ParameterError("mild_solution requires dt > 0");
    const auto k_t = static_cast<std::size_t>(std::llround(t / dt));
    if (std::abs(static_cast<double>(k_t) * dt - t) > 1e-9 * std::max(1.0, t) ||
        k_t >= f.size())
        throw ParameterError("t must be a sample time of f");
    const std::size_t nm = eta0.modes();

    // cumulative trapezoid C_k = int_0^{k dt} f
    std::vector<ModalVector> cum(k_t + 1, ModalVector::zero(nm));
    for (std::size_t k = 1; k <= k_t; ++k)
        for (std::size_t j = 0; j < nm; ++j)
            cum[k].c[j] = cum[k - 1].c[j] + 0.5 * dt * (f[k - 1].c[j] + f[k].c[j]);

    const auto cum_at = [&](double y) { // int_0^y f, linear interp of the cumulative
        if (y <= 0.0) return ModalVector::zero(nm);
        const double pos = y / dt;
        auto i = static_cast<std::size_t>(std::floor(pos));
        if (i >= k_t) return cum[k_t];
        const double frac = pos - static_cast<double>(i);
        ModalVector out = ModalVector::zero(nm);
        for (std::size_t j = 0; j < nm; ++j)
            out.c[j] = cum[i].c[j] + frac * (cum[i + 1].c[j] - cum[i].c[j]);
        return out;
    };

    HistoryFunction out;
    out.s = eta0.s;
    out.val.resize(eta0.s.size());
    const ModalVector full = cum[k_t];
    for (std::size_t i = 0; i < eta0.s.size(); ++i) {
        ModalVector v = ModalVector::zero(nm);
        if (eta0.s[i] <= t) {
            const ModalVector lower = cum_at(t - eta0.s[i]);
            for (std::size_t j = 0; j < nm; ++j) v.c[j] = full.c[j] - lower.c[j];
        } else {
            v = sample_history(eta0, eta0.s[i] - t);
            for (std::size_t j = 0; j < nm; ++j) v.c[j] += full.c[j];
        }
        out.val[i] = v;
    }
    return out;
}

std::vector<double> make_history_grid(const MemoryKernel& kernel, double s_max,
                                      std::size_t n_uniform, std::size_t n_geometric,
                                      double s_min) {
    if (!(s_max > 1.0) || !(s_min > 0.0) || n_uniform < 2)
        throw ParameterError("make_history_grid requires s_max > 1, s_min > 0, n_uniform >= 2");
    std::vector<double> pts;
    pts.reserve(n_geometric + n_uniform + 64);
    const double h = (s_max - 1.0) / static_cast<double>(n_uniform);
    const double ratio = std::log(1.0 / s_min);
    for (std::size_t i = 0; i <= n_geometric; ++i)
        pts.push_back(s_min *
                      std::exp(ratio * static_cast<double>(i) / static_cast<double>(n_geometric)));
    for (std::size_t i = 1; i <= n_uniform; ++i) pts.push_back(1.0 + h * static_cast<double>(i));
    for (double b : kernel.breakpoints(s_max))
        if (b >= s_min) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

std::vector<double> refine_grid(const std::vector<double>& s) {
    std::vector<double> out;
    out.reserve(2 * s.size());
    out.push_back(0.5 * s.front());
    out.push_back(s.front());
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        out.push_back(0.5 * (s[i] + s[i + 1]));
        out.push_back(s[i + 1]);
    }
    return out;
}

} // namespace mgt
