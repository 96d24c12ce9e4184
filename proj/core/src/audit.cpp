#include "mgt/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "mgt/quadrature.hpp"

namespace mgt {

namespace {
constexpr double kTiny = 1e-300;
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

void AuditGrid::validate() const {
    if (points.size() < 1000) throw ParameterError("audit grid needs at least 1000 points");
    if (!(points.front() > 0.0)) throw ParameterError("audit grid must start above 0");
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (!(points[i] < points[i + 1]))
            throw ParameterError("audit grid must be strictly increasing");
    if (tolerance < 0.0) throw ParameterError("audit tolerance must be nonnegative");
}

AuditGrid make_audit_grid(const MemoryKernel& kernel, double s_max, std::size_t n_geometric,
                          std::size_t n_uniform, double s_min) {
    if (!(s_max > s_min) || !(s_min > 0.0))
        throw ParameterError("audit grid requires 0 < s_min < s_max");
    std::set<double> pts;
    const double geo_top = std::min(1.0, s_max);
    const double ratio = std::log(geo_top / s_min);
    for (std::size_t i = 0; i <= n_geometric; ++i)
        pts.insert(s_min * std::exp(ratio * static_cast<double>(i) /
                                    static_cast<double>(n_geometric)));
    if (s_max > geo_top)
        for (std::size_t i = 0; i <= n_uniform; ++i)
            pts.insert(geo_top + (s_max - geo_top) * static_cast<double>(i) /
                                     static_cast<double>(n_uniform));
    for (double s : kernel.audit_points(s_max))
        if (s >= s_min) pts.insert(s);
    AuditGrid grid{std::vector<double>(pts.begin(), pts.end()), 1e-10};
    grid.validate();
    return grid;
}

namespace {

// Track the worst normalized margin over the grid.
struct WorstMargin {
    double margin = -kInf;
    double point = 0.0;

    void consider(double m, double s) {
        if (m > margin) {
            margin = m;
            point = s;
        }
    }
};

} // namespace

CheckResult check_g3(const MemoryKernel& kernel, double alpha, double delta,
                     const AuditGrid& grid) {
    grid.validate();
    if (!(delta > 0.0) || !(delta < alpha))
        throw ParameterError("check_g3 requires 0 < delta < alpha");
    const double ad = alpha - delta;
    WorstMargin worst;
    if (kernel.has_log_scale()) {
        // ratio form: f'/f <= alpha - delta with f = -g'
        for (double s : grid.points) {
            const double r = kernel.gpp_over_gp(s);
            worst.consider((r - ad) / std::max(1.0, std::abs(r)), s);
        }
    } else {
        for (double s : grid.points) {
            const double gp = kernel.gp(s), gpp = kernel.gpp(s);
            const double scale = std::max({std::abs(gp), std::abs(gpp), kTiny});
            worst.consider((ad * gp - gpp) / scale, s);
        }
    }
    return CheckResult{worst.margin <= grid.tolerance, worst.margin, worst.point};
}

CheckResult check_dafermos(const MemoryKernel& kernel, double delta, const AuditGrid& grid) {
    grid.validate();
    if (!(delta > 0.0)) throw ParameterError("check_dafermos requires delta > 0");
    WorstMargin worst;
    if (kernel.has_log_scale()) {
        const double ld = std::log(delta);
        for (double s : grid.points) {
            const double l1 = kernel.log_neg_gp(s);    // log(-g')
            const double l2 = ld + kernel.log_g(s);    // log(delta g)
            // (g' + delta g) / max(-g', delta g), sign-stable in log scale
            const double m = l2 >= l1 ? 1.0 - std::exp(l1 - l2) : std::exp(l2 - l1) - 1.0;
            worst.consider(m, s);
        }
    } else {
        for (double s : grid.points) {
            const double gp = kernel.gp(s), dg = delta * kernel.g(s);
            const double scale = std::max({-gp, dg, kTiny});
            worst.consider((gp + dg) / scale, s);
        }
    }
    return CheckResult{worst.margin <= grid.tolerance, worst.margin, worst.point};
}

ExpBoundFit check_exponential_bound(const MemoryKernel& kernel, const AuditGrid& grid) {
    grid.validate();
    const bool log_scale = kernel.has_log_scale();

    std::vector<double> s, y; // y = log g(s)
    s.reserve(grid.points.size());
    y.reserve(grid.points.size());
    for (double p : grid.points) {
        double ly;
        if (log_scale) {
            ly = kernel.log_g(p);
        } else {
            const double gv = kernel.g(p);
            if (!(gv > 0.0)) continue;
            ly = std::log(gv);
        }
        if (std::isfinite(ly)) {
            s.push_back(p);
            y.push_back(ly);
        }
    }
    if (s.size() < 2) return ExpBoundFit{0.0, kInf, true}; // vanishing kernel sentinel

    // spread(omega) = max_i (y_i + omega s_i) - min_i (y_i + omega s_i) is
    // convex piecewise linear; golden-section over a bracketed omega.
    const auto spread = [&](double omega) {
        double hi = -kInf, lo = kInf;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double z = y[i] + omega * s[i];
            hi = std::max(hi, z);
            lo = std::min(lo, z);
        }
        return hi - lo;
    };
    const double slope = (y.front() - y.back()) / (s.back() - s.front());
    double a = 0.0;
    double b = std::max(4.0 * std::max(slope, 0.0), 1.0);
    while (spread(b) < spread(b * 0.999) && b < 1e8) b *= 2.0; // ensure the minimum is inside
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = spread(x1), f2 = spread(x2);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = spread(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = spread(x2);
        }
    }
    const double omega = 0.5 * (a + b);
    double log_m = -kInf;
    for (std::size_t i = 0; i < s.size(); ++i) log_m = std::max(log_m, y[i] + omega * s[i]);
    return ExpBoundFit{std::exp(log_m), omega, omega > 1e-9};
}

CheckResult check_inequality_3_1(const MemoryKernel& kernel, double alpha, double delta,
                                 const std::vector<double>& s_grid,
                                 const std::vector<double>& t_grid) {
    if (!(delta > 0.0) || !(delta < alpha))
        throw ParameterError("check_inequality_3_1 requires 0 < delta < alpha");
    const double ad = alpha - delta;
    WorstMargin worst;
    if (kernel.has_log_scale()) {
        for (double s : s_grid) {
            const double base = kernel.log_neg_gp(s);
            for (double t : t_grid) {
                const double l1 = kernel.log_neg_gp(s + t);
                const double l2 = base + ad * t;
                const double m = l1 >= l2 ? 1.0 - std::exp(l2 - l1) : std::exp(l1 - l2) - 1.0;
                worst.consider(m, s);
            }
        }
    } else {
        for (double s : s_grid) {
            const double base = -kernel.gp(s);
            for (double t : t_grid) {
                const double lhs = -kernel.gp(s + t);
                const double rhs = base * std::exp(ad * t);
                const double scale = std::max({lhs, rhs, kTiny});
                worst.consider((lhs - rhs) / scale, s);
            }
        }
    }
    return CheckResult{worst.margin <= 1e-10, worst.margin, worst.point};
}

KernelReport audit_kernel(const MemoryKernel& kernel, double alpha, double delta,
                          std::optional<double> gamma, const AuditGrid& grid) {
    grid.validate();
    KernelReport rep;
    rep.kernel = kernel.describe();
    rep.alpha = alpha;
    rep.delta = delta;
    rep.gamma = gamma;
    rep.grid_points = grid.points.size();
    rep.grid_span = grid.points.back();
    rep.tolerance = grid.tolerance;

    // (g1): measured mass = quadrature over the grid span plus the declared
    // analytic tail.  For log-scale kernels the declared mass is trusted and
    // cross-checked coarsely.
    rep.kappa_declared = kernel.kappa();
    if (kernel.is_zero()) {
        rep.kappa_measured = 0.0;
        rep.g1_summable = true;
    } else {
        const double s_lo = grid.points.front(), s_hi = grid.points.back();
        double mass = kernel.g(s_lo) * s_lo; // head, g bounded near 0 for built-ins
        const int panels = 4096;
        mass += composite_gauss8([&](double s) { return kernel.g(s); }, s_lo, s_hi, panels);
        mass += kernel.tail(s_hi);
        rep.kappa_measured = mass;
        rep.g1_summable = std::isfinite(mass) &&
                          std::abs(mass - rep.kappa_declared) <=
                              1e-3 * std::max(1.0, rep.kappa_declared);
    }
    if (gamma) rep.g1_mass_ok = rep.kappa_declared < *gamma;

    // (g2): g >= 0 and g' <= 0
    {
        WorstMargin worst;
        for (double s : grid.points) {
            const double gv = kernel.g(s), gp = kernel.gp(s);
            const double m =
                std::max(-gv / std::max(std::abs(gv), kTiny), gp / std::max(std::abs(gp), kTiny));
            worst.consider(m, s);
        }
        rep.g2 = CheckResult{worst.margin <= grid.tolerance, worst.margin, worst.point};
    }

    rep.g3 = check_g3(kernel, alpha, delta, grid);
    rep.dafermos = check_dafermos(kernel, delta, grid);
    rep.exp_bound = check_exponential_bound(kernel, grid);

    // convexity flag: g'' >= 0 everywhere on the grid
    {
        bool convex = true;
        if (kernel.has_log_scale()) {
            // g'' = -f'; sign of f' is the sign of f'/f since f > 0
            for (double s : grid.points)
                if (kernel.gpp_over_gp(s) > 0.0) {
                    convex = false;
                    break;
                }
        } else {
            for (double s : grid.points) {
                const double gpp = kernel.gpp(s);
                if (gpp < -grid.tolerance * std::max(std::abs(gpp), 1.0)) {
                    convex = false;
                    break;
                }
            }
        }
        rep.convex = convex;
    }
    return rep;
}

std::string report_to_json(const KernelReport& r) {
    nlohmann::json j;
    j["kernel"] = r.kernel;
    j["alpha"] = r.alpha;
    j["delta"] = r.delta;
    if (r.gamma) j["gamma"] = *r.gamma;
    j["g1"] = {{"kappa_measured", r.kappa_measured},
               {"kappa_declared", r.kappa_declared},
               {"summable", r.g1_summable}};
    if (r.g1_mass_ok) j["g1"]["mass_ok"] = *r.g1_mass_ok;
    const auto check = [](const CheckResult& c) {
        return nlohmann::json{
            {"ok", c.ok}, {"worst_margin", c.worst_margin}, {"worst_point", c.worst_point}};
    };
    j["g2"] = check(r.g2);
    j["g3"] = check(r.g3);
    j["dafermos"] = check(r.dafermos);
    j["exp_bound"] = {{"M", r.exp_bound.M},
                      {"omega", std::isfinite(r.exp_bound.omega)
                                    ? nlohmann::json(r.exp_bound.omega)
                                    : nlohmann::json("inf")},
                      {"ok", r.exp_bound.ok}};
    j["convex"] = r.convex;
    j["grid"] = {{"points", r.grid_points}, {"span", r.grid_span}, {"tolerance", r.tolerance}};
    return j.dump(2);
}

} // namespace mgt
