#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "mgt/audit.hpp"

using namespace mgt;

namespace {

// kernel violating (g3): -g' = e^{-s}(1.01 + sin 6s) swings too fast where
// it is small
class SwingKernel final : public MemoryKernel {
public:
    double g(double s) const override { return std::exp(-s) * (1.01 + std::sin(6.0 * s)) / 6.0; }
    double gp(double s) const override { return -std::exp(-s) * (1.01 + std::sin(6.0 * s)); }
    double gpp(double s) const override {
        return std::exp(-s) * (1.01 + std::sin(6.0 * s) - 6.0 * std::cos(6.0 * s));
    }
    double kappa() const override { return 0.2; }
    double tail(double) const override { return 0.0; }
    std::string describe() const override { return "swing"; }
};

} // namespace

TEST_CASE("audit grid construction and validation") {
    const auto k = make_oscillating();
    const AuditGrid grid = make_audit_grid(*k, 40.0);
    CHECK(grid.points.size() >= 1000);
    CHECK(grid.points.front() > 0.0);
    for (std::size_t i = 0; i + 1 < grid.points.size(); ++i)
        REQUIRE(grid.points[i] < grid.points[i + 1]);

    AuditGrid bad{{0.5, 0.4}, 1e-10};
    CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("(g3) certification") {
    const AuditGrid osc_grid = make_audit_grid(*make_oscillating(), 40.0);

    SUBCASE("oscillating kernel passes with alpha - delta = 1") {
        const CheckResult r = check_g3(*make_oscillating(), 2.0, 1.0, osc_grid);
        CHECK(r.ok);
        CHECK(r.worst_margin < 0.0); // strictly dissipative margin
    }
    SUBCASE("exponential kernel passes for any delta < alpha") {
        const auto k = make_exponential(1.0, 1.0);
        for (double delta : {0.1, 0.5, 0.9})
            CHECK(check_g3(*k, 1.0, delta, make_audit_grid(*k, 40.0)).ok);
    }
    SUBCASE("staircase attains equality exactly at the ramp onsets") {
        const auto k = make_staircase(8);
        const CheckResult r = check_g3(*k, 2.0, 1.0, make_audit_grid(*k, 80.0));
        CHECK(r.ok);
        CHECK(r.worst_margin == 0.0);
        // the worst point is one of the n^2 onsets
        const double rt = std::sqrt(r.worst_point);
        CHECK(std::abs(rt - std::round(rt)) < 1e-9);
    }
    SUBCASE("delta >= alpha is rejected") {
        CHECK_THROWS_AS(check_g3(*make_oscillating(), 1.0, 1.0, osc_grid), ParameterError);
    }
    SUBCASE("a kernel with fast upswings of -g' is refuted") {
        const SwingKernel k;
        CHECK_FALSE(check_g3(k, 2.0, 1.0, osc_grid).ok);
    }
}

TEST_CASE("Dafermos inequality check") {
    const auto e = make_exponential(1.0, 1.0);
    const AuditGrid grid = make_audit_grid(*e, 40.0);

    SUBCASE("equality case at delta = nu") {
        const CheckResult r = check_dafermos(*e, 1.0, grid);
        CHECK(r.ok);
        CHECK(std::abs(r.worst_margin) <= 1e-12);
    }
    SUBCASE("fails for delta above the rate") {
        CHECK_FALSE(check_dafermos(*e, 2.0, grid).ok);
    }
    SUBCASE("monotone in delta: passing at delta passes below") {
        for (double delta : {0.9, 0.5, 0.25, 0.1})
            CHECK(check_dafermos(*e, delta, grid).ok);
    }
    SUBCASE("staircase refuted at every tested delta, at a ramp point") {
        const auto st = make_staircase(8);
        const AuditGrid sgrid = make_audit_grid(*st, 80.0);
        for (double delta : {0.1, 0.5, 1.0}) {
            const CheckResult r = check_dafermos(*st, delta, sgrid);
            CHECK_FALSE(r.ok);
            CHECK(r.worst_margin > 0.0);
            // violating point lies in some [n^2, n^2 + 1]
            const double frac = r.worst_point - std::floor(r.worst_point);
            const int n = static_cast<int>(std::round(std::sqrt(std::floor(r.worst_point))));
            CHECK(std::abs(std::floor(r.worst_point) - double(n) * n) <= 1.0);
            CHECK((frac == 0.0 || frac == 0.5));
        }
    }
}

TEST_CASE("exponential-bound fit") {
    SUBCASE("recovers an exponential kernel exactly") {
        const auto k = make_exponential(3.0, 2.0);
        const ExpBoundFit fit = check_exponential_bound(*k, make_audit_grid(*k, 30.0));
        CHECK(fit.ok);
        CHECK(fit.omega == doctest::Approx(2.0).epsilon(1e-8));
        CHECK(fit.M == doctest::Approx(3.0).epsilon(1e-8));
    }
    SUBCASE("oscillating: omega within 2% of 1 and M below 155/37") {
        const auto k = make_oscillating();
        const ExpBoundFit fit = check_exponential_bound(*k, make_audit_grid(*k, 40.0));
        CHECK(fit.ok);
        CHECK(std::abs(fit.omega - 1.0) <= 0.02);
        CHECK(fit.M <= 155.0 / 37.0);
    }
    SUBCASE("staircase: decay rate 1 certified through the envelope") {
        const auto k = make_staircase(8);
        const ExpBoundFit fit = check_exponential_bound(*k, make_audit_grid(*k, 80.0));
        CHECK(fit.ok);
        CHECK(fit.omega >= 0.99);
        CHECK(k->exp_bound()->M == 1.0);
        CHECK(k->exp_bound()->omega == 1.0);
    }
    SUBCASE("vanishing kernel reports the omega = +inf sentinel") {
        const ExpBoundFit fit = check_exponential_bound(*make_zero(), make_audit_grid(*make_zero(), 40.0));
        CHECK(fit.ok);
        CHECK(std::isinf(fit.omega));
        CHECK(fit.M == 0.0);
    }
    SUBCASE("scale covariance: auditing c g gives (c M, omega)") {
        const auto base = make_oscillating();
        const auto scaled = make_scaled(base, 5.0);
        const AuditGrid grid = make_audit_grid(*base, 40.0);
        const ExpBoundFit f1 = check_exponential_bound(*base, grid);
        const ExpBoundFit f2 = check_exponential_bound(*scaled, grid);
        CHECK(f2.omega == doctest::Approx(f1.omega).epsilon(1e-9));
        CHECK(f2.M == doctest::Approx(5.0 * f1.M).epsilon(1e-9));
    }
}

TEST_CASE("translated form agrees with (g3) on matching grids") {
    std::vector<double> s_grid, t_grid;
    for (int i = 1; i <= 100; ++i) {
        s_grid.push_back(0.2 * i);
        t_grid.push_back(0.05 * i);
    }
    SUBCASE("oscillating: both hold") {
        const auto k = make_oscillating();
        CHECK(check_g3(*k, 2.0, 1.0, make_audit_grid(*k, 40.0)).ok);
        CHECK(check_inequality_3_1(*k, 2.0, 1.0, s_grid, t_grid).ok);
    }
    SUBCASE("exponential: both hold") {
        const auto k = make_exponential(0.5, 1.0);
        CHECK(check_inequality_3_1(*k, 1.0, 0.5, s_grid, t_grid).ok);
    }
    SUBCASE("swing kernel: both refuted") {
        const SwingKernel k;
        CHECK_FALSE(check_g3(k, 2.0, 1.0, make_audit_grid(k, 40.0)).ok);
        CHECK_FALSE(check_inequality_3_1(k, 2.0, 1.0, s_grid, t_grid).ok);
    }
}

TEST_CASE("full kernel report") {
    SUBCASE("oscillating kernel with gamma large enough") {
        const auto k = make_oscillating();
        const KernelReport rep = audit_kernel(*k, 2.0, 1.0, 5.0, make_audit_grid(*k, 40.0));
        CHECK(rep.g1_summable);
        CHECK(rep.g1_mass_ok.value());
        CHECK(rep.kappa_measured == doctest::Approx(rep.kappa_declared).epsilon(1e-6));
        CHECK(rep.g2.ok);
        CHECK(rep.g3.ok);
        // the classical condition holds only for delta below ~0.72 here:
        // g' + g = e^{-s} (6 cos 6s - 36 sin 6s)/37 changes sign
        CHECK_FALSE(rep.dafermos.ok);
        CHECK(check_dafermos(*k, 0.5, make_audit_grid(*k, 40.0)).ok);
        CHECK(rep.exp_bound.ok);
        CHECK_FALSE(rep.convex);

        const auto parsed = nlohmann::json::parse(report_to_json(rep));
        CHECK(parsed.at("g3").at("ok").get<bool>());
        CHECK_FALSE(parsed.at("convex").get<bool>());
    }
    SUBCASE("staircase kernel: (g3) + exponential bound pass, Dafermos fails, nonconvex") {
        const auto k = make_staircase(8);
        const KernelReport rep = audit_kernel(*k, 2.0, 1.0, 1.0, make_audit_grid(*k, 80.0));
        CHECK(rep.g1_mass_ok.value()); // kappa ~ 0.962 < 1
        CHECK(rep.g2.ok);
        CHECK(rep.g3.ok);
        CHECK_FALSE(rep.dafermos.ok);
        CHECK(rep.exp_bound.ok);
        CHECK_FALSE(rep.convex);
    }
}
