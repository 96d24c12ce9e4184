#include "mgt/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mgt/quadrature.hpp"

namespace mgt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// MemoryKernel defaults

double MemoryKernel::log_g(double s) const { return std::log(g(s)); }
double MemoryKernel::log_neg_gp(double s) const { return std::log(-gp(s)); }
double MemoryKernel::gpp_over_gp(double s) const { return gpp(s) / gp(s); }

// ---------------------------------------------------------------------------
// ExponentialKernel

ExponentialKernel::ExponentialKernel(double k, double nu) : k_(k), nu_(nu) {
    if (!(k > 0.0) || !(nu > 0.0))
        throw ParameterError("exponential kernel requires k > 0 and nu > 0");
}

double ExponentialKernel::g(double s) const { return k_ * std::exp(-nu_ * s); }
double ExponentialKernel::gp(double s) const { return -k_ * nu_ * std::exp(-nu_ * s); }
double ExponentialKernel::gpp(double s) const { return k_ * nu_ * nu_ * std::exp(-nu_ * s); }
double ExponentialKernel::kappa() const { return k_ / nu_; }
double ExponentialKernel::tail(double s) const { return (k_ / nu_) * std::exp(-nu_ * s); }

std::optional<double> ExponentialKernel::g3_delta(double alpha) const {
    // (alpha - delta) g' - g'' = -k nu e^{-nu s} (alpha - delta + nu) <= 0 for
    // every delta < alpha + nu, so any normalized delta < alpha is certified.
    return nu_ < alpha ? nu_ : 0.5 * alpha;
}

std::optional<ExpBound> ExponentialKernel::exp_bound() const { return ExpBound{k_, nu_}; }

std::string ExponentialKernel::describe() const {
    return "exponential(k=" + std::to_string(k_) + ", nu=" + std::to_string(nu_) + ")";
}

// ---------------------------------------------------------------------------
// OscillatingKernel

double OscillatingKernel::g(double s) const {
    return std::exp(-s) * (148.0 + 6.0 * std::cos(6.0 * s) + std::sin(6.0 * s)) / 37.0;
}

double OscillatingKernel::gp(double s) const {
    return -std::exp(-s) * (4.0 + std::sin(6.0 * s));
}

double OscillatingKernel::gpp(double s) const {
    return std::exp(-s) * (4.0 + std::sin(6.0 * s) - 6.0 * std::cos(6.0 * s));
}

double OscillatingKernel::kappa() const {
    // int e^{-s} cos 6s = 1/37, int e^{-s} sin 6s = 6/37 over (0, inf).
    return 4.0 + 12.0 / 1369.0;
}

double OscillatingKernel::tail(double s) const {
    const double c = std::cos(6.0 * s), n = std::sin(6.0 * s);
    return std::exp(-s) / 37.0 * (148.0 + (12.0 * c - 35.0 * n) / 37.0);
}

std::optional<double> OscillatingKernel::g3_delta(double alpha) const {
    // g' - g'' = -e^{-s}[8 + 2 sin 6s - 6 cos 6s] <= 0: (g3) with alpha - delta = 1.
    if (alpha > 1.0) return alpha - 1.0;
    return std::nullopt;
}

std::optional<ExpBound> OscillatingKernel::exp_bound() const {
    // |6 cos 6s + sin 6s| <= sqrt(37).
    return ExpBound{(148.0 + std::sqrt(37.0)) / 37.0, 1.0};
}

std::string OscillatingKernel::describe() const { return "oscillating"; }

// ---------------------------------------------------------------------------
// StaircaseKernel

namespace {

// int_0^D x e^{bx} dx = ( -expm1(bD) + bD e^{bD} ) / b^2, b < 0; D may be inf.
double first_moment_bracket(double b, double D) {
    if (D == kInf) return 1.0 / (b * b);
    const double bd = b * D;
    return (-std::expm1(bd) + bd * std::exp(bd)) / (b * b);
}

// int_0^D e^{bx} dx = -expm1(bD)/(-b) ... = (1 - e^{bD}) / (-b), b < 0.
double mass_bracket(double b, double D) {
    if (D == kInf) return 1.0 / (-b);
    return -std::expm1(b * D) / (-b);
}

} // namespace

StaircaseKernel::StaircaseKernel(int n_max) : n_max_(n_max) {
    if (n_max < 2) throw ParameterError("staircase kernel requires n_max >= 2");

    const auto log_eps = [](int n) {
        return -static_cast<double>(n * n + n + 1) - std::log(static_cast<double>(n + 2));
    };

    // Density pieces: exponential envelope e^{-s} wherever it is continuous,
    // a log-linear bridge on [n^2 - 1, n^2] dropping to eps_n, the affine ramp
    // on I_n, and a pure e^{-s} tail after the last ramp.  The ramp rejoins
    // the envelope exactly: eps_n (n + 2) = e^{-(n^2+n+1)}.
    pieces_.push_back({0.0, 3.0, false, 0, 0, 0.0, -1.0, 0, 0, 0, 0});
    for (int n = 2; n <= n_max; ++n) {
        const double nsq = static_cast<double>(n) * n;
        const double ramp_hi = nsq + n + 1;
        const double le = log_eps(n);
        // bridge [n^2 - 1, n^2]: log f from -(n^2 - 1) down to log eps_n
        const double bridge_slope = le + (nsq - 1.0);
        pieces_.push_back({nsq - 1.0, nsq, false, 0, 0, -(nsq - 1.0), bridge_slope, 0, 0, 0, 0});
        // ramp I_n
        pieces_.push_back({nsq, ramp_hi, true, le, nsq, 0, 0, 0, 0, 0, 0});
        if (n < n_max) {
            const double next_lo = static_cast<double>(n + 1) * (n + 1) - 1.0;
            pieces_.push_back({ramp_hi, next_lo, false, 0, 0, -ramp_hi, -1.0, 0, 0, 0, 0});
        }
    }
    const double tail_lo = static_cast<double>(n_max) * n_max + n_max + 1;
    pieces_.push_back({tail_lo, kInf, false, 0, 0, -tail_lo, -1.0, 0, 0, 0, 0});

    // Per-piece exact integrals (log scale).
    for (auto& p : pieces_) {
        if (p.affine) {
            const double w = p.hi - p.lo;
            p.log_mass = p.log_eps + std::log(w + 0.5 * w * w);
            p.log_first = p.log_eps + std::log(0.5 * w * w + w * w * w / 3.0);
        } else {
            const double D = p.hi - p.lo;
            p.log_mass = p.log_f_lo + std::log(mass_bracket(p.slope, D));
            p.log_first = p.log_f_lo + std::log(first_moment_bracket(p.slope, D));
        }
    }

    // Suffix accumulations: tail mass Q_i = int_{lo_i}^inf f and
    // P_i = int_{lo_i}^inf (y - lo_i) f(y) dy = first_i + P_{i+1} + (lo_{i+1} - lo_i) Q_{i+1}.
    const std::size_t m = pieces_.size();
    pieces_[m - 1].log_tail_g = pieces_[m - 1].log_mass;
    pieces_[m - 1].log_tail_gp = pieces_[m - 1].log_first;
    for (std::size_t i = m - 1; i-- > 0;) {
        const auto& nx = pieces_[i + 1];
        pieces_[i].log_tail_g = log_add_exp(pieces_[i].log_mass, nx.log_tail_g);
        const double shift = std::log(nx.lo - pieces_[i].lo) + nx.log_tail_g;
        pieces_[i].log_tail_gp =
            log_add_exp(pieces_[i].log_first, log_add_exp(nx.log_tail_gp, shift));
    }
}

std::size_t StaircaseKernel::piece_index(double s) const {
    if (s <= pieces_.front().lo) return 0;
    std::size_t lo = 0, hi = pieces_.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (pieces_[mid].lo <= s)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

double StaircaseKernel::log_f_in(const Piece& p, double s) const {
    if (p.affine) return p.log_eps + std::log1p(s - p.n_sq);
    return p.log_f_lo + p.slope * (s - p.lo);
}

double StaircaseKernel::log_partial_mass(const Piece& p, double s) const {
    if (s >= p.hi) return -kInf;
    if (p.affine) {
        const double x0 = s - p.n_sq, w = p.hi - p.n_sq;
        return p.log_eps + std::log((w - x0) + 0.5 * (w * w - x0 * x0));
    }
    return log_f_in(p, s) + std::log(mass_bracket(p.slope, p.hi - s));
}

double StaircaseKernel::log_partial_first(const Piece& p, double s) const {
    if (s >= p.hi) return -kInf;
    if (p.affine) {
        const double x0 = s - p.n_sq, r = p.hi - s;
        return p.log_eps + std::log(0.5 * (1.0 + x0) * r * r + r * r * r / 3.0);
    }
    return log_f_in(p, s) + std::log(first_moment_bracket(p.slope, p.hi - s));
}

double StaircaseKernel::log_f(double s) const {
    s = std::max(s, 0.0);
    return log_f_in(pieces_[piece_index(s)], s);
}

double StaircaseKernel::log_g(double s) const {
    s = std::max(s, 0.0);
    const std::size_t i = piece_index(s);
    double acc = log_partial_mass(pieces_[i], s);
    if (i + 1 < pieces_.size()) acc = log_add_exp(acc, pieces_[i + 1].log_tail_g);
    return acc;
}

double StaircaseKernel::g(double s) const { return std::exp(log_g(s)); }
double StaircaseKernel::gp(double s) const { return -std::exp(log_f(s)); }

double StaircaseKernel::gpp_over_gp(double s) const {
    s = std::max(s, 0.0);
    const auto& p = pieces_[piece_index(s)];
    // f'/f: slope of log f.
    if (p.affine) return 1.0 / (1.0 + (s - p.n_sq));
    return p.slope;
}

double StaircaseKernel::gpp(double s) const {
    // g'' = -f'; right-sided at piece boundaries.
    s = std::max(s, 0.0);
    const auto& p = pieces_[piece_index(s)];
    if (p.affine) return -std::exp(p.log_eps);
    return -p.slope * std::exp(log_f_in(p, s));
}

double StaircaseKernel::gpp_side(double s, bool from_right) const {
    s = std::max(s, 0.0);
    std::size_t i = piece_index(s);
    if (!from_right && i > 0 && s <= pieces_[i].lo) --i;
    const auto& p = pieces_[i];
    if (p.affine) return -std::exp(p.log_eps);
    return -p.slope * std::exp(log_f_in(p, s));
}

double StaircaseKernel::kappa() const { return tail(0.0); } // int g = int y f(y) dy

double StaircaseKernel::tail(double s) const {
    // G(s) = int_s^inf g = int_s^inf (z - s) f(z) dz  (Fubini).
    s = std::max(s, 0.0);
    const std::size_t i = piece_index(s);
    double acc = log_partial_first(pieces_[i], s);
    if (i + 1 < pieces_.size()) {
        const auto& nx = pieces_[i + 1];
        double rest = nx.log_tail_gp;
        if (nx.lo > s) rest = log_add_exp(rest, std::log(nx.lo - s) + nx.log_tail_g);
        acc = log_add_exp(acc, rest);
    }
    return std::exp(acc);
}

double StaircaseKernel::log_neg_gp(double s) const { return log_f(s); }

std::optional<double> StaircaseKernel::g3_delta(double alpha) const {
    // f'/f <= 1 on every piece (equality at the left end of each ramp), so
    // (g3) holds with alpha - delta = 1.
    if (alpha > 1.0) return alpha - 1.0;
    return std::nullopt;
}

std::optional<ExpBound> StaircaseKernel::exp_bound() const {
    // f <= e^{-s} pointwise, hence g(s) <= e^{-s}.
    return ExpBound{1.0, 1.0};
}

std::vector<double> StaircaseKernel::breakpoints(double s_max) const {
    std::vector<double> out;
    for (const auto& p : pieces_)
        if (p.lo > 0.0 && p.lo <= s_max) out.push_back(p.lo);
    return out;
}

std::vector<double> StaircaseKernel::audit_points(double s_max) const {
    // Include the Dafermos refutation scan points n^2 + {0, 1/2, 1}.
    std::vector<double> out = breakpoints(s_max);
    for (int n = 2; n <= n_max_; ++n) {
        const double nsq = static_cast<double>(n) * n;
        for (double tau : {0.0, 0.5, 1.0})
            if (nsq + tau <= s_max) out.push_back(nsq + tau);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string StaircaseKernel::describe() const {
    return "staircase(n_max=" + std::to_string(n_max_) + ")";
}

// ---------------------------------------------------------------------------
// ZeroKernel

std::optional<ExpBound> ZeroKernel::exp_bound() const { return ExpBound{0.0, kInf}; }

// ---------------------------------------------------------------------------
// TabulatedKernel

TabulatedKernel::TabulatedKernel(std::vector<double> s, std::vector<double> g)
    : s_(std::move(s)), g_(std::move(g)) {
    if (s_.size() != g_.size() || s_.size() < 2)
        throw ParameterError("tabulated kernel needs at least two (s, g) samples");
    if (s_.front() <= 0.0)
        throw ParameterError("tabulated kernel samples must have s > 0");
    for (std::size_t i = 0; i + 1 < s_.size(); ++i)
        if (!(s_[i] < s_[i + 1]))
            throw ParameterError("tabulated kernel samples must be strictly increasing in s");
    for (double v : g_)
        if (!(v >= 0.0)) throw ParameterError("tabulated kernel values must be nonnegative");

    tail_.assign(s_.size(), 0.0);
    for (std::size_t i = s_.size() - 1; i-- > 0;)
        tail_[i] = tail_[i + 1] + 0.5 * (g_[i] + g_[i + 1]) * (s_[i + 1] - s_[i]);
}

double TabulatedKernel::g(double s) const {
    if (s <= s_.front()) return g_.front();
    if (s >= s_.back()) return 0.0;
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - s_.begin()) - 1;
    const double t = (s - s_[i]) / (s_[i + 1] - s_[i]);
    return g_[i] + t * (g_[i + 1] - g_[i]);
}

double TabulatedKernel::gp(double s) const {
    if (s <= s_.front() || s >= s_.back()) return 0.0;
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - s_.begin()) - 1;
    return (g_[i + 1] - g_[i]) / (s_[i + 1] - s_[i]);
}

double TabulatedKernel::kappa() const { return tail_[0] + g_.front() * s_.front(); }

double TabulatedKernel::tail(double s) const {
    if (s <= 0.0) return kappa();
    if (s <= s_.front()) return tail_[0] + g_.front() * (s_.front() - s);
    if (s >= s_.back()) return 0.0;
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - s_.begin()) - 1;
    return tail_[i + 1] + 0.5 * (g(s) + g_[i + 1]) * (s_[i + 1] - s);
}

std::vector<double> TabulatedKernel::breakpoints(double s_max) const {
    std::vector<double> out;
    for (double s : s_)
        if (s <= s_max) out.push_back(s);
    return out;
}

std::string TabulatedKernel::describe() const {
    return "tabulated(" + std::to_string(s_.size()) + " samples)";
}

// ---------------------------------------------------------------------------
// ScaledKernel

ScaledKernel::ScaledKernel(KernelPtr inner, double scale) : inner_(std::move(inner)), c_(scale) {
    if (!inner_) throw ParameterError("scaled kernel requires an inner kernel");
    if (!(scale > 0.0)) throw ParameterError("kernel scale must be positive");
}

std::optional<ExpBound> ScaledKernel::exp_bound() const {
    if (auto b = inner_->exp_bound()) return ExpBound{c_ * b->M, b->omega};
    return std::nullopt;
}

double ScaledKernel::log_g(double s) const { return std::log(c_) + inner_->log_g(s); }
double ScaledKernel::log_neg_gp(double s) const { return std::log(c_) + inner_->log_neg_gp(s); }

std::string ScaledKernel::describe() const {
    return std::to_string(c_) + " * " + inner_->describe();
}

// ---------------------------------------------------------------------------
// Factories

KernelPtr make_exponential(double k, double nu) {
    return std::make_shared<ExponentialKernel>(k, nu);
}
KernelPtr make_oscillating() { return std::make_shared<OscillatingKernel>(); }
KernelPtr make_staircase(int n_max) { return std::make_shared<StaircaseKernel>(n_max); }
KernelPtr make_zero() { return std::make_shared<ZeroKernel>(); }
KernelPtr make_tabulated(std::vector<double> s, std::vector<double> g) {
    return std::make_shared<TabulatedKernel>(std::move(s), std::move(g));
}
KernelPtr make_scaled(KernelPtr inner, double scale) {
    return std::make_shared<ScaledKernel>(std::move(inner), scale);
}

double tail_integral(const MemoryKernel& kernel, double s) {
    if (!(s >= 0.0)) throw ParameterError("tail integral requires s >= 0");
    return kernel.tail(s);
}

} // namespace mgt
