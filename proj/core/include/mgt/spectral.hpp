#pragma once

#include <span>
#include <string>
#include <vector>

#include "mgt/errors.hpp"
#include "mgt/kernels.hpp"

namespace mgt {

/// Structural parameters of the third-order-in-time equation
///   u_ttt + alpha u_tt + beta A u_t + gamma A u - int_0^t g(s) A u(t-s) ds = 0.
/// The sign of the stability number varkappa = beta - gamma/alpha separates
/// exponential decay (> 0), conservation (= 0) and blow-up (< 0) of the
/// memoryless dynamics.
struct MgtParams {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;

    double varkappa() const { return beta - gamma / alpha; }
    void validate() const;
};

double stability_number(const MgtParams& p);

/// Modal spectrum of the strictly positive selfadjoint operator A.
class Spectrum {
public:
    explicit Spectrum(std::vector<double> eigenvalues);

    /// Dirichlet Laplacian on (0,1): lambda_j = (j pi)^2, j = 1..n.
    static Spectrum dirichlet1d(std::size_t n_modes);

    std::size_t size() const { return lambda_.size(); }
    double operator[](std::size_t j) const { return lambda_[j]; }
    const std::vector<double>& eigenvalues() const { return lambda_; }

private:
    std::vector<double> lambda_;
};

/// Coefficients against the eigenbasis of A.
struct ModalVector {
    std::vector<double> c;

    static ModalVector zero(std::size_t n) { return ModalVector{std::vector<double>(n, 0.0)}; }
    std::size_t size() const { return c.size(); }
};

/// ||x||_sigma^2 = sum_j lambda_j^sigma x_j^2  (sigma = 0: plain Euclidean).
double sigma_norm_sq(const Spectrum& spec, const ModalVector& x, double sigma);
double sigma_inner(const Spectrum& spec, const ModalVector& a, const ModalVector& b, double sigma);

/// Phase-space point (u, u_t, u_tt).
struct State {
    ModalVector u, v, w;

    static State zero(std::size_t n) {
        return State{ModalVector::zero(n), ModalVector::zero(n), ModalVector::zero(n)};
    }
};

/// ||(u,v,w)||_H^2 = ||u||_1^2 + ||v||_1^2 + ||w||^2, the product norm on
/// H^1 x H^1 x H.
double h_norm_sq(const Spectrum& spec, const State& z);

/// The equivalent norm
///   ||(u,v,w)||_*^2 = ((gamma-kappa)/alpha)||v + alpha u||_1^2
///                     + varkappa ||v||_1^2 + ||w + alpha v||^2,
/// defined in the subcritical regime with kernel mass kappa < gamma.
double star_norm_sq(const MgtParams& p, double kappa_mass, const Spectrum& spec, const State& z);

enum class Regime { Subcritical, Critical, Supercritical };

std::string to_string(Regime r);

struct RegimeInfo {
    Regime regime;
    bool admissible; ///< kernel mass kappa < gamma
    double varkappa;
    double kappa;
};

/// Classifies the regime by sign of varkappa and checks kernel admissibility.
RegimeInfo classify_regime(const MgtParams& p, const MemoryKernel& kernel);

/// Residual of the modal equation at time t for one eigenvalue lambda:
///   u''' + alpha u'' + beta lambda u' + gamma lambda u
///     - lambda int_0^t g(s) u(t-s) ds - lambda Q_rho(t) u0,
/// with the convolution evaluated by product quadrature on the sampled
/// history u(0), u(dt), ..., u(t).  `wprime` is the caller's value of
/// u'''(t) (analytic, or a finite difference of u_tt along a trajectory).
/// The forcing term is present only when rho > 0.
double modal_residual(const MgtParams& p, const MemoryKernel& kernel, double lambda,
                      std::span<const double> u_history, double dt, double u, double v, double w,
                      double wprime, double rho = 0.0, double u0 = 0.0);

} // namespace mgt
