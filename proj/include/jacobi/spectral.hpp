#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "jacobi/errors.hpp"
#include "jacobi/model.hpp"
#include "jacobi/specfun.hpp"

namespace jacobi::spectral {

namespace detail {

inline void require_polynomial_regime(const model::Diffusion& M) {
    if (!(M.alpha() > -1.0) || !(M.beta() > -1.0))
        throw RegimeError("polynomial spectral theory requires alpha > -1 and beta > -1");
}

inline constexpr int kModeCap = 500;
inline constexpr double kTailTol = 1e-14;

} // namespace detail

/// Decay rate of mode n: sigma^2 n (n + alpha + beta + 1) / 2.
inline double decay_rate(const model::Diffusion& M, int n) {
    detail::require_polynomial_regime(M);
    if (n < 0) throw ParameterError("decay_rate: negative mode index");
    double s2 = M.sigma() * M.sigma();
    return 0.5 * s2 * n * (n + M.alpha() + M.beta() + 1.0);
}

/// Squared L^2(dm) norm of the n-th polynomial eigenfunction, by quadrature.
inline double qnorm_sq(const model::Diffusion& M, int n) {
    detail::require_polynomial_regime(M);
    double alpha = M.alpha(), beta = M.beta(), d = M.d();
    return M.quad_dm(
        [&](double x) {
            double q = specfun::jacobi_Q(n, alpha, beta, d, x);
            return q * q;
        },
        1e-12);
}

struct SpectralExpansion {
    model::ShapeParams shape;
    double d = 1.0;
    std::vector<double> coefficients;
    std::vector<double> norms_sq;
    int N = 0;
};

/// Orthogonal projection coefficients c_n = (f, Q_n)_dm / ||Q_n||^2, n = 0..N.
template <class F>
SpectralExpansion expand(const model::Diffusion& M, F&& f, int N) {
    detail::require_polynomial_regime(M);
    if (N < 0) throw ParameterError("expand: negative truncation order");
    SpectralExpansion e;
    e.shape = M.shape();
    e.d = M.d();
    e.N = N;
    e.coefficients.resize(N + 1);
    e.norms_sq.resize(N + 1);
    double alpha = M.alpha(), beta = M.beta(), d = M.d();
    for (int n = 0; n <= N; ++n) {
        double inner = M.quad_dm(
            [&](double x) { return f(x) * specfun::jacobi_Q(n, alpha, beta, d, x); }, 1e-12);
        e.norms_sq[n] = qnorm_sq(M, n);
        e.coefficients[n] = inner / e.norms_sq[n];
    }
    return e;
}

/// Value of the truncated series sum c_n Q_n(x).
inline double evaluate(const SpectralExpansion& e, double x) {
    double acc = 0.0;
    for (int n = 0; n <= e.N; ++n)
        acc += e.coefficients[n] * specfun::jacobi_Q(n, e.shape.alpha, e.shape.beta, e.d, x);
    return acc;
}

namespace detail {

inline int raise_truncation(const model::Diffusion& M, double t, int N) {
    if (t <= 0.0) return N;
    for (int n = N; n <= kModeCap; ++n) {
        if (std::exp(-decay_rate(M, n) * t) <= kTailTol) return n;
    }
    throw TruncationWarning("semigroup tail bound 1e-14 not reached at the 500-mode cap");
}

} // namespace detail

/// Semigroup action T_t f(x) through the spectral series. For t > 0 the
/// truncation order is raised until the dropped tail factor is below 1e-14.
template <class F>
double semigroup_apply(const model::Diffusion& M, double t, F&& f, int N, double x) {
    detail::require_polynomial_regime(M);
    if (t < 0.0) throw ParameterError("semigroup_apply: negative time");
    int n_eff = detail::raise_truncation(M, t, N);
    SpectralExpansion e = expand(M, f, n_eff);
    double acc = 0.0;
    for (int n = 0; n <= e.N; ++n) {
        acc += std::exp(-decay_rate(M, n) * t) * e.coefficients[n] *
               specfun::jacobi_Q(n, e.shape.alpha, e.shape.beta, e.d, x);
    }
    return acc;
}

/// Spectral-gap bound: lhs = ||T_t f - mean(f)||_dm, rhs = e^{-bt} ||f||_dm.
/// Both norms come from the Parseval sum of the truncated expansion.
template <class F>
std::pair<double, double> gap_bound_check(const model::Diffusion& M, F&& f, double t, int N = 32) {
    detail::require_polynomial_regime(M);
    SpectralExpansion e = expand(M, f, N);
    double lhs_sq = 0.0, norm_sq = 0.0;
    for (int n = 0; n <= e.N; ++n) {
        double mass = e.coefficients[n] * e.coefficients[n] * e.norms_sq[n];
        norm_sq += mass;
        if (n >= 1) lhs_sq += std::exp(-2.0 * decay_rate(M, n) * t) * mass;
    }
    double b = M.coeffs().b;
    return {std::sqrt(lhs_sq), std::exp(-b * t) * std::sqrt(norm_sq)};
}

namespace detail {

template <class H>
double maximize_on_unit_interval(H&& h) {
    // coarse scan guards against multimodality, golden-section refines
    const int grid = 10000;
    double best_x = 0.5, best = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < grid; ++i) {
        double x = static_cast<double>(i) / grid;
        double v = h(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    double lo = std::max(best_x - 1.0 / grid, 1e-12);
    double hi = std::min(best_x + 1.0 / grid, 1.0 - 1e-12);
    constexpr double gr = 0.6180339887498949;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double hc = h(c), hd = h(d);
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        if (hc > hd) {
            hi = d;
            d = c;
            hd = hc;
            c = hi - gr * (hi - lo);
            hc = h(c);
        } else {
            lo = c;
            c = d;
            hc = hd;
            d = lo + gr * (hi - lo);
            hd = h(d);
        }
    }
    return std::max(best, std::max(hc, hd));
}

} // namespace detail

/// Poincare constant in the one-sided degenerate regimes. The doubly
/// degenerate case alpha, beta <= -1 is open and reports RegimeError.
inline double poincare_constant(const model::ShapeParams& s, double sigma) {
    if (!(sigma > 0.0)) throw ParameterError("poincare_constant: sigma must be positive");
    bool left_degenerate = s.alpha <= -1.0 && s.beta > -1.0;
    bool right_degenerate = s.alpha > -1.0 && s.beta <= -1.0;
    if (!left_degenerate && !right_degenerate)
        throw RegimeError("Poincare constant requires exactly one of alpha, beta to be <= -1");
    double s2 = sigma * sigma;
    if (s.alpha != -1.0 && s.beta != -1.0) {
        double m = std::min(std::abs(s.alpha + 1.0), std::abs(s.beta + 1.0));
        return 2.0 / (s2 * m * m);
    }
    // boundary exponent exactly -1: logarithmic correction via 1-D maximization
    double p = (s.beta == -1.0) ? s.alpha : s.beta;
    double sup = detail::maximize_on_unit_interval([p](double x) {
        double t = 1.0 / (p + 1.0) - std::log(x);
        return x * (1.0 - x) * t * t;
    });
    return 8.0 / s2 * sup;
}

} // namespace jacobi::spectral
