#pragma once

#include <cmath>

#include "jacobi/errors.hpp"
#include "jacobi/model.hpp"
#include "jacobi/specfun.hpp"

namespace jacobi::eigenfun {

enum class Branch { Xi, Eta };

/// Evaluation context for one lambda-eigenfunction.
struct EigenEval {
    double lambda;
    double gamma_sq;
    Branch branch;
    model::ShapeParams shape;
};

enum class LimitKind { Finite, PlusInfinity, MinusInfinity };

struct BoundaryLimit {
    LimitKind kind;
    double value = 0.0; ///< meaningful only when kind == Finite
};

inline double gamma_sq_of(double lambda, const model::Diffusion& M) { return M.gamma_sq_of(lambda); }

namespace detail {

inline void check_args(const model::Diffusion& M, double lambda, double x) {
    if (!(lambda > 0.0)) throw ParameterError("eigenfunction rate lambda must be positive");
    if (!(x > 0.0) || !(x < M.d())) throw DomainError("position must lie strictly inside (0, d)");
}

inline void check_lambda(double lambda) {
    if (!(lambda > 0.0)) throw ParameterError("eigenfunction rate lambda must be positive");
}

inline BoundaryLimit finite(double v) { return {LimitKind::Finite, v}; }

inline BoundaryLimit negated(BoundaryLimit l) {
    switch (l.kind) {
        case LimitKind::PlusInfinity: return {LimitKind::MinusInfinity, 0.0};
        case LimitKind::MinusInfinity: return {LimitKind::PlusInfinity, 0.0};
        default: return {LimitKind::Finite, -l.value};
    }
}

} // namespace detail

inline EigenEval make_eigen_eval(const model::Diffusion& M, double lambda, Branch branch) {
    detail::check_lambda(lambda);
    return {lambda, M.gamma_sq_of(lambda), branch, M.shape()};
}

/// Increasing lambda-eigenfunction, normalized at the left endpoint.
inline double xi(const model::Diffusion& M, double lambda, double x) {
    detail::check_args(M, lambda, x);
    double alpha = M.alpha(), beta = M.beta();
    double gsq = M.gamma_sq_of(lambda);
    double u = x / M.d();
    if (beta > -1.0) return specfun::hyp2f1_sym(0.5 * (alpha + beta + 1.0), gsq, beta + 1.0, u).value;
    return std::pow(u, -beta) * specfun::hyp2f1_sym(0.5 * (alpha - beta + 1.0), gsq, 1.0 - beta, u).value;
}

/// Decreasing lambda-eigenfunction; by definition the dual xi reflected at d/2.
inline double eta(const model::Diffusion& M, double lambda, double x) {
    detail::check_args(M, lambda, x);
    return xi(M.dual(), lambda, M.d() - x);
}

/// Derivative of xi in closed form.
inline double xi_prime(const model::Diffusion& M, double lambda, double x) {
    detail::check_args(M, lambda, x);
    double alpha = M.alpha(), beta = M.beta();
    double s2 = M.sigma() * M.sigma(), d = M.d();
    double gsq = M.gamma_sq_of(lambda);
    double u = x / d;
    if (beta > -1.0) {
        double coef = 2.0 * lambda / (s2 * d * (beta + 1.0));
        return coef * specfun::hyp2f1_sym(0.5 * (alpha + beta + 3.0), gsq, beta + 2.0, u).value;
    }
    double c1 = (2.0 * lambda / s2 - beta * (alpha + 1.0)) / (d * (1.0 - beta));
    double t1 = c1 * std::pow(u, -beta) * specfun::hyp2f1_sym(0.5 * (alpha - beta + 3.0), gsq, 2.0 - beta, u).value;
    double t2 = -(beta / d) * std::pow(u, -(beta + 1.0)) *
                specfun::hyp2f1_sym(0.5 * (alpha - beta + 1.0), gsq, 1.0 - beta, u).value;
    return t1 + t2;
}

inline double eta_prime(const model::Diffusion& M, double lambda, double x) {
    detail::check_args(M, lambda, x);
    return -xi_prime(M.dual(), lambda, M.d() - x);
}

inline BoundaryLimit xi_limit_0(const model::Diffusion& M, double lambda) {
    detail::check_lambda(lambda);
    return detail::finite(M.beta() > -1.0 ? 1.0 : 0.0);
}

inline BoundaryLimit xi_limit_d(const model::Diffusion& M, double lambda) {
    detail::check_lambda(lambda);
    double alpha = M.alpha(), beta = M.beta();
    if (alpha >= 0.0) return {LimitKind::PlusInfinity, 0.0};
    double gsq = M.gamma_sq_of(lambda);
    if (beta > -1.0) {
        double den = specfun::gamma_pair(0.5 * (-alpha + beta + 1.0), gsq);
        return detail::finite(specfun::gamma_fn(beta + 1.0) * specfun::gamma_fn(-alpha) / den);
    }
    double den = specfun::gamma_pair(0.5 * (-alpha - beta + 1.0), gsq);
    return detail::finite(specfun::gamma_fn(1.0 - beta) * specfun::gamma_fn(-alpha) / den);
}

inline BoundaryLimit xi_prime_cm_limit_0(const model::Diffusion& M, double lambda) {
    detail::check_lambda(lambda);
    double s2 = M.sigma() * M.sigma();
    if (M.beta() > -1.0) return detail::finite(0.0);
    return detail::finite(-M.beta() * s2 / 2.0);
}

inline BoundaryLimit xi_prime_cm_limit_d(const model::Diffusion& M, double lambda) {
    detail::check_lambda(lambda);
    double alpha = M.alpha(), beta = M.beta();
    double s2 = M.sigma() * M.sigma();
    double gsq = M.gamma_sq_of(lambda);
    if (alpha <= -1.0) {
        // the divergence statement is only available under the strict rate bound
        if (alpha < -1.0 && beta <= -1.0 && !(gsq < 0.0))
            throw GuardError("limit requires lambda > sigma^2 ((alpha+beta+1)/2)^2 / 2");
        return {LimitKind::PlusInfinity, 0.0};
    }
    if (beta > -1.0) {
        double den = specfun::gamma_pair(0.5 * (alpha + beta + 3.0), gsq);
        return detail::finite(lambda * specfun::gamma_fn(beta + 1.0) * specfun::gamma_fn(alpha + 1.0) / den);
    }
    double den = specfun::gamma_pair(0.5 * (alpha - beta + 3.0), gsq);
    double num = (2.0 * lambda / s2 - beta * (alpha + 1.0)) * s2 *
                 specfun::gamma_fn(1.0 - beta) * specfun::gamma_fn(alpha + 1.0) / 2.0;
    return detail::finite(num / den);
}

// The eta limits follow from duality: eta repeats xi on the reflected
// parameter set, and cm is invariant under the reflection x -> d - x.

inline BoundaryLimit eta_limit_d(const model::Diffusion& M, double lambda) {
    return xi_limit_0(M.dual(), lambda);
}

inline BoundaryLimit eta_limit_0(const model::Diffusion& M, double lambda) {
    return xi_limit_d(M.dual(), lambda);
}

inline BoundaryLimit eta_prime_cm_limit_d(const model::Diffusion& M, double lambda) {
    return detail::negated(xi_prime_cm_limit_0(M.dual(), lambda));
}

inline BoundaryLimit eta_prime_cm_limit_0(const model::Diffusion& M, double lambda) {
    return detail::negated(xi_prime_cm_limit_d(M.dual(), lambda));
}

} // namespace jacobi::eigenfun
