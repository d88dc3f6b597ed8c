#pragma once

#include <cmath>

#include "jacobi/eigenfun.hpp"
#include "jacobi/errors.hpp"
#include "jacobi/model.hpp"
#include "jacobi/specfun.hpp"

// Probabilities of ever reaching a boundary point, in closed form, and their
// lambda-order refinements E_x[e^(-lambda tau)].

namespace jacobi::hitting {

enum class Boundary { Zero, D };

/// Why a hitting probability is trivially zero: the boundary point either
/// lies outside the state space (exponent <= -1) or is an exceptional point
/// never reached from the interior (exponent >= 0).
enum class RegimeNote { None, BoundaryOutsideState, ExceptionalPoint };

struct HittingResult {
    Boundary boundary = Boundary::D;
    double x = 0.0;
    double probability = 0.0;
    RegimeNote note = RegimeNote::None;
};

/// Probability of ever hitting d starting from x. Nontrivial only in the
/// band -1 < alpha < 0; there it is 1 when beta > -1, and otherwise
///   Gamma(-alpha-beta) / (Gamma(1-beta) Gamma(-alpha))
///     * (x/d)^(-beta) * 2F1(alpha+1, -beta; 1-beta; x/d).
inline HittingResult hit_prob_d(const model::Diffusion& M, double x) {
    if (x < 0.0 || x > M.d()) throw DomainError("position must lie in [0, d]");
    const auto& sh = M.shape();
    HittingResult out{Boundary::D, x, 0.0, RegimeNote::None};
    if (sh.alpha >= 0.0) {
        out.note = RegimeNote::ExceptionalPoint;
        return out;
    }
    if (sh.alpha <= -1.0) {
        out.note = RegimeNote::BoundaryOutsideState;
        return out;
    }
    if (sh.beta > -1.0) {
        out.probability = 1.0;
        return out;
    }
    if (x == M.d()) {
        out.probability = 1.0;
        return out;
    }
    const double u = x / M.d();
    out.probability = specfun::gamma_fn(-sh.alpha - sh.beta) /
                      (specfun::gamma_fn(1.0 - sh.beta) * specfun::gamma_fn(-sh.alpha)) *
                      std::pow(u, -sh.beta) *
                      specfun::hyp2f1(sh.alpha + 1.0, -sh.beta, 1.0 - sh.beta, u).value;
    return out;
}

/// Probability of ever hitting 0; the reflection x -> d - x maps it onto
/// hit_prob_d of the dual diffusion.
inline HittingResult hit_prob_0(const model::Diffusion& M, double x) {
    HittingResult mirrored = hit_prob_d(M.dual(), M.d() - x);
    return {Boundary::Zero, x, mirrored.probability, mirrored.note};
}

/// lambda-order hitting value E_x[e^(-lambda tau_d)] on the nontrivial band
/// -1 < alpha < 0. The normalization pairs Gamma(u+gamma) Gamma(u-gamma)
/// through the gamma^2-safe product, so lambda below and above the oscillatory
/// threshold are handled uniformly.
inline double lambda_hitting_d(const model::Diffusion& M, double lambda, double x) {
    const auto& sh = M.shape();
    if (!(sh.alpha > -1.0 && sh.alpha < 0.0))
        throw RegimeError("lambda-order hitting requires -1 < alpha < 0");
    if (!(lambda > 0.0)) throw ParameterError("hitting rate lambda must be positive");
    if (!(x > 0.0) || x > M.d()) throw DomainError("position must lie in (0, d]");
    if (x == M.d()) return 1.0;
    const double gsq = M.gamma_sq_of(lambda);
    if (sh.beta > -1.0) {
        const double u = 0.5 * (-sh.alpha + sh.beta + 1.0);
        return specfun::gamma_pair(u, gsq) /
               (specfun::gamma_fn(sh.beta + 1.0) * specfun::gamma_fn(-sh.alpha)) *
               eigenfun::xi(M, lambda, x);
    }
    const double u = 0.5 * (-sh.alpha - sh.beta + 1.0);
    return specfun::gamma_pair(u, gsq) /
           (specfun::gamma_fn(1.0 - sh.beta) * specfun::gamma_fn(-sh.alpha)) *
           eigenfun::xi(M, lambda, x);
}

} // namespace jacobi::hitting
