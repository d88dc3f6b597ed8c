#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "jacobi/errors.hpp"
#include "jacobi/model.hpp"
#include "jacobi/quadrature.hpp"
#include "jacobi/specfun.hpp"

// Weighted Hardy-type bounds, the tail-mass function M, and the reference
// functions psi used to probe conservativity when a boundary carries an
// exponent at or below -1.

namespace jacobi::inequalities {

enum class HardyCase { CaseI, CaseII, CaseIII, Inadmissible };

/// Admissibility record for the weighted bound
///   int |f| x^r (d-x)^s dm  <=  C sqrt(E(f, f)).
struct HardySpec {
    double r = 0.0;
    double s = 0.0;
    HardyCase admissible_case = HardyCase::Inadmissible;
    std::optional<double> constant;
};

/// Classify (r, s) against the strict exponent conditions. CaseI covers a
/// degenerate lower boundary (beta <= -1), CaseII a degenerate upper boundary
/// (alpha <= -1), CaseIII both. Shapes with both exponents above -1 are never
/// admissible here.
inline HardySpec hardy_admissible(const model::ShapeParams& shape, double r, double s) {
    HardySpec out;
    out.r = r;
    out.s = s;
    const double alpha = shape.alpha, beta = shape.beta;
    if (beta <= -1.0 && alpha > -1.0) {
        if (r > 0.5 * (-2.0 - beta) && s > std::max(-1.0 - alpha, 0.5 * (-2.0 - alpha)))
            out.admissible_case = HardyCase::CaseI;
    } else if (alpha <= -1.0 && beta > -1.0) {
        if (s > 0.5 * (-2.0 - alpha) && r > std::max(-1.0 - beta, 0.5 * (-2.0 - beta)))
            out.admissible_case = HardyCase::CaseII;
    } else if (alpha <= -1.0 && beta <= -1.0) {
        if (r > 0.5 * (-2.0 - beta) && s > 0.5 * (-2.0 - alpha))
            out.admissible_case = HardyCase::CaseIII;
    }
    return out;
}

namespace detail {

// Holder factor 2 d^(alpha+beta+1) / (sigma^2 y^(beta+1) (d-y)^(alpha+1)).
inline double holder_weight(const model::Diffusion& M, double y) {
    const auto& sh = M.shape();
    const double d = M.d();
    return 2.0 * std::pow(d, sh.alpha + sh.beta + 1.0) /
           (M.sigma() * M.sigma() * std::pow(y, sh.beta + 1.0) *
            std::pow(d - y, sh.alpha + 1.0));
}

// int_y^c x^q (d-x)^w dx for 0 < y < c <= d. The lower stretch is integrated
// under x = e^t so that a power singularity sitting just below y cannot be
// mistaken for divergence when the outer quadrature drives y toward 0; the
// piece that actually touches d keeps the graded rule, whose divergence
// detection must stay live there (w <= -1 is the bypassed-guard signal).
inline double power_weight_integral(double q, double w, double d, double y, double c) {
    if (!(y < c)) return 0.0;
    const double split = std::min(c, 0.5 * d);
    double acc = 0.0;
    if (y < split) {
        const double lo = std::log(y), hi = std::log(split);
        const int n = std::max(1, static_cast<int>(std::ceil(hi - lo)));
        const double width = (hi - lo) / n;
        for (int i = 0; i < n; ++i) {
            acc += quadrature::panel_integral(
                [&](double t) {
                    return std::exp((q + 1.0) * t) * std::pow(d - std::exp(t), w);
                },
                lo + i * width, lo + (i + 1) * width);
        }
    }
    if (c > split) {
        const double from = std::max(y, split);
        acc += quadrature::integrate_endpoint_graded(
            [&](double x) { return std::pow(x, q) * std::pow(d - x, w); }, from, c);
    }
    return acc;
}

// Squared bound for a degenerate lower boundary: the outer integral of
// g(y)^2 against the Holder factor, with g(y) = int_y^d x^(beta+r)
// (d-x)^(alpha+s) dx / d^(alpha+beta+1). An inadmissible (r, s) surfaces as
// DivergenceError from the graded quadrature.
inline double hardy_sq_lower(const model::Diffusion& M, double r, double s) {
    const auto& sh = M.shape();
    const double d = M.d();
    const double norm = std::pow(d, sh.alpha + sh.beta + 1.0);
    auto g = [&](double y) {
        return power_weight_integral(sh.beta + r, sh.alpha + s, d, y, d) / norm;
    };
    return quadrature::integrate_endpoint_graded(
        [&](double y) {
            double gy = g(y);
            return gy * gy * holder_weight(M, y);
        },
        0.0, d);
}

// Lower-half contribution when both boundaries are degenerate: same Holder
// factor on (0, d/2) with the inner integral stopped at d/2.
inline double hardy_sq_lower_half(const model::Diffusion& M, double r, double s) {
    const auto& sh = M.shape();
    const double d = M.d(), half = 0.5 * M.d();
    const double norm = std::pow(d, sh.alpha + sh.beta + 1.0);
    auto h = [&](double y) {
        return power_weight_integral(sh.beta + r, sh.alpha + s, d, y, half) / norm;
    };
    return quadrature::integrate_endpoint_graded(
        [&](double y) {
            double hy = h(y);
            return hy * hy * holder_weight(M, y);
        },
        0.0, half);
}

} // namespace detail

/// Constant C in the weighted bound above, computed from the explicit Holder
/// factor of the underlying estimate. It certifies the inequality but is not
/// claimed to be optimal. The upper-boundary and two-sided cases reduce to the
/// lower-boundary integral through the reflection x -> d - x, which maps the
/// diffusion onto its dual and swaps the weight exponents r and s.
inline double hardy_constant(const model::Diffusion& M, double r, double s) {
    const auto& sh = M.shape();
    if (sh.beta <= -1.0 && sh.alpha > -1.0) {
        return std::sqrt(detail::hardy_sq_lower(M, r, s));
    }
    if (sh.alpha <= -1.0 && sh.beta > -1.0) {
        return std::sqrt(detail::hardy_sq_lower(M.dual(), s, r));
    }
    if (sh.alpha <= -1.0 && sh.beta <= -1.0) {
        return std::sqrt(detail::hardy_sq_lower_half(M, r, s)) +
               std::sqrt(detail::hardy_sq_lower_half(M.dual(), s, r));
    }
    throw RegimeError("weighted Hardy bound requires alpha <= -1 or beta <= -1");
}

/// Tail mass M(y) = int_y^d m(x) dx for alpha > -1, through the closed
/// hypergeometric representation
///   M(y) = (1 - y/d)^(alpha+1) / (alpha+1) * 2F1(-beta, alpha+1; alpha+2; 1 - y/d).
/// Defined for y in (0, d]; the total mass at y -> 0 is finite only when
/// beta > -1, and model::Diffusion::total_mass covers that case.
inline double M_function(const model::Diffusion& M, double y) {
    const auto& sh = M.shape();
    if (!(sh.alpha > -1.0)) throw RegimeError("tail mass M(y) requires alpha > -1");
    if (!(y > 0.0) || y > M.d()) throw DomainError("position must lie in (0, d]");
    if (y == M.d()) return 0.0;
    const double u = 1.0 - y / M.d();
    return std::pow(u, sh.alpha + 1.0) / (sh.alpha + 1.0) *
           specfun::hyp2f1(-sh.beta, sh.alpha + 1.0, sh.alpha + 2.0, u).value;
}

enum class PsiBranch { UpperEndpoint, LowerEndpoint, Glued };

/// Reference function with finite energy and finite first moment that fails
/// to be constant, available whenever some boundary exponent is <= -1. The
/// branch is a pure power anchored at the degenerate endpoint, or a glued
/// pair of powers meeting at y_split when both endpoints are degenerate.
struct PsiReference {
    model::ShapeParams shape;
    double d = 1.0;
    double y_split = 0.5;
    PsiBranch branch = PsiBranch::UpperEndpoint;

    double value(double x) const {
        check(x);
        switch (branch) {
            case PsiBranch::UpperEndpoint:
                return std::pow(d - x, -shape.alpha) / shape.alpha;
            case PsiBranch::LowerEndpoint:
                return std::pow(x, -shape.beta) / shape.beta;
            case PsiBranch::Glued:
            default:
                if (x <= y_split)
                    return std::pow(y_split, shape.beta) * std::pow(x, -shape.beta);
                return std::pow(d - y_split, shape.alpha) * std::pow(d - x, -shape.alpha);
        }
    }

    /// Weak derivative; the glued branch has a kink at y_split, so integrate
    /// its square piecewise when high accuracy is needed.
    double derivative(double x) const {
        check(x);
        switch (branch) {
            case PsiBranch::UpperEndpoint:
                return std::pow(d - x, -shape.alpha - 1.0);
            case PsiBranch::LowerEndpoint:
                return -std::pow(x, -shape.beta - 1.0);
            case PsiBranch::Glued:
            default:
                if (x <= y_split)
                    return -shape.beta * std::pow(y_split, shape.beta) *
                           std::pow(x, -shape.beta - 1.0);
                return shape.alpha * std::pow(d - y_split, shape.alpha) *
                       std::pow(d - x, -shape.alpha - 1.0);
        }
    }

private:
    void check(double x) const {
        if (x < 0.0 || x > d) throw DomainError("position must lie in [0, d]");
    }
};

inline PsiReference psi_reference(const model::Diffusion& M,
                                  std::optional<double> y_split = std::nullopt) {
    const auto& sh = M.shape();
    PsiReference psi;
    psi.shape = sh;
    psi.d = M.d();
    if (sh.alpha <= -1.0 && sh.beta <= -1.0) {
        psi.branch = PsiBranch::Glued;
        psi.y_split = y_split.value_or(0.5 * M.d());
        if (!(psi.y_split > 0.0) || !(psi.y_split < M.d()))
            throw DomainError("y_split must lie strictly inside (0, d)");
    } else if (sh.alpha <= -1.0) {
        psi.branch = PsiBranch::UpperEndpoint;
    } else if (sh.beta <= -1.0) {
        psi.branch = PsiBranch::LowerEndpoint;
    } else {
        throw RegimeError("reference function requires alpha <= -1 or beta <= -1");
    }
    return psi;
}

} // namespace jacobi::inequalities
