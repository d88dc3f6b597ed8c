#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "jacobi/errors.hpp"

namespace jacobi::specfun {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Series evaluation result with convergence metadata.
struct SeriesEval {
    double value = 0.0;
    int terms_used = 0;
    double truncation_estimate = 0.0;
    bool converged = false;
};

namespace detail {

inline constexpr double kSeriesTol = 1e-15;
inline constexpr int kSeriesCap = 100000;
inline constexpr double kXSwitch = 0.75;

inline bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::floor(x);
}

inline std::optional<long> near_integer(double x, double tol) {
    double r = std::nearbyint(x);
    if (std::abs(x - r) <= tol) return static_cast<long>(r);
    return std::nullopt;
}

// Lanczos approximation, g = 7, 9 coefficients (~15 significant digits).
inline constexpr double kLanczosG = 7.0;
inline constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

inline double gamma_positive(double z) {
    // requires z >= 0.5
    double zm = z - 1.0;
    double sum = kLanczos[0];
    for (int i = 1; i < 9; ++i) sum += kLanczos[i] / (zm + i);
    double base = zm + kLanczosG + 0.5;
    return std::sqrt(2.0 * kPi) * std::pow(base, zm + 0.5) * std::exp(-base) * sum;
}

} // namespace detail

/// Gamma function on the real line. Throws PoleError at nonpositive integers.
inline double gamma_fn(double z) {
    if (std::isnan(z)) throw ParameterError("gamma_fn: NaN argument");
    if (detail::is_nonpositive_integer(z))
        throw PoleError("gamma_fn: pole at z = " + std::to_string(z));
    if (z >= 0.5) return detail::gamma_positive(z);
    // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return kPi / (std::sin(kPi * z) * detail::gamma_positive(1.0 - z));
}

/// Digamma function on the real line. Throws PoleError at nonpositive integers.
inline double digamma(double x) {
    if (std::isnan(x)) throw ParameterError("digamma: NaN argument");
    if (detail::is_nonpositive_integer(x))
        throw PoleError("digamma: pole at x = " + std::to_string(x));
    double result = 0.0;
    if (x < 0.5) {
        // psi(x) = psi(1-x) - pi * cot(pi x)
        result -= kPi / std::tan(kPi * x);
        x = 1.0 - x;
    }
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    double inv2 = 1.0 / (x * x);
    // ln x - 1/(2x) - sum B_{2n}/(2n x^{2n})
    double asym = std::log(x) - 0.5 / x -
                  inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 / 132))));
    return result + asym;
}

/// |Gamma(u + iv)|^2 evaluated in real arithmetic.
inline double abs_gamma_sq(double u, double v) {
    if (v == 0.0) {
        double g = gamma_fn(u);
        return g * g;
    }
    if (u < 0.5) {
        // |Gamma(z)|^2 |Gamma(1-z)|^2 = pi^2 / |sin(pi z)|^2,
        // |sin(pi(u+iv))|^2 = sin^2(pi u) + sinh^2(pi v)
        double s = std::sin(kPi * u);
        double sh = std::sinh(kPi * v);
        return kPi * kPi / ((s * s + sh * sh) * abs_gamma_sq(1.0 - u, v));
    }
    double zm = u - 1.0;
    double sr = detail::kLanczos[0];
    double si = 0.0;
    for (int i = 1; i < 9; ++i) {
        double dr = zm + i;
        double den = dr * dr + v * v;
        sr += detail::kLanczos[i] * dr / den;
        si -= detail::kLanczos[i] * v / den;
    }
    double br = zm + detail::kLanczosG + 0.5; // Re(base), Im(base) = v
    double logmod = 0.5 * std::log(br * br + v * v);
    double arg = std::atan2(v, br);
    // |base^{z-1/2}|^2 = exp(2 [ (u-1/2) log|base| - v arg(base) ])
    double re_pow = (u - 0.5) * logmod - v * arg;
    return 2.0 * kPi * std::exp(2.0 * (re_pow - br)) * (sr * sr + si * si);
}

/// 2 Re psi(u + iv) evaluated in real arithmetic.
inline double re_digamma2(double u, double v) {
    if (v == 0.0) return 2.0 * digamma(u);
    double result = 0.0;
    if (u < 0.5) {
        // psi(z) = psi(1-z) - pi cot(pi z); Re cot(x+iy) = sin(2x)/(cosh(2y)-cos(2x))
        double c2 = std::cos(2.0 * kPi * u);
        double s2 = std::sin(2.0 * kPi * u);
        double ch = std::cosh(2.0 * kPi * v);
        result -= kPi * s2 / (ch - c2);
        u = 1.0 - u;
    }
    while (u < 10.0) {
        result -= u / (u * u + v * v); // Re(1/z)
        u += 1.0;
    }
    double den = u * u + v * v;
    result += 0.5 * std::log(den); // Re ln z
    result -= 0.5 * u / den;       // Re 1/(2z)
    // Re of -sum B_{2n}/(2n) z^{-2n} via powers of q = 1/z^2
    double qr = (u * u - v * v) / (den * den);
    double qi = -2.0 * u * v / (den * den);
    double pr = qr, pi_ = qi; // q^1
    static constexpr double coef[5] = {-1.0 / 12, 1.0 / 120, -1.0 / 252, 1.0 / 240, -1.0 / 132};
    for (int n = 0; n < 5; ++n) {
        result += coef[n] * pr;
        double nr = pr * qr - pi_ * qi;
        pi_ = pr * qi + pi_ * qr;
        pr = nr;
    }
    return 2.0 * result;
}

/// Gamma(u + g) Gamma(u - g) where g = sqrt(gamma_sq), possibly imaginary.
/// Always real; for gamma_sq < 0 equals |Gamma(u + i sqrt(-gamma_sq))|^2.
inline double gamma_pair(double u, double gamma_sq) {
    if (gamma_sq >= 0.0) {
        double g = std::sqrt(gamma_sq);
        return gamma_fn(u + g) * gamma_fn(u - g);
    }
    return abs_gamma_sq(u, std::sqrt(-gamma_sq));
}

/// psi(u + g) + psi(u - g) with the same convention as gamma_pair.
inline double re_digamma_pair(double u, double gamma_sq) {
    if (gamma_sq >= 0.0) {
        double g = std::sqrt(gamma_sq);
        return digamma(u + g) + digamma(u - g);
    }
    return re_digamma2(u, std::sqrt(-gamma_sq));
}

namespace detail {

// Coefficient that becomes 0 when a reciprocal Gamma factor sits on a pole.
inline double inv_gamma_or_zero(double z) {
    if (is_nonpositive_integer(z)) return 0.0;
    return 1.0 / gamma_fn(z);
}

inline double inv_gamma_pair_or_zero(double u, double gamma_sq) {
    if (gamma_sq >= 0.0) {
        double g = std::sqrt(gamma_sq);
        if (is_nonpositive_integer(u + g) || is_nonpositive_integer(u - g)) return 0.0;
    }
    return 1.0 / gamma_pair(u, gamma_sq);
}

// Power series sum_{k} t_k with t_0 = 1 and user-supplied ratio t_{k+1}/t_k.
// Stops when |term| <= tol * max(1, |sum|) twice in a row.
template <class Ratio>
SeriesEval sum_series(Ratio ratio, double x) {
    SeriesEval out;
    double term = 1.0, sum = 1.0;
    int quiet = 0;
    for (int k = 0; k < kSeriesCap; ++k) {
        term *= ratio(k) * x;
        sum += term;
        if (std::abs(term) <= kSeriesTol * std::max(1.0, std::abs(sum))) {
            if (++quiet >= 2 || term == 0.0) {
                out.value = sum;
                out.terms_used = k + 2;
                out.truncation_estimate = std::abs(term) * x / std::max(1e-300, 1.0 - x);
                out.converged = true;
                return out;
            }
        } else {
            quiet = 0;
        }
    }
    throw NonConvergence("hypergeometric series hit the 100000-term cap");
}

inline SeriesEval raw_2f1(double k, double i, double u, double x) {
    return sum_series([=](int n) { return (k + n) * (i + n) / ((u + n) * (n + 1.0)); }, x);
}

inline SeriesEval raw_2f1_sym(double A, double gsq, double u, double x) {
    return sum_series([=](int n) {
        double t = A + n;
        return (t * t - gsq) / ((u + n) * (n + 1.0));
    }, x);
}

// Connection sum for c = a + b + m (m >= 0 integer), evaluated at w = 1 - x.
// Pochhammer products and digamma pairs are supplied by the caller so the
// same skeleton serves both the plain and the symmetric parameterization.
template <class ProdS, class ProdP, class PsiPair>
SeriesEval intm_connection(int m, double w, double coef_finite, double coef_log,
                           ProdS prod_shifted, ProdP prod_plain, PsiPair psi_pair) {
    SeriesEval out;
    double total = 0.0;
    int terms = 0;
    if (m >= 1 && coef_finite != 0.0) {
        double term = 1.0, acc = 1.0;
        for (int k = 1; k < m; ++k) {
            term *= prod_plain(k - 1) / (k * static_cast<double>(k - m)) * w;
            acc += term;
        }
        total += coef_finite * acc;
        terms += m;
    }
    if (coef_log != 0.0) {
        double lw = std::log(w);
        double tk = 1.0;
        for (int k = 1; k <= m; ++k) tk /= k; // 1/m!
        double acc = 0.0;
        int quiet = 0;
        int k = 0;
        for (; k < kSeriesCap; ++k) {
            double bracket = lw - digamma(k + 1.0) - digamma(k + m + 1.0) + psi_pair(k);
            double contrib = tk * bracket;
            acc += contrib;
            if (std::abs(contrib) <= kSeriesTol * std::max(1.0, std::abs(acc))) {
                if (++quiet >= 2) break;
            } else {
                quiet = 0;
            }
            tk *= prod_shifted(k) / ((k + 1.0) * (k + m + 1.0)) * w;
        }
        if (k >= kSeriesCap) throw NonConvergence("logarithmic connection series hit the term cap");
        double sign = (m % 2 == 0) ? 1.0 : -1.0;
        total += coef_log * sign * std::pow(w, m) * acc;
        terms += k + 1;
        out.truncation_estimate = std::abs(coef_log) * std::pow(w, m) * std::abs(tk) * w / (1.0 - w);
    }
    out.value = total;
    out.terms_used = terms;
    out.converged = true;
    return out;
}

inline SeriesEval intm_2f1(double a, double b, int m, double w) {
    double c = a + b + m;
    double coef_finite = 0.0;
    if (m >= 1)
        coef_finite = gamma_fn(static_cast<double>(m)) * gamma_fn(c) *
                      inv_gamma_or_zero(a + m) * inv_gamma_or_zero(b + m);
    double coef_log = -gamma_fn(c) * inv_gamma_or_zero(a) * inv_gamma_or_zero(b);
    auto prod_shifted = [=](int k) { return (a + m + k) * (b + m + k); };
    auto prod_plain = [=](int k) { return (a + k) * (b + k); };
    auto psi_pair = [=](int k) { return digamma(a + m + k) + digamma(b + m + k); };
    return intm_connection(m, w, coef_finite, coef_log, prod_shifted, prod_plain, psi_pair);
}

inline SeriesEval intm_2f1_sym(double A, double gsq, int m, double w) {
    double c = 2.0 * A + m;
    double coef_finite = 0.0;
    if (m >= 1)
        coef_finite = gamma_fn(static_cast<double>(m)) * gamma_fn(c) *
                      inv_gamma_pair_or_zero(A + m, gsq);
    double coef_log = -gamma_fn(c) * inv_gamma_pair_or_zero(A, gsq);
    auto prod_shifted = [=](int k) {
        double t = A + m + k;
        return t * t - gsq;
    };
    auto prod_plain = [=](int k) {
        double t = A + k;
        return t * t - gsq;
    };
    auto psi_pair = [=](int k) { return re_digamma_pair(A + m + k, gsq); };
    return intm_connection(m, w, coef_finite, coef_log, prod_shifted, prod_plain, psi_pair);
}

inline std::optional<long> terminating_degree_plain(double k, double i) {
    std::optional<long> best;
    for (double p : {k, i}) {
        auto n = near_integer(-p, 1e-9);
        if (n && *n >= 0 && (!best || *n < *best)) best = *n;
    }
    return best;
}

inline std::optional<long> terminating_degree_sym(double A, double gsq) {
    if (gsq < 0.0) return std::nullopt;
    double g = std::sqrt(gsq);
    return terminating_degree_plain(A + g, A - g);
}

inline void check_2f1_domain(double u, double x) {
    if (std::isnan(u) || std::isnan(x)) throw ParameterError("hyp2f1: NaN parameter");
    if (is_nonpositive_integer(u))
        throw ParameterError("hyp2f1: lower parameter is a nonpositive integer");
    if (x < 0.0 || x >= 1.0)
        throw DomainError("hyp2f1: argument must lie in [0, 1)");
}

} // namespace detail

/// Gauss hypergeometric 2F1(kappa, iota; upsilon; x) for x in [0, 1).
/// Above x = 0.75 the evaluation switches to the 1-x connection formulas.
inline SeriesEval hyp2f1(double kappa, double iota, double upsilon, double x) {
    detail::check_2f1_domain(upsilon, x);
    if (x <= detail::kXSwitch || detail::terminating_degree_plain(kappa, iota))
        return detail::raw_2f1(kappa, iota, upsilon, x);
    double w = 1.0 - x;
    double s = upsilon - kappa - iota;
    if (auto m = detail::near_integer(s, 1e-8)) {
        if (*m >= 0) return detail::intm_2f1(kappa, iota, static_cast<int>(*m), w);
        // Euler transformation to a nonnegative integer difference
        SeriesEval e = detail::intm_2f1(upsilon - kappa, upsilon - iota, static_cast<int>(-*m), w);
        e.value *= std::pow(w, s);
        e.truncation_estimate *= std::pow(w, s);
        return e;
    }
    double c1 = gamma_fn(upsilon) * gamma_fn(s) *
                detail::inv_gamma_or_zero(upsilon - kappa) * detail::inv_gamma_or_zero(upsilon - iota);
    double c2 = gamma_fn(upsilon) * gamma_fn(-s) *
                detail::inv_gamma_or_zero(kappa) * detail::inv_gamma_or_zero(iota);
    SeriesEval f1 = detail::raw_2f1(kappa, iota, 1.0 - s, w);
    SeriesEval f2 = detail::raw_2f1(upsilon - kappa, upsilon - iota, s + 1.0, w);
    SeriesEval out;
    out.value = c1 * f1.value + c2 * std::pow(w, s) * f2.value;
    out.terms_used = f1.terms_used + f2.terms_used;
    out.truncation_estimate =
        std::abs(c1) * f1.truncation_estimate + std::abs(c2) * std::pow(w, s) * f2.truncation_estimate;
    out.converged = f1.converged && f2.converged;
    return out;
}

/// 2F1(A + g, A - g; upsilon; x) with g = sqrt(gamma_sq), evaluated entirely
/// in real arithmetic through the coefficient factor (A+j)^2 - gamma_sq.
/// gamma_sq may be negative; g is never materialized as a complex scalar.
inline SeriesEval hyp2f1_sym(double A, double gamma_sq, double upsilon, double x) {
    detail::check_2f1_domain(upsilon, x);
    if (std::isnan(A) || std::isnan(gamma_sq)) throw ParameterError("hyp2f1_sym: NaN parameter");
    if (x <= detail::kXSwitch || detail::terminating_degree_sym(A, gamma_sq))
        return detail::raw_2f1_sym(A, gamma_sq, upsilon, x);
    double w = 1.0 - x;
    double s = upsilon - 2.0 * A;
    if (auto m = detail::near_integer(s, 1e-8)) {
        if (*m >= 0) return detail::intm_2f1_sym(A, gamma_sq, static_cast<int>(*m), w);
        SeriesEval e = detail::intm_2f1_sym(upsilon - A, gamma_sq, static_cast<int>(-*m), w);
        e.value *= std::pow(w, s);
        e.truncation_estimate *= std::pow(w, s);
        return e;
    }
    double c1 = gamma_fn(upsilon) * gamma_fn(s) * detail::inv_gamma_pair_or_zero(upsilon - A, gamma_sq);
    double c2 = gamma_fn(upsilon) * gamma_fn(-s) * detail::inv_gamma_pair_or_zero(A, gamma_sq);
    SeriesEval f1 = detail::raw_2f1_sym(A, gamma_sq, 2.0 * A - upsilon + 1.0, w);
    SeriesEval f2 = detail::raw_2f1_sym(upsilon - A, gamma_sq, s + 1.0, w);
    SeriesEval out;
    out.value = c1 * f1.value + c2 * std::pow(w, s) * f2.value;
    out.terms_used = f1.terms_used + f2.terms_used;
    out.truncation_estimate =
        std::abs(c1) * f1.truncation_estimate + std::abs(c2) * std::pow(w, s) * f2.truncation_estimate;
    out.converged = f1.converged && f2.converged;
    return out;
}

/// Behavior class of 2F1(kappa, iota; upsilon; x) as x -> 1-.
enum class GaussKind {
    FiniteGauss, ///< finite limit (upsilon - kappa - iota > 0)
    Logarithmic, ///< grows like -log(1-x)
    PowerBlowup, ///< grows like (1-x)^{upsilon - kappa - iota}
};

struct LimitRegime {
    GaussKind kind;
    /// Limit of the function, or of its ratio to -log(1-x) resp.
    /// (1-x)^exponent. Zero when a denominator Gamma sits on a pole.
    double coefficient;
    /// upsilon - kappa - iota for PowerBlowup, 0 otherwise.
    double exponent;
};

inline LimitRegime gauss_limit_regime(double kappa, double iota, double upsilon) {
    if (std::isnan(kappa) || std::isnan(iota)) throw ParameterError("gauss_limit_regime: NaN parameter");
    if (detail::is_nonpositive_integer(upsilon))
        throw ParameterError("gauss_limit_regime: lower parameter is a nonpositive integer");
    double s = upsilon - kappa - iota;
    if (s > 0.0) {
        double coef = gamma_fn(upsilon) * gamma_fn(s) *
                      detail::inv_gamma_or_zero(upsilon - kappa) * detail::inv_gamma_or_zero(upsilon - iota);
        return {GaussKind::FiniteGauss, coef, 0.0};
    }
    if (s == 0.0) {
        double coef = gamma_fn(upsilon) * detail::inv_gamma_or_zero(kappa) * detail::inv_gamma_or_zero(iota);
        return {GaussKind::Logarithmic, coef, 0.0};
    }
    double coef = gamma_fn(upsilon) * gamma_fn(-s) *
                  detail::inv_gamma_or_zero(kappa) * detail::inv_gamma_or_zero(iota);
    return {GaussKind::PowerBlowup, coef, s};
}

/// Jacobi polynomial Q_n(x) = 2F1(-n, n + alpha + beta + 1; alpha + 1; 1 - x/d),
/// normalized so that Q_n(d) = 1. For alpha, beta > -1 the value is produced
/// by the three-term recurrence, which stays accurate at high degree where the
/// alternating terminating series loses digits to cancellation; outside that
/// regime the series is summed directly (n + 1 terms).
inline double jacobi_Q(int n, double alpha, double beta, double d, double x) {
    if (n < 0) throw ParameterError("jacobi_Q: negative degree");
    if (!(d > 0.0)) throw ParameterError("jacobi_Q: d must be positive");
    if (x < 0.0 || x > d) throw DomainError("jacobi_Q: x must lie in [0, d]");
    if (n == 0 || x == d) return 1.0;
    if (alpha > -1.0 && beta > -1.0) {
        double y = 2.0 * x / d - 1.0;
        double pm1 = 1.0;
        double pc = 0.5 * (alpha + beta + 2.0) * y + 0.5 * (alpha - beta);
        double scale = 1.0 / (alpha + 1.0);
        for (int k = 2; k <= n; ++k) {
            double a1 = 2.0 * k * (k + alpha + beta) * (2.0 * k + alpha + beta - 2.0);
            double a2 = (2.0 * k + alpha + beta - 1.0) * (alpha * alpha - beta * beta);
            double a3 = (2.0 * k + alpha + beta - 2.0) * (2.0 * k + alpha + beta - 1.0) *
                        (2.0 * k + alpha + beta);
            double a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + alpha + beta);
            double next = ((a2 + a3 * y) * pc - a4 * pm1) / a1;
            pm1 = pc;
            pc = next;
            scale *= k / (alpha + k);
        }
        return pc * scale;
    }
    double z = 1.0 - x / d;
    double term = 1.0, sum = 1.0;
    for (int j = 0; j < n; ++j) {
        double den = (alpha + 1.0 + j) * (j + 1.0);
        if (den == 0.0) throw ParameterError("jacobi_Q: alpha produces a vanishing denominator");
        term *= (j - static_cast<double>(n)) * (n + alpha + beta + 1.0 + j) / den * z;
        sum += term;
    }
    return sum;
}

} // namespace jacobi::specfun
