#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "jacobi/errors.hpp"
#include "jacobi/specfun.hpp"

namespace jacobi::quadrature {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

// Golub-Welsch for the weight (1-t)^alpha (1+t)^beta on (-1,1), then mapped to
// the unit interval so that sum w_i f(u_i) = int_0^1 u^beta (1-u)^alpha f(u) du.
inline QuadRule build_gauss_jacobi_unit(double alpha, double beta, int n) {
    if (!(alpha > -1.0) || !(beta > -1.0))
        throw ParameterError("gauss_jacobi_unit: weight exponents must exceed -1");
    if (n < 1) throw ParameterError("gauss_jacobi_unit: need at least one node");
    double ab = alpha + beta;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    J(0, 0) = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < n; ++k) {
        double t = 2.0 * k + ab;
        J(k, k) = (beta * beta - alpha * alpha) / (t * (t + 2.0));
        double bk;
        if (k == 1) {
            bk = 4.0 * (alpha + 1.0) * (beta + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
        } else {
            bk = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
                 (t * t * (t + 1.0) * (t - 1.0));
        }
        J(k, k - 1) = J(k - 1, k) = std::sqrt(bk);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success)
        throw NonConvergence("gauss_jacobi_unit: eigen decomposition failed");
    // total mass of the unit-interval weight: int_0^1 u^beta (1-u)^alpha du
    double mu0 = std::exp(std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = 0.5 * (1.0 + es.eigenvalues()[i]);
        double v = es.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v * v;
    }
    return rule;
}

inline QuadRule build_gauss_legendre(int n) {
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(specfun::kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

} // namespace detail

/// Cached Gauss-Jacobi rule on (0,1) with weight u^beta (1-u)^alpha.
inline const QuadRule& gauss_jacobi_unit(double alpha, double beta, int n) {
    static std::mutex mtx;
    static std::map<std::tuple<double, double, int>, std::unique_ptr<QuadRule>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(alpha, beta, n);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::make_unique<QuadRule>(detail::build_gauss_jacobi_unit(alpha, beta, n)))
                 .first;
    }
    return *it->second;
}

/// 32-node Gauss-Legendre rule on (-1,1).
inline const QuadRule& gauss_legendre_32() {
    static const QuadRule rule = detail::build_gauss_legendre(32);
    return rule;
}

/// Integral of f over [lo, hi] with the 32-node Legendre rule.
template <class F>
double panel_integral(F&& f, double lo, double hi) {
    const QuadRule& r = gauss_legendre_32();
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * f(mid + half * r.nodes[i]);
    return acc * half;
}

namespace detail {

inline constexpr int kDivergenceLevel = 48;
inline constexpr double kDivergenceRatio = 0.97;
inline constexpr int kMaxLevels = 1100;

// Sum of f over dyadic panels accumulating toward `end` starting from `from`.
// Integrable endpoint singularities give geometrically decaying panels; a
// trailing non-decaying panel sequence is reported as divergence.
template <class F>
double graded_toward(F&& f, double from, double end) {
    double total = 0.0;
    double prev_mag = -1.0;
    int quiet = 0;
    for (int k = 0; k < kMaxLevels; ++k) {
        double outer = end + (from - end) * std::pow(0.5, k);
        double inner = end + (from - end) * std::pow(0.5, k + 1);
        if (outer == inner) return total;
        double p = panel_integral(f, std::min(inner, outer), std::max(inner, outer));
        total += p;
        double mag = std::abs(p);
        bool negligible = mag <= 1e-15 * std::max(1.0, std::abs(total));
        if (negligible) {
            if (++quiet >= 2) return total;
        } else {
            quiet = 0;
            // panels a few ulps above the negligible threshold are rounding
            // noise once the dyadic width nears machine epsilon; only panels
            // that still carry weight relative to the total count as evidence
            // of divergence
            if (k >= kDivergenceLevel && prev_mag > 0.0 && mag >= kDivergenceRatio * prev_mag &&
                mag > 1e-12 * std::max(1.0, std::abs(total)))
                throw DivergenceError("integrand is not integrable at an interval endpoint");
        }
        prev_mag = mag;
    }
    throw NonConvergence("endpoint-graded quadrature exhausted its refinement budget");
}

} // namespace detail

/// Adaptive integral of f over (lo, hi) with geometric refinement toward both
/// endpoints. Throws DivergenceError when an endpoint looks non-integrable.
template <class F>
double integrate_endpoint_graded(F&& f, double lo, double hi) {
    if (!(hi > lo)) throw ParameterError("integrate_endpoint_graded: empty interval");
    double mid = 0.5 * (lo + hi);
    return detail::graded_toward(f, mid, lo) + detail::graded_toward(f, mid, hi);
}

} // namespace jacobi::quadrature
