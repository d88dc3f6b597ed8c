#pragma once

#include <cmath>
#include <limits>

#include "jacobi/errors.hpp"
#include "jacobi/quadrature.hpp"

namespace jacobi::model {

/// Coefficients of the SDE dY = (a - b Y) dt + sigma sqrt(Y (d - Y)) dW on [0, d].
struct JacobiCoeffs {
    double a;
    double b;
    double sigma;
    double d;
};

/// Shape exponents of the speed density x^beta (d-x)^alpha / d^(alpha+beta+1).
struct ShapeParams {
    double alpha;
    double beta;
};

inline void validate(const JacobiCoeffs& c) {
    if (!std::isfinite(c.a) || !std::isfinite(c.b) || !std::isfinite(c.sigma) || !std::isfinite(c.d))
        throw ParameterError("JacobiCoeffs: coefficients must be finite");
    if (!(c.sigma > 0.0)) throw ParameterError("JacobiCoeffs: sigma must be positive");
    if (!(c.d > 0.0)) throw ParameterError("JacobiCoeffs: d must be positive");
}

inline ShapeParams shape_from_coeffs(const JacobiCoeffs& c) {
    validate(c);
    double s2 = c.sigma * c.sigma;
    double beta = 2.0 * c.a / (s2 * c.d) - 1.0;
    double alpha = 2.0 * c.b / s2 - 2.0 * c.a / (s2 * c.d) - 1.0;
    return {alpha, beta};
}

inline JacobiCoeffs coeffs_from_shape(double alpha, double beta, double sigma, double d) {
    if (!std::isfinite(alpha) || !std::isfinite(beta))
        throw ParameterError("coeffs_from_shape: shape parameters must be finite");
    if (!(sigma > 0.0) || !(d > 0.0))
        throw ParameterError("coeffs_from_shape: sigma and d must be positive");
    double s2 = sigma * sigma;
    return {s2 * d * (beta + 1.0) / 2.0, s2 * (alpha + beta + 2.0) / 2.0, sigma, d};
}

/// Parameter set of the reflected process d - Y: swaps the roles of the endpoints.
inline JacobiCoeffs dual_coeffs(const JacobiCoeffs& c) {
    return {c.b * c.d - c.a, c.b, c.sigma, c.d};
}

enum class OrthoBasis { Empty, XiOnly, EtaOnly, XiAndEta };

struct Classification {
    bool includes_0;       ///< 0 belongs to the state space X (beta > -1)
    bool includes_d;       ///< d belongs to X (alpha > -1)
    bool tilde_includes_0; ///< 0 belongs to the reachable set (beta < 0)
    bool tilde_includes_d; ///< d belongs to the reachable set (alpha < 0)
    bool conservative;
    bool recurrent;
    bool F_equals_DE;
    OrthoBasis orthocomplement_basis;
    double q_alpha; ///< Sobolev embedding exponent from alpha (may be +inf)
    double q_beta;
    double q_star;
    bool exceptional_0; ///< 0 in X but unreachable (beta >= 0)
    bool exceptional_d; ///< d in X but unreachable (alpha >= 0)
};

/// Boundary and regime classification. All comparisons against -1 and 0 are
/// exact; regime-boundary studies must set alpha, beta exactly.
inline Classification classify(const ShapeParams& s) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    Classification out{};
    out.includes_0 = s.beta > -1.0;
    out.includes_d = s.alpha > -1.0;
    out.tilde_includes_0 = s.beta < 0.0;
    out.tilde_includes_d = s.alpha < 0.0;
    out.conservative = s.alpha > -1.0 && s.beta > -1.0;
    out.recurrent = out.conservative;
    bool alpha_mid = s.alpha > -1.0 && s.alpha < 0.0;
    bool beta_mid = s.beta > -1.0 && s.beta < 0.0;
    if (alpha_mid && beta_mid)
        out.orthocomplement_basis = OrthoBasis::XiAndEta;
    else if (alpha_mid)
        out.orthocomplement_basis = OrthoBasis::XiOnly;
    else if (beta_mid)
        out.orthocomplement_basis = OrthoBasis::EtaOnly;
    else
        out.orthocomplement_basis = OrthoBasis::Empty;
    out.F_equals_DE = out.orthocomplement_basis == OrthoBasis::Empty;
    out.q_alpha = s.alpha > 0.0 ? 2.0 * (1.0 + 1.0 / s.alpha) : inf;
    out.q_beta = s.beta > 0.0 ? 2.0 * (1.0 + 1.0 / s.beta) : inf;
    out.q_star = std::min(out.q_alpha, out.q_beta);
    out.exceptional_0 = s.beta >= 0.0;
    out.exceptional_d = s.alpha >= 0.0;
    return out;
}

/// The diffusion together with its densities, energy form, and quadrature.
class Diffusion {
  public:
    explicit Diffusion(const JacobiCoeffs& c) : c_(c), s_(shape_from_coeffs(c)) {}

    // keeps the requested exponents exactly instead of recovering them from
    // the coefficients, so threshold comparisons like alpha == 0 stay sharp
    static Diffusion from_shape(double alpha, double beta, double sigma, double d) {
        Diffusion out(coeffs_from_shape(alpha, beta, sigma, d));
        out.s_ = ShapeParams{alpha, beta};
        return out;
    }

    const JacobiCoeffs& coeffs() const { return c_; }
    const ShapeParams& shape() const { return s_; }
    double alpha() const { return s_.alpha; }
    double beta() const { return s_.beta; }
    double sigma() const { return c_.sigma; }
    double d() const { return c_.d; }

    Diffusion dual() const {
        Diffusion out(dual_coeffs(c_));
        out.s_ = ShapeParams{s_.beta, s_.alpha};
        return out;
    }

    double drift(double x) const { return c_.a - c_.b * x; }
    double diffusion_sq(double x) const { return c_.sigma * c_.sigma * x * (c_.d - x); }

    double density_m(double x) const {
        check_interior(x);
        return std::pow(x, s_.beta) * std::pow(c_.d - x, s_.alpha) /
               std::pow(c_.d, s_.alpha + s_.beta + 1.0);
    }
    double density_c(double x) const {
        check_interior(x);
        return 0.5 * c_.sigma * c_.sigma * x * (c_.d - x);
    }
    double density_cm(double x) const { return density_c(x) * density_m(x); }

    /// G f(x) = sigma^2 x (d-x) f''(x)/2 + (a - b x) f'(x) from supplied point values.
    double generator_apply([[maybe_unused]] double f, double fp, double fpp, double x) const {
        check_interior(x);
        return 0.5 * c_.sigma * c_.sigma * x * (c_.d - x) * fpp + (c_.a - c_.b * x) * fp;
    }

    /// lambda-dependent square parameter ((alpha+beta+1)/2)^2 - 2 lambda / sigma^2.
    double gamma_sq_of(double lambda) const {
        double h = 0.5 * (s_.alpha + s_.beta + 1.0);
        return h * h - 2.0 * lambda / (c_.sigma * c_.sigma);
    }

    /// Integral of f against the speed measure dm over (0, d).
    template <class F>
    double quad_dm(F&& f, double tol = 1e-10) const {
        if (s_.alpha > -1.0 && s_.beta > -1.0) {
            auto g = [&](double u) { return f(u * c_.d); };
            if (auto v = try_doubling(g, s_.alpha, s_.beta, tol)) return *v;
        }
        return quadrature::integrate_endpoint_graded(
            [&](double x) { return f(x) * density_m(x); }, 0.0, c_.d);
    }

    double total_mass(double tol = 1e-12) const {
        return quad_dm([](double) { return 1.0; }, tol);
    }

    /// Dirichlet energy contribution int fp(x)^2 cm(x) dx over (0, d).
    template <class F>
    double energy_form(F&& fp, double tol = 1e-10) const {
        if (s_.alpha > -2.0 && s_.beta > -2.0) {
            double scale = 0.5 * c_.sigma * c_.sigma * c_.d * c_.d;
            auto g = [&](double u) {
                double v = fp(u * c_.d);
                return v * v;
            };
            if (auto v = try_doubling(g, s_.alpha + 1.0, s_.beta + 1.0, tol)) return scale * *v;
        }
        return quadrature::integrate_endpoint_graded(
            [&](double x) {
                double v = fp(x);
                return v * v * density_cm(x);
            },
            0.0, c_.d);
    }

  private:
    void check_interior(double x) const {
        if (!(x > 0.0) || !(x < c_.d)) throw DomainError("position must lie strictly inside (0, d)");
    }

    // Gauss-Jacobi with node doubling; nullopt when the cap cannot meet tol.
    template <class G>
    std::optional<double> try_doubling(G&& g, double wa, double wb, double tol) const {
        double prev = 0.0;
        bool have_prev = false;
        for (int n = 200; n <= 1600; n *= 2) {
            const auto& rule = quadrature::gauss_jacobi_unit(wa, wb, n);
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                acc += rule.weights[i] * g(rule.nodes[i]);
            if (have_prev && std::abs(acc - prev) <= tol * std::max(1.0, std::abs(acc))) return acc;
            prev = acc;
            have_prev = true;
        }
        return std::nullopt;
    }

    JacobiCoeffs c_;
    ShapeParams s_;
};

} // namespace jacobi::model
