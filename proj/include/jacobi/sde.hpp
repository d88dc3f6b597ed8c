#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "jacobi/errors.hpp"
#include "jacobi/model.hpp"
#include "jacobi/rng.hpp"

// Path simulation for dY = (a - bY) dt + sigma sqrt(Y(d-Y)) dW with the drift
// smoothly cut off outside a neighborhood of [0, d], plus the deterministic
// flows that extend a path beyond its first boundary hit.

namespace jacobi::sde {

enum class BoundaryHit { None, Zero, D };

/// Drift and diffusion fields of the simulated equation. The drift is
/// (a - b x) throughout [-delta, d+delta] and rolls off smoothly to zero
/// outside [-2 delta, d+2 delta]; the diffusion vanishes outside [0, d].
struct SdeField {
    model::JacobiCoeffs coeffs;
    model::ShapeParams shape;
    double cutoff_halfwidth = 1.0;
    bool suppress_diffusion = false;

    double taper(double x) const {
        const double delta = cutoff_halfwidth, d = coeffs.d;
        if (x >= -delta && x <= d + delta) return 1.0;
        if (x <= -2.0 * delta || x >= d + 2.0 * delta) return 0.0;
        auto edge = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
        double t = x > 0.0 ? (d + 2.0 * delta - x) / delta : (x + 2.0 * delta) / delta;
        return edge(t) / (edge(t) + edge(1.0 - t));
    }

    double drift(double x) const { return (coeffs.a - coeffs.b * x) * taper(x); }

    double diffusion(double x) const {
        if (suppress_diffusion || x < 0.0 || x > coeffs.d) return 0.0;
        return coeffs.sigma * std::sqrt(std::max(0.0, x * (coeffs.d - x)));
    }
};

inline SdeField make_field(const model::Diffusion& M,
                           std::optional<double> cutoff_halfwidth = std::nullopt) {
    double delta = cutoff_halfwidth.value_or(M.d());
    if (!(delta > 0.0)) throw ConfigError("cutoff halfwidth must be positive");
    return SdeField{M.coeffs(), M.shape(), delta, false};
}

/// One uniform-grid Euler path together with its first boundary events.
/// zeta_min_index marks the first grid point outside the open interval
/// (0, d); zeta_max_index the first one strictly outside [0, d].
struct PathRecord {
    double dt = 0.0;
    double d = 1.0;
    std::vector<double> values;
    std::optional<std::size_t> zeta_min_index;
    std::optional<std::size_t> zeta_max_index;
    BoundaryHit boundary_hit = BoundaryHit::None;
    std::uint64_t master_seed = 0;
    std::uint64_t path_id = 0;

    double time(std::size_t k) const { return static_cast<double>(k) * dt; }
    double horizon() const { return time(values.size() - 1); }
};

namespace detail {

inline double em_step(const SdeField& f, double z, double dt, double gauss) {
    return z + f.drift(z) * dt + f.diffusion(z) * std::sqrt(dt) * gauss;
}

inline std::size_t step_count(double T, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt) || !std::isfinite(T) || !(T >= dt))
        throw ConfigError("time grid requires 0 < dt <= T");
    auto n = static_cast<long long>(std::llround(T / dt));
    if (n < 1) n = 1;
    if (n > 200'000'000LL) throw ConfigError("time grid exceeds the step budget");
    return static_cast<std::size_t>(n);
}

} // namespace detail

/// Euler-Maruyama path from x0 over ~T/dt steps, driven by the counter
/// generator keyed with (master_seed, path_id); the same key reproduces the
/// path bit for bit regardless of scheduling. The walk continues through
/// boundary events: outside [0, d] the noise term vanishes and the grid walk
/// follows the drift alone.
inline PathRecord simulate_path(const SdeField& field, double x0, double T, double dt,
                                std::uint64_t master_seed, std::uint64_t path_id) {
    const double d = field.coeffs.d;
    if (!(x0 > 0.0) || !(x0 < d)) throw DomainError("start must lie strictly inside (0, d)");
    const std::size_t n = detail::step_count(T, dt);

    rng::CounterRng gen(master_seed, path_id);
    PathRecord rec;
    rec.dt = dt;
    rec.d = d;
    rec.master_seed = master_seed;
    rec.path_id = path_id;
    rec.values.reserve(n + 1);
    rec.values.push_back(x0);

    double z = x0;
    for (std::size_t k = 0; k < n; ++k) {
        double next = detail::em_step(field, z, dt, gen.normal(k));
        if (!rec.zeta_min_index && (next <= 0.0 || next >= d)) {
            rec.zeta_min_index = k + 1;
            rec.boundary_hit = next >= d ? BoundaryHit::D : BoundaryHit::Zero;
        }
        if (!rec.zeta_max_index && (next < 0.0 || next > d)) rec.zeta_max_index = k + 1;
        rec.values.push_back(next);
        z = next;
    }
    return rec;
}

/// First time the path touches {0, d}, by linear interpolation inside the
/// crossing step; absent when no grid point left (0, d).
inline std::optional<double> minimal_lifetime(const PathRecord& rec) {
    if (!rec.zeta_min_index) return std::nullopt;
    const std::size_t k = *rec.zeta_min_index;
    const double prev = rec.values[k - 1], next = rec.values[k];
    const double target = rec.boundary_hit == BoundaryHit::D ? rec.d : 0.0;
    const double theta = next == prev ? 1.0 : (target - prev) / (next - prev);
    return (static_cast<double>(k) - 1.0 + theta) * rec.dt;
}

/// First time the path leaves [0, d], interpolated likewise; absent when every
/// grid point stayed inside the closed interval.
inline std::optional<double> maximal_lifetime(const PathRecord& rec) {
    if (!rec.zeta_max_index) return std::nullopt;
    const std::size_t k = *rec.zeta_max_index;
    const double prev = rec.values[k - 1], next = rec.values[k];
    const double target = next > rec.d ? rec.d : 0.0;
    const double theta = next == prev ? 1.0 : (target - prev) / (next - prev);
    return (static_cast<double>(k) - 1.0 + theta) * rec.dt;
}

/// Deterministic continuation started on a boundary: solves u' = drift(u)
/// with u(0) = 0 or d. Inside the cutoff zone the linear drift integrates in
/// closed form; numeric stepping takes over only if the flow leaves the zone.
/// A boundary where the drift vanishes identically (alpha = -1 at d, beta = -1
/// at 0) is a fixed point and is returned exactly.
inline double extension_flow(const SdeField& field, BoundaryHit boundary, double t) {
    if (boundary == BoundaryHit::None) throw ParameterError("extension flow needs a boundary");
    if (!(t >= 0.0)) throw DomainError("flow time must be nonnegative");
    const double d = field.coeffs.d, delta = field.cutoff_halfwidth;
    const double u0 = boundary == BoundaryHit::D ? d : 0.0;
    if (boundary == BoundaryHit::D && field.shape.alpha == -1.0) return d;
    if (boundary == BoundaryHit::Zero && field.shape.beta == -1.0) return 0.0;

    const double a = field.coeffs.a, b = field.coeffs.b;
    const double lo = -delta, hi = d + delta;

    // closed form inside [-delta, d+delta] and its zone-exit time
    double t_exit = std::numeric_limits<double>::infinity();
    double u_exit = u0;
    if (b != 0.0) {
        const double fixed = a / b;
        auto exit_through = [&](double e) {
            double ratio = (e - fixed) / (u0 - fixed);
            return -std::log(ratio) / b;
        };
        if (u0 != fixed) {
            // with b > 0 the flow relaxes toward the fixed point, with b < 0
            // it recedes from it; either way it is monotone
            double target = b > 0.0 ? fixed : (u0 > fixed ? hi + 1.0 : lo - 1.0);
            if (target > hi) {
                t_exit = exit_through(hi);
                u_exit = hi;
            } else if (target < lo) {
                t_exit = exit_through(lo);
                u_exit = lo;
            }
        }
        if (t < t_exit) return fixed + (u0 - fixed) * std::exp(-b * t);
    } else {
        if (a > 0.0) {
            t_exit = (hi - u0) / a;
            u_exit = hi;
        } else if (a < 0.0) {
            t_exit = (lo - u0) / a;
            u_exit = lo;
        }
        if (t < t_exit) return u0 + a * t;
    }

    // beyond the zone the tapered drift decays to zero; classical Runge-Kutta
    // with steps tied to the local speed until the flow stalls
    double u = u_exit;
    double remaining = t - t_exit;
    while (remaining > 0.0) {
        double speed = std::abs(field.drift(u));
        if (speed == 0.0) return u;
        double h = std::min(remaining, 0.05 * delta / (1.0 + speed));
        double k1 = field.drift(u);
        double k2 = field.drift(u + 0.5 * h * k1);
        double k3 = field.drift(u + 0.5 * h * k2);
        double k4 = field.drift(u + h * k3);
        double step = h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(u))) return u;
        u += step;
        remaining -= h;
    }
    return u;
}

/// Path glued to the extension flow after its first boundary touch. The
/// modified lifetime is infinite when the touched boundary is a fixed point
/// of the drift, the first exit time of [0, d] otherwise; an absent value
/// means no event decided the lifetime within the simulated horizon.
class ModifiedProcess {
  public:
    ModifiedProcess(PathRecord rec, SdeField field)
        : rec_(std::move(rec)), field_(std::move(field)), zeta_(minimal_lifetime(rec_)) {
        if (zeta_) {
            bool fixed_point =
                (rec_.boundary_hit == BoundaryHit::D && field_.shape.alpha == -1.0) ||
                (rec_.boundary_hit == BoundaryHit::Zero && field_.shape.beta == -1.0);
            if (fixed_point)
                lifetime_ = std::numeric_limits<double>::infinity();
            else if (auto zmax = maximal_lifetime(rec_))
                lifetime_ = *zmax;
        } else if (rec_.zeta_max_index) {
            lifetime_ = maximal_lifetime(rec_);
        }
    }

    const std::optional<double>& modified_lifetime() const { return lifetime_; }
    const std::optional<double>& first_touch() const { return zeta_; }

    std::optional<double> operator()(double t) const {
        if (!(t >= 0.0)) throw DomainError("time must be nonnegative");
        if (lifetime_ && t > *lifetime_) return std::nullopt;
        if (zeta_ && t >= *zeta_) return extension_flow(field_, rec_.boundary_hit, t - *zeta_);
        if (t > rec_.horizon()) return std::nullopt;
        const double pos = t / rec_.dt;
        const auto k = static_cast<std::size_t>(pos);
        if (k + 1 >= rec_.values.size()) return rec_.values.back();
        const double frac = pos - static_cast<double>(k);
        return rec_.values[k] * (1.0 - frac) + rec_.values[k + 1] * frac;
    }

  private:
    PathRecord rec_;
    SdeField field_;
    std::optional<double> zeta_;
    std::optional<double> lifetime_;
};

inline ModifiedProcess modified_process(PathRecord rec, SdeField field) {
    return ModifiedProcess(std::move(rec), std::move(field));
}

} // namespace jacobi::sde
