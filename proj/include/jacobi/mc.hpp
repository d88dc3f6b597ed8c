#pragma once

#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "jacobi/errors.hpp"
#include "jacobi/inequalities.hpp"
#include "jacobi/model.hpp"
#include "jacobi/rng.hpp"
#include "jacobi/sde.hpp"
#include "jacobi/spectral.hpp"

// Monte Carlo estimators over Euler paths: hitting fractions, conservativity,
// ergodic and occupation averages, and semigroup expectations. Paths are
// keyed by (seed, path_id) and reduced by pairwise summation in path order,
// so every estimate is bit-identical for any worker count.

namespace jacobi::mc {

/// Extrapolated event mass beyond the horizon above which estimates are
/// refused as under-resolved.
inline constexpr double kCensorTol = 0.005;

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    double dt = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double censored_fraction = 0.0; ///< paths still undecided at the horizon
    double tail_mass = 0.0;         ///< extrapolated event mass beyond the horizon
};

namespace detail {

inline double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

/// Runs job(p) for p in [0, n) striped over the workers. Results must land in
/// per-path slots; the stripe layout never enters the numbers.
template <class Job>
void run_paths(std::size_t n, std::size_t workers, const Job& job) {
    if (workers <= 1) {
        for (std::size_t p = 0; p < n; ++p) job(p);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t p = w; p < n; p += workers) job(p);
        });
    for (auto& th : pool) th.join();
}

/// Mean / stderr / ci95 from per-path outcomes (Bessel-corrected).
inline McEstimate reduce(const std::vector<double>& outcome, double dt) {
    const auto n = outcome.size();
    McEstimate est;
    est.n_paths = n;
    est.dt = dt;
    est.mean = pairwise_sum(outcome.data(), n) / static_cast<double>(n);
    if (n > 1) {
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double c = outcome[i] - est.mean;
            sq[i] = c * c;
        }
        const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
        est.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(n));
    }
    est.ci_lo = est.mean - 1.96 * est.std_error;
    est.ci_hi = est.mean + 1.96 * est.std_error;
    return est;
}

/// Tail-slope extrapolation of the event-time distribution. Events in the
/// windows (T/2, 3T/4] and (3T/4, T] estimate a geometric decay rate; the
/// projected mass beyond T is capped by the undecided fraction. A handful of
/// stray events is below the resolution of a slope estimate, so counts up to
/// 4 bound the tail by the observed recent activity instead.
inline void attach_tail(McEstimate& est, const std::vector<double>& event_time,
                        const std::vector<unsigned char>& undecided, double T) {
    const auto n = event_time.size();
    std::size_t h1 = 0, h2 = 0, censored = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (undecided[i]) ++censored;
        const double t = event_time[i];
        if (t > 0.5 * T && t <= 0.75 * T) ++h1;
        if (t > 0.75 * T && t <= T) ++h2;
    }
    est.censored_fraction = static_cast<double>(censored) / static_cast<double>(n);
    const double nn = static_cast<double>(n);
    double projected;
    if (censored == 0 || h2 == 0) {
        projected = 0.0;
    } else if (h1 + h2 <= 8) {
        projected = static_cast<double>(h1 + h2) / nn; // too few events to fit a slope
    } else if (h2 >= h1) {
        // a flat rate cannot be summed to infinity; bound the leakage over the
        // next horizon instead (four more windows at the recent rate)
        projected = 4.0 * static_cast<double>(h2) / nn;
    } else {
        const double rho = static_cast<double>(h2) / static_cast<double>(h1);
        projected = static_cast<double>(h2) * rho / (1.0 - rho) / nn;
    }
    est.tail_mass = std::min(est.censored_fraction, projected);
    if (est.tail_mass > kCensorTol)
        throw CensoringWarning("Monte Carlo horizon too short: extrapolated event mass beyond T "
                               "exceeds the censoring tolerance");
}

inline void check_paths(std::size_t n_paths) {
    if (n_paths == 0) throw ConfigError("at least one path is required");
}

inline void check_start(const sde::SdeField& field, double x0) {
    if (!(x0 > 0.0) || !(x0 < field.coeffs.d))
        throw DomainError("start must lie strictly inside (0, d)");
}

/// Once the walk sits at or below 0 it can never re-enter (0, d) when the
/// drift at the origin points outward; mirrored at d. The b*dt < 1 condition
/// rules out drift-step overshoot across the fixed point.
inline bool trapped_low(const sde::SdeField& field, double dt) {
    return field.coeffs.a <= 0.0 && field.coeffs.b * dt < 1.0;
}

inline bool trapped_high(const sde::SdeField& field, double dt) {
    return field.coeffs.a - field.coeffs.b * field.coeffs.d >= 0.0 && field.coeffs.b * dt < 1.0;
}

} // namespace detail

/// Fraction of paths that touch the given boundary before T. Decided paths
/// stop early; undecided ones count as misses and feed the censoring
/// diagnostics.
inline McEstimate estimate_hit_prob(const sde::SdeField& field, double x0,
                                    sde::BoundaryHit boundary, double T, double dt,
                                    std::size_t n_paths, std::uint64_t seed,
                                    std::size_t workers = 1) {
    if (boundary == sde::BoundaryHit::None)
        throw ParameterError("hitting estimate needs a target boundary");
    detail::check_paths(n_paths);
    detail::check_start(field, x0);
    const std::size_t n_steps = sde::detail::step_count(T, dt);
    const double T_eff = static_cast<double>(n_steps) * dt;
    const double d = field.coeffs.d;
    const bool to_upper = boundary == sde::BoundaryHit::D;
    const bool stop_low = detail::trapped_low(field, dt);
    const bool stop_high = detail::trapped_high(field, dt);

    std::vector<double> outcome(n_paths, 0.0);
    std::vector<double> event_time(n_paths, -1.0);
    std::vector<unsigned char> undecided(n_paths, 0);
    detail::run_paths(n_paths, workers, [&](std::size_t p) {
        rng::CounterRng gen(seed, p);
        double z = x0;
        for (std::size_t k = 0; k < n_steps; ++k) {
            z = sde::detail::em_step(field, z, dt, gen.normal(k));
            const bool hit = to_upper ? z >= d : z <= 0.0;
            if (hit) {
                outcome[p] = 1.0;
                event_time[p] = static_cast<double>(k + 1) * dt;
                return;
            }
            if (to_upper && z <= 0.0 && stop_low) return;
            if (!to_upper && z >= d && stop_high) return;
        }
        undecided[p] = 1;
    });

    McEstimate est = detail::reduce(outcome, dt);
    detail::attach_tail(est, event_time, undecided, T_eff);
    return est;
}

/// Fraction of paths whose first exit from [0, d] happens before T.
inline McEstimate conservativity_check(const sde::SdeField& field, double x0, double T, double dt,
                                       std::size_t n_paths, std::uint64_t seed,
                                       std::size_t workers = 1) {
    detail::check_paths(n_paths);
    detail::check_start(field, x0);
    const std::size_t n_steps = sde::detail::step_count(T, dt);
    const double T_eff = static_cast<double>(n_steps) * dt;
    const double d = field.coeffs.d;

    std::vector<double> outcome(n_paths, 0.0);
    std::vector<double> event_time(n_paths, -1.0);
    std::vector<unsigned char> undecided(n_paths, 0);
    detail::run_paths(n_paths, workers, [&](std::size_t p) {
        rng::CounterRng gen(seed, p);
        double z = x0;
        for (std::size_t k = 0; k < n_steps; ++k) {
            z = sde::detail::em_step(field, z, dt, gen.normal(k));
            if (z < 0.0 || z > d) {
                outcome[p] = 1.0;
                event_time[p] = static_cast<double>(k + 1) * dt;
                return;
            }
        }
        undecided[p] = 1;
    });

    McEstimate est = detail::reduce(outcome, dt);
    detail::attach_tail(est, event_time, undecided, T_eff);
    return est;
}

/// Time average (1/T) int_0^T f(Z_s) ds along a single path, trapezoid rule.
template <class F>
double ergodic_average(const sde::SdeField& field, double x0, F&& f, double T, double dt,
                       std::uint64_t seed) {
    if (!(field.shape.alpha > -1.0) || !(field.shape.beta > -1.0))
        throw RegimeError("time averages require the conservative regime alpha, beta > -1");
    detail::check_start(field, x0);
    const std::size_t n_steps = sde::detail::step_count(T, dt);
    rng::CounterRng gen(seed, 0);
    double z = x0;
    double acc = 0.5 * f(z);
    for (std::size_t k = 0; k < n_steps; ++k) {
        z = sde::detail::em_step(field, z, dt, gen.normal(k));
        acc += (k + 1 == n_steps ? 0.5 : 1.0) * f(z);
    }
    return acc / static_cast<double>(n_steps);
}

struct Occupation {
    double value = 0.0;
    bool stabilized = false;
};

/// int_0^(T and lifetime) Z_t^r (d - Z_t)^s dt along one path. The integrand
/// is zero after the path dies; a path absorbed where the drift vanishes
/// (alpha = -1 at d, beta = -1 at 0) keeps contributing the boundary value
/// forever. stabilized reports whether the last nine tenths of the horizon
/// added less than 1% of the final value.
inline Occupation occupation_integral(const sde::SdeField& field, double x0, double r, double s,
                                      double T, double dt, std::uint64_t seed) {
    const auto& sh = field.shape;
    const bool conservative = sh.alpha > -1.0 && sh.beta > -1.0;
    if (!conservative && inequalities::hardy_admissible(sh, r, s).admissible_case ==
                             inequalities::HardyCase::Inadmissible)
        throw RegimeError("occupation weight exponents (r, s) are not admissible for this shape");
    detail::check_start(field, x0);
    const std::size_t n_steps = sde::detail::step_count(T, dt);
    const double T_eff = static_cast<double>(n_steps) * dt;
    const double t10 = 0.1 * T_eff;
    const double d = field.coeffs.d;
    auto g = [&](double z) { return std::pow(z, r) * std::pow(d - z, s); };

    rng::CounterRng gen(seed, 0);
    double z = x0;
    double g_prev = g(x0);
    double acc = 0.0;
    double acc10 = 0.0;
    bool have10 = false;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double next = sde::detail::em_step(field, z, dt, gen.normal(k));
        if (next <= 0.0 || next >= d) {
            // partial step up to the interpolated crossing, midpoint rule
            const double target = next >= d ? d : 0.0;
            const double theta = next == z ? 1.0 : (target - z) / (next - z);
            acc += theta * dt * g(0.5 * (z + target));
            const double zeta = (static_cast<double>(k) + theta) * dt;
            const bool fixed_point = (next >= d && sh.alpha == -1.0) ||
                                     (next <= 0.0 && sh.beta == -1.0);
            if (!have10) {
                acc10 = acc;
                have10 = true;
                if (fixed_point && zeta < t10) acc10 += g(target) * (t10 - zeta);
            }
            if (fixed_point) acc += g(target) * (T_eff - zeta);
            break;
        }
        acc += dt * 0.5 * (g_prev + g(next));
        g_prev = g(next);
        z = next;
        if (!have10 && static_cast<double>(k + 1) * dt >= t10) {
            acc10 = acc;
            have10 = true;
        }
    }
    if (!have10) acc10 = acc;
    Occupation occ;
    occ.value = acc;
    occ.stabilized = acc - acc10 <= 0.01 * acc;
    return occ;
}

struct SemigroupComparison {
    McEstimate mc;
    double spectral_value = 0.0;
};

/// Monte Carlo mean of f(Z_t) against the spectral value T_t f(x0).
template <class F>
SemigroupComparison semigroup_mc_check(const sde::SdeField& field, double x0, F&& f, double t,
                                       double dt, std::size_t n_paths, std::uint64_t seed,
                                       std::size_t workers = 1) {
    if (!(field.shape.alpha > -1.0) || !(field.shape.beta > -1.0))
        throw RegimeError("semigroup comparison requires the conservative regime alpha, beta > -1");
    detail::check_paths(n_paths);
    detail::check_start(field, x0);
    if (t < 0.0) throw ParameterError("time must be nonnegative");

    std::vector<double> outcome(n_paths, 0.0);
    if (t == 0.0) {
        const double v = f(x0);
        for (auto& o : outcome) o = v;
    } else {
        const std::size_t n_steps = sde::detail::step_count(t, dt);
        detail::run_paths(n_paths, workers, [&](std::size_t p) {
            rng::CounterRng gen(seed, p);
            double z = x0;
            for (std::size_t k = 0; k < n_steps; ++k)
                z = sde::detail::em_step(field, z, dt, gen.normal(k));
            outcome[p] = f(z);
        });
    }

    SemigroupComparison cmp;
    cmp.mc = detail::reduce(outcome, dt);
    auto M = model::Diffusion::from_shape(field.shape.alpha, field.shape.beta, field.coeffs.sigma,
                                          field.coeffs.d);
    cmp.spectral_value = spectral::semigroup_apply(M, t, f, 16, x0);
    return cmp;
}

} // namespace jacobi::mc
