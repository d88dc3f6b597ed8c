#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "jacobi/hitting.hpp"
#include "jacobi/mc.hpp"
#include "jacobi/model.hpp"
#include "jacobi/rng.hpp"
#include "jacobi/sde.hpp"

using jacobi::CensoringWarning;
using jacobi::ConfigError;
using jacobi::DomainError;
using jacobi::ParameterError;
using jacobi::RegimeError;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
namespace mc = jacobi::mc;
namespace sde = jacobi::sde;
namespace model = jacobi::model;

namespace {

sde::SdeField field_for(double alpha, double beta, double sigma = 1.0, double d = 1.0) {
    return sde::make_field(model::Diffusion::from_shape(alpha, beta, sigma, d));
}

} // namespace

TEST_CASE("counter generator moments and determinism", "[mc][rng]") {
    jacobi::rng::CounterRng gen(12345, 0);

    SECTION("normal stream is standard to sampling accuracy") {
        const std::size_t n = 200000;
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double g = gen.normal(k);
            sum += g;
            sumsq += g * g;
        }
        double mean = sum / n;
        double var = sumsq / n - mean * mean;
        CHECK(std::abs(mean) < 0.01);
        CHECK(std::abs(var - 1.0) < 0.02);
    }
    SECTION("uniforms stay inside the half-open unit interval") {
        double lo = 1.0, hi = 0.0, sum = 0.0;
        const std::size_t n = 100000;
        for (std::size_t k = 0; k < n; ++k) {
            double u = gen.uniform(k);
            lo = std::min(lo, u);
            hi = std::max(hi, u);
            sum += u;
        }
        CHECK(lo > 0.0);
        CHECK(hi <= 1.0);
        CHECK(std::abs(sum / n - 0.5) < 0.005);
    }
    SECTION("variates are pure functions of the key") {
        jacobi::rng::CounterRng again(12345, 0);
        CHECK(gen.normal(7) == again.normal(7));
        CHECK(gen.uniform(123456789) == again.uniform(123456789));
        jacobi::rng::CounterRng other(12345, 1);
        CHECK(gen.normal(7) != other.normal(7));
    }
    SECTION("streams are uncorrelated") {
        jacobi::rng::CounterRng s1(999, 1), s2(999, 2);
        const std::size_t n = 20000;
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += s1.normal(k) * s2.normal(k);
        CHECK(std::abs(acc / n) < 0.05);
    }
}

TEST_CASE("hitting estimate brackets the closed form", "[mc][slow]") {
    // certain-or-not band: the upper boundary is reached with the
    // closed-form probability computed by the hitting module
    auto M = model::Diffusion::from_shape(-0.5, -1.5, 1.0, 1.0);
    auto field = sde::make_field(M);
    const double exact = jacobi::hitting::hit_prob_d(M, 0.5).probability;
    auto est = mc::estimate_hit_prob(field, 0.5, sde::BoundaryHit::D, 8.0, 1e-3, 4000, 42, 4);
    INFO("exact " << exact << " mc " << est.mean << " +- " << est.std_error << " censored "
                  << est.censored_fraction);
    CHECK(std::abs(est.mean - exact) <= 3.0 * est.std_error + 0.07);
    CHECK(est.n_paths == 4000);
    CHECK(est.std_error > 0.0);
    CHECK_THAT(est.ci_hi - est.ci_lo, WithinRel(2.0 * 1.96 * est.std_error, 1e-12));
    CHECK(est.tail_mass <= mc::kCensorTol);
}

TEST_CASE("estimates are identical for any worker count", "[mc]") {
    auto field = field_for(-0.5, -1.5);
    auto one = mc::estimate_hit_prob(field, 0.5, sde::BoundaryHit::D, 8.0, 2e-3, 500, 7, 1);
    auto four = mc::estimate_hit_prob(field, 0.5, sde::BoundaryHit::D, 8.0, 2e-3, 500, 7, 4);
    CHECK(one.mean == four.mean);
    CHECK(one.std_error == four.std_error);
    CHECK(one.censored_fraction == four.censored_fraction);
    CHECK(one.tail_mass == four.tail_mass);

    auto c1 = mc::conservativity_check(field, 0.5, 6.0, 2e-3, 400, 9, 1);
    auto c3 = mc::conservativity_check(field, 0.5, 6.0, 2e-3, 400, 9, 3);
    CHECK(c1.mean == c3.mean);
    CHECK(c1.std_error == c3.std_error);
}

TEST_CASE("spurious upper hits vanish as dt shrinks", "[mc][slow]") {
    // alpha >= 0 makes {d} polar; recorded touches are overshoot artifacts.
    // The steep upper exponent keeps the stationary mass near d negligible,
    // so artifacts happen only in the first few steps after the close start.
    auto field = field_for(2.0, 0.2);
    auto frac = [&](double dt) {
        return mc::estimate_hit_prob(field, 0.985, sde::BoundaryHit::D, 0.5, dt, 2000, 5, 4).mean;
    };
    double coarse = frac(2e-3);
    double fine = frac(5e-4);
    INFO("artifact fraction " << coarse << " -> " << fine);
    CHECK(fine <= coarse);
    CHECK(coarse > 0.0);
}

TEST_CASE("near-boundary start hits quickly in the certain regime", "[mc][slow]") {
    auto field = field_for(-0.5, 0.5);
    auto est = mc::estimate_hit_prob(field, 1.0 - 1e-3, sde::BoundaryHit::D, 8.0, 1e-4, 500, 11, 4);
    INFO("hit fraction " << est.mean);
    CHECK(est.mean >= 0.9);
}

TEST_CASE("short horizons raise the censoring diagnostic", "[mc]") {
    // hitting times concentrate near t ~ 1 here, so at T = 0.5 the event rate
    // is still rising and the extrapolated tail is large
    auto field = field_for(-0.5, 0.5);
    CHECK_THROWS_AS(
        mc::estimate_hit_prob(field, 0.5, sde::BoundaryHit::D, 0.5, 1e-3, 500, 13, 2),
        CensoringWarning);
}

TEST_CASE("hitting estimator argument checks", "[mc]") {
    auto field = field_for(-0.5, -1.5);
    CHECK_THROWS_AS(
        mc::estimate_hit_prob(field, 0.5, sde::BoundaryHit::None, 1.0, 1e-3, 10, 1),
        ParameterError);
    CHECK_THROWS_AS(mc::estimate_hit_prob(field, 0.5, sde::BoundaryHit::D, 1.0, 1e-3, 0, 1),
                    ConfigError);
    CHECK_THROWS_AS(mc::estimate_hit_prob(field, 1.5, sde::BoundaryHit::D, 1.0, 1e-3, 10, 1),
                    DomainError);
    CHECK_THROWS_AS(mc::estimate_hit_prob(field, 0.5, sde::BoundaryHit::D, 1.0, -1e-3, 10, 1),
                    ConfigError);
}

TEST_CASE("conservative shapes almost never exit", "[mc][slow]") {
    auto field = field_for(1.0, 1.0);
    double coarse = mc::conservativity_check(field, 0.5, 1.0, 1e-3, 2000, 17, 4).mean;
    double fine = mc::conservativity_check(field, 0.5, 1.0, 5e-4, 2000, 17, 4).mean;
    INFO("exit fraction " << coarse << " -> " << fine);
    CHECK(coarse < 0.01);
    CHECK(fine < 0.01);
    CHECK(fine <= coarse);
}

TEST_CASE("explosive shapes exit with visible mass", "[mc][slow]") {
    auto field = field_for(-1.5, 1.0);
    auto est = mc::conservativity_check(field, 0.9, 2.0, 1e-3, 500, 19, 4);
    INFO("exit fraction " << est.mean);
    CHECK(est.mean > 0.2);
    CHECK_THROWS_AS(mc::conservativity_check(field, 0.9, 2.0, 1e-3, 0, 19), ConfigError);
}

TEST_CASE("time averages converge to the invariant mean", "[mc][slow]") {
    auto field = field_for(1.0, 1.0);

    SECTION("constant integrand is exact") {
        double v = mc::ergodic_average(field, 0.3, [](double) { return 1.0; }, 50.0, 1e-3, 23);
        CHECK(v == 1.0);
    }
    SECTION("coordinate averages to the symmetric mean") {
        auto id = [](double x) { return x; };
        double v1 = mc::ergodic_average(field, 0.3, id, 200.0, 1e-3, 23);
        double v2 = mc::ergodic_average(field, 0.3, id, 200.0, 1e-3, 24);
        INFO("averages " << v1 << " " << v2);
        CHECK_THAT(v1, WithinAbs(0.5, 0.025));
        CHECK_THAT(v2, WithinAbs(0.5, 0.025));
        CHECK(std::abs(v1 - v2) <= 0.1 * std::max(std::abs(v1), std::abs(v2)));
    }
    SECTION("non-conservative shapes are rejected") {
        CHECK_THROWS_AS(
            mc::ergodic_average(field_for(-1.5, 0.5), 0.5, [](double) { return 1.0; }, 1.0, 1e-3, 1),
            RegimeError);
    }
}

TEST_CASE("occupation integral follows the path lifetime", "[mc][slow]") {
    SECTION("absorbed paths stabilize") {
        auto field = field_for(0.0, -1.5);
        int stable = 0;
        for (std::uint64_t p = 0; p < 100; ++p) {
            auto occ = mc::occupation_integral(field, 0.5, 0.0, 0.0, 30.0, 1e-3, 100 + p);
            if (occ.stabilized) ++stable;
            CHECK(occ.value > 0.0);
            CHECK(occ.value < 30.0);
        }
        INFO("stabilized " << stable << " / 100");
        CHECK(stable >= 95);
    }
    SECTION("immediate death leaves an empty integral") {
        auto field = field_for(1.0, -1.5);
        auto occ = mc::occupation_integral(field, 1e-3, 0.0, 0.0, 5.0, 1e-4, 31);
        CHECK(occ.value < 0.01);
    }
    SECTION("surviving conservative path accumulates the full horizon") {
        auto field = field_for(1.0, 1.0);
        auto occ = mc::occupation_integral(field, 0.5, 0.0, 0.0, 5.0, 1e-3, 37);
        CHECK_THAT(occ.value, WithinRel(5.0, 1e-9));
        CHECK(!occ.stabilized);
    }
    SECTION("inadmissible weight exponents are rejected") {
        auto field = field_for(0.0, -1.5);
        CHECK_THROWS_AS(mc::occupation_integral(field, 0.5, -0.3, 0.0, 5.0, 1e-3, 1), RegimeError);
    }
}

TEST_CASE("semigroup expectation matches the spectral value", "[mc][slow]") {
    auto field = field_for(1.0, 1.0);

    SECTION("constant function is exact on both sides") {
        auto cmp = mc::semigroup_mc_check(field, 0.3, [](double) { return 1.0; }, 0.5, 1e-3, 200, 41);
        CHECK(cmp.mc.mean == 1.0);
        CHECK(cmp.mc.std_error == 0.0);
        CHECK_THAT(cmp.spectral_value, WithinRel(1.0, 1e-10));
    }
    SECTION("first mode decays at the spectral gap") {
        auto q1 = [](double x) { return 2.0 * x - 1.0; };
        auto cmp = mc::semigroup_mc_check(field, 0.3, q1, 0.5, 1e-3, 3000, 43, 4);
        double expected = std::exp(-1.0) * (2.0 * 0.3 - 1.0);
        INFO("mc " << cmp.mc.mean << " +- " << cmp.mc.std_error << " spectral "
                   << cmp.spectral_value);
        CHECK_THAT(cmp.spectral_value, WithinRel(expected, 1e-10));
        CHECK(std::abs(cmp.mc.mean - cmp.spectral_value) <= 3.0 * cmp.mc.std_error + 0.03);
    }
    SECTION("zero time reproduces the function value exactly") {
        auto q1 = [](double x) { return 2.0 * x - 1.0; };
        auto cmp = mc::semigroup_mc_check(field, 0.3, q1, 0.0, 1e-3, 100, 47);
        CHECK(cmp.mc.mean == q1(0.3));
        CHECK(cmp.mc.std_error == 0.0);
        CHECK_THAT(cmp.spectral_value, WithinAbs(q1(0.3), 1e-10));
    }
    SECTION("non-conservative shapes are rejected") {
        CHECK_THROWS_AS(mc::semigroup_mc_check(field_for(-1.5, 0.5), 0.5,
                                               [](double) { return 1.0; }, 0.5, 1e-3, 10, 1),
                        RegimeError);
    }
}
