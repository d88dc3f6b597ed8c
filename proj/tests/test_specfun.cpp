#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "jacobi/specfun.hpp"

using namespace jacobi;
using namespace jacobi::specfun;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

TEST_CASE("gamma function matches reference values", "[specfun][gamma]") {
    CHECK_THAT(gamma_fn(0.5), WithinRel(1.7724538509055160273, 1e-14));
    CHECK_THAT(gamma_fn(7.3), WithinRel(1271.4236336639092731, 1e-14));
    CHECK_THAT(gamma_fn(-3.7), WithinRel(0.25164399590242264351, 1e-13));
    CHECK_THAT(gamma_fn(0.1), WithinRel(9.5135076986687318363, 1e-14));
    CHECK_THAT(gamma_fn(-0.5), WithinRel(-3.5449077018110320546, 1e-14));
    CHECK_THAT(gamma_fn(29.5), WithinRel(1.6348125198274266444e+30, 1e-13));
    CHECK_THAT(gamma_fn(1.0), WithinRel(1.0, 1e-14));
    CHECK_THAT(gamma_fn(5.0), WithinRel(24.0, 1e-14));
}

TEST_CASE("gamma function reflection identity", "[specfun][gamma]") {
    for (double x : {0.23, 0.77, 1.31, 2.6, -0.4, -1.85}) {
        double lhs = gamma_fn(x) * gamma_fn(1.0 - x);
        double rhs = kPi / std::sin(kPi * x);
        CHECK_THAT(lhs, WithinRel(rhs, 1e-12));
    }
}

TEST_CASE("gamma function pole handling", "[specfun][gamma]") {
    CHECK_THROWS_AS(gamma_fn(0.0), PoleError);
    CHECK_THROWS_AS(gamma_fn(-1.0), PoleError);
    CHECK_THROWS_AS(gamma_fn(-17.0), PoleError);
}

TEST_CASE("digamma matches reference values and recurrence", "[specfun][digamma]") {
    CHECK_THAT(digamma(0.5), WithinRel(-1.9635100260214234794, 1e-13));
    CHECK_THAT(digamma(7.3), WithinRel(1.9178203356379860984, 1e-13));
    CHECK_THAT(digamma(-2.3), WithinRel(3.3173231575618201233, 1e-12));
    CHECK_THAT(digamma(-0.7), WithinRel(-2.0739527936287044175, 1e-13));
    for (double x : {0.31, 1.7, 4.2, -1.35}) {
        CHECK_THAT(digamma(x + 1.0), WithinRel(digamma(x) + 1.0 / x, 1e-11));
    }
    CHECK_THROWS_AS(digamma(0.0), PoleError);
    CHECK_THROWS_AS(digamma(-4.0), PoleError);
}

TEST_CASE("squared modulus of gamma on complex arguments", "[specfun][gamma]") {
    CHECK_THAT(abs_gamma_sq(2.0, 1.0), WithinRel(0.5440581099642663259, 1e-13));
    CHECK_THAT(abs_gamma_sq(0.3, 2.7), WithinRel(0.00087633968801478747944, 1e-12));
    CHECK_THAT(abs_gamma_sq(-1.2, 0.8), WithinRel(0.30568899955630080679, 1e-12));
    CHECK_THAT(abs_gamma_sq(5.5, 3.25), WithinRel(378.48513950191438567, 1e-13));
    CHECK_THAT(abs_gamma_sq(1.5, 1.0724), WithinRel(0.30244705557205171674, 1e-13));
    // real axis consistency
    CHECK_THAT(abs_gamma_sq(3.3, 0.0), WithinRel(std::pow(gamma_fn(3.3), 2), 1e-14));
}

TEST_CASE("real part of digamma on complex arguments", "[specfun][digamma]") {
    CHECK_THAT(re_digamma2(2.0, 3.0), WithinRel(2.4159614214203017616, 1e-13));
    CHECK_THAT(re_digamma2(0.3, 1.7), WithinRel(1.0453181569182759053, 1e-12));
    CHECK_THAT(re_digamma2(-1.2, 0.8), WithinRel(1.3551836739590317598, 1e-12));
    CHECK_THAT(re_digamma2(4.1, 0.0), WithinRel(2.0 * digamma(4.1), 1e-14));
}

TEST_CASE("gamma_pair and re_digamma_pair are continuous across zero", "[specfun][gamma]") {
    double u = 1.8;
    double plus = gamma_pair(u, 1e-12);
    double minus = gamma_pair(u, -1e-12);
    double mid = std::pow(gamma_fn(u), 2);
    CHECK_THAT(plus, WithinRel(mid, 1e-9));
    CHECK_THAT(minus, WithinRel(mid, 1e-9));
    CHECK_THAT(re_digamma_pair(u, 1e-12), WithinRel(2.0 * digamma(u), 1e-9));
    CHECK_THAT(re_digamma_pair(u, -1e-12), WithinRel(2.0 * digamma(u), 1e-9));
    // positive square root branch agrees with explicit products
    CHECK_THAT(gamma_pair(2.4, 0.49), WithinRel(gamma_fn(3.1) * gamma_fn(1.7), 1e-14));
    CHECK_THAT(re_digamma_pair(2.4, 0.49), WithinRel(digamma(3.1) + digamma(1.7), 1e-14));
}

TEST_CASE("hypergeometric series on the direct branch", "[specfun][hyp2f1]") {
    CHECK_THAT(hyp2f1(1.0, 1.0, 2.0, 0.5).value, WithinRel(1.3862943611198906188, 1e-14));
    CHECK_THAT(hyp2f1(0.3, 0.4, 2.0, 0.7).value, WithinRel(1.0559143471350694072, 1e-14));
    CHECK_THAT(hyp2f1(-3.0, 2.2, 1.1, 0.6).value, WithinRel(-0.2004423963133640553, 1e-13));
    CHECK_THAT(hyp2f1(0.5, 1.5, 2.5, 0.5).value, WithinRel(1.2108418600591321121, 1e-14));
    CHECK(hyp2f1(0.7, -0.9, 1.3, 0.0).value == 1.0);
    // symmetry in the upper parameters
    CHECK(hyp2f1(0.37, 1.21, 2.05, 0.44).value == hyp2f1(1.21, 0.37, 2.05, 0.44).value);
}

TEST_CASE("hypergeometric series near the right endpoint", "[specfun][hyp2f1]") {
    // generic two-term connection
    CHECK_THAT(hyp2f1(0.3, 0.4, 2.0, 0.9).value, WithinRel(1.083223926759182621, 1e-13));
    CHECK_THAT(hyp2f1(0.2, 0.3, 2.2, 1.0 - 1e-6).value, WithinRel(1.0409398006810508491, 1e-13));
    // blow-up like w^{-0.6} amplifies the half-ulp rounding of x by ~7e-11
    CHECK_THAT(hyp2f1(1.2, 0.9, 1.5, 1.0 - 1e-6).value, WithinRel(5354.1053895328670763, 5e-10));
    // integer parameter-difference branches
    CHECK_THAT(hyp2f1(0.5, 0.7, 2.2, 0.97).value, WithinRel(1.3217104539800575967, 1e-12));
    CHECK_THAT(hyp2f1(0.6, 0.8, 1.4, 0.97).value, WithinRel(2.5156433454808794544, 1e-12));
    CHECK_THAT(hyp2f1(1.5, 1.2, 1.7, 0.97).value, WithinRel(36.808547368430246799, 1e-12));
    CHECK_THAT(hyp2f1(0.25, 0.55, 2.8, 0.9).value, WithinRel(1.0617491029209325916, 1e-12));
    CHECK_THAT(hyp2f1(1.3, 0.85, 2.15, 0.9).value, WithinRel(2.6311275378532067042, 1e-12));
}

TEST_CASE("terminating series bypasses the connection formulas", "[specfun][hyp2f1]") {
    auto r = hyp2f1(-3.0, 2.2, 1.1, 0.9);
    CHECK(r.terms_used <= 6);
    // explicit degree-3 polynomial evaluated term by term
    double z = 0.9, term = 1.0, expect = 1.0;
    for (int j = 0; j < 3; ++j) {
        term *= (j - 3.0) * (2.2 + j) / ((1.1 + j) * (j + 1.0)) * z;
        expect += term;
    }
    CHECK_THAT(r.value, WithinRel(expect, 1e-13));
    // nearly-terminating parameters take the same route and stay close
    auto near = hyp2f1(-3.0 + 1e-10, 2.2, 1.1, 0.9);
    CHECK_THAT(near.value, WithinAbs(expect, 1e-7));
}

TEST_CASE("symmetric-pair hypergeometric evaluation", "[specfun][hyp2f1]") {
    CHECK_THAT(hyp2f1_sym(1.5, -1.0, 2.0, 0.3).value, WithinRel(1.7498428237932595396, 1e-14));
    CHECK_THAT(hyp2f1_sym(1.2, -2.0, 2.5, 0.95).value, WithinRel(12.045795380306887219, 1e-12));
    CHECK_THAT(hyp2f1_sym(1.0, -1.0, 2.0, 0.9).value, WithinRel(5.1888585483010123839, 1e-12));
    CHECK_THAT(hyp2f1_sym(1.0, -1.0, 3.0, 0.9).value, WithinRel(2.5982091317489165354, 1e-12));
    CHECK_THAT(hyp2f1_sym(1.5, -2.0, 2.0, 0.9).value, WithinRel(39.576589481325387429, 1e-12));
    CHECK_THAT(hyp2f1_sym(0.8, 0.09, 1.9, 0.85).value, WithinRel(1.5597838403648037215, 1e-12));
}

TEST_CASE("symmetric and plain evaluations agree for real pairs", "[specfun][hyp2f1]") {
    struct Probe {
        double A, gsq, u, x;
    };
    for (const Probe& p : {Probe{1.1, 0.16, 2.3, 0.4}, Probe{0.9, 0.25, 1.7, 0.9},
                           Probe{1.45, 0.5, 2.05, 0.97}, Probe{0.75, 1.21, 2.6, 0.85}}) {
        double g = std::sqrt(p.gsq);
        double sym = hyp2f1_sym(p.A, p.gsq, p.u, p.x).value;
        double plain = hyp2f1(p.A + g, p.A - g, p.u, p.x).value;
        CHECK_THAT(sym, WithinRel(plain, 1e-12));
    }
}

TEST_CASE("hypergeometric input validation", "[specfun][hyp2f1]") {
    CHECK_THROWS_AS(hyp2f1(0.5, 0.5, -2.0, 0.3), ParameterError);
    CHECK_THROWS_AS(hyp2f1(0.5, 0.5, 0.0, 0.3), ParameterError);
    CHECK_THROWS_AS(hyp2f1(0.5, 0.5, 1.5, 1.0), DomainError);
    CHECK_THROWS_AS(hyp2f1(0.5, 0.5, 1.5, -0.2), DomainError);
    CHECK_THROWS_AS(hyp2f1_sym(0.5, 1.0, -1.0, 0.3), ParameterError);
    CHECK_THROWS_AS(hyp2f1_sym(0.5, 1.0, 1.5, 1.2), DomainError);
}

TEST_CASE("limit regime classification at the right endpoint", "[specfun][limits]") {
    auto fin = gauss_limit_regime(0.2, 0.3, 2.2);
    REQUIRE(fin.kind == GaussKind::FiniteGauss);
    CHECK(fin.exponent == 0.0);
    double expect_fin = gamma_fn(2.2) * gamma_fn(1.7) / (gamma_fn(2.0) * gamma_fn(1.9));
    CHECK_THAT(fin.coefficient, WithinRel(expect_fin, 1e-13));
    CHECK_THAT(hyp2f1(0.2, 0.3, 2.2, 1.0 - 1e-6).value, WithinRel(fin.coefficient, 2e-4));

    // 1.4 - 0.7 - 0.7 is exactly zero in binary floating point
    auto lg = gauss_limit_regime(0.7, 0.7, 1.4);
    REQUIRE(lg.kind == GaussKind::Logarithmic);
    double f_hi = hyp2f1(0.7, 0.7, 1.4, 1.0 - 1e-6).value;
    double f_lo = hyp2f1(0.7, 0.7, 1.4, 1.0 - 1e-4).value;
    double slope = (f_hi - f_lo) / (std::log(1e-4) - std::log(1e-6));
    CHECK_THAT(slope, WithinRel(lg.coefficient, 1e-2));
    auto lg2 = gauss_limit_regime(1.0, 1.0, 2.0);
    REQUIRE(lg2.kind == GaussKind::Logarithmic);
    CHECK_THAT(lg2.coefficient, WithinRel(1.0, 1e-14));

    auto pw = gauss_limit_regime(1.2, 0.9, 1.5);
    REQUIRE(pw.kind == GaussKind::PowerBlowup);
    double s = 1.5 - 1.2 - 0.9;
    CHECK_THAT(pw.exponent, WithinRel(s, 1e-12));
    double scaled = hyp2f1(1.2, 0.9, 1.5, 1.0 - 1e-6).value * std::pow(1e-6, -s);
    CHECK_THAT(scaled, WithinRel(pw.coefficient, 1e-3));

    // kappa = 0 forces limit 1
    auto one = gauss_limit_regime(0.0, 0.5, 2.0);
    REQUIRE(one.kind == GaussKind::FiniteGauss);
    CHECK_THAT(one.coefficient, WithinRel(1.0, 1e-13));
    // a pole in a denominator gamma zeroes the coefficient (1.5 - 2.5 = -1 exactly)
    auto zero = gauss_limit_regime(2.5, -1.25, 1.5);
    REQUIRE(zero.kind == GaussKind::FiniteGauss);
    CHECK(zero.coefficient == 0.0);
}

TEST_CASE("Jacobi polynomials from the terminating series", "[specfun][jacobi]") {
    CHECK_THAT(jacobi_Q(3, 0.7, -0.3, 1.0, 0.42), WithinRel(-0.026447669316375198728, 1e-12));
    CHECK_THAT(jacobi_Q(5, 0.7, -0.3, 1.0, 0.42), WithinRel(-0.014121354276986584107, 1e-12));
    // normalization at the right endpoint and constant degree zero
    CHECK(jacobi_Q(4, 0.3, 0.8, 2.0, 2.0) == 1.0);
    CHECK(jacobi_Q(0, 0.3, 0.8, 2.0, 0.77) == 1.0);
    // degree-1 closed form: 1 - (1 + (alpha+beta+1)/(alpha+1)) ... check against series by hand
    double a = 0.5, b = -0.25, d = 3.0, x = 1.2;
    double z = 1.0 - x / d;
    double expect = 1.0 - (a + b + 2.0) / (a + 1.0) * z;
    CHECK_THAT(jacobi_Q(1, a, b, d, x), WithinRel(expect, 1e-14));
    CHECK_THROWS_AS(jacobi_Q(-1, 0.5, 0.5, 1.0, 0.5), ParameterError);
    CHECK_THROWS_AS(jacobi_Q(2, 0.5, 0.5, 1.0, 1.5), DomainError);
}
