#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "orbitlab/interval.hpp"
#include "orbitlab/quartic.hpp"
#include "oracles.hpp"

using namespace orbitlab;

namespace {

BigInt rand_int(std::mt19937_64& rng, long lo, long hi) {
    std::uniform_int_distribution<long> d(lo, hi);
    return BigInt(d(rng));
}

QuarticInt rand_quartic(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> d(-50, 50);
    return {BigInt(d(rng)), BigInt(d(rng)), BigInt(d(rng)), BigInt(d(rng))};
}

} // namespace

TEST_CASE("rational arithmetic matches the unreduced oracle") {
    std::mt19937_64 rng(1001);
    for (int i = 0; i < 1000; ++i) {
        BigInt n1 = rand_int(rng, -1000, 1000), n2 = rand_int(rng, -1000, 1000);
        BigInt d1 = rand_int(rng, 1, 999), d2 = rand_int(rng, 1, 999);
        testing::RawFraction a{n1, d1}, b{n2, d2};
        BigRational ra(n1, d1), rb(n2, d2);
        CHECK(a.add(b).equals(ra + rb));
        CHECK(a.sub(b).equals(ra - rb));
        CHECK(a.mul(b).equals(ra * rb));
        CHECK((ra + rb).denominator() > BigInt(0));
        CHECK(BigInt::gcd((ra * rb).numerator(), (ra * rb).denominator()) == BigInt(1));
    }
}

TEST_CASE("rational parsing and formatting") {
    CHECK(parse_rational("1e-3") == BigRational(1, 1000));
    CHECK(parse_rational("0.001") == BigRational(1, 1000));
    CHECK(parse_rational("-2.5e1") == BigRational(-25));
    CHECK(parse_rational("3/8") == BigRational(3, 8));
    CHECK_THROWS_AS(parse_rational("abc"), ConfigError);
    CHECK(decimal_string(BigRational(1, 2)) == "0.5");
}

TEST_CASE("quartic multiplication: defining relation and alpha identity") {
    QuarticInt t = QuarticInt::t();
    QuarticInt t3{BigInt(0), BigInt(0), BigInt(0), BigInt(1)};
    CHECK(t * t3 == QuarticInt(2));

    QuarticInt alpha = quartic_alpha();
    CHECK(alpha == QuarticInt(BigInt(3), BigInt(2), BigInt(2), BigInt(2)));
    CHECK(sigma(alpha) == QuarticInt(BigInt(3), BigInt(-2), BigInt(2), BigInt(-2)));
    CHECK(alpha * sigma(alpha) == QuarticInt(1));

    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
        QuarticInt x = rand_quartic(rng);
        CHECK(x * QuarticInt(1) == x);
    }
}

TEST_CASE("quartic ring properties: commutativity, associativity, sigma morphism") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        QuarticInt x = rand_quartic(rng), y = rand_quartic(rng), z = rand_quartic(rng);
        CHECK(x * y == y * x);
        CHECK((x * y) * z == x * (y * z));
        CHECK(sigma(sigma(x)) == x);
        CHECK(sigma(x + y) == sigma(x) + sigma(y));
        CHECK(sigma(x * y) == sigma(x) * sigma(y));
    }
}

TEST_CASE("even part lies in Z[sqrt 2] and the split is exact") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        QuarticInt x = rand_quartic(rng);
        QuarticInt rebuilt = even_part(x).to_quartic() + QuarticInt::t() * odd_part(x).to_quartic();
        CHECK(rebuilt == x);
        CHECK(even_part(x).to_quartic().is_even());
    }
}

TEST_CASE("enclose: point values and width contract") {
    RealInterval one = enclose(QuarticInt(1), 30);
    CHECK(one.lower() == BigRational(1));
    CHECK(one.upper() == BigRational(1));

    RealInterval alpha = enclose(quartic_alpha(), 30);
    // 3 + 2*2^(1/4) + 2*2^(1/2) + 2*2^(3/4), from a plain double evaluation.
    double expected = 3 + 2 * 1.189207115002721 + 2 * 1.4142135623730951 + 2 * 1.681792830507429;
    CHECK(alpha.lower().to_double() <= expected);
    CHECK(alpha.upper().to_double() >= expected);
    CHECK(alpha.width() <= BigRational(BigInt(12), BigInt::pow(BigInt(2), 30UL)));

    RealInterval s2 = enclose(QuarticInt::sqrt2(), 40);
    CHECK(s2.lower().to_double() == doctest::Approx(1.41421356).epsilon(1e-6));
    CHECK_THROWS_AS(enclose(QuarticInt(1), 4), PreconditionViolated);
}

TEST_CASE("enclose respects multiplication: product enclosures nest") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        QuarticInt x = rand_quartic(rng), y = rand_quartic(rng);
        RealInterval prod = enclose(x * y, 40);
        RealInterval outer = enclose(x, 40) * enclose(y, 40);
        CHECK(outer.contains(prod));
    }
}

TEST_CASE("interval arithmetic basics") {
    RealInterval a = RealInterval::hull(BigRational(1, 3), BigRational(1, 2), 64);
    RealInterval b = RealInterval::hull(BigRational(-2), BigRational(-1), 64);
    // Outward rounding: the product encloses the true range [-1, -1/3].
    CHECK((a * b).contains(BigRational(-1, 3)));
    CHECK((a * b).contains(BigRational(-1)));
    CHECK((a * b).upper() <= BigRational(-1, 3) + BigRational(BigInt(1), BigInt::pow(BigInt(2), 50UL)));
    CHECK((a * b).lower() >= BigRational(-1) - BigRational(BigInt(1), BigInt::pow(BigInt(2), 50UL)));
    CHECK((a - a).contains_zero());
    CHECK_THROWS_AS(a / (b + RealInterval(2)), PreconditionViolated);
    CHECK(RealInterval(4).sqrt() == RealInterval(2));
    CHECK(interval_log(BigRational(1), 64).contains_zero());
    CHECK(interval_exp(BigRational(0), 64) == RealInterval(1));

    RealInterval e = interval_exp(BigRational(1), 128);
    CHECK(e.width() < BigRational(BigInt(1), BigInt::pow(BigInt(10), 30UL)));
    CHECK(e.lower().to_double() == doctest::Approx(2.718281828).epsilon(1e-9));
}

TEST_CASE("certified comparisons escalate and stop at the cap") {
    // A genuine zero point decides immediately.
    CHECK(certified_sign_escalating([](mpfr_prec_t p) {
              return RealInterval::exact(BigRational(0), p);
          }) == 0);
    CHECK(certified_sign_escalating([](mpfr_prec_t p) {
              return RealInterval::exact(BigRational(1, 7), p) -
                     RealInterval::exact(BigRational(1, 8), p);
          }) == 1);

    // An interval that straddles zero at every precision exhausts the cap.
    mpfr_prec_t old_cap = precision_cap();
    set_precision_cap(256);
    CHECK_THROWS_AS(certified_sign_escalating([](mpfr_prec_t p) {
                        BigRational eps(BigInt(1), BigInt::pow(BigInt(2), 8UL));
                        (void)p;
                        return RealInterval::hull(-eps, eps, p);
                    }),
                    IndeterminatePrecision);
    set_precision_cap(old_cap);
}

TEST_CASE("monotone refinement: higher precision intervals nest") {
    for (long num : {3L, 7L, 113L}) {
        RealInterval coarse = interval_log(BigRational(num), 64);
        RealInterval fine = interval_log(BigRational(num), 256);
        CHECK(coarse.contains(fine));
    }
}
