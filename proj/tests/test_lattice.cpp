#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "orbitlab/lattice.hpp"
#include "oracles.hpp"

using namespace orbitlab;

namespace {

RatMatrix random_int_basis(std::mt19937_64& rng, int n, int span) {
    std::uniform_int_distribution<int> d(-span, span);
    for (;;) {
        RatMatrix B(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) B(i, j) = BigRational(d(rng));
        if (!rat_det(B).is_zero()) return B;
    }
}

/// Random integer unimodular matrix from elementary column operations.
IntMatrix random_unimodular(std::mt19937_64& rng, int n, int steps) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::uniform_int_distribution<int> coef(-2, 2);
    IntMatrix T = int_identity(n);
    for (int s = 0; s < steps; ++s) {
        int i = pick(rng), j = pick(rng);
        if (i == j) {
            for (int r = 0; r < n; ++r) T(r, i) = -T(r, i);
            continue;
        }
        BigInt c(coef(rng));
        for (int r = 0; r < n; ++r) T(r, j) += c * T(r, i);
    }
    return T;
}

} // namespace

TEST_CASE("exact helpers: inverse, determinants") {
    std::mt19937_64 rng(7);
    RatMatrix B = random_int_basis(rng, 4, 5);
    RatMatrix inv = rat_inverse(B);
    RatMatrix prod = B * inv;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(prod(i, j) == BigRational(i == j ? 1 : 0));

    IntMatrix T = random_unimodular(rng, 5, 30);
    BigInt d = int_det(T);
    CHECK(d.abs() == BigInt(1));
    CHECK(rat_det(to_rationals(T)) == BigRational(d));

    RatMatrix S = RatMatrix::Zero(3, 3);
    CHECK(rat_det(S).is_zero());
    CHECK_THROWS_AS(rat_inverse(S), RankDeficient);
}

TEST_CASE("systole of the standard lattice is exactly one") {
    for (int n = 1; n <= 6; ++n) {
        auto s = systole(UnimodularLattice::from_exact(rat_identity(n)));
        CHECK(s.length.lower() == BigRational(1));
        CHECK(s.length.upper() == BigRational(1));
        CHECK(s.rho.is_zero());
    }
}

TEST_CASE("diagonal case picks the contracted axis") {
    RatMatrix D = rat_identity(2);
    D(0, 0) = BigRational(2);
    D(1, 1) = BigRational(1, 2);
    auto s = systole(UnimodularLattice::from_exact(D));
    CHECK(s.length.lower() == BigRational(1, 2));
    CHECK(s.length.upper() == BigRational(1, 2));
    CHECK(s.achieving_vector(0).is_zero());
    CHECK(s.achieving_vector(1).abs() == BigInt(1));
}

TEST_CASE("shortest vector agrees with the certified-box oracle") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        RatMatrix B = random_int_basis(rng, 5, 9);
        ShortestResult sv = shortest_vector(B);
        // The oracle enumerates a provably complete box for bound C. It gets
        // the reduced basis of the same lattice, which keeps its dual-bound
        // box small; the box search itself is independent of Fincke-Pohst.
        RatMatrix preconditioned = lll_rational(B).reduced;
        BigRational oracle =
            testing::brute_shortest_norm2(preconditioned, sv.min_norm2 + BigRational(1));
        CHECK(sv.min_norm2 == oracle);
        // The reported vector achieves the reported norm in the original basis.
        BigRational achieved(0);
        for (int i = 0; i < 5; ++i) {
            BigRational acc(0);
            for (int j = 0; j < 5; ++j) acc += B(i, j) * BigRational(sv.coords(j));
            achieved += acc * acc;
        }
        CHECK(achieved == sv.min_norm2);
    }
}

TEST_CASE("LLL: identity input, permuted input, unimodular transform") {
    LLLResult id = lll_rational(rat_identity(4));
    CHECK(id.transform == int_identity(4));

    RatMatrix P = RatMatrix::Zero(3, 3);
    P(0, 1) = BigRational(1);
    P(1, 2) = BigRational(1);
    P(2, 0) = BigRational(1);
    LLLResult perm = lll_rational(P);
    // Already orthonormal: the transform stays a (possibly trivial) permutation.
    int ones = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(perm.transform(i, j).abs() <= BigInt(1));
            if (perm.transform(i, j).abs() == BigInt(1)) ++ones;
        }
    CHECK(ones == 3);
    CHECK(int_det(perm.transform).abs() == BigInt(1));

    CHECK_THROWS_AS(lll_rational(rat_identity(3), BigRational(1, 5)), PreconditionViolated);
    CHECK_THROWS_AS(lll_rational(RatMatrix::Zero(2, 2)), RankDeficient);
}

TEST_CASE("LLL first vector is within the classical factor of the optimum") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        RatMatrix B = random_int_basis(rng, 5, 9);
        LLLResult red = lll_rational(B);
        CHECK(rat_det(to_rationals(red.transform)).abs() == BigRational(1));
        // reduced = B * T exactly
        RatMatrix prod = B * to_rationals(red.transform);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) CHECK(prod(i, j) == red.reduced(i, j));
        BigRational first(0);
        for (int i = 0; i < 5; ++i) first += red.reduced(i, 0) * red.reduced(i, 0);
        BigRational lambda2 = shortest_vector(B).min_norm2;
        // ||b_1||^2 <= 2^(n-1) lambda_1^2
        CHECK(first <= BigRational(16) * lambda2);
    }
}

TEST_CASE("LLL reduction is idempotent up to bounded transforms") {
    std::mt19937_64 rng(12);
    RatMatrix B = random_int_basis(rng, 4, 9);
    auto L = UnimodularLattice::from_exact(rat_identity(4));
    LLLResult once = lll_rational(B);
    LLLResult twice = lll_rational(once.reduced);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(twice.transform(i, j).abs() <= BigInt(1));
    CHECK(shortest_vector(once.reduced).min_norm2 == shortest_vector(twice.reduced).min_norm2);
    (void)L;
}

TEST_CASE("systole is invariant under right-unimodular moves") {
    std::mt19937_64 rng(13);
    RatMatrix D = rat_identity(3);
    D(0, 0) = BigRational(3, 2);
    D(1, 1) = BigRational(4, 3);
    D(2, 2) = BigRational(1, 2);
    D(0, 2) = BigRational(1, 5);
    for (int trial = 0; trial < 50; ++trial) {
        IntMatrix g = random_unimodular(rng, 3, 20);
        RatMatrix moved = D * to_rationals(g);
        auto s1 = systole(UnimodularLattice::from_exact(D));
        auto s2 = systole(UnimodularLattice::from_exact(moved));
        CHECK(s1.surrogate_min_norm2 == s2.surrogate_min_norm2);
        CHECK(s1.length.lower() == s2.length.lower());
        CHECK(s1.length.upper() == s2.length.upper());
    }
}

TEST_CASE("scaling law on the positive diagonal") {
    // systole(a(s) Z^n) = e^(-|s|/2), achieved on a standard basis vector.
    for (long s : {1L, -1L, 2L, -2L, 4L, -4L}) {
        auto gen = [s](mpfr_prec_t p) {
            IntervalMatrix m = interval_identity(3, p);
            m(0, 0) = interval_exp(BigRational(s, 2), p);
            m(2, 2) = interval_exp(BigRational(-s, 2), p);
            return m;
        };
        UnimodularLattice L(3, gen);
        auto sys = systole(L);
        RealInterval expected = interval_exp(BigRational(-std::labs(s), 2), 160);
        CHECK(sys.length.intersects(expected));
        CHECK(sys.length.width() <= BigRational(BigInt(1), BigInt::pow(BigInt(10), 7UL)));
        long nonzero = 0;
        for (int i = 0; i < 3; ++i)
            if (!sys.achieving_vector(i).is_zero()) ++nonzero;
        CHECK(nonzero == 1);
    }
}

TEST_CASE("interval lattices certify against the exact surrogate") {
    // A lattice with irrational entries: rho must be tiny and the enclosure tight.
    auto gen = [](mpfr_prec_t p) {
        IntervalMatrix m = interval_identity(2, p);
        RealInterval r = RealInterval::exact(BigRational(2), p).sqrt();
        m(0, 0) = r;
        m(1, 1) = RealInterval(1) / r;
        m(0, 1) = RealInterval::exact(BigRational(1, 3), p);
        return m;
    };
    UnimodularLattice L(2, gen);
    auto s = systole(L);
    CHECK(s.rho < BigRational(1, 8));
    CHECK(s.length.lower() > BigRational(0));
    CHECK(s.length.width() <= BigRational(BigInt(1), BigInt::pow(BigInt(10), 7UL)) * s.length.lower());
}

TEST_CASE("unimodularity validation") {
    RatMatrix M = rat_identity(2);
    M(0, 0) = BigRational(2);
    CHECK_THROWS_AS(UnimodularLattice::from_exact(M), PreconditionViolated);
    CHECK_THROWS_AS(UnimodularLattice::from_exact(RatMatrix::Zero(2, 2)), RankDeficient);
}

TEST_CASE("quotient distance probe") {
    auto I3 = UnimodularLattice::from_exact(rat_identity(3));
    CHECK(quotient_distance(I3, I3, 1).value == 0.0);

    std::mt19937_64 rng(14);
    RatMatrix B = rat_identity(3);
    B(0, 1) = BigRational(1, 3);
    B(0, 0) = BigRational(3, 2);
    B(2, 2) = BigRational(2, 3);
    auto LB = UnimodularLattice::from_exact(B);
    IntMatrix g = random_unimodular(rng, 3, 6);
    auto LBg = UnimodularLattice::from_exact(RatMatrix(B * to_rationals(g)));
    CHECK(quotient_distance(LB, LBg, 2).value < 1e-9);

    double r1 = quotient_distance(LB, I3, 1).value;
    double r2 = quotient_distance(LB, I3, 2).value;
    CHECK(r2 <= r1);
    CHECK_THROWS_AS(quotient_distance(LB, I3, 0), PreconditionViolated);
}

TEST_CASE("lattice text format round-trips") {
    std::mt19937_64 rng(15);
    std::uniform_int_distribution<int> d(-12, 12);
    RatMatrix M(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) = BigRational(d(rng), 1 + std::abs(d(rng)));
    std::stringstream ss;
    write_lattice_text(ss, M);
    RatMatrix back = read_lattice_text(ss);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(back(i, j) == M(i, j));
    std::stringstream bad("2\n1 2\n3");
    CHECK_THROWS_AS(read_lattice_text(bad), ConfigError);
}
