#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "orbitlab/homogeneous.hpp"

using namespace orbitlab;

namespace {

const BigRational kTol12(BigInt(1), BigInt::pow(BigInt(10), 12UL));

FieldInstance cubic_instance() { return instantiate(builtin_catalog()[0]); }

QuarticMatrix quartic_from(std::initializer_list<std::initializer_list<long>> rows) {
    int n = static_cast<int>(rows.size());
    QuarticMatrix m(n, n);
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (long v : row) m(i, j++) = QuarticInt(v);
        ++i;
    }
    return m;
}

} // namespace

TEST_CASE("diagonal elements: exact log bookkeeping") {
    DiagonalElement a = DiagonalElement::a(4, BigRational(3, 2));
    CHECK(a.logs().front() == BigRational(3, 4));
    CHECK(a.logs().back() == BigRational(-3, 4));
    DiagonalElement w = DiagonalElement::wall(4, {BigRational(1), BigRational(-3)});
    CHECK(w.in_wall());
    CHECK(w.logs().front() == BigRational(1));
    CHECK((a * w).logs().front() == BigRational(7, 4));
    CHECK((w * w.inverse()).logs() == DiagonalElement::identity(4).logs());
    CHECK_THROWS_AS(DiagonalElement({BigRational(1), BigRational(0)}), PreconditionViolated);

    IntervalMatrix m = w.matrix(96);
    RealInterval det = interval_det(m);
    CHECK(det.contains(BigRational(1)));
}

TEST_CASE("commutation identity a(s) h(t) = h(e^s t) a(s)") {
    // s = log 2 doubles the corner exactly.
    auto slog2 = [](mpfr_prec_t p) { return interval_log(BigRational(2), p); };
    CHECK(commutation_residual(3, slog2, BigRational(1), 128).upper() < kTol12);
    // s = 0 degenerates to equality of identical products.
    CHECK(commutation_residual(3, BigRational(0), BigRational(5, 2), 128).upper().is_zero());

    std::mt19937_64 rng(21);
    std::uniform_int_distribution<long> d(-24, 24);
    for (int i = 0; i < 25; ++i) {
        BigRational s(d(rng), 8), t(d(rng), 8);
        CHECK(commutation_residual(4, s, t, 128).upper() < kTol12);
    }
}

TEST_CASE("group words materialize with certified determinant") {
    FieldInstance inst = cubic_instance();
    GroupWord w(3);
    w.push_a(BigRational(1, 2));
    w.push_h(BigRational(1));
    w.push_embedding(inst.field);
    IntervalMatrix m = w.materialize(128);
    CHECK(m.rows() == 3);
    CHECK(w.size() == 3);
    CHECK(w.label(0) == "a(1/2)");

    GroupWord degenerate(3);
    degenerate.push_h(BigRational(0));
    degenerate.push_embedding(inst.field);
    IntervalMatrix lhs = degenerate.materialize(128);
    IntervalMatrix g = embedding_matrix(inst.field, 128).lattice.basis(128);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK((lhs(i, j) - g(i, j)).contains_zero());
}

TEST_CASE("base point y = h(1) g is unimodular with recorded systole") {
    FieldInstance inst = cubic_instance();
    UnimodularLattice y = build_y(inst.field);
    auto s = systole(y);
    CHECK(s.length.lower() > BigRational(0));
    CHECK(interval_det(y.basis(160)).abs().contains(BigRational(1)));
}

TEST_CASE("K-membership decomposition on the contracted side") {
    FieldInstance inst = cubic_instance();
    KMembership km0 = k_membership_decompose(inst.field, BigRational(0), DiagonalElement::identity(3));
    CHECK(km0.t_prime.lower() == BigRational(1));
    CHECK(km0.t_prime.upper() == BigRational(1));
    CHECK(km0.residual.upper() < kTol12);

    KMembership km = k_membership_decompose(inst.field, BigRational(-1), DiagonalElement::identity(3));
    CHECK(km.t_prime.upper() <= BigRational(1));
    CHECK(km.t_prime.lower() > BigRational(0));
    CHECK(km.t_prime.upper().to_double() == doctest::Approx(0.3678794411714423).epsilon(1e-12));
    CHECK(km.residual.upper() < kTol12);

    std::mt19937_64 rng(23);
    std::uniform_int_distribution<long> d(-40, 0);
    std::uniform_int_distribution<long> md(-8, 8);
    for (int i = 0; i < 30; ++i) {
        BigRational s(d(rng), 4);
        DiagonalElement w = DiagonalElement::wall(3, {BigRational(md(rng), 4)});
        KMembership k = k_membership_decompose(inst.field, s, w);
        CHECK(k.residual.upper() < kTol12);
        CHECK(k.t_prime.upper() <= BigRational(1));
        CHECK(k.t_prime.lower() > BigRational(0));
        CHECK(k.torus_part.logs()[1] == w.logs()[1]);
    }

    CHECK_THROWS_AS(k_membership_decompose(inst.field, BigRational(1), DiagonalElement::identity(3)),
                    PreconditionViolated);
    DiagonalElement off({BigRational(1), BigRational(0), BigRational(-1)});
    CHECK_THROWS_AS(k_membership_decompose(inst.field, BigRational(-1), off), PreconditionViolated);
}

TEST_CASE("deep contraction stays above the sampled torus minimum") {
    // Statistical cross-check: at s = -10 the corner factor is essentially
    // the identity, so the systole of the decomposed point should sit near
    // the compact orbit's sampled minimum (grid minimum, hence the slack).
    FieldInstance inst = cubic_instance();
    CompactOrbitStats stats = compact_orbit_probe(inst.field, inst.units, {6, 6});
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<long> md(-6, 6);
    for (int i = 0; i < 5; ++i) {
        DiagonalElement w = DiagonalElement::wall(3, {BigRational(md(rng), 4)});
        DiagonalElement torus = DiagonalElement::a(3, BigRational(-10)) * w;
        auto gen = [&inst, torus](mpfr_prec_t p) {
            IntervalMatrix g = embedding_matrix(inst.field, p).lattice.basis(p);
            return IntervalMatrix(h_matrix(3, interval_exp(BigRational(-10), p), p) *
                                  torus.matrix(p) * g);
        };
        UnimodularLattice point(3, gen);
        auto s = systole(point);
        CHECK(s.length.upper() > stats.min_systole_lower * BigRational(3, 4));
    }
}

TEST_CASE("psi and phi embeddings are homomorphisms with determinant one") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> pick(0, 2), coef(-2, 2);
    auto random_sl = [&](int n) {
        RatMatrix T = rat_identity(n);
        for (int s = 0; s < 12; ++s) {
            int i = pick(rng) % n, j = pick(rng) % n;
            if (i == j) continue;
            BigRational c(coef(rng));
            for (int r = 0; r < n; ++r) T(r, j) += c * T(r, i);
        }
        return T;
    };
    for (int trial = 0; trial < 20; ++trial) {
        RatMatrix x1 = random_sl(3), y1 = random_sl(3);
        RatMatrix x2 = random_sl(2), y2 = random_sl(2);
        IntervalMatrix lhs =
            psi_embed(to_intervals(RatMatrix(x1 * y1)), to_intervals(RatMatrix(x2 * y2)));
        IntervalMatrix rhs = psi_embed(to_intervals(x1), to_intervals(x2)) *
                             psi_embed(to_intervals(y1), to_intervals(y2));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) CHECK((lhs(i, j) - rhs(i, j)).contains_zero());
    }
    // Identity block assembly and exponent cancellation.
    IntervalMatrix I3 = interval_identity(3), I2 = interval_identity(2);
    IntervalMatrix psi = psi_embed(I3, I2);
    CHECK(interval_det(psi).contains(BigRational(1)));
    for (const BigRational& t : {BigRational(1, 3), BigRational(-7, 5)}) {
        IntervalMatrix phi = phi_embed(I3, I2, t, 128);
        CHECK(interval_det(phi).contains(BigRational(1)));
    }
}

TEST_CASE("su membership: identity, alpha blocks, unipotent witness") {
    CHECK(su_membership(quartic_identity(4)).member);
    for (int n : {4, 6}) {
        QuarticMatrix blk = alpha_block(n, 0, n - 1);
        CHECK(su_membership(blk).member);
    }
    QuarticMatrix h = quartic_identity(4);
    h(0, 3) = QuarticInt(1);
    SuMembership sm = su_membership(h);
    CHECK_FALSE(sm.member);
    CHECK(sm.gram_residual(0, 3) == QuarticInt(1));
    CHECK(sm.gram_residual(3, 0) == QuarticInt(1));
    CHECK(sm.gram_residual(3, 3) == QuarticInt(1));
}

TEST_CASE("arithmetic group closure under products of generators") {
    std::mt19937_64 rng(37);
    for (int i = 0; i < 100; ++i) {
        QuarticMatrix a = random_gamma(4, rng, 3);
        QuarticMatrix b = random_gamma(4, rng, 3);
        CHECK(su_membership(QuarticMatrix(a * b)).member);
    }
}

TEST_CASE("pair presentation: split, group law, determinant split") {
    std::mt19937_64 rng(41);
    QuarticMatrix g1 = random_gamma(3, rng, 5);
    QuarticMatrix g2 = random_gamma(3, rng, 5);
    PairForm p1 = pair_form(g1), p2 = pair_form(g2);

    // Split is exact and invertible.
    QuarticMatrix back = pair_matrix(p1);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(back(i, j) == g1(i, j));

    // The pair group law agrees with matrix multiplication.
    PairForm prod = pair_mul(p1, p2);
    PairForm direct = pair_form(QuarticMatrix(g1 * g2));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(prod.X(i, j) == direct.X(i, j));
            CHECK(prod.Y(i, j) == direct.Y(i, j));
        }

    // det(X + tY) = P + tQ coordinatewise; members give P = 1, Q = 0.
    auto [P, Q] = det_split(p1);
    QuarticInt recombined = P.to_quartic() + QuarticInt::t() * Q.to_quartic();
    CHECK(recombined == det_quartic(pair_matrix(p1)));
    CHECK(P == Sqrt2Int(1));
    CHECK(Q.is_zero());

    // 1x1 cases: X = I, Y = 0 and X = 0, Y = 1.
    PairForm one{quartic_identity(1), QuarticMatrix::Zero(1, 1)};
    auto [P1, Q1] = det_split(one);
    CHECK(P1 == Sqrt2Int(1));
    CHECK(Q1.is_zero());
    PairForm tform{QuarticMatrix::Zero(1, 1), quartic_identity(1)};
    auto [P2, Q2] = det_split(tform);
    CHECK(P2.is_zero());
    CHECK(Q2 == Sqrt2Int(1));
}

TEST_CASE("compact twin: relations, modulus bound, corruption detected") {
    TwinReport id = compact_twin_check(pair_form(quartic_identity(3)));
    CHECK(id.relations_ok);
    CHECK(id.bounded);
    CHECK(id.max_modulus.upper() <= BigRational(1));

    QuarticMatrix blk = alpha_block(4, 1, 2);
    TwinReport tw = compact_twin_check(pair_form(blk));
    CHECK(tw.relations_ok);
    CHECK(tw.bounded);

    std::mt19937_64 rng(43);
    QuarticMatrix g = random_gamma(4, rng, 6);
    PairForm corrupted = pair_form(g);
    corrupted.X(0, 0) += QuarticInt(1);
    TwinReport bad = compact_twin_check(corrupted);
    CHECK_FALSE(bad.relations_ok);
    CHECK_FALSE(bad.bounded);
}

TEST_CASE("inclusion samples: exact alpha powers land in the group") {
    QuarticMatrix I3 = quartic_identity(3);
    InclusionSample base = inclusion_check(I3, I3, BigInt(0));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            CHECK(base.image(i, j) == (i == j ? QuarticInt(1) : QuarticInt(0)));

    InclusionSample one = inclusion_check(I3, I3, BigInt(1));
    CHECK(one.membership.member);
    CHECK(one.image(0, 0) == quartic_alpha().pow(3));
    CHECK(one.image(3, 3) == sigma(quartic_alpha()).pow(3));

    // Even permutation block.
    QuarticMatrix perm = permutation_matrix({1, 2, 0});
    CHECK(su_membership(perm).member);
    InclusionSample p = inclusion_check(perm, I3, BigInt(0));
    CHECK(p.membership.member);

    std::mt19937_64 rng(47);
    for (int i = 0; i < 10; ++i) {
        QuarticMatrix m1 = random_gamma(3, rng, 4);
        QuarticMatrix m2 = random_gamma(3, rng, 4);
        InclusionSample s = inclusion_check(m1, m2, BigInt(static_cast<long>(i) - 5));
        CHECK(s.membership.member);
    }

    // Unverified inputs are refused.
    QuarticMatrix bad = quartic_identity(3);
    bad(0, 2) = QuarticInt(1);
    CHECK_THROWS_AS(inclusion_check(bad, I3, BigInt(1)), PreconditionViolated);
}

TEST_CASE("A1 elements: constraints, closure, inverse") {
    A1Element e(BigRational(3, 2), DiagonalElement::wall(3, {BigRational(1, 2)}),
                DiagonalElement::wall(3, {BigRational(-1, 4)}));
    auto [b1, b2] = e.materialize(96);
    CHECK(interval_det(b1).contains(BigRational(1)));
    CHECK(interval_det(b2).contains(BigRational(1)));
    // Ratio constraint a_1 b_1 / (a_{n1} b_{n2}) = 1, checked on entries.
    RealInterval ratio = (b1(0, 0) * b2(0, 0)) / (b1(2, 2) * b2(2, 2));
    CHECK(ratio.contains(BigRational(1)));

    A1Element f(BigRational(-1), DiagonalElement::wall(3, {BigRational(2)}),
                DiagonalElement::wall(3, {BigRational(0)}));
    A1Element g = e.compose(f);
    CHECK(g.s == BigRational(1, 2));
    CHECK(g.d1.in_wall());
    A1Element inv = g.compose(g.inverse());
    CHECK(inv.s.is_zero());
    for (const auto& l : inv.d1.logs()) CHECK(l.is_zero());

    CHECK_THROWS_AS(A1Element(BigRational(1), DiagonalElement::a(3, BigRational(1)),
                              DiagonalElement::identity(3)),
                    PreconditionViolated);
}

TEST_CASE("avoidance experiment: full decomposition and statistical control") {
    FieldInstance inst = cubic_instance();
    AvoidanceSpec spec;
    spec.s_min = BigRational(-2);
    spec.s_max = BigRational(2);
    spec.s_step = BigRational(1);
    spec.d_points = 3;
    spec.net_t_points = 2;
    spec.net_torus_points = 2;
    AvoidanceReport rep = avoidance_experiment(inst, inst, spec, 2);
    CHECK(rep.samples == 5 * 3 * 3);
    CHECK(rep.decomposed == rep.samples);
    CHECK(rep.control.size() == 2); // s in {1, 2}
    for (const auto& c : rep.control) {
        CHECK(c.s.sign() > 0);
        CHECK(c.net_distance_margin > 0);
    }
}

TEST_CASE("density probe: nested grids give weakly decreasing minima") {
    FieldInstance inst = cubic_instance();
    std::mt19937_64 rng(53);
    std::vector<UnimodularLattice> targets;
    targets.push_back(random_unimodular_lattice(3, rng));
    targets.push_back(random_unimodular_lattice(3, rng));
    DensitySpec spec;
    spec.levels = {3, 5, 9};
    spec.log_range = BigRational(3, 2);
    auto series = density_probe(inst, targets, spec, 2);
    REQUIRE(series.size() == 2);
    for (const auto& s : series) {
        REQUIRE(s.levels.size() == 3);
        CHECK(s.levels[1].min_distance <= s.levels[0].min_distance);
        CHECK(s.levels[2].min_distance <= s.levels[1].min_distance);
    }
    DensitySpec bad;
    bad.levels = {3, 6};
    CHECK_THROWS_AS(density_probe(inst, targets, bad, 1), PreconditionViolated);
}

TEST_CASE("quartic determinant expansion sanity") {
    QuarticMatrix m = quartic_from({{2, 1}, {1, 1}});
    CHECK(det_quartic(m) == QuarticInt(1));
    QuarticMatrix t(2, 2);
    t(0, 0) = QuarticInt::t();
    t(1, 1) = QuarticInt::t();
    t(0, 1) = QuarticInt(0);
    t(1, 0) = QuarticInt(0);
    CHECK(det_quartic(t) == QuarticInt::sqrt2());
}
