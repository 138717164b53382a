#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "orbitlab/number_field.hpp"

using namespace orbitlab;

namespace {

NumberField cubic81() { return NumberField::create({BigInt(-1), BigInt(-3), BigInt(0), BigInt(1)}); }
NumberField sqrt2_field() { return NumberField::create({BigInt(-2), BigInt(0), BigInt(1)}); }

} // namespace

TEST_CASE("field construction: discriminants and certified roots") {
    NumberField F = cubic81();
    CHECK(F.degree() == 3);
    CHECK(F.discriminant() == BigInt(81));

    NumberField F49 = NumberField::create({BigInt(1), BigInt(-2), BigInt(-1), BigInt(1)});
    CHECK(F49.discriminant() == BigInt(49));
    CHECK(sqrt2_field().discriminant() == BigInt(8));

    // Roots ascend and lie where a double root-finder puts them.
    double expected[] = {-1.532088886237956, -0.347296355333861, 1.879385241571817};
    for (int j = 0; j < 3; ++j) {
        RealInterval r = F.root(j, 96);
        CHECK(r.lower().to_double() == doctest::Approx(expected[j]).epsilon(1e-12));
        CHECK(r.width() < BigRational(BigInt(1), BigInt::pow(BigInt(2), 90UL)));
    }
}

TEST_CASE("degenerate inputs are rejected at construction") {
    CHECK_THROWS_AS(NumberField::create({BigInt(-1), BigInt(0), BigInt(1)}), PreconditionViolated); // x^2-1
    CHECK_THROWS_AS(NumberField::create({BigInt(1), BigInt(0), BigInt(1)}), PreconditionViolated);  // x^2+1
    CHECK_THROWS_AS(NumberField::create({BigInt(2), BigInt(0), BigInt(2)}), PreconditionViolated);  // not monic
    CHECK_THROWS_AS(NumberField::create({BigInt(3), BigInt(1)}), PreconditionViolated);             // degree 1
    // x^4 - 10x^2 + 1 is irreducible and totally real; construction succeeds.
    NumberField biquad = NumberField::create({BigInt(1), BigInt(0), BigInt(-10), BigInt(0), BigInt(1)});
    CHECK(biquad.degree() == 4);
}

TEST_CASE("field arithmetic and norms") {
    NumberField F = cubic81();
    FieldElement th = F.theta();
    FieldElement th2 = F.mul(th, th);
    CHECK(th2.coords[2] == BigRational(1));
    // theta^3 = 3 theta + 1
    FieldElement th3 = F.mul(th2, th);
    CHECK(th3.coords[0] == BigRational(1));
    CHECK(th3.coords[1] == BigRational(3));
    CHECK(th3.coords[2] == BigRational(0));

    CHECK(F.norm(th) == BigRational(1));
    CHECK(F.norm(F.one()) == BigRational(1));
    CHECK(F.norm(F.element_int({BigInt(-1), BigInt(1), BigInt(0)})) == BigRational(3));

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long> d(-4, 4);
    for (int i = 0; i < 50; ++i) {
        FieldElement a = F.element({BigRational(d(rng)), BigRational(d(rng)), BigRational(d(rng))});
        FieldElement b = F.element({BigRational(d(rng)), BigRational(d(rng)), BigRational(d(rng))});
        CHECK(F.norm(F.mul(a, b)) == F.norm(a) * F.norm(b));
    }
}

TEST_CASE("units: exact norm gate and embedding product") {
    NumberField F = cubic81();
    UnitElement theta = make_unit(F, {BigInt(0), BigInt(1), BigInt(0)});
    UnitElement thp1 = make_unit(F, {BigInt(1), BigInt(1), BigInt(0)});
    CHECK(theta.norm_sign == 1);
    CHECK(thp1.norm_sign == -1);
    CHECK_THROWS_AS(make_unit(F, {BigInt(-1), BigInt(1), BigInt(0)}), NotAUnit); // theta - 1 has norm 3
    CHECK_THROWS_AS(make_unit(F, {BigInt(2), BigInt(0), BigInt(0)}), NotAUnit);

    // Product of all embeddings encloses the exact norm.
    for (const UnitElement& u : {theta, thp1}) {
        RealInterval prod = RealInterval(1);
        for (int j = 0; j < 3; ++j) prod *= F.embed(u.element, j, 128);
        CHECK(prod.contains(BigRational(u.norm_sign)));
    }

    CHECK(is_torsion_unit(F, make_unit(F, {BigInt(-1), BigInt(0), BigInt(0)})));
    CHECK_FALSE(is_torsion_unit(F, theta));
}

TEST_CASE("embedding matrix: Vandermonde determinant and unit covolume") {
    NumberField F = cubic81();
    EmbeddingResult emb = embedding_matrix(F, 128);
    RealInterval vdet = interval_det(emb.vandermonde);
    CHECK(vdet.contains(BigRational(9))); // sqrt(disc) = 9 for the ascending order
    CHECK(interval_det(emb.lattice.basis(160)).abs().contains(BigRational(1)));
    // First column of the unscaled matrix embeds the element 1.
    for (int j = 0; j < 3; ++j) CHECK(emb.vandermonde(j, 0) == RealInterval(1));

    NumberField F2 = sqrt2_field();
    EmbeddingResult emb2 = embedding_matrix(F2, 128);
    RealInterval vdet2 = interval_det(emb2.vandermonde).abs();
    RealInterval expected = RealInterval::exact(BigRational(8), 128).sqrt(); // 2 sqrt 2
    CHECK(vdet2.intersects(expected));
}

TEST_CASE("unit action: companion matrix, intertwining residual, multiplicativity") {
    NumberField F = cubic81();
    UnitElement theta = make_unit(F, {BigInt(0), BigInt(1), BigInt(0)});
    UnitActionResult act = unit_action_matrix(F, theta, 128);
    IntMatrix expected(3, 3);
    expected << BigInt(0), BigInt(0), BigInt(1),
                BigInt(1), BigInt(0), BigInt(3),
                BigInt(0), BigInt(1), BigInt(0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(act.M(i, j) == expected(i, j));
    CHECK(act.det == BigInt(1));
    CHECK(act.residual.upper() < BigRational(BigInt(1), BigInt::pow(BigInt(10), 10UL)));

    UnitElement one = make_unit(F, {BigInt(1), BigInt(0), BigInt(0)});
    UnitActionResult id = unit_action_matrix(F, one, 96);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(id.M(i, j) == BigInt(i == j ? 1 : 0));

    // M_{theta^2} = M_theta^2, with norm 1 and determinant 1.
    FieldElement th2 = F.mul(theta.element, theta.element);
    std::vector<BigInt> c2;
    for (const auto& c : th2.coords) c2.push_back(c.numerator());
    UnitElement sq = make_unit(F, c2);
    UnitActionResult act2 = unit_action_matrix(F, sq, 96);
    IntMatrix prod = act.M * act.M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(act2.M(i, j) == prod(i, j));
}

TEST_CASE("wall avoidance: certified distinct embeddings, torsion filtered") {
    NumberField F = cubic81();
    UnitElement theta = make_unit(F, {BigInt(0), BigInt(1), BigInt(0)});
    UnitElement thp1 = make_unit(F, {BigInt(1), BigInt(1), BigInt(0)});
    UnitElement minus_one = make_unit(F, {BigInt(-1), BigInt(0), BigInt(0)});
    WallAvoidanceReport rep = wall_avoidance_check(F, {theta, thp1, minus_one});
    CHECK(rep.certified);
    CHECK(rep.skipped_torsion == 1);
    CHECK(rep.rows.size() == 6);
    CHECK(rep.min_separation > BigRational(1));
    for (const auto& row : rep.rows) CHECK_FALSE(row.flagged);

    // Composite degree is rejected up front, not probed. theta itself is a
    // unit there (constant coefficient 1).
    NumberField biquad = NumberField::create({BigInt(1), BigInt(0), BigInt(-10), BigInt(0), BigInt(1)});
    UnitElement u = make_unit(biquad, {BigInt(0), BigInt(1), BigInt(0), BigInt(0)});
    CHECK_THROWS_AS(wall_avoidance_check(biquad, {u}), PreconditionViolated);
}

TEST_CASE("log-embedding independence") {
    NumberField F = cubic81();
    UnitElement theta = make_unit(F, {BigInt(0), BigInt(1), BigInt(0)});
    UnitElement thp1 = make_unit(F, {BigInt(1), BigInt(1), BigInt(0)});
    CHECK(log_embedding_independent(F, {theta, thp1}));
    // theta and theta^2 are dependent: the minors all vanish, so the rank
    // certification cannot succeed; expect the cap (bounded for the test).
    FieldElement th2 = F.mul(theta.element, theta.element);
    std::vector<BigInt> c2;
    for (const auto& c : th2.coords) c2.push_back(c.numerator());
    UnitElement sq = make_unit(F, c2);
    mpfr_prec_t old_cap = precision_cap();
    set_precision_cap(512);
    CHECK_FALSE(log_embedding_independent(F, {theta, sq}));
    set_precision_cap(old_cap);
}

TEST_CASE("compact orbit probe: base point, sweep cross-check, unit invariance") {
    NumberField F2 = sqrt2_field();
    UnitElement fund = make_unit(F2, {BigInt(1), BigInt(1)});

    CompactOrbitStats base = compact_orbit_probe(F2, {fund}, {1});
    auto direct = systole(embedding_matrix(F2, 128).lattice);
    CHECK(base.samples == 1);
    CHECK(base.min_systole_lower <= direct.length.lower());
    CHECK(base.max_systole_upper >= direct.length.upper());

    // Grid probe equals a manual one-parameter sweep.
    CompactOrbitStats sweep = compact_orbit_probe(F2, {fund}, {8});
    BigRational manual_min;
    bool first = true;
    for (int k = 0; k < 8; ++k) {
        auto L = unit_orbit_lattice(F2, {fund}, {BigRational(k, 8)});
        BigRational lo = systole(L).length.lower();
        if (first || lo < manual_min) {
            manual_min = lo;
            first = false;
        }
    }
    CHECK(sweep.min_systole_lower == manual_min);
    CHECK(sweep.min_systole_lower > BigRational(0));

    // Unit translation leaves the systole unchanged within certification.
    NumberField F = cubic81();
    UnitElement theta = make_unit(F, {BigInt(0), BigInt(1), BigInt(0)});
    UnitElement thp1 = make_unit(F, {BigInt(1), BigInt(1), BigInt(0)});
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<long> d(0, 15);
    for (int unit_idx = 0; unit_idx < 2; ++unit_idx) {
        for (int i = 0; i < 10; ++i) {
            std::vector<BigRational> t{BigRational(d(rng), 16), BigRational(d(rng), 16)};
            std::vector<BigRational> shifted = t;
            shifted[static_cast<size_t>(unit_idx)] += BigRational(1);
            auto s1 = systole(unit_orbit_lattice(F, {theta, thp1}, t));
            auto s2 = systole(unit_orbit_lattice(F, {theta, thp1}, shifted));
            CHECK(s1.length.intersects(s2.length));
            CHECK(s1.length.width() <=
                  BigRational(BigInt(1), BigInt::pow(BigInt(10), 5UL)) * s1.length.lower());
        }
    }
}

TEST_CASE("builtin catalog instantiates with verified units") {
    for (const auto& spec : builtin_catalog()) {
        FieldInstance inst = instantiate(spec);
        CHECK(inst.units.size() == spec.units.size());
        CHECK(inst.field.degree() + 1 == static_cast<int>(spec.poly.size()));
        CHECK(inst.units.size() == static_cast<size_t>(inst.field.degree() - 1));
        CHECK(log_embedding_independent(inst.field, inst.units));
    }
}
