#pragma once

#include <string>
#include <vector>

#include "orbitlab/lattice.hpp"

namespace orbitlab {

/// Element of the field in the power basis (1, theta, ..., theta^(n-1)).
struct FieldElement {
    std::vector<BigRational> coords;
};

/// A monic irreducible totally real integer polynomial together with
/// certified disjoint real-root enclosures (ascending) and its integer
/// discriminant. Compact diagonal orbits are built from its unit lattice.
class NumberField {
  public:
    /// coeffs low-to-high including the leading 1. Checks monic,
    /// irreducible over Q, and totally real; isolates all roots.
    static NumberField create(std::vector<BigInt> coeffs);

    int degree() const { return n_; }
    const std::vector<BigInt>& coeffs() const { return f_; }
    const BigInt& discriminant() const { return disc_; }

    /// Certified enclosure of the j-th root (ascending), width below
    /// 2^(1-prec) * max(1, |root|).
    RealInterval root(int j, mpfr_prec_t prec) const;

    /// sigma_j applied to an element: evaluation at the j-th root.
    RealInterval embed(const FieldElement& e, int j, mpfr_prec_t prec) const;

    FieldElement one() const;
    FieldElement theta() const;
    FieldElement element(std::vector<BigRational> coords) const;
    FieldElement element_int(const std::vector<BigInt>& coords) const;

    FieldElement add(const FieldElement& a, const FieldElement& b) const;
    FieldElement mul(const FieldElement& a, const FieldElement& b) const;

    /// Exact norm via the resultant Res(f, U) (monic f).
    BigRational norm(const FieldElement& e) const;

    bool integral_coords(const FieldElement& e) const;

  private:
    NumberField() = default;
    std::vector<BigInt> f_;
    int n_ = 0;
    BigInt disc_;
    std::vector<std::pair<BigRational, BigRational>> brackets_;
};

/// A verified unit: integer coordinates with exact norm +-1.
struct UnitElement {
    FieldElement element;
    int norm_sign = 0;
};

/// Throws NotAUnit when the exact norm is not +-1.
UnitElement make_unit(const NumberField& F, const std::vector<BigInt>& coords);

/// True for the torsion units of a totally real field, i.e. +-1.
bool is_torsion_unit(const NumberField& F, const UnitElement& u);

struct EmbeddingResult {
    UnimodularLattice lattice;   // rows scaled so |det| = 1
    RealInterval scale;          // |disc|^(-1/(2n))
    IntervalMatrix vandermonde;  // unscaled rows sigma_j(theta^(i-1))
};

/// The Minkowski-style embedding g with rows (sigma_j(theta^(i-1))),
/// scaled by |disc|^(-1/(2n)) to determinant of modulus one.
EmbeddingResult embedding_matrix(const NumberField& F, mpfr_prec_t prec = 128);

struct UnitActionResult {
    IntMatrix M;                      // multiplication by u in the power basis
    BigInt det;                       // exactly +-1
    std::vector<RealInterval> diag;   // sigma_j(u)
    RealInterval residual;            // max |(g M - D g)_ij|, straddles 0
};

/// Certifies the intertwining identity g * M_u = D_u * g.
UnitActionResult unit_action_matrix(const NumberField& F, const UnitElement& u,
                                    mpfr_prec_t prec = 128);

struct WallSeparationRow {
    size_t unit_index = 0;
    int k = 0;
    int l = 0;
    RealInterval separation; // |sigma_k(u) - sigma_l(u)|, certified positive
    bool flagged = false;    // could not be certified before the cap
};

struct WallAvoidanceReport {
    bool certified = false;
    BigRational min_separation;
    size_t skipped_torsion = 0;
    std::vector<WallSeparationRow> rows;
};

/// Certifies pairwise-distinct embeddings for every non-torsion unit:
/// the exactly testable consequence of having no unit inside a diagonal
/// wall. Requires prime degree (the stand-in for having no proper subfield).
WallAvoidanceReport wall_avoidance_check(const NumberField& F,
                                         const std::vector<UnitElement>& units,
                                         const std::vector<std::pair<int, int>>& pairs = {});

/// Certifies that the log-embedding vectors of the units have full rank
/// (unit count), i.e. the units are multiplicatively independent.
bool log_embedding_independent(const NumberField& F, const std::vector<UnitElement>& units);

/// The diagonal translate exp(sum_k t_k * log|sigma_j(u_k)|) applied to the
/// embedding lattice; t parametrizes the fundamental parallelepiped of the
/// supplied units' log-embedding lattice.
UnimodularLattice unit_orbit_lattice(const NumberField& F, const std::vector<UnitElement>& units,
                                     const std::vector<BigRational>& t);

struct CompactOrbitStats {
    BigRational min_systole_lower;
    BigRational max_systole_upper;
    std::vector<BigRational> grid_argmin; // t of the smallest sample
    unsigned long samples = 0;
};

/// Samples systoles over a grid in the units' fundamental parallelepiped;
/// a minimum bounded away from zero evidences a compact orbit.
CompactOrbitStats compact_orbit_probe(const NumberField& F, const std::vector<UnitElement>& units,
                                      const std::vector<int>& grid, int workers = 1,
                                      const BigRational& rel_width =
                                          BigRational(BigInt(1), BigInt::pow(BigInt(10), 6UL)));

/// Built-in field catalog entry; units are power-basis integer coordinates.
struct FieldSpec {
    std::string label;
    std::vector<BigInt> poly;              // low-to-high, monic
    std::vector<std::vector<BigInt>> units;
};

const std::vector<FieldSpec>& builtin_catalog();

/// Instantiates and verifies a catalog entry.
struct FieldInstance {
    FieldSpec spec;
    NumberField field;
    std::vector<UnitElement> units;
};
FieldInstance instantiate(const FieldSpec& spec);

} // namespace orbitlab
