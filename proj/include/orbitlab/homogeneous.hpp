#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "orbitlab/number_field.hpp"
#include "orbitlab/quartic.hpp"

namespace orbitlab {

/// Positive diagonal determinant-one element, kept in exact log-coordinates
/// (the logs sum to zero by construction, so the product-one constraint is
/// exact and materialization only widens entries, never the invariant).
class DiagonalElement {
  public:
    explicit DiagonalElement(std::vector<BigRational> logs);

    /// a(s) = diag(e^(s/2), 1, ..., 1, e^(-s/2)).
    static DiagonalElement a(int n, const BigRational& s);
    /// Identity element.
    static DiagonalElement identity(int n);
    /// Wall element of N_{1,n}: first and last entries agree; the middle
    /// n-2 log-coordinates are free.
    static DiagonalElement wall(int n, const std::vector<BigRational>& middle_logs);

    int dim() const { return static_cast<int>(logs_.size()); }
    const std::vector<BigRational>& logs() const { return logs_; }
    bool in_wall() const { return logs_.front() == logs_.back(); }

    DiagonalElement operator*(const DiagonalElement& o) const;
    DiagonalElement inverse() const;

    IntervalVector entries(mpfr_prec_t prec) const;
    IntervalMatrix matrix(mpfr_prec_t prec) const;

  private:
    std::vector<BigRational> logs_;
};

/// Corner unipotent h(t) = I + t * E_{1,n}.
IntervalMatrix h_matrix(int n, const RealInterval& t, mpfr_prec_t prec);
IntervalMatrix h_matrix(int n, const BigRational& t, mpfr_prec_t prec);

/// Max |a(s) h(t) - h(e^s t) a(s)| over entries. The identity is exact, so
/// the residual interval straddles zero with width set by the precision.
/// The s argument is a generator so irrational parameters (log 2) certify too.
RealInterval commutation_residual(int n, const std::function<RealInterval(mpfr_prec_t)>& s,
                                  const BigRational& t, mpfr_prec_t prec);
RealInterval commutation_residual(int n, const BigRational& s, const BigRational& t,
                                  mpfr_prec_t prec);

/// A word in the ambient group; factors materialize on demand and multiply
/// at the requested precision. The materialized determinant must enclose 1.
class GroupWord {
  public:
    explicit GroupWord(int n) : n_(n) {}
    int dim() const { return n_; }

    void push_a(const BigRational& s);
    void push_h(const BigRational& t);
    void push_diagonal(const DiagonalElement& d);
    void push_embedding(const NumberField& F);
    void push_exact(const RatMatrix& M);

    size_t size() const { return factors_.size(); }
    const std::string& label(size_t i) const { return factors_[i].first; }

    IntervalMatrix materialize(mpfr_prec_t prec) const;

  private:
    int n_;
    std::vector<std::pair<std::string, std::function<IntervalMatrix(mpfr_prec_t)>>> factors_;
};

/// The base point y = (h(1) g) Z^n for a field instance of degree >= 3.
UnimodularLattice build_y(const NumberField& F);

/// The contracted-side membership decomposition: for s <= 0 and d in the
/// wall N_{1,n}, certifies a(s) d h(1) g = h(e^s) (a(s) d) g entrywise and
/// returns t' = e^s in (0,1] with the torus part a(s) d.
struct KMembership {
    RealInterval t_prime;
    RealInterval residual;
    DiagonalElement torus_part;
};
KMembership k_membership_decompose(const NumberField& F, const BigRational& s,
                                   const DiagonalElement& d, mpfr_prec_t prec = 128);

/// Block-diagonal embedding of a pair.
IntervalMatrix psi_embed(const IntervalMatrix& M1, const IntervalMatrix& M2);

/// (X, Y, t) -> diag(e^(n2 t) X, e^(-n1 t) Y); determinant-one by exponent
/// cancellation.
IntervalMatrix phi_embed(const IntervalMatrix& M1, const IntervalMatrix& M2, const BigRational& t,
                         mpfr_prec_t prec);

/// --- the arithmetic lattice over Z[2^(1/4)] ---

QuarticMatrix sigma_conj_transpose(const QuarticMatrix& M);
QuarticInt det_quartic(const QuarticMatrix& M);

struct SuMembership {
    bool member = false;
    QuarticMatrix gram_residual; // (tM^sigma) M - I; zero iff the form holds
    QuarticInt det;
};
SuMembership su_membership(const QuarticMatrix& M);

/// The pair presentation M = X + t*Y with X, Y over Z[sqrt 2].
struct PairForm {
    QuarticMatrix X;
    QuarticMatrix Y;
};
PairForm pair_form(const QuarticMatrix& M);
QuarticMatrix pair_matrix(const PairForm& p);
/// Group law (X, Y)(X', Y') = (XX' + sqrt2 YY', XY' + YX').
PairForm pair_mul(const PairForm& a, const PairForm& b);

/// det(X + t*Y) split into its even and odd parts P + t*Q over Z[sqrt 2].
std::pair<Sqrt2Int, Sqrt2Int> det_split(const PairForm& p);

struct TwinReport {
    bool relations_ok = false;    // tXX - sqrt2 tYY = I and tXY = tYX, exact
    RealInterval max_modulus;     // largest |tau-twin entry|
    bool bounded = false;         // max_modulus <= 1 + 1e-9
};
/// Checks the conjugate form relations and that the tau-twisted matrix has
/// all entries of modulus at most one (it lands in a compact unitary group).
TwinReport compact_twin_check(const PairForm& p, mpfr_prec_t prec = 128);

/// Generators of the arithmetic group: even permutations and diagonal
/// alpha-blocks diag(..., alpha, ..., sigma(alpha), ...).
QuarticMatrix permutation_matrix(const std::vector<int>& perm);
QuarticMatrix alpha_block(int n, int i, int j, bool inverse = false);
/// A random word in the generator set, membership-verified by construction.
QuarticMatrix random_gamma(int n, std::mt19937_64& rng, int length);

struct InclusionSample {
    QuarticMatrix image;
    SuMembership membership;
};
/// phi(M1, M2, k log alpha) with exact alpha powers: blocks
/// alpha^(n2 k) M1 and sigma(alpha)^(n1 k) M2. Throws MembershipFailure when
/// the image fails the form check.
InclusionSample inclusion_check(const QuarticMatrix& M1, const QuarticMatrix& M2, const BigInt& k);

/// --- experiments over the direct product ---

struct A1Element {
    BigRational s;
    DiagonalElement d1; // wall of N_1 in SL(n1)
    DiagonalElement d2; // wall of N_2 in SL(n2)

    A1Element(BigRational s_, DiagonalElement d1_, DiagonalElement d2_);
    A1Element compose(const A1Element& o) const;
    A1Element inverse() const;
    /// Blocks (a(s) d1, a(-s) d2); the defining product/ratio constraints
    /// hold exactly in log-coordinates and are re-verified here.
    std::pair<IntervalMatrix, IntervalMatrix> materialize(mpfr_prec_t prec) const;
};

struct AvoidanceRow {
    BigRational s;
    int contracted; // 0-based factor whose corner contracts
    BigRational residual_hi;
    BigRational t_prime_hi;
    bool decomposed = false;
};

struct ControlRow {
    BigRational s;
    double net_distance_margin = 0; // statistical: distance to a sampled K-net
};

struct AvoidanceReport {
    unsigned long samples = 0;
    unsigned long decomposed = 0;
    std::vector<AvoidanceRow> rows;
    std::vector<ControlRow> control; // s > 0, first coordinate; statistical only
};

struct AvoidanceSpec {
    BigRational s_min = BigRational(-5);
    BigRational s_max = BigRational(5);
    BigRational s_step = BigRational(1, 2);
    int d_points = 5;                      // per wall dimension
    BigRational d_log_range = BigRational(1); // middle logs range over [-r, r]
    int net_t_points = 3;                  // K-net corner parameter samples
    int net_torus_points = 3;              // K-net torus samples per dimension
    int quotient_radius = 1;
    mpfr_prec_t prec = 128;
};

AvoidanceReport avoidance_experiment(const FieldInstance& inst1, const FieldInstance& inst2,
                                     const AvoidanceSpec& spec, int workers = 1);

struct DensityLevel {
    int grid_per_dim = 0;
    double min_distance = 0;
};

struct DensitySeries {
    int target_index = 0;
    std::vector<DensityLevel> levels;
};

struct DensitySpec {
    BigRational log_range = BigRational(2); // free log-coordinates in [-r, r]
    std::vector<int> levels = {6, 11, 21, 41}; // nested dyadic grids per dim
    int quotient_radius = 1;
};

/// Closest-approach series of the diagonal orbit of y to random targets over
/// nested grids; weakly decreasing per target by construction. Statistical.
std::vector<DensitySeries> density_probe(const FieldInstance& inst,
                                         const std::vector<UnimodularLattice>& targets,
                                         const DensitySpec& spec, int workers = 1);

/// Random unimodular lattice for probe targets: random dyadic entries,
/// determinant normalized away.
UnimodularLattice random_unimodular_lattice(int n, std::mt19937_64& rng);

} // namespace orbitlab
