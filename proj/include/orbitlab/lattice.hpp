#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "orbitlab/eigen_support.hpp"

namespace orbitlab {

/// A point of SL(n,R)/SL(n,Z): a full-rank basis with |det| = 1 within
/// tolerance. Interval entries come from a materializer so they can be
/// regenerated at higher precision when a comparison needs it; bases that
/// are exactly rational keep their exact form and certify exactly.
class UnimodularLattice {
  public:
    using Generator = std::function<IntervalMatrix(mpfr_prec_t)>;

    static BigRational default_det_tol() { return BigRational(BigInt(1), BigInt::pow(BigInt(10), 10UL)); }

    static UnimodularLattice from_exact(RatMatrix basis,
                                        BigRational det_tol = default_det_tol());
    UnimodularLattice(int n, Generator gen, BigRational det_tol = default_det_tol());

    int dim() const { return n_; }
    IntervalMatrix basis(mpfr_prec_t prec) const;
    const std::optional<RatMatrix>& exact_basis() const { return exact_; }

  private:
    UnimodularLattice() = default;
    int n_ = 0;
    Generator gen_;
    std::optional<RatMatrix> exact_;
};

/// Exact-rational LLL on columns. Returns the reduced basis, the integer
/// unimodular transform with reduced = B * T, and the Gram-Schmidt norms of
/// the reduced basis. Throws RankDeficient on rank < n.
struct LLLResult {
    RatMatrix reduced;
    IntMatrix transform;
    std::vector<BigRational> gs_norms2;
};
LLLResult lll_rational(const RatMatrix& B, const BigRational& delta = BigRational(99, 100));

struct ReductionReport {
    IntervalMatrix reduced_basis; // basis * transform
    IntMatrix transform;          // integer, det = +-1
    RatMatrix reduced_surrogate;  // exact reduced midpoint basis
    BigRational delta;
    std::vector<BigRational> gs_norms2;
};

/// LLL reduction of a lattice point; delta must lie in (1/4, 1).
ReductionReport lll_reduce(const UnimodularLattice& L,
                           const BigRational& delta = BigRational(99, 100),
                           mpfr_prec_t prec = 128);

/// Exact shortest nonzero vector of an exact rational basis (complete
/// Fincke-Pohst enumeration after LLL). The returned coordinates are in the
/// original basis.
struct ShortestResult {
    BigRational min_norm2;
    IntVector coords;
};
ShortestResult shortest_vector(const RatMatrix& B);

struct SystoleResult {
    RealInterval length;             // certified enclosure of the systole
    IntVector achieving_vector;      // integer coordinates in the given basis
    BigRational surrogate_min_norm2; // exact lambda_1^2 of the rational surrogate
    BigRational rho;                 // perturbation certificate; 0 on exact bases
};

/// Certified systole via an exact rational surrogate basis plus a norm
/// perturbation bound. Requires n <= 10.
SystoleResult systole(const UnimodularLattice& L,
                      const BigRational& rel_width_target = BigRational(BigInt(1), BigInt::pow(BigInt(10), 8UL)),
                      mpfr_prec_t prec0 = 128);

struct QuotientDistanceResult {
    double value = 0;               // Frobenius upper bound; +inf sentinel when not found
    bool found = false;
    Eigen::MatrixXi gamma;          // minimizer over the searched range
};

/// Upper bound on the quotient distance between two lattice points: both
/// bases are LLL-aligned, then gamma ranges over integer unimodular matrices
/// with entries bounded by search_radius, minimizing ||A*gamma - B||_F.
/// Statistical probe quality (double precision), never a certified quantity.
QuotientDistanceResult quotient_distance(const UnimodularLattice& L1, const UnimodularLattice& L2,
                                         int search_radius);

/// Frobenius norm squared, exact.
BigRational fro_norm2(const RatMatrix& M);

/// Exact inverse; throws RankDeficient.
RatMatrix rat_inverse(const RatMatrix& M);

/// Exact determinant of an integer matrix (Bareiss).
BigInt int_det(const IntMatrix& M);

/// Exact determinant of a rational matrix (fraction-free on the scaled matrix).
BigRational rat_det(const RatMatrix& M);

/// Determinant enclosure of an interval matrix by cofactor expansion (n <= 10).
RealInterval interval_det(const IntervalMatrix& M);

/// Parses the plain-text lattice format: first line n, then n rows of n
/// entries, each an integer, decimal, or ratio a/b.
RatMatrix read_lattice_text(std::istream& in);
void write_lattice_text(std::ostream& out, const RatMatrix& M);

} // namespace orbitlab
