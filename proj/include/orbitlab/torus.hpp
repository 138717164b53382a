#pragma once

#include <map>
#include <optional>
#include <vector>

#include "orbitlab/interval.hpp"
#include "orbitlab/rational.hpp"

namespace orbitlab {

/// True iff the given integers (> 1) are not all powers of one common integer,
/// i.e. their logarithms span a rational space of dimension >= 2.
bool check_nonlacunary(const std::vector<BigInt>& primes);

/// Smallest integer strictly greater than q*log(p_q)/log(p_1). Decided by
/// certified interval comparison, with the exact power comparison
/// p_1^m > p_q^q as arbiter when the threshold sits on an integer.
BigInt minimal_N(int q, const std::vector<BigInt>& primes);

struct TorusParams {
    int q = 0;
    std::vector<BigInt> primes; // strictly increasing, all > 1
    BigInt N;

    /// Enforces q >= 2, monotone primes > 1, non-lacunarity, and the
    /// exact hypothesis N > q*log(p_q)/log(p_1).
    void validate() const;
};

/// Truncated exact coordinates of the target point: coordinate j < q is
/// sum_{k=1..K} p_j^(-N^(2k)), coordinate j+q uses exponents N^(2k+1).
/// Tail bounds are exact rationals dominating the omitted series tails.
struct TorusPoint {
    TorusParams params;
    long K = 0;
    std::vector<BigRational> coords;      // 2q partial sums, each in (0,1)
    std::vector<BigRational> tail_bounds; // 2q exact upper bounds

    RealInterval coord_interval(int j, mpfr_prec_t prec = RealInterval::kMinPrec) const;
};

TorusPoint make_point(const TorusParams& params, long K);

struct SemigroupElement {
    std::vector<BigInt> exponents; // q nonnegative entries

    BigInt total() const {
        BigInt t(0);
        for (const auto& e : exponents) t += e;
        return t;
    }
};

SemigroupElement semigroup_compose(const SemigroupElement& m, const SemigroupElement& n);

/// One coordinate of an acted point: the exact fractional part of the
/// truncated evaluation plus an exact tail bound. The true fractional part
/// lies in [frac, frac + tail] unless `wrapped` is set (enclosure crosses 1).
struct FracCoordinate {
    BigRational frac;
    BigRational tail;
    bool wrapped = false;
};

struct ActResult {
    std::vector<FracCoordinate> coords; // 2q entries
};

/// Applies z -> p_1^(n_1) ... p_q^(n_q) * z mod Z^(2q), dropping integer
/// terms symbolically before any rational is materialized.
ActResult act(const SemigroupElement& elem, const TorusPoint& point);

/// Same action on bare fractional values (exact); used for the action law.
std::vector<BigRational> act_fractions(const TorusParams& params, const SemigroupElement& elem,
                                       const std::vector<BigRational>& fracs);

/// The proof's coordinate selection: s maximizes p_s^(n_s),
/// k0 = floor(log n_s / (2 log N)); j = s when N^(2k0) <= n_s <= N^(2k0+1),
/// else j = s + q. Indices are 0-based.
struct HittingIndex {
    int j = 0;
    int s = 0;
    BigInt k0;
    bool first_case = true;
    BigRational bound; // 2 * p_s^(N^(2k0+1) * (q - N)), a certified upper bound
};

HittingIndex hitting_index(const TorusParams& params, const SemigroupElement& elem);

struct NondensityRow {
    SemigroupElement elem;
    int j = 0;
    BigRational frac_plus_tail;
    BigRational bound;
    BigRational margin;
    long K_used = 0;
};

struct NondensityReport {
    BigRational eps;
    long window = 0;
    BigInt L;
    unsigned long long checked_count = 0;
    BigRational worst_margin;
    bool all_pass = false;
    std::vector<SemigroupElement> escalated; // elems that needed deeper truncation
    std::vector<NondensityRow> rows;         // populated when keep_rows is set
};

/// Computes the smallest shell threshold L implied by the hitting bound at
/// the target eps, then exhaustively certifies every exponent vector with
/// L <= sum n_i <= L + window: some coordinate's fractional part lies in
/// [0, eps], certified by exact rationals.
NondensityReport verify_nondensity(const TorusParams& params, const BigRational& eps, long window,
                                   bool keep_rows = false, int workers = 1);

struct RelationCandidate {
    std::vector<BigInt> a; // q coefficients on even coordinates
    std::vector<BigInt> b; // q coefficients on odd coordinates
    BigInt c;
};

struct IndependenceResult {
    bool certified = false;
    long H = 0;
    long K_used = 0;
    unsigned long long checked_count = 0;
    BigRational min_abs_lower_bound; // certified lower bound on min |value|
    std::optional<RelationCandidate> counterexample;
    unsigned long long escalated_count = 0;
};

/// Certifies that no nonzero integer relation
/// sum a_i z_i + b_i z_{i+q} = c with all |coefficients| <= H holds,
/// by enclosing every candidate value away from zero. `overrides` replaces
/// coordinates by exact rationals (zero tail) for mutation tests.
/// K_start = 0 lets the proof's decay bound pick the depth.
IndependenceResult certify_no_relation(const TorusParams& params, long H, long K_start = 0,
                                       const std::map<int, BigRational>& overrides = {},
                                       int workers = 1);

/// Truncated coordinate values and tail bounds at depth K with overrides
/// applied; row emission evaluates candidates against this table.
struct RelationTable {
    std::vector<BigRational> values;
    std::vector<BigRational> tails;
};
RelationTable relation_table(const TorusParams& params, long K,
                             const std::map<int, BigRational>& overrides = {});

} // namespace orbitlab
