#include "orbitlab/torus.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "orbitlab/parallel.hpp"

namespace orbitlab {

namespace {

/// All integers b >= 2 with b^k == v for some k >= 1.
std::vector<BigInt> integer_root_bases(const BigInt& v) {
    std::vector<BigInt> bases;
    unsigned long max_k = static_cast<unsigned long>(v.bit_length());
    for (unsigned long k = 1; k <= max_k; ++k) {
        auto r = BigInt::exact_root(v, k);
        if (r && *r >= BigInt(2)) bases.push_back(*r);
    }
    return bases;
}

bool is_power_of(const BigInt& v, const BigInt& base) {
    BigInt cur(1);
    while (cur < v) cur *= base;
    return cur == v;
}

} // namespace

bool check_nonlacunary(const std::vector<BigInt>& primes) {
    for (const auto& p : primes)
        if (p <= BigInt(1)) throw PreconditionViolated("check_nonlacunary: generators must exceed 1");
    if (primes.size() < 2) return false;
    for (const auto& base : integer_root_bases(primes.front())) {
        bool all = true;
        for (const auto& p : primes)
            if (!is_power_of(p, base)) {
                all = false;
                break;
            }
        if (all) return false;
    }
    return true;
}

BigInt minimal_N(int q, const std::vector<BigInt>& primes) {
    if (q < 1 || primes.empty()) throw PreconditionViolated("minimal_N: empty generator list");
    const BigInt& p1 = primes.front();
    const BigInt& pq = primes.back();
    if (p1 <= BigInt(1)) throw PreconditionViolated("minimal_N: generators must exceed 1");

    // Certified interval route first.
    for (mpfr_prec_t prec = RealInterval::kMinPrec; prec <= 1024; prec *= 2) {
        RealInterval ratio = interval_log(BigRational(pq), prec) * RealInterval(q) /
                             interval_log(BigRational(p1), prec);
        BigInt flo = ratio.lower().floor();
        BigInt fhi = ratio.upper().floor();
        if (flo == fhi) {
            // Could still be exactly the integer flo (interval cannot tell
            // apart ratio == flo from ratio slightly above); both give the
            // same strict threshold unless ratio == fhi + something... The
            // strict "greater than" target is floor(ratio) + 1 in all cases,
            // which is safe only if ratio is not exactly fhi+1-eps... decide
            // exactly below when the interval touches an integer.
            if (!ratio.contains(BigRational(flo)) && !ratio.contains(BigRational(fhi + BigInt(1))))
                return flo + BigInt(1);
        }
    }

    // Exact arbiter: smallest m with p1^m > pq^q.
    BigInt target = BigInt::pow(pq, static_cast<unsigned long>(q));
    BigInt m(1);
    BigInt cur = p1;
    while (cur <= target) {
        cur *= p1;
        m += BigInt(1);
    }
    return m;
}

void TorusParams::validate() const {
    if (q < 2) throw PreconditionViolated("TorusParams: q >= 2 required");
    if (primes.size() != static_cast<size_t>(q))
        throw PreconditionViolated("TorusParams: prime list size must equal q");
    for (size_t i = 0; i < primes.size(); ++i) {
        if (primes[i] <= BigInt(1)) throw PreconditionViolated("TorusParams: generators must exceed 1");
        if (i > 0 && !(primes[i - 1] < primes[i]))
            throw PreconditionViolated("TorusParams: generators must be strictly increasing");
    }
    if (!check_nonlacunary(primes))
        throw PreconditionViolated("TorusParams: generators are all powers of one integer (lacunary)");
    BigInt threshold = minimal_N(q, primes);
    if (N < threshold) {
        std::ostringstream os;
        os << "TorusParams: N = " << N << " violates the hypothesis N > q*log(p_q)/log(p_1);"
           << " smallest admissible N is " << threshold;
        throw PreconditionViolated(os.str());
    }
}

namespace {

/// N^e as an exponent value; guarded by BigInt::pow's materialization check.
BigInt n_power(const BigInt& N, long e) { return BigInt::pow(N, BigInt(e)); }

/// 2 * p^(-E) for E >= 1, the geometric-domination tail bound.
BigRational tail_bound_term(const BigInt& p, const BigInt& E) {
    return BigRational(BigInt(2)) * BigRational::int_pow(p, -E);
}

} // namespace

TorusPoint make_point(const TorusParams& params, long K) {
    params.validate();
    if (K < 1) throw PreconditionViolated("make_point: K >= 1 required");
    TorusPoint pt;
    pt.params = params;
    pt.K = K;
    pt.coords.resize(static_cast<size_t>(2 * params.q));
    pt.tail_bounds.resize(static_cast<size_t>(2 * params.q));
    for (int j = 0; j < params.q; ++j) {
        const BigInt& p = params.primes[static_cast<size_t>(j)];
        BigRational even_sum(0), odd_sum(0);
        for (long k = 1; k <= K; ++k) {
            even_sum += BigRational::int_pow(p, -n_power(params.N, 2 * k));
            odd_sum += BigRational::int_pow(p, -n_power(params.N, 2 * k + 1));
        }
        pt.coords[static_cast<size_t>(j)] = even_sum;
        pt.coords[static_cast<size_t>(j + params.q)] = odd_sum;
        pt.tail_bounds[static_cast<size_t>(j)] = tail_bound_term(p, n_power(params.N, 2 * K + 2));
        pt.tail_bounds[static_cast<size_t>(j + params.q)] =
            tail_bound_term(p, n_power(params.N, 2 * K + 3));
    }
    return pt;
}

RealInterval TorusPoint::coord_interval(int j, mpfr_prec_t prec) const {
    const auto& v = coords.at(static_cast<size_t>(j));
    return RealInterval::hull(v, v + tail_bounds.at(static_cast<size_t>(j)), prec);
}

SemigroupElement semigroup_compose(const SemigroupElement& m, const SemigroupElement& n) {
    if (m.exponents.size() != n.exponents.size())
        throw PreconditionViolated("semigroup_compose: size mismatch");
    SemigroupElement out;
    out.exponents.reserve(m.exponents.size());
    for (size_t i = 0; i < m.exponents.size(); ++i) {
        if (m.exponents[i].sign() < 0 || n.exponents[i].sign() < 0)
            throw PreconditionViolated("semigroup_compose: exponents must be nonnegative");
        out.exponents.push_back(m.exponents[i] + n.exponents[i]);
    }
    return out;
}

namespace {

BigInt multiplier(const TorusParams& params, const SemigroupElement& elem) {
    BigInt m(1);
    for (int i = 0; i < params.q; ++i)
        m *= BigInt::pow(params.primes[static_cast<size_t>(i)], elem.exponents[static_cast<size_t>(i)]);
    return m;
}

/// Multiplier with prime j left out, i.e. prod_{i != j} p_i^{n_i}.
BigInt multiplier_without(const TorusParams& params, const SemigroupElement& elem, int j) {
    BigInt m(1);
    for (int i = 0; i < params.q; ++i) {
        if (i == j) continue;
        m *= BigInt::pow(params.primes[static_cast<size_t>(i)], elem.exponents[static_cast<size_t>(i)]);
    }
    return m;
}

FracCoordinate act_coordinate(const SemigroupElement& elem, const TorusPoint& point, int coord) {
    const TorusParams& params = point.params;
    int base_idx = coord % params.q;
    bool odd_series = coord >= params.q;
    const BigInt& p = params.primes[static_cast<size_t>(base_idx)];
    const BigInt& nj = elem.exponents[static_cast<size_t>(base_idx)];
    BigInt cofactor = multiplier_without(params, elem, base_idx);

    // Term k of the series scales to p^(n_j - E_k) * cofactor; exponent
    // subtraction happens before any value is materialized, and terms with
    // nonnegative exponent are integers mod 1 and are never formed.
    BigRational sum(0);
    for (long k = 1; k <= point.K; ++k) {
        BigInt Ek = n_power(params.N, odd_series ? (2 * k + 1) : (2 * k));
        BigInt e = nj - Ek;
        if (e.sign() >= 0) continue;
        sum += BigRational(cofactor) * BigRational::int_pow(p, e);
    }
    FracCoordinate out;
    out.frac = sum.frac();
    out.tail = BigRational(multiplier(params, elem)) *
               point.tail_bounds[static_cast<size_t>(coord)];
    out.wrapped = (out.frac + out.tail) >= BigRational(1);
    return out;
}

} // namespace

ActResult act(const SemigroupElement& elem, const TorusPoint& point) {
    const TorusParams& params = point.params;
    if (elem.exponents.size() != static_cast<size_t>(params.q))
        throw PreconditionViolated("act: exponent vector size must equal q");
    for (const auto& e : elem.exponents)
        if (e.sign() < 0) throw PreconditionViolated("act: exponents must be nonnegative");
    ActResult res;
    res.coords.reserve(static_cast<size_t>(2 * params.q));
    for (int coord = 0; coord < 2 * params.q; ++coord)
        res.coords.push_back(act_coordinate(elem, point, coord));
    return res;
}

std::vector<BigRational> act_fractions(const TorusParams& params, const SemigroupElement& elem,
                                       const std::vector<BigRational>& fracs) {
    BigInt m = multiplier(params, elem);
    std::vector<BigRational> out;
    out.reserve(fracs.size());
    for (const auto& v : fracs) out.push_back((BigRational(m) * v).frac());
    return out;
}

HittingIndex hitting_index(const TorusParams& params, const SemigroupElement& elem) {
    if (elem.exponents.size() != static_cast<size_t>(params.q))
        throw PreconditionViolated("hitting_index: exponent vector size must equal q");
    if (elem.total().sign() <= 0)
        throw PreconditionViolated("hitting_index: requires sum n_i >= 1");

    // s maximizing p_s^(n_s), decided exactly.
    int s = 0;
    BigInt best = BigInt::pow(params.primes[0], elem.exponents[0]);
    for (int i = 1; i < params.q; ++i) {
        BigInt v = BigInt::pow(params.primes[static_cast<size_t>(i)], elem.exponents[static_cast<size_t>(i)]);
        if (v > best) {
            best = v;
            s = i;
        }
    }
    const BigInt& ns = elem.exponents[static_cast<size_t>(s)];

    // k0 = largest k with N^(2k) <= n_s.
    BigInt k0(0);
    while (BigInt::pow(params.N, BigInt(2) * (k0 + BigInt(1))) <= ns) k0 += BigInt(1);

    BigInt upper = BigInt::pow(params.N, BigInt(2) * k0 + BigInt(1));
    HittingIndex out;
    out.s = s;
    out.k0 = k0;
    // At the overlap n_s == N^(2k0+1) both proof cases apply; take the
    // second so the dropped prefix of the odd series is as long as possible.
    out.first_case = ns < upper;
    out.j = out.first_case ? s : s + params.q;
    // 2 * p_s^(N^(2k0+1) (q - N)); q < N under the standing hypothesis.
    BigInt expo = upper * (BigInt(params.q) - params.N);
    out.bound = BigRational(BigInt(2)) * BigRational::int_pow(params.primes[static_cast<size_t>(s)], expo);
    return out;
}

namespace {

/// Smallest k >= 0 with 2 * p_1^(N^(2k+1)(q-N)) <= eps, by exact comparison.
long minimal_k_for_eps(const TorusParams& params, const BigRational& eps) {
    const BigInt& p1 = params.primes.front();
    for (long k = 0;; ++k) {
        if (k > 64) throw IndeterminatePrecision("verify_nondensity: eps threshold unreachable");
        BigInt mag = BigInt::pow(params.N, BigInt(2 * k + 1)) * (params.N - BigInt(params.q));
        // 2 * p1^(-mag) <= eps  <=>  2 * den(eps) <= num(eps) * p1^mag
        BigInt lhs = BigInt(2) * eps.denominator();
        BigInt rhs = eps.numerator() * BigInt::pow(p1, mag);
        if (lhs <= rhs) return k;
    }
}

/// Smallest integer L with p_1^L >= p_q^(N^(2k) * q), i.e.
/// L >= N^(2k) * q * log(p_q)/log(p_1).
BigInt minimal_shell(const TorusParams& params, long k_min) {
    if (k_min == 0) return BigInt(0);
    BigInt expo = BigInt::pow(params.N, BigInt(2 * k_min)) * BigInt(params.q);
    BigInt target = BigInt::pow(params.primes.back(), expo);
    // Estimate via bit lengths, then fix up exactly.
    size_t tbits = target.bit_length();
    size_t pbits = params.primes.front().bit_length();
    BigInt L(static_cast<long>(tbits / pbits > 0 ? tbits / pbits : 1));
    while (BigInt::pow(params.primes.front(), L) < target) L += BigInt(1);
    while (L > BigInt(1) && BigInt::pow(params.primes.front(), L - BigInt(1)) >= target)
        L -= BigInt(1);
    return L;
}

void enumerate_compositions(const BigInt& total, int parts,
                            std::vector<BigInt>& scratch,
                            const std::function<void(const std::vector<BigInt>&)>& emit) {
    if (parts == 1) {
        scratch.push_back(total);
        emit(scratch);
        scratch.pop_back();
        return;
    }
    for (BigInt v(0); v <= total; v += BigInt(1)) {
        scratch.push_back(v);
        enumerate_compositions(total - v, parts - 1, scratch, emit);
        scratch.pop_back();
    }
}

} // namespace

NondensityReport verify_nondensity(const TorusParams& params, const BigRational& eps, long window,
                                   bool keep_rows, int workers) {
    params.validate();
    if (!(eps > BigRational(0) && eps < BigRational(1)))
        throw PreconditionViolated("verify_nondensity: eps must lie in (0, 1)");
    if (window < 0) throw PreconditionViolated("verify_nondensity: window must be >= 0");

    NondensityReport report;
    report.eps = eps;
    report.window = window;
    long k_min = minimal_k_for_eps(params, eps);
    report.L = minimal_shell(params, k_min);

    // Collect the elems of all shells first; certification below is
    // embarrassingly parallel and order-independent.
    std::vector<SemigroupElement> elems;
    for (BigInt shell = report.L; shell <= report.L + BigInt(window); shell += BigInt(1)) {
        std::vector<BigInt> scratch;
        enumerate_compositions(shell, params.q, scratch, [&](const std::vector<BigInt>& e) {
            elems.push_back(SemigroupElement{e});
        });
    }

    struct Outcome {
        bool pass = false;
        long K_used = 0;
        BigRational frac_plus_tail;
        BigRational bound;
        BigRational margin;
        int j = 0;
        bool escalated = false;
    };
    std::vector<Outcome> outcomes(elems.size());

    TorusPoint base_point = make_point(params, 2);
    parallel_for(elems.size(), workers, [&](size_t idx) {
        const SemigroupElement& elem = elems[idx];
        Outcome& oc = outcomes[idx];
        if (elem.total().is_zero()) {
            // Identity element: the point's own coordinates; take the best one.
            BigRational best = base_point.coords[0] + base_point.tail_bounds[0];
            int best_j = 0;
            for (int j = 1; j < 2 * params.q; ++j) {
                BigRational v = base_point.coords[static_cast<size_t>(j)] +
                                base_point.tail_bounds[static_cast<size_t>(j)];
                if (v < best) {
                    best = v;
                    best_j = j;
                }
            }
            oc.j = best_j;
            oc.K_used = base_point.K;
            oc.frac_plus_tail = best;
            oc.bound = best;
            oc.pass = best <= eps;
            oc.margin = eps - best;
            return;
        }
        HittingIndex hit = hitting_index(params, elem);
        long K = base_point.K;
        const TorusPoint* point = &base_point;
        TorusPoint local;
        for (;;) {
            FracCoordinate fc = act_coordinate(elem, *point, hit.j);
            BigRational hi = fc.frac + fc.tail;
            if (!fc.wrapped && hi <= eps) {
                oc.pass = true;
                oc.frac_plus_tail = hi;
                oc.margin = eps - hi;
                break;
            }
            if (!fc.wrapped && fc.frac > eps) {
                oc.pass = false; // certified failure of the hitting coordinate
                oc.frac_plus_tail = hi;
                oc.margin = eps - fc.frac;
                break;
            }
            // Indeterminate at this K: escalate truncation depth.
            K *= 2;
            oc.escalated = true;
            if (K > 1024) throw IndeterminatePrecision("verify_nondensity: truncation escalation cap");
            local = make_point(params, K);
            point = &local;
        }
        oc.K_used = K;
        oc.j = hit.j;
        oc.bound = hit.bound;
    });

    report.checked_count = outcomes.size();
    report.all_pass = true;
    bool first = true;
    for (size_t i = 0; i < outcomes.size(); ++i) {
        const Outcome& oc = outcomes[i];
        if (!oc.pass) report.all_pass = false;
        if (first || oc.margin < report.worst_margin) {
            report.worst_margin = oc.margin;
            first = false;
        }
        if (oc.escalated) report.escalated.push_back(elems[i]);
        if (keep_rows)
            report.rows.push_back(NondensityRow{elems[i], oc.j, oc.frac_plus_tail, oc.bound,
                                                oc.margin, oc.K_used});
    }
    return report;
}

namespace {

struct TruncatedCoords {
    std::vector<BigRational> values; // 2q coordinate values (overrides applied)
    std::vector<BigRational> tails;  // matching tail bounds (zero for overrides)
    BigInt common_den;               // lcm of value denominators
    std::vector<BigInt> numerators;  // values scaled by common_den
    BigRational tail_total_H;        // sum_j H * tail_j
};

TruncatedCoords truncated_coords(const TorusParams& params, long K, long H,
                                 const std::map<int, BigRational>& overrides) {
    TorusPoint pt = make_point(params, K);
    TruncatedCoords tc;
    tc.values = pt.coords;
    tc.tails = pt.tail_bounds;
    for (const auto& [idx, v] : overrides) {
        if (idx < 0 || idx >= 2 * params.q)
            throw PreconditionViolated("certify_no_relation: override index out of range");
        tc.values[static_cast<size_t>(idx)] = v;
        tc.tails[static_cast<size_t>(idx)] = BigRational(0);
    }
    mpz_class den(1);
    for (const auto& v : tc.values)
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), v.denominator().raw().get_mpz_t());
    tc.common_den = BigInt(den);
    for (const auto& v : tc.values) {
        BigRational scaled = v * BigRational(tc.common_den);
        tc.numerators.push_back(scaled.numerator()); // exact: den divides common_den
    }
    tc.tail_total_H = BigRational(0);
    for (const auto& t : tc.tails) tc.tail_total_H += BigRational(BigInt(H)) * t;
    return tc;
}

/// The candidate decoded from a (shell, linear-index) pair. Layout:
/// (a_1..a_q, b_1..b_q, c), each in [-m, m].
std::vector<long> decode_candidate(long m, unsigned long long idx, int len) {
    std::vector<long> out(static_cast<size_t>(len));
    unsigned long long side = static_cast<unsigned long long>(2 * m + 1);
    for (int i = 0; i < len; ++i) {
        out[static_cast<size_t>(i)] = static_cast<long>(idx % side) - m;
        idx /= side;
    }
    return out;
}

} // namespace

IndependenceResult certify_no_relation(const TorusParams& params, long H, long K_start,
                                       const std::map<int, BigRational>& overrides, int workers) {
    params.validate();
    if (H < 1) throw PreconditionViolated("certify_no_relation: H >= 1 required");

    // Depth selection from the decay bound: the scaled truncated value of a
    // nonzero candidate is a nonzero integer over common_den, so it is
    // certified away from zero as soon as 1/common_den exceeds the total
    // tail. Escalate K until that holds.
    long K = K_start >= 1 ? K_start : 1;
    TruncatedCoords tc;
    for (;;) {
        tc = truncated_coords(params, K, H, overrides);
        if (BigRational(BigInt(1), tc.common_den) > tc.tail_total_H) break;
        K *= 2;
        if (K > 1024) throw IndeterminatePrecision("certify_no_relation: depth escalation cap");
    }

    const int len = 2 * params.q + 1;
    IndependenceResult res;
    res.H = H;
    res.K_used = K;

    std::optional<BigInt> min_abs_num; // min |scaled value| over nonzero candidates
    std::vector<std::pair<long, unsigned long long>> unresolved;
    unsigned long long checked = 0;

    for (long m = 1; m <= H; ++m) {
        unsigned long long side = static_cast<unsigned long long>(2 * m + 1);
        unsigned long long count = 1;
        for (int i = 0; i < len; ++i) {
            if (count > (~0ULL) / side)
                throw PreconditionViolated("certify_no_relation: candidate space too large");
            count *= side;
        }

        int nthreads = workers < 1 ? 1 : workers;
        std::vector<std::optional<BigInt>> local_min(static_cast<size_t>(nthreads));
        std::vector<std::vector<unsigned long long>> local_zero(static_cast<size_t>(nthreads));
        std::vector<std::vector<unsigned long long>> local_unresolved(static_cast<size_t>(nthreads));
        std::vector<unsigned long long> local_checked(static_cast<size_t>(nthreads), 0);

        unsigned long long chunk = (count + static_cast<unsigned long long>(nthreads) - 1) /
                                   static_cast<unsigned long long>(nthreads);
        parallel_for(static_cast<size_t>(nthreads), nthreads, [&](size_t t) {
            unsigned long long begin = static_cast<unsigned long long>(t) * chunk;
            unsigned long long end = std::min(count, begin + chunk);
            mpz_class T;
            std::vector<long> coef(static_cast<size_t>(len));
            for (unsigned long long idx = begin; idx < end; ++idx) {
                unsigned long long rem = idx;
                bool on_shell = false;
                for (int i = 0; i < len; ++i) {
                    long v = static_cast<long>(rem % side) - m;
                    coef[static_cast<size_t>(i)] = v;
                    if (v == m || v == -m) on_shell = true;
                    rem /= side;
                }
                if (!on_shell) continue; // interior handled by smaller shells
                ++local_checked[t];

                T = 0;
                for (int j = 0; j < 2 * params.q; ++j) {
                    long cj = coef[static_cast<size_t>(j)];
                    if (cj > 0)
                        mpz_addmul_ui(T.get_mpz_t(), tc.numerators[static_cast<size_t>(j)].raw().get_mpz_t(),
                                      static_cast<unsigned long>(cj));
                    else if (cj < 0)
                        mpz_submul_ui(T.get_mpz_t(), tc.numerators[static_cast<size_t>(j)].raw().get_mpz_t(),
                                      static_cast<unsigned long>(-cj));
                }
                long cc = coef[static_cast<size_t>(len - 1)];
                if (cc > 0)
                    mpz_submul_ui(T.get_mpz_t(), tc.common_den.raw().get_mpz_t(),
                                  static_cast<unsigned long>(cc));
                else if (cc < 0)
                    mpz_addmul_ui(T.get_mpz_t(), tc.common_den.raw().get_mpz_t(),
                                  static_cast<unsigned long>(-cc));

                if (sgn(T) != 0) {
                    mpz_class a = abs(T);
                    if (!local_min[t] || BigInt(a) < *local_min[t]) local_min[t] = BigInt(a);
                    continue;
                }
                // Scaled truncated value is exactly zero: an exact relation if
                // every contributing coordinate has zero tail, otherwise
                // undecided at this K.
                bool zero_tail = true;
                for (int j = 0; j < 2 * params.q; ++j)
                    if (coef[static_cast<size_t>(j)] != 0 &&
                        !tc.tails[static_cast<size_t>(j)].is_zero()) {
                        zero_tail = false;
                        break;
                    }
                if (zero_tail)
                    local_zero[t].push_back(idx);
                else
                    local_unresolved[t].push_back(idx);
            }
        });

        std::optional<unsigned long long> first_zero;
        for (int t = 0; t < nthreads; ++t) {
            checked += local_checked[static_cast<size_t>(t)];
            if (local_min[static_cast<size_t>(t)] &&
                (!min_abs_num || *local_min[static_cast<size_t>(t)] < *min_abs_num))
                min_abs_num = local_min[static_cast<size_t>(t)];
            for (auto idx : local_zero[static_cast<size_t>(t)])
                if (!first_zero || idx < *first_zero) first_zero = idx;
            for (auto idx : local_unresolved[static_cast<size_t>(t)])
                unresolved.emplace_back(m, idx);
        }
        if (first_zero) {
            auto coef = decode_candidate(m, *first_zero, len);
            RelationCandidate cand;
            for (int i = 0; i < params.q; ++i) cand.a.push_back(BigInt(coef[static_cast<size_t>(i)]));
            for (int i = 0; i < params.q; ++i)
                cand.b.push_back(BigInt(coef[static_cast<size_t>(params.q + i)]));
            cand.c = BigInt(coef[static_cast<size_t>(len - 1)]);
            res.certified = false;
            res.checked_count = checked;
            res.counterexample = cand;
            return res;
        }
    }

    res.checked_count = checked;
    res.escalated_count = unresolved.size();

    // Certified lower bound on |value| from the base depth.
    if (min_abs_num) {
        res.min_abs_lower_bound =
            BigRational(*min_abs_num, tc.common_den) - tc.tail_total_H;
    }

    // Candidates whose truncated value vanished but whose tails were live:
    // re-evaluate at doubled depth until decided.
    for (const auto& [m, idx] : unresolved) {
        auto coef = decode_candidate(m, idx, len);
        long Kc = K;
        for (;;) {
            Kc *= 2;
            if (Kc > 1024)
                throw IndeterminatePrecision("certify_no_relation: unresolved candidate at depth cap");
            TruncatedCoords deep = truncated_coords(params, Kc, H, overrides);
            BigRational T(0);
            BigRational tail(0);
            for (int j = 0; j < 2 * params.q; ++j) {
                long cj = coef[static_cast<size_t>(j)];
                if (cj == 0) continue;
                T += BigRational(cj) * deep.values[static_cast<size_t>(j)];
                tail += BigRational(std::labs(cj)) * deep.tails[static_cast<size_t>(j)];
            }
            T -= BigRational(coef[static_cast<size_t>(len - 1)]);
            if (T.abs() > tail) {
                BigRational lb = T.abs() - tail;
                if (res.min_abs_lower_bound.is_zero() || lb < res.min_abs_lower_bound)
                    res.min_abs_lower_bound = lb;
                res.K_used = std::max(res.K_used, Kc);
                break;
            }
            if (T.is_zero() && tail.is_zero()) {
                RelationCandidate cand;
                for (int i = 0; i < params.q; ++i)
                    cand.a.push_back(BigInt(coef[static_cast<size_t>(i)]));
                for (int i = 0; i < params.q; ++i)
                    cand.b.push_back(BigInt(coef[static_cast<size_t>(params.q + i)]));
                cand.c = BigInt(coef[static_cast<size_t>(len - 1)]);
                res.certified = false;
                res.counterexample = cand;
                return res;
            }
        }
    }

    res.certified = true;
    return res;
}

RelationTable relation_table(const TorusParams& params, long K,
                             const std::map<int, BigRational>& overrides) {
    TruncatedCoords tc = truncated_coords(params, K, 1, overrides);
    return RelationTable{std::move(tc.values), std::move(tc.tails)};
}

} // namespace orbitlab
