#include "orbitlab/homogeneous.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "orbitlab/parallel.hpp"

namespace orbitlab {

DiagonalElement::DiagonalElement(std::vector<BigRational> logs) : logs_(std::move(logs)) {
    if (logs_.size() < 2) throw PreconditionViolated("DiagonalElement: dimension >= 2 required");
    BigRational sum(0);
    for (const auto& l : logs_) sum += l;
    if (!sum.is_zero())
        throw PreconditionViolated("DiagonalElement: log-coordinates must sum to zero");
}

DiagonalElement DiagonalElement::a(int n, const BigRational& s) {
    std::vector<BigRational> logs(static_cast<size_t>(n), BigRational(0));
    logs.front() = s * BigRational(1, 2);
    logs.back() = -s * BigRational(1, 2);
    return DiagonalElement(std::move(logs));
}

DiagonalElement DiagonalElement::identity(int n) {
    return DiagonalElement(std::vector<BigRational>(static_cast<size_t>(n), BigRational(0)));
}

DiagonalElement DiagonalElement::wall(int n, const std::vector<BigRational>& middle_logs) {
    if (static_cast<int>(middle_logs.size()) != n - 2)
        throw PreconditionViolated("DiagonalElement::wall: need n-2 middle coordinates");
    BigRational sum(0);
    for (const auto& l : middle_logs) sum += l;
    BigRational lambda = -sum * BigRational(1, 2);
    std::vector<BigRational> logs;
    logs.push_back(lambda);
    for (const auto& l : middle_logs) logs.push_back(l);
    logs.push_back(lambda);
    return DiagonalElement(std::move(logs));
}

DiagonalElement DiagonalElement::operator*(const DiagonalElement& o) const {
    if (o.logs_.size() != logs_.size()) throw PreconditionViolated("DiagonalElement: size mismatch");
    std::vector<BigRational> logs = logs_;
    for (size_t i = 0; i < logs.size(); ++i) logs[i] += o.logs_[i];
    return DiagonalElement(std::move(logs));
}

DiagonalElement DiagonalElement::inverse() const {
    std::vector<BigRational> logs = logs_;
    for (auto& l : logs) l = -l;
    return DiagonalElement(std::move(logs));
}

IntervalVector DiagonalElement::entries(mpfr_prec_t prec) const {
    IntervalVector v(static_cast<Eigen::Index>(logs_.size()));
    for (size_t i = 0; i < logs_.size(); ++i) v(static_cast<Eigen::Index>(i)) = interval_exp(logs_[i], prec);
    return v;
}

IntervalMatrix DiagonalElement::matrix(mpfr_prec_t prec) const {
    const int n = dim();
    IntervalMatrix m = interval_identity(n, prec);
    IntervalVector e = entries(prec);
    for (int i = 0; i < n; ++i) m(i, i) = e(i);
    return m;
}

IntervalMatrix h_matrix(int n, const RealInterval& t, mpfr_prec_t prec) {
    IntervalMatrix m = interval_identity(n, prec);
    m(0, n - 1) = t;
    return m;
}

IntervalMatrix h_matrix(int n, const BigRational& t, mpfr_prec_t prec) {
    return h_matrix(n, RealInterval::exact(t, prec), prec);
}

RealInterval commutation_residual(int n, const std::function<RealInterval(mpfr_prec_t)>& s,
                                  const BigRational& t, mpfr_prec_t prec) {
    RealInterval sv = s(prec);
    RealInterval es = sv.exp();
    RealInterval half = (sv * RealInterval::exact(BigRational(1, 2), prec)).exp();
    IntervalMatrix a = interval_identity(n, prec);
    a(0, 0) = half;
    a(n - 1, n - 1) = RealInterval(1) / half;
    IntervalMatrix lhs = a * h_matrix(n, t, prec);
    IntervalMatrix rhs = h_matrix(n, es * RealInterval::exact(t, prec), prec) * a;
    RealInterval worst(0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            worst = RealInterval::hull_of(worst, (lhs(i, j) - rhs(i, j)).abs());
    return worst;
}

RealInterval commutation_residual(int n, const BigRational& s, const BigRational& t,
                                  mpfr_prec_t prec) {
    return commutation_residual(
        n, [s](mpfr_prec_t p) { return RealInterval::exact(s, p); }, t, prec);
}

void GroupWord::push_a(const BigRational& s) {
    int n = n_;
    std::ostringstream os;
    os << "a(" << s.to_string() << ")";
    factors_.emplace_back(os.str(), [n, s](mpfr_prec_t p) { return DiagonalElement::a(n, s).matrix(p); });
}

void GroupWord::push_h(const BigRational& t) {
    int n = n_;
    std::ostringstream os;
    os << "h(" << t.to_string() << ")";
    factors_.emplace_back(os.str(), [n, t](mpfr_prec_t p) { return h_matrix(n, t, p); });
}

void GroupWord::push_diagonal(const DiagonalElement& d) {
    if (d.dim() != n_) throw PreconditionViolated("GroupWord: diagonal dimension mismatch");
    factors_.emplace_back("diag", [d](mpfr_prec_t p) { return d.matrix(p); });
}

void GroupWord::push_embedding(const NumberField& F) {
    if (F.degree() != n_) throw PreconditionViolated("GroupWord: embedding dimension mismatch");
    factors_.emplace_back("g", [F](mpfr_prec_t p) { return embedding_matrix(F, p).lattice.basis(p); });
}

void GroupWord::push_exact(const RatMatrix& M) {
    if (M.rows() != n_ || M.cols() != n_) throw PreconditionViolated("GroupWord: matrix shape mismatch");
    factors_.emplace_back("explicit", [M](mpfr_prec_t p) { return to_intervals(M, p); });
}

IntervalMatrix GroupWord::materialize(mpfr_prec_t prec) const {
    IntervalMatrix acc = interval_identity(n_, prec);
    for (const auto& [label, gen] : factors_) acc = acc * gen(prec);
    RealInterval d = interval_det(acc).abs();
    if (!d.contains(BigRational(1)))
        throw PrecisionFailure("GroupWord: materialized determinant does not enclose 1");
    return acc;
}

UnimodularLattice build_y(const NumberField& F) {
    const int n = F.degree();
    if (n < 3) throw PreconditionViolated("build_y: field degree >= 3 required");
    auto gen = [F, n](mpfr_prec_t p) {
        IntervalMatrix g = embedding_matrix(F, p).lattice.basis(p);
        return IntervalMatrix(h_matrix(n, BigRational(1), p) * g);
    };
    return UnimodularLattice(n, gen);
}

KMembership k_membership_decompose(const NumberField& F, const BigRational& s,
                                   const DiagonalElement& d, mpfr_prec_t prec) {
    const int n = F.degree();
    if (s.sign() > 0) throw PreconditionViolated("k_membership_decompose: s <= 0 required");
    if (d.dim() != n) throw PreconditionViolated("k_membership_decompose: dimension mismatch");
    if (!d.in_wall()) throw PreconditionViolated("k_membership_decompose: d must lie in the wall N_{1,n}");

    DiagonalElement as = DiagonalElement::a(n, s);
    DiagonalElement torus = as * d;
    IntervalMatrix g = embedding_matrix(F, prec).lattice.basis(prec);
    IntervalMatrix lhs = as.matrix(prec) * d.matrix(prec) * h_matrix(n, BigRational(1), prec) * g;
    RealInterval tp = interval_exp(s, prec);
    IntervalMatrix rhs = h_matrix(n, tp, prec) * torus.matrix(prec) * g;
    RealInterval worst(0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            worst = RealInterval::hull_of(worst, (lhs(i, j) - rhs(i, j)).abs());
    return KMembership{tp, worst, torus};
}

IntervalMatrix psi_embed(const IntervalMatrix& M1, const IntervalMatrix& M2) {
    const int n1 = static_cast<int>(M1.rows());
    const int n2 = static_cast<int>(M2.rows());
    IntervalMatrix out(n1 + n2, n1 + n2);
    for (int i = 0; i < n1 + n2; ++i)
        for (int j = 0; j < n1 + n2; ++j) out(i, j) = RealInterval(0);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n1; ++j) out(i, j) = M1(i, j);
    for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j) out(n1 + i, n1 + j) = M2(i, j);
    return out;
}

IntervalMatrix phi_embed(const IntervalMatrix& M1, const IntervalMatrix& M2, const BigRational& t,
                         mpfr_prec_t prec) {
    const int n1 = static_cast<int>(M1.rows());
    const int n2 = static_cast<int>(M2.rows());
    RealInterval top = interval_exp(t * BigRational(n2), prec);
    RealInterval bot = interval_exp(-t * BigRational(n1), prec);
    IntervalMatrix A = M1, B = M2;
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n1; ++j) A(i, j) = A(i, j) * top;
    for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j) B(i, j) = B(i, j) * bot;
    return psi_embed(A, B);
}

QuarticMatrix sigma_conj_transpose(const QuarticMatrix& M) {
    QuarticMatrix out(M.cols(), M.rows());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) out(j, i) = sigma(M(i, j));
    return out;
}

QuarticInt det_quartic(const QuarticMatrix& M) {
    const int n = static_cast<int>(M.rows());
    if (M.rows() != M.cols() || n == 0 || n > 8)
        throw PreconditionViolated("det_quartic: square matrix with n <= 8 required");
    // Permutation expansion; exact over the ring.
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    QuarticInt acc(0);
    do {
        int sign = 1;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (perm[static_cast<size_t>(i)] > perm[static_cast<size_t>(j)]) sign = -sign;
        QuarticInt term(1);
        for (int i = 0; i < n; ++i) term *= M(i, perm[static_cast<size_t>(i)]);
        acc = (sign > 0) ? acc + term : acc - term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc;
}

SuMembership su_membership(const QuarticMatrix& M) {
    const int n = static_cast<int>(M.rows());
    SuMembership out;
    QuarticMatrix gram = sigma_conj_transpose(M) * M;
    for (int i = 0; i < n; ++i) gram(i, i) -= QuarticInt(1);
    out.gram_residual = gram;
    out.det = det_quartic(M);
    bool zero = true;
    for (int i = 0; i < n && zero; ++i)
        for (int j = 0; j < n; ++j)
            if (!gram(i, j).is_zero()) {
                zero = false;
                break;
            }
    out.member = zero && out.det == QuarticInt(1);
    return out;
}

PairForm pair_form(const QuarticMatrix& M) {
    PairForm p;
    p.X = QuarticMatrix(M.rows(), M.cols());
    p.Y = QuarticMatrix(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            p.X(i, j) = even_part(M(i, j)).to_quartic();
            p.Y(i, j) = odd_part(M(i, j)).to_quartic();
        }
    return p;
}

QuarticMatrix pair_matrix(const PairForm& p) {
    QuarticMatrix out = p.X;
    QuarticInt t = QuarticInt::t();
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) += t * p.Y(i, j);
    return out;
}

PairForm pair_mul(const PairForm& a, const PairForm& b) {
    QuarticMatrix s2YY = a.Y * b.Y;
    QuarticInt s2 = QuarticInt::sqrt2();
    for (Eigen::Index i = 0; i < s2YY.rows(); ++i)
        for (Eigen::Index j = 0; j < s2YY.cols(); ++j) s2YY(i, j) = s2 * s2YY(i, j);
    PairForm out;
    out.X = a.X * b.X + s2YY;
    out.Y = a.X * b.Y + a.Y * b.X;
    return out;
}

std::pair<Sqrt2Int, Sqrt2Int> det_split(const PairForm& p) {
    for (Eigen::Index i = 0; i < p.X.rows(); ++i)
        for (Eigen::Index j = 0; j < p.X.cols(); ++j)
            if (!p.X(i, j).is_even() || !p.Y(i, j).is_even())
                throw PreconditionViolated("det_split: pair entries must lie in Z[sqrt 2]");
    QuarticInt d = det_quartic(pair_matrix(p));
    return {even_part(d), odd_part(d)};
}

TwinReport compact_twin_check(const PairForm& p, mpfr_prec_t prec) {
    const int n = static_cast<int>(p.X.rows());
    TwinReport rep;

    QuarticMatrix xtx = sigma_conj_transpose(p.X) * p.X; // entries even: sigma acts trivially
    QuarticMatrix yty = sigma_conj_transpose(p.Y) * p.Y;
    QuarticInt s2 = QuarticInt::sqrt2();
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
        for (int j = 0; j < n; ++j) {
            QuarticInt lhs = xtx(i, j) - s2 * yty(i, j) - (i == j ? QuarticInt(1) : QuarticInt(0));
            if (!lhs.is_zero()) {
                ok = false;
                break;
            }
        }
    if (ok) {
        QuarticMatrix xty = sigma_conj_transpose(p.X) * p.Y;
        QuarticMatrix ytx = sigma_conj_transpose(p.Y) * p.X;
        for (int i = 0; i < n && ok; ++i)
            for (int j = 0; j < n; ++j)
                if (xty(i, j) != ytx(i, j)) {
                    ok = false;
                    break;
                }
    }
    rep.relations_ok = ok;

    // tau-twin entry moduli: |x^tau + i 2^(1/4) y^tau|^2 = (x^tau)^2 + sqrt2 (y^tau)^2,
    // an exact element of Z[sqrt 2]; enclose once per entry.
    RealInterval worst(0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Sqrt2Int xt = even_part(p.X(i, j)).tau();
            Sqrt2Int yt = even_part(p.Y(i, j)).tau();
            Sqrt2Int m2 = xt * xt + Sqrt2Int(BigInt(0), BigInt(1)) * yt * yt;
            worst = RealInterval::hull_of(worst, m2.enclose(prec).abs().sqrt());
        }
    rep.max_modulus = worst;
    BigRational bound = BigRational(1) + BigRational(BigInt(1), BigInt::pow(BigInt(10), 9UL));
    rep.bounded = rep.relations_ok && worst.definitely_le(bound);
    return rep;
}

QuarticMatrix permutation_matrix(const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    QuarticMatrix m = QuarticMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        if (perm[static_cast<size_t>(j)] < 0 || perm[static_cast<size_t>(j)] >= n)
            throw PreconditionViolated("permutation_matrix: bad permutation");
        m(perm[static_cast<size_t>(j)], j) = QuarticInt(1);
    }
    return m;
}

QuarticMatrix alpha_block(int n, int i, int j, bool inverse) {
    if (i == j || i < 0 || j < 0 || i >= n || j >= n)
        throw PreconditionViolated("alpha_block: bad indices");
    QuarticMatrix m = quartic_identity(n);
    QuarticInt al = inverse ? sigma(quartic_alpha()) : quartic_alpha();
    m(i, i) = al;
    m(j, j) = sigma(al);
    return m;
}

QuarticMatrix random_gamma(int n, std::mt19937_64& rng, int length) {
    QuarticMatrix acc = quartic_identity(n);
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<int> pos(0, n - 1);
    for (int step = 0; step < length; ++step) {
        switch (kind(rng)) {
            case 0: {
                std::vector<int> perm(static_cast<size_t>(n));
                std::iota(perm.begin(), perm.end(), 0);
                std::shuffle(perm.begin(), perm.end(), rng);
                int inversions = 0;
                for (int a = 0; a < n; ++a)
                    for (int b = a + 1; b < n; ++b)
                        if (perm[static_cast<size_t>(a)] > perm[static_cast<size_t>(b)]) ++inversions;
                if (inversions % 2 != 0) std::swap(perm[0], perm[1]); // force even parity
                acc = acc * permutation_matrix(perm);
                break;
            }
            default: {
                int i = pos(rng), j = pos(rng);
                if (i == j) j = (j + 1) % n;
                acc = acc * alpha_block(n, i, j, kind(rng) == 2);
                break;
            }
        }
    }
    return acc;
}

InclusionSample inclusion_check(const QuarticMatrix& M1, const QuarticMatrix& M2, const BigInt& k) {
    if (!su_membership(M1).member || !su_membership(M2).member)
        throw PreconditionViolated("inclusion_check: inputs must be verified members");
    const int n1 = static_cast<int>(M1.rows());
    const int n2 = static_cast<int>(M2.rows());
    QuarticInt top = quartic_alpha_power(BigInt(n2) * k);
    QuarticInt bot = quartic_alpha_power(-(BigInt(n1) * k));
    QuarticMatrix out = QuarticMatrix::Zero(n1 + n2, n1 + n2);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n1; ++j) out(i, j) = top * M1(i, j);
    for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j) out(n1 + i, n1 + j) = bot * M2(i, j);
    InclusionSample sample{out, su_membership(out)};
    if (!sample.membership.member) {
        std::ostringstream os;
        os << "inclusion_check: image failed the form check; det = "
           << sample.membership.det.to_string();
        throw MembershipFailure(os.str());
    }
    return sample;
}

A1Element::A1Element(BigRational s_, DiagonalElement d1_, DiagonalElement d2_)
    : s(std::move(s_)), d1(std::move(d1_)), d2(std::move(d2_)) {
    if (!d1.in_wall() || !d2.in_wall())
        throw PreconditionViolated("A1Element: d components must lie in the walls N_i");
}

A1Element A1Element::compose(const A1Element& o) const {
    return A1Element(s + o.s, d1 * o.d1, d2 * o.d2);
}

A1Element A1Element::inverse() const { return A1Element(-s, d1.inverse(), d2.inverse()); }

std::pair<IntervalMatrix, IntervalMatrix> A1Element::materialize(mpfr_prec_t prec) const {
    const int n1 = d1.dim();
    const int n2 = d2.dim();
    DiagonalElement b1 = DiagonalElement::a(n1, s) * d1;
    DiagonalElement b2 = DiagonalElement::a(n2, -s) * d2;
    // Defining constraints, exact in log-coordinates: both blocks have
    // product one (by construction) and a_1 b_1 / (a_{n1} b_{n2}) = 1.
    BigRational ratio_log =
        b1.logs().front() + b2.logs().front() - b1.logs().back() - b2.logs().back();
    if (!ratio_log.is_zero())
        throw PreconditionViolated("A1Element: ratio constraint violated");
    return {b1.matrix(prec), b2.matrix(prec)};
}

namespace {

std::vector<BigRational> linspace(const BigRational& lo, const BigRational& hi, int count) {
    std::vector<BigRational> out;
    if (count <= 1) {
        out.push_back((lo + hi) * BigRational(1, 2));
        return out;
    }
    BigRational step = (hi - lo) / BigRational(count - 1);
    for (int i = 0; i < count; ++i) out.push_back(lo + step * BigRational(i));
    return out;
}

/// All middle-log grid points of the wall of SL(n): (n-2)-fold product.
std::vector<std::vector<BigRational>> wall_grid(int n, int points, const BigRational& range) {
    std::vector<BigRational> axis = linspace(-range, range, points);
    std::vector<std::vector<BigRational>> out{{}};
    for (int d = 0; d < n - 2; ++d) {
        std::vector<std::vector<BigRational>> next;
        for (const auto& prefix : out)
            for (const auto& v : axis) {
                auto p = prefix;
                p.push_back(v);
                next.push_back(std::move(p));
            }
        out = std::move(next);
    }
    return out;
}

} // namespace

AvoidanceReport avoidance_experiment(const FieldInstance& inst1, const FieldInstance& inst2,
                                     const AvoidanceSpec& spec, int workers) {
    const int n1 = inst1.field.degree();
    const int n2 = inst2.field.degree();
    if (n1 < 3 || n2 < 3)
        throw PreconditionViolated("avoidance_experiment: field degrees >= 3 required");

    std::vector<BigRational> s_values;
    for (BigRational s = spec.s_min; s <= spec.s_max; s += spec.s_step) s_values.push_back(s);
    auto grid1 = wall_grid(n1, spec.d_points, spec.d_log_range);
    auto grid2 = wall_grid(n2, spec.d_points, spec.d_log_range);

    struct Sample {
        BigRational s;
        std::vector<BigRational> m1, m2;
    };
    std::vector<Sample> samples;
    for (const auto& s : s_values)
        for (const auto& m1 : grid1)
            for (const auto& m2 : grid2) samples.push_back({s, m1, m2});

    AvoidanceReport rep;
    rep.samples = samples.size();
    rep.rows.resize(samples.size());
    BigRational tol(BigInt(1), BigInt::pow(BigInt(10), 12UL));

    parallel_for(samples.size(), workers, [&](size_t i) {
        const Sample& smp = samples[i];
        AvoidanceRow row;
        row.s = smp.s;
        row.contracted = smp.s.sign() <= 0 ? 0 : 1;
        const FieldInstance& inst = row.contracted == 0 ? inst1 : inst2;
        const std::vector<BigRational>& mid = row.contracted == 0 ? smp.m1 : smp.m2;
        BigRational s_fac = row.contracted == 0 ? smp.s : -smp.s;
        DiagonalElement d = DiagonalElement::wall(inst.field.degree(), mid);
        KMembership km = k_membership_decompose(inst.field, s_fac, d, spec.prec);
        row.residual_hi = km.residual.upper();
        row.t_prime_hi = km.t_prime.upper();
        row.decomposed = row.residual_hi <= tol && row.t_prime_hi <= BigRational(1) &&
                         km.t_prime.lower().sign() > 0;
        rep.rows[i] = std::move(row);
    });
    for (const auto& row : rep.rows)
        if (row.decomposed) ++rep.decomposed;

    // Negated control: for s > 0 the first coordinate expands; report the
    // sampled distance from a_1(s) y_1 to a net of K_1 = h([0,1]) T_1.
    // Empirical margin only, never a certified quantity.
    UnimodularLattice y1 = build_y(inst1.field);
    std::vector<UnimodularLattice> net;
    {
        std::vector<BigRational> taxis = linspace(BigRational(0), BigRational(1), spec.net_t_points);
        std::vector<std::vector<BigRational>> torus_pts{{}};
        for (size_t k = 0; k < inst1.units.size(); ++k) {
            std::vector<std::vector<BigRational>> next;
            std::vector<BigRational> axis = linspace(BigRational(0), BigRational(1), spec.net_torus_points + 1);
            axis.pop_back(); // half-open fundamental cell
            for (const auto& prefix : torus_pts)
                for (const auto& v : axis) {
                    auto p = prefix;
                    p.push_back(v);
                    next.push_back(std::move(p));
                }
            torus_pts = std::move(next);
        }
        for (const auto& t : taxis)
            for (const auto& tp : torus_pts) {
                UnimodularLattice base = unit_orbit_lattice(inst1.field, inst1.units, tp);
                auto gen = [base, t, n1](mpfr_prec_t p) {
                    return IntervalMatrix(h_matrix(n1, t, p) * base.basis(p));
                };
                net.emplace_back(n1, gen);
            }
    }
    std::vector<BigRational> positive_s;
    for (const auto& s : s_values)
        if (s.sign() > 0) positive_s.push_back(s);
    std::vector<ControlRow> control(positive_s.size());
    parallel_for(positive_s.size(), workers, [&](size_t i) {
        const BigRational& s = positive_s[i];
        DiagonalElement as = DiagonalElement::a(n1, s);
        auto gen = [as, y1, n1](mpfr_prec_t p) {
            return IntervalMatrix(as.matrix(p) * y1.basis(p));
        };
        UnimodularLattice point(n1, gen);
        double margin = std::numeric_limits<double>::infinity();
        for (const auto& net_pt : net)
            margin = std::min(margin, quotient_distance(point, net_pt, spec.quotient_radius).value);
        control[i] = ControlRow{s, margin};
    });
    rep.control = std::move(control);
    return rep;
}

std::vector<DensitySeries> density_probe(const FieldInstance& inst,
                                         const std::vector<UnimodularLattice>& targets,
                                         const DensitySpec& spec, int workers) {
    const int n = inst.field.degree();
    const int dims = n - 1;
    if (spec.levels.empty()) throw PreconditionViolated("density_probe: need at least one level");
    for (size_t i = 1; i < spec.levels.size(); ++i)
        if (spec.levels[i] != 2 * spec.levels[i - 1] - 1)
            throw PreconditionViolated("density_probe: levels must refine dyadically (g -> 2g-1)");

    const int finest = spec.levels.back();
    unsigned long total = 1;
    for (int d = 0; d < dims; ++d) total *= static_cast<unsigned long>(finest);

    UnimodularLattice y = build_y(inst.field);

    // Distances at the finest grid; coarser levels take minima over subsets,
    // which makes the series weakly decreasing by construction.
    std::vector<std::vector<double>> dist(targets.size(), std::vector<double>(total));
    parallel_for(total, workers, [&](size_t idx) {
        std::vector<BigRational> logs;
        size_t rem = idx;
        BigRational sum(0);
        BigRational step = BigRational(2) * spec.log_range / BigRational(finest - 1);
        for (int d = 0; d < dims; ++d) {
            long k = static_cast<long>(rem % static_cast<size_t>(finest));
            rem /= static_cast<size_t>(finest);
            BigRational v = -spec.log_range + step * BigRational(k);
            logs.push_back(v);
            sum += v;
        }
        logs.push_back(-sum);
        DiagonalElement d(logs);
        auto gen = [d, y](mpfr_prec_t p) { return IntervalMatrix(d.matrix(p) * y.basis(p)); };
        UnimodularLattice point(static_cast<int>(logs.size()), gen);
        for (size_t t = 0; t < targets.size(); ++t)
            dist[t][idx] = quotient_distance(point, targets[t], spec.quotient_radius).value;
    });

    std::vector<DensitySeries> out;
    for (size_t t = 0; t < targets.size(); ++t) {
        DensitySeries series;
        series.target_index = static_cast<int>(t);
        for (size_t lvl = 0; lvl < spec.levels.size(); ++lvl) {
            int g = spec.levels[lvl];
            // Points of level lvl sit at finest indices k * stride.
            long stride = (finest - 1) / (g - 1);
            double best = std::numeric_limits<double>::infinity();
            std::vector<long> ks(static_cast<size_t>(dims), 0);
            for (;;) {
                size_t idx = 0;
                size_t mul = 1;
                for (int d = 0; d < dims; ++d) {
                    idx += static_cast<size_t>(ks[static_cast<size_t>(d)] * stride) * mul;
                    mul *= static_cast<size_t>(finest);
                }
                best = std::min(best, dist[t][idx]);
                int d = 0;
                while (d < dims && ++ks[static_cast<size_t>(d)] == g) {
                    ks[static_cast<size_t>(d)] = 0;
                    ++d;
                }
                if (d == dims) break;
            }
            series.levels.push_back(DensityLevel{g, best});
        }
        out.push_back(std::move(series));
    }
    return out;
}

UnimodularLattice random_unimodular_lattice(int n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> d(-16, 16);
    for (;;) {
        RatMatrix M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) M(i, j) = BigRational(d(rng), 16);
        BigRational det = rat_det(M).abs();
        if (det < BigRational(1, 1000)) continue;
        auto gen = [M, det, n](mpfr_prec_t p) {
            RealInterval s = interval_rational_power(det, -1, n, p);
            IntervalMatrix out = to_intervals(M, p);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) out(i, j) = out(i, j) * s;
            return out;
        };
        return UnimodularLattice(n, gen);
    }
}

} // namespace orbitlab
