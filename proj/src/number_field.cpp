#include "orbitlab/number_field.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "orbitlab/parallel.hpp"

namespace orbitlab {

namespace {

using RatPoly = std::vector<BigRational>; // low-to-high, trailing nonzero

void trim(RatPoly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

int deg(const RatPoly& p) { return static_cast<int>(p.size()) - 1; }

BigRational eval(const RatPoly& p, const BigRational& x) {
    BigRational acc(0);
    for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

RatPoly derivative(const RatPoly& p) {
    RatPoly d;
    for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * BigRational(static_cast<long>(i)));
    trim(d);
    return d;
}

/// Remainder of a by b (b nonzero).
RatPoly rem(RatPoly a, const RatPoly& b) {
    trim(a);
    while (deg(a) >= deg(b) && !a.empty()) {
        BigRational f = a.back() / b.back();
        size_t shift = a.size() - b.size();
        for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
        a.pop_back();
        trim(a);
    }
    return a;
}

std::vector<RatPoly> sturm_chain(const RatPoly& f) {
    std::vector<RatPoly> chain{f, derivative(f)};
    while (!chain.back().empty() && deg(chain.back()) > 0) {
        RatPoly r = rem(chain[chain.size() - 2], chain.back());
        if (r.empty()) break;
        for (auto& c : r) c = -c;
        chain.push_back(std::move(r));
    }
    return chain;
}

int sign_variations_at(const std::vector<RatPoly>& chain, const BigRational& x) {
    int var = 0, last = 0;
    for (const auto& p : chain) {
        if (p.empty()) continue;
        int s = eval(p, x).sign();
        if (s == 0) continue;
        if (last != 0 && s != last) ++var;
        last = s;
    }
    return var;
}

/// Number of roots in (a, b] (Sturm; f squarefree, f(a), f(b) != 0 assumed).
int roots_in(const std::vector<RatPoly>& chain, const BigRational& a, const BigRational& b) {
    return sign_variations_at(chain, a) - sign_variations_at(chain, b);
}

std::vector<BigInt> divisors_with_sign(const BigInt& v) {
    std::vector<BigInt> out;
    BigInt a = v.abs();
    for (BigInt d(1); d * d <= a; d += BigInt(1)) {
        auto [q, r] = BigInt::fdiv_qr(a, d);
        if (r.is_zero()) {
            out.push_back(d);
            out.push_back(-d);
            if (q != d) {
                out.push_back(q);
                out.push_back(-q);
            }
        }
    }
    return out;
}

BigInt binomial(int n, int k) {
    BigInt r(1);
    for (int i = 0; i < k; ++i) r = BigInt::divexact(r * BigInt(n - i), BigInt(i + 1));
    return r;
}

/// Irreducibility over Q for monic integer f: rational-root test, plus a
/// bounded search for monic integer factors when the degree exceeds 3.
bool is_irreducible(const std::vector<BigInt>& f) {
    int n = static_cast<int>(f.size()) - 1;
    if (n <= 0) return false;
    if (n == 1) return true;
    if (f[0].is_zero()) return false; // root at 0
    RatPoly fr;
    for (const auto& c : f) fr.push_back(BigRational(c));
    for (const auto& r : divisors_with_sign(f[0]))
        if (eval(fr, BigRational(r)).is_zero()) return false;
    if (n <= 3) return true;

    // Any monic factor g (degree d) of monic f has |g_i| <= C(d,i) * ||f||_2.
    BigRational norm2(0);
    for (const auto& c : f) norm2 += BigRational(c) * BigRational(c);
    BigInt mahler_bound = BigInt::isqrt(norm2.numerator()) + BigInt(1);
    for (int d = 2; d <= n / 2; ++d) {
        std::vector<BigInt> bounds;
        BigInt space(1);
        for (int i = 0; i < d; ++i) {
            BigInt b = binomial(d, i) * mahler_bound;
            bounds.push_back(b);
            space *= BigInt(2) * b + BigInt(1);
            if (space > BigInt(10000000))
                throw PreconditionViolated("NumberField: irreducibility search too large for this degree");
        }
        std::vector<BigInt> g(static_cast<size_t>(d), BigInt(0));
        std::function<bool(int)> search = [&](int lvl) -> bool {
            if (lvl == d) {
                RatPoly gp;
                for (const auto& c : g) gp.push_back(BigRational(c));
                gp.push_back(BigRational(1));
                if (rem(fr, gp).empty()) return true;
                return false;
            }
            for (BigInt v = -bounds[static_cast<size_t>(lvl)]; v <= bounds[static_cast<size_t>(lvl)];
                 v += BigInt(1)) {
                g[static_cast<size_t>(lvl)] = v;
                if (search(lvl + 1)) return true;
            }
            return false;
        };
        if (search(0)) return false;
    }
    return true;
}

/// Sylvester resultant of integer polynomials (low-to-high).
BigInt resultant_int(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
    int m = static_cast<int>(a.size()) - 1;
    int n = static_cast<int>(b.size()) - 1;
    if (m < 0 || n < 0) throw PreconditionViolated("resultant of zero polynomial");
    if (m == 0) return BigInt::pow(a[0], static_cast<unsigned long>(n));
    if (n == 0) return BigInt::pow(b[0], static_cast<unsigned long>(m));
    int size = m + n;
    IntMatrix S = IntMatrix::Zero(size, size);
    for (int r = 0; r < n; ++r)
        for (int i = 0; i <= m; ++i) S(r, r + (m - i)) = a[static_cast<size_t>(i)];
    for (int r = 0; r < m; ++r)
        for (int i = 0; i <= n; ++i) S(n + r, r + (n - i)) = b[static_cast<size_t>(i)];
    return int_det(S);
}

BigRational resultant_rat(const std::vector<BigInt>& a, const RatPoly& b) {
    int m = static_cast<int>(a.size()) - 1;
    int n = deg(b);
    if (n < 0) return BigRational(0);
    if (n == 0) return BigRational::pow(b[0], m);
    int size = m + n;
    RatMatrix S = RatMatrix::Zero(size, size);
    for (int r = 0; r < n; ++r)
        for (int i = 0; i <= m; ++i) S(r, r + (m - i)) = BigRational(a[static_cast<size_t>(i)]);
    for (int r = 0; r < m; ++r)
        for (int i = 0; i <= n; ++i) S(n + r, r + (n - i)) = b[static_cast<size_t>(i)];
    return rat_det(S);
}

} // namespace

NumberField NumberField::create(std::vector<BigInt> coeffs) {
    while (!coeffs.empty() && coeffs.back().is_zero()) coeffs.pop_back();
    int n = static_cast<int>(coeffs.size()) - 1;
    if (n < 2) throw PreconditionViolated("NumberField: degree >= 2 required");
    if (coeffs.back() != BigInt(1)) throw PreconditionViolated("NumberField: polynomial must be monic");
    if (!is_irreducible(coeffs))
        throw PreconditionViolated("NumberField: polynomial is reducible over Q");

    NumberField F;
    F.f_ = coeffs;
    F.n_ = n;

    // Discriminant via Res(f, f').
    std::vector<BigInt> fp;
    for (size_t i = 1; i < coeffs.size(); ++i) fp.push_back(coeffs[i] * BigInt(static_cast<long>(i)));
    BigInt res = resultant_int(coeffs, fp);
    long swaps = static_cast<long>(n) * (n - 1) / 2;
    F.disc_ = (swaps % 2 == 0) ? res : -res;
    if (F.disc_.is_zero()) throw PreconditionViolated("NumberField: zero discriminant");

    // Totally real check and root isolation by Sturm bisection.
    RatPoly fr;
    for (const auto& c : coeffs) fr.push_back(BigRational(c));
    auto chain = sturm_chain(fr);
    BigRational M(1);
    for (int i = 0; i < n; ++i) {
        BigRational a = BigRational(coeffs[static_cast<size_t>(i)]).abs();
        if (a + BigRational(1) > M) M = a + BigRational(1);
    }
    if (roots_in(chain, -M, M) != n)
        throw PreconditionViolated("NumberField: polynomial is not totally real");

    std::function<void(BigRational, BigRational)> isolate = [&](BigRational lo, BigRational hi) {
        int cnt = roots_in(chain, lo, hi);
        if (cnt == 0) return;
        if (cnt == 1) {
            F.brackets_.emplace_back(lo, hi);
            return;
        }
        BigRational mid = (lo + hi) * BigRational(1, 2);
        while (eval(fr, mid).is_zero())
            mid = (lo + mid) * BigRational(1, 2); // rational root impossible, but keep safe
        isolate(lo, mid);
        isolate(mid, hi);
    };
    isolate(-M, M);
    std::sort(F.brackets_.begin(), F.brackets_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (static_cast<int>(F.brackets_.size()) != n)
        throw PrecisionFailure("NumberField: root isolation failed");
    return F;
}

RealInterval NumberField::root(int j, mpfr_prec_t prec) const {
    if (j < 0 || j >= n_) throw PreconditionViolated("NumberField::root: index out of range");
    RatPoly fr;
    for (const auto& c : f_) fr.push_back(BigRational(c));
    auto [lo, hi] = brackets_[static_cast<size_t>(j)];
    int slo = eval(fr, lo).sign();
    BigRational width_target =
        BigRational(BigInt(2), BigInt::pow(BigInt(2), static_cast<unsigned long>(prec)));
    {
        BigRational scale = lo.abs() > hi.abs() ? lo.abs() : hi.abs();
        if (scale > BigRational(1)) width_target *= scale;
    }
    while (hi - lo > width_target) {
        BigRational mid = (lo + hi) * BigRational(1, 2);
        int smid = eval(fr, mid).sign();
        if (smid == 0) throw PrecisionFailure("NumberField::root: rational midpoint root");
        if (smid == slo)
            lo = mid;
        else
            hi = mid;
    }
    return RealInterval::hull(lo, hi, prec + 8);
}

RealInterval NumberField::embed(const FieldElement& e, int j, mpfr_prec_t prec) const {
    RealInterval x = root(j, prec);
    RealInterval acc = RealInterval::exact(BigRational(0), prec);
    for (size_t i = e.coords.size(); i-- > 0;)
        acc = acc * x + RealInterval::exact(e.coords[i], prec);
    return acc;
}

FieldElement NumberField::one() const {
    FieldElement e;
    e.coords.assign(static_cast<size_t>(n_), BigRational(0));
    e.coords[0] = BigRational(1);
    return e;
}

FieldElement NumberField::theta() const {
    FieldElement e;
    e.coords.assign(static_cast<size_t>(n_), BigRational(0));
    e.coords[1] = BigRational(1);
    return e;
}

FieldElement NumberField::element(std::vector<BigRational> coords) const {
    if (static_cast<int>(coords.size()) > n_)
        throw PreconditionViolated("FieldElement: too many coordinates");
    coords.resize(static_cast<size_t>(n_), BigRational(0));
    return FieldElement{std::move(coords)};
}

FieldElement NumberField::element_int(const std::vector<BigInt>& coords) const {
    std::vector<BigRational> c;
    for (const auto& v : coords) c.push_back(BigRational(v));
    return element(std::move(c));
}

FieldElement NumberField::add(const FieldElement& a, const FieldElement& b) const {
    FieldElement out = a;
    for (size_t i = 0; i < out.coords.size(); ++i) out.coords[i] += b.coords[i];
    return out;
}

FieldElement NumberField::mul(const FieldElement& a, const FieldElement& b) const {
    std::vector<BigRational> prod(static_cast<size_t>(2 * n_ - 1), BigRational(0));
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            prod[static_cast<size_t>(i + j)] += a.coords[static_cast<size_t>(i)] * b.coords[static_cast<size_t>(j)];
    // Reduce theta^k for k >= n via theta^n = -sum f_i theta^i.
    for (int k = 2 * n_ - 2; k >= n_; --k) {
        BigRational c = prod[static_cast<size_t>(k)];
        if (c.is_zero()) continue;
        prod[static_cast<size_t>(k)] = BigRational(0);
        for (int i = 0; i < n_; ++i)
            prod[static_cast<size_t>(k - n_ + i)] -= c * BigRational(f_[static_cast<size_t>(i)]);
    }
    prod.resize(static_cast<size_t>(n_));
    return FieldElement{std::move(prod)};
}

BigRational NumberField::norm(const FieldElement& e) const {
    RatPoly u;
    for (const auto& c : e.coords) u.push_back(c);
    trim(u);
    return resultant_rat(f_, u);
}

bool NumberField::integral_coords(const FieldElement& e) const {
    for (const auto& c : e.coords)
        if (!c.is_integer()) return false;
    return true;
}

UnitElement make_unit(const NumberField& F, const std::vector<BigInt>& coords) {
    FieldElement e = F.element_int(coords);
    BigRational nrm = F.norm(e);
    if (nrm != BigRational(1) && nrm != BigRational(-1)) {
        std::ostringstream os;
        os << "make_unit: exact norm is " << nrm.to_string() << ", not +-1";
        throw NotAUnit(os.str());
    }
    return UnitElement{std::move(e), nrm.sign()};
}

bool is_torsion_unit(const NumberField& F, const UnitElement& u) {
    FieldElement one = F.one();
    bool plus = true, minus = true;
    for (size_t i = 0; i < u.element.coords.size(); ++i) {
        if (u.element.coords[i] != one.coords[i]) plus = false;
        if (u.element.coords[i] != -one.coords[i]) minus = false;
    }
    return plus || minus;
}

EmbeddingResult embedding_matrix(const NumberField& F, mpfr_prec_t prec) {
    const int n = F.degree();
    auto vand = [&F, n](mpfr_prec_t p) {
        IntervalMatrix V(n, n);
        for (int j = 0; j < n; ++j) {
            RealInterval r = F.root(j, p);
            RealInterval pw = RealInterval::exact(BigRational(1), p);
            for (int i = 0; i < n; ++i) {
                V(j, i) = pw;
                pw *= r;
            }
        }
        return V;
    };
    BigRational adisc(F.discriminant().abs());
    auto gen = [vand, adisc, n](mpfr_prec_t p) {
        RealInterval s = interval_rational_power(adisc, -1, 2L * n, p);
        IntervalMatrix V = vand(p);
        IntervalMatrix out(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out(i, j) = V(i, j) * s;
        return out;
    };
    EmbeddingResult res{UnimodularLattice(n, gen), interval_rational_power(adisc, -1, 2L * n, prec),
                        vand(prec)};
    return res;
}

UnitActionResult unit_action_matrix(const NumberField& F, const UnitElement& u, mpfr_prec_t prec) {
    const int n = F.degree();
    if (!F.integral_coords(u.element))
        throw PreconditionViolated("unit_action_matrix: unit must have integer coordinates");

    UnitActionResult out;
    out.M = IntMatrix::Zero(n, n);
    FieldElement cur = u.element; // u * theta^j as j walks the basis
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) out.M(i, j) = cur.coords[static_cast<size_t>(i)].numerator();
        if (j + 1 < n) cur = F.mul(cur, F.theta());
    }
    out.det = int_det(out.M);
    if (out.det != BigInt(1) && out.det != BigInt(-1))
        throw NotAUnit("unit_action_matrix: action determinant is not +-1");

    // Certify g * M_u = D_u * g entrywise.
    auto residual_gen = [&](mpfr_prec_t p) {
        EmbeddingResult emb = embedding_matrix(F, p);
        IntervalMatrix g = emb.lattice.basis(p);
        IntervalMatrix Mi(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                Mi(i, j) = RealInterval::exact(BigRational(out.M(i, j)), p);
        IntervalMatrix lhs = g * Mi;
        IntervalMatrix rhs(n, n);
        for (int j = 0; j < n; ++j) {
            RealInterval dj = F.embed(u.element, j, p);
            for (int i = 0; i < n; ++i) rhs(j, i) = dj * g(j, i);
        }
        RealInterval worst(0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                worst = RealInterval::hull_of(worst, (lhs(i, j) - rhs(i, j)).abs());
        return worst;
    };
    out.residual = residual_gen(prec);
    for (int j = 0; j < n; ++j) out.diag.push_back(F.embed(u.element, j, prec));
    return out;
}

WallAvoidanceReport wall_avoidance_check(const NumberField& F,
                                         const std::vector<UnitElement>& units,
                                         const std::vector<std::pair<int, int>>& pairs) {
    const int n = F.degree();
    // Prime degree stands in for having no proper subfield; composite
    // degrees are rejected rather than silently probed.
    bool prime = n >= 2;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) prime = false;
    if (!prime)
        throw PreconditionViolated("wall_avoidance_check: composite degree; field may have proper subfields");

    std::vector<std::pair<int, int>> want = pairs;
    if (want.empty())
        for (int k = 0; k < n; ++k)
            for (int l = k + 1; l < n; ++l) want.emplace_back(k, l);

    WallAvoidanceReport rep;
    rep.certified = true;
    bool have_min = false;
    for (size_t ui = 0; ui < units.size(); ++ui) {
        const UnitElement& u = units[ui];
        if (is_torsion_unit(F, u)) {
            ++rep.skipped_torsion;
            continue;
        }
        for (auto [k, l] : want) {
            if (k < 0 || l < 0 || k >= n || l >= n || k == l)
                throw PreconditionViolated("wall_avoidance_check: bad embedding pair");
            WallSeparationRow row;
            row.unit_index = ui;
            row.k = k;
            row.l = l;
            try {
                row.separation = refine_until(
                    [&](mpfr_prec_t p) { return (F.embed(u.element, k, p) - F.embed(u.element, l, p)).abs(); },
                    [](const RealInterval& iv) { return iv.is_positive(); }, 128);
                if (!have_min || row.separation.lower() < rep.min_separation) {
                    rep.min_separation = row.separation.lower();
                    have_min = true;
                }
            } catch (const IndeterminatePrecision&) {
                row.flagged = true;
                rep.certified = false;
            }
            rep.rows.push_back(std::move(row));
        }
    }
    return rep;
}

bool log_embedding_independent(const NumberField& F, const std::vector<UnitElement>& units) {
    const int n = F.degree();
    const int r = static_cast<int>(units.size());
    if (r == 0 || r > n - 1) return false;
    // Certified rank r: some r x r minor of the r x n log matrix excludes 0.
    auto logs = [&](mpfr_prec_t p) {
        IntervalMatrix L(r, n);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < n; ++j) {
                RealInterval v = F.embed(units[static_cast<size_t>(i)].element, j, p).abs();
                if (!v.is_positive())
                    throw PrecisionFailure("log_embedding_independent: embedding touches zero");
                L(i, j) = v.log();
            }
        return L;
    };
    std::vector<int> cols(static_cast<size_t>(r));
    std::function<bool(int, int, const IntervalMatrix&)> any_minor =
        [&](int start, int depth, const IntervalMatrix& L) -> bool {
        if (depth == r) {
            IntervalMatrix M(r, r);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) M(i, j) = L(i, cols[static_cast<size_t>(j)]);
            return interval_det(M).certified_sign() != 0;
        }
        for (int c = start; c < n; ++c) {
            cols[static_cast<size_t>(depth)] = c;
            if (any_minor(c + 1, depth + 1, L)) return true;
        }
        return false;
    };
    for (mpfr_prec_t p = 128; p <= precision_cap(); p *= 2) {
        if (any_minor(0, 0, logs(p))) return true;
    }
    return false;
}

UnimodularLattice unit_orbit_lattice(const NumberField& F, const std::vector<UnitElement>& units,
                                     const std::vector<BigRational>& t) {
    const int n = F.degree();
    if (t.size() != units.size())
        throw PreconditionViolated("unit_orbit_lattice: parameter count must match unit count");
    auto gen = [&F, units, t, n](mpfr_prec_t p) {
        EmbeddingResult emb = embedding_matrix(F, p);
        IntervalMatrix g = emb.lattice.basis(p);
        // d_j = exp(sum_k t_k log|sigma_j(u_k)|); det d = 1 since each unit's
        // log-embedding sums to log|norm| = 0.
        IntervalMatrix out(n, n);
        for (int j = 0; j < n; ++j) {
            RealInterval expo = RealInterval::exact(BigRational(0), p);
            for (size_t k = 0; k < units.size(); ++k) {
                RealInterval av = F.embed(units[k].element, j, p).abs();
                if (!av.is_positive())
                    throw PrecisionFailure("unit_orbit_lattice: embedding enclosure touches zero");
                expo += RealInterval::exact(t[k], p) * av.log();
            }
            RealInterval dj = expo.exp();
            for (int i = 0; i < n; ++i) out(j, i) = dj * g(j, i);
        }
        return out;
    };
    return UnimodularLattice(n, gen);
}

CompactOrbitStats compact_orbit_probe(const NumberField& F, const std::vector<UnitElement>& units,
                                      const std::vector<int>& grid, int workers,
                                      const BigRational& rel_width) {
    if (grid.size() != units.size())
        throw PreconditionViolated("compact_orbit_probe: grid rank must match unit count");
    if (!log_embedding_independent(F, units))
        throw PreconditionViolated("compact_orbit_probe: units are not multiplicatively independent");
    unsigned long total = 1;
    for (int g : grid) {
        if (g < 1) throw PreconditionViolated("compact_orbit_probe: grid dims must be >= 1");
        total *= static_cast<unsigned long>(g);
    }

    std::vector<RealInterval> lengths(total);
    std::vector<std::vector<BigRational>> ts(total);
    parallel_for(total, workers, [&](size_t idx) {
        std::vector<BigRational> t;
        size_t rem = idx;
        for (size_t k = 0; k < grid.size(); ++k) {
            int g = grid[k];
            t.push_back(BigRational(static_cast<long>(rem % static_cast<size_t>(g)), g));
            rem /= static_cast<size_t>(g);
        }
        UnimodularLattice L = unit_orbit_lattice(F, units, t);
        lengths[idx] = systole(L, rel_width).length;
        ts[idx] = std::move(t);
    });

    CompactOrbitStats stats;
    stats.samples = total;
    for (size_t i = 0; i < total; ++i) {
        BigRational lo = lengths[i].lower();
        BigRational hi = lengths[i].upper();
        if (i == 0 || lo < stats.min_systole_lower) {
            stats.min_systole_lower = lo;
            stats.grid_argmin = ts[i];
        }
        if (i == 0 || hi > stats.max_systole_upper) stats.max_systole_upper = hi;
    }
    return stats;
}

const std::vector<FieldSpec>& builtin_catalog() {
    static const std::vector<FieldSpec> catalog = {
        // x^3 - 3x - 1: cyclic cubic, discriminant 81; theta and theta + 1
        // are independent units (exact norms 1 and -1).
        {"cubic-disc81",
         {BigInt(-1), BigInt(-3), BigInt(0), BigInt(1)},
         {{BigInt(0), BigInt(1), BigInt(0)}, {BigInt(1), BigInt(1), BigInt(0)}}},
        // x^3 - x^2 - 2x + 1: cyclic cubic, discriminant 49; units theta and
        // theta - 1.
        {"cubic-disc49",
         {BigInt(1), BigInt(-2), BigInt(-1), BigInt(1)},
         {{BigInt(0), BigInt(1), BigInt(0)}, {BigInt(-1), BigInt(1), BigInt(0)}}},
        // x^2 - 2 with the fundamental unit 1 + sqrt(2).
        {"sqrt2",
         {BigInt(-2), BigInt(0), BigInt(1)},
         {{BigInt(1), BigInt(1)}}},
    };
    return catalog;
}

FieldInstance instantiate(const FieldSpec& spec) {
    FieldInstance inst{spec, NumberField::create(spec.poly), {}};
    for (const auto& u : spec.units) inst.units.push_back(make_unit(inst.field, u));
    return inst;
}

} // namespace orbitlab
