#include "orbitlab/lattice.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace orbitlab {

namespace {

void check_square(const RatMatrix& M, const char* who) {
    if (M.rows() != M.cols() || M.rows() == 0)
        throw PreconditionViolated(std::string(who) + ": square nonempty matrix required");
}

} // namespace

BigRational fro_norm2(const RatMatrix& M) {
    BigRational s(0);
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) s += M(i, j) * M(i, j);
    return s;
}

RatMatrix rat_inverse(const RatMatrix& M) {
    check_square(M, "rat_inverse");
    const Eigen::Index n = M.rows();
    RatMatrix a = M;
    RatMatrix inv = rat_identity(static_cast<int>(n));
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index pivot = -1;
        for (Eigen::Index r = col; r < n; ++r)
            if (!a(r, col).is_zero()) {
                pivot = r;
                break;
            }
        if (pivot < 0) throw RankDeficient("rat_inverse: singular matrix");
        if (pivot != col) {
            a.row(pivot).swap(a.row(col));
            inv.row(pivot).swap(inv.row(col));
        }
        BigRational d = a(col, col);
        for (Eigen::Index j = 0; j < n; ++j) {
            a(col, j) /= d;
            inv(col, j) /= d;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == col || a(r, col).is_zero()) continue;
            BigRational f = a(r, col);
            for (Eigen::Index j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

BigInt int_det(const IntMatrix& M) {
    if (M.rows() != M.cols() || M.rows() == 0)
        throw PreconditionViolated("int_det: square nonempty matrix required");
    const Eigen::Index n = M.rows();
    IntMatrix a = M;
    BigInt prev(1);
    int sign = 1;
    for (Eigen::Index k = 0; k < n - 1; ++k) {
        if (a(k, k).is_zero()) {
            Eigen::Index pivot = -1;
            for (Eigen::Index r = k + 1; r < n; ++r)
                if (!a(r, k).is_zero()) {
                    pivot = r;
                    break;
                }
            if (pivot < 0) return BigInt(0);
            a.row(pivot).swap(a.row(k));
            sign = -sign;
        }
        for (Eigen::Index i = k + 1; i < n; ++i)
            for (Eigen::Index j = k + 1; j < n; ++j)
                a(i, j) = BigInt::divexact(a(k, k) * a(i, j) - a(i, k) * a(k, j), prev);
        prev = a(k, k);
    }
    BigInt d = a(n - 1, n - 1);
    return sign > 0 ? d : -d;
}

BigRational rat_det(const RatMatrix& M) {
    check_square(M, "rat_det");
    const Eigen::Index n = M.rows();
    // Clear denominators columnwise, then run the integer Bareiss path.
    IntMatrix scaled(n, n);
    BigRational scale(1);
    for (Eigen::Index j = 0; j < n; ++j) {
        BigInt lcm(1);
        for (Eigen::Index i = 0; i < n; ++i) {
            mpz_class l;
            mpz_lcm(l.get_mpz_t(), lcm.raw().get_mpz_t(),
                    M(i, j).denominator().raw().get_mpz_t());
            lcm = BigInt(l);
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            BigRational v = M(i, j) * BigRational(lcm);
            scaled(i, j) = v.numerator();
        }
        scale /= BigRational(lcm);
    }
    return BigRational(int_det(scaled)) * scale;
}

RealInterval interval_det(const IntervalMatrix& M) {
    if (M.rows() != M.cols() || M.rows() == 0 || M.rows() > 10)
        throw PreconditionViolated("interval_det: square matrix with n <= 10 required");
    const int n = static_cast<int>(M.rows());
    // Cofactor expansion along the first column of each minor.
    std::function<RealInterval(std::vector<int>&, int)> go = [&](std::vector<int>& cols,
                                                                 int row) -> RealInterval {
        if (static_cast<size_t>(row) == static_cast<size_t>(n)) return RealInterval(1);
        if (cols.size() == 1) return M(row, cols[0]);
        RealInterval acc(0);
        for (size_t k = 0; k < cols.size(); ++k) {
            int c = cols[k];
            std::vector<int> rest;
            rest.reserve(cols.size() - 1);
            for (size_t j = 0; j < cols.size(); ++j)
                if (j != k) rest.push_back(cols[j]);
            RealInterval term = M(row, c) * go(rest, row + 1);
            acc = (k % 2 == 0) ? acc + term : acc - term;
        }
        return acc;
    };
    std::vector<int> cols(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) cols[static_cast<size_t>(i)] = i;
    return go(cols, 0);
}

UnimodularLattice UnimodularLattice::from_exact(RatMatrix basis, BigRational det_tol) {
    check_square(basis, "UnimodularLattice");
    UnimodularLattice L;
    L.n_ = static_cast<int>(basis.rows());
    BigRational d = rat_det(basis).abs();
    if (d.is_zero()) throw RankDeficient("UnimodularLattice: singular basis");
    if ((d - BigRational(1)).abs() > det_tol)
        throw PreconditionViolated("UnimodularLattice: |det| - 1 exceeds tolerance");
    RatMatrix copy = basis;
    L.exact_ = std::move(basis);
    L.gen_ = [copy](mpfr_prec_t prec) { return to_intervals(copy, prec); };
    return L;
}

UnimodularLattice::UnimodularLattice(int n, Generator gen, BigRational det_tol)
    : n_(n), gen_(std::move(gen)) {
    if (n_ < 1) throw PreconditionViolated("UnimodularLattice: n >= 1 required");
    // Validate |det| within tolerance at escalating precision.
    refine_until(
        [&](mpfr_prec_t p) {
            IntervalMatrix B = gen_(p);
            if (B.rows() != n_ || B.cols() != n_)
                throw PreconditionViolated("UnimodularLattice: generator shape mismatch");
            return interval_det(B).abs() - RealInterval(1);
        },
        [&](const RealInterval& err) {
            return err.abs().definitely_le(det_tol);
        },
        128);
}

IntervalMatrix UnimodularLattice::basis(mpfr_prec_t prec) const { return gen_(prec); }

namespace {

struct GramSchmidt {
    std::vector<std::vector<BigRational>> mu; // mu[j][i], i < j
    std::vector<BigRational> bstar2;
};

GramSchmidt gram_schmidt(const RatMatrix& B) {
    const Eigen::Index n = B.cols();
    std::vector<RatVector> bstar;
    GramSchmidt gs;
    gs.mu.assign(static_cast<size_t>(n), {});
    gs.bstar2.assign(static_cast<size_t>(n), BigRational(0));
    for (Eigen::Index j = 0; j < n; ++j) {
        RatVector v = B.col(j);
        gs.mu[static_cast<size_t>(j)].assign(static_cast<size_t>(j), BigRational(0));
        for (Eigen::Index i = 0; i < j; ++i) {
            BigRational dot(0);
            for (Eigen::Index r = 0; r < B.rows(); ++r) dot += B(r, j) * bstar[static_cast<size_t>(i)](r);
            BigRational m = dot / gs.bstar2[static_cast<size_t>(i)];
            gs.mu[static_cast<size_t>(j)][static_cast<size_t>(i)] = m;
            for (Eigen::Index r = 0; r < B.rows(); ++r) v(r) -= m * bstar[static_cast<size_t>(i)](r);
        }
        BigRational n2(0);
        for (Eigen::Index r = 0; r < B.rows(); ++r) n2 += v(r) * v(r);
        if (n2.is_zero()) throw RankDeficient("lll: rank-deficient basis");
        gs.bstar2[static_cast<size_t>(j)] = n2;
        bstar.push_back(std::move(v));
    }
    return gs;
}

} // namespace

LLLResult lll_rational(const RatMatrix& B0, const BigRational& delta) {
    check_square(B0, "lll_rational");
    if (!(delta > BigRational(1, 4) && delta < BigRational(1)))
        throw PreconditionViolated("lll: delta must lie in (1/4, 1)");
    const Eigen::Index n = B0.cols();
    RatMatrix B = B0;
    IntMatrix T = int_identity(static_cast<int>(n));

    GramSchmidt gs = gram_schmidt(B);
    Eigen::Index k = 1;
    while (k < n) {
        // Size-reduce column k against preceding columns.
        for (Eigen::Index i = k - 1; i >= 0; --i) {
            BigInt r = gs.mu[static_cast<size_t>(k)][static_cast<size_t>(i)].round_nearest();
            if (!r.is_zero()) {
                BigRational rr(r);
                for (Eigen::Index row = 0; row < n; ++row) {
                    B(row, k) -= rr * B(row, i);
                    T(row, k) -= r * T(row, i);
                }
                gs = gram_schmidt(B);
            }
        }
        BigRational lhs = gs.bstar2[static_cast<size_t>(k)];
        BigRational mu = gs.mu[static_cast<size_t>(k)][static_cast<size_t>(k - 1)];
        BigRational rhs = (delta - mu * mu) * gs.bstar2[static_cast<size_t>(k - 1)];
        if (lhs >= rhs) {
            ++k;
        } else {
            B.col(k).swap(B.col(k - 1));
            T.col(k).swap(T.col(k - 1));
            gs = gram_schmidt(B);
            k = std::max<Eigen::Index>(k - 1, 1);
        }
    }
    return LLLResult{std::move(B), std::move(T), gs.bstar2};
}

ReductionReport lll_reduce(const UnimodularLattice& L, const BigRational& delta, mpfr_prec_t prec) {
    IntervalMatrix B = L.basis(prec);
    auto [mid, radius] = midpoints_and_radius(B);
    (void)radius;
    LLLResult res = lll_rational(mid, delta);
    ReductionReport rep;
    rep.transform = res.transform;
    rep.reduced_surrogate = std::move(res.reduced);
    rep.delta = delta;
    rep.gs_norms2 = std::move(res.gs_norms2);
    // basis * T in interval arithmetic.
    IntervalMatrix TI(B.rows(), B.cols());
    for (Eigen::Index i = 0; i < B.rows(); ++i)
        for (Eigen::Index j = 0; j < B.cols(); ++j)
            TI(i, j) = RealInterval::exact(BigRational(rep.transform(i, j)), prec);
    rep.reduced_basis = B * TI;
    return rep;
}

namespace {

/// Complete enumeration of nonzero integer vectors with quadratic value
/// <= bound for the Gram-Schmidt data of a reduced basis; keeps the running
/// minimum. Classic depth-first Fincke-Pohst with exact rational bounds.
struct Enumerator {
    const GramSchmidt& gs;
    Eigen::Index n;
    std::vector<long> x;
    std::vector<BigRational> center;   // c_i = sum_{l>i} mu_{l,i} x_l
    std::vector<BigRational> partial;  // cost accumulated above level i
    BigRational best;
    std::vector<long> best_x;

    Enumerator(const GramSchmidt& g, Eigen::Index dim, BigRational initial)
        : gs(g), n(dim), x(static_cast<size_t>(dim), 0),
          center(static_cast<size_t>(dim), BigRational(0)),
          partial(static_cast<size_t>(dim) + 1, BigRational(0)), best(std::move(initial)) {}

    BigRational level_cost(Eigen::Index i) const {
        BigRational t = BigRational(x[static_cast<size_t>(i)]) + center[static_cast<size_t>(i)];
        return t * t * gs.bstar2[static_cast<size_t>(i)];
    }

    void fill_center(Eigen::Index i) {
        BigRational c(0);
        for (Eigen::Index l = i + 1; l < n; ++l)
            c += gs.mu[static_cast<size_t>(l)][static_cast<size_t>(i)] * BigRational(x[static_cast<size_t>(l)]);
        center[static_cast<size_t>(i)] = c;
    }

    void descend(Eigen::Index i) {
        if (i < 0) return;
        fill_center(i);
        BigRational budget = best - partial[static_cast<size_t>(i) + 1];
        if (budget.sign() < 0) return;
        const BigRational& c = center[static_cast<size_t>(i)];
        const BigRational& q = gs.bstar2[static_cast<size_t>(i)];
        auto cost_ok = [&](long v) {
            BigRational t = BigRational(v) + c;
            return t * t * q <= budget;
        };
        BigInt v0_big = (-c).round_nearest();
        if (!v0_big.fits_long())
            throw PreconditionViolated("shortest_vector: enumeration coordinate out of range");
        long v0 = v0_big.to_long();
        // v0 is the integer closest to the window center, so an empty check
        // there certifies the whole level is empty.
        if (!cost_ok(v0)) return;
        long lo = v0, hi = v0;
        while (cost_ok(lo - 1)) --lo;
        while (cost_ok(hi + 1)) ++hi;
        for (long v = lo; v <= hi; ++v) {
            x[static_cast<size_t>(i)] = v;
            BigRational cost = level_cost(i);
            BigRational new_partial = partial[static_cast<size_t>(i) + 1] + cost;
            if (new_partial > best) continue;
            if (i == 0) {
                bool nonzero = false;
                for (long xv : x)
                    if (xv != 0) {
                        nonzero = true;
                        break;
                    }
                if (nonzero && new_partial < best) {
                    best = new_partial;
                    best_x = x;
                }
            } else {
                partial[static_cast<size_t>(i)] = new_partial;
                descend(i - 1);
            }
        }
        x[static_cast<size_t>(i)] = 0;
    }
};

} // namespace

ShortestResult shortest_vector(const RatMatrix& B0) {
    check_square(B0, "shortest_vector");
    if (B0.rows() > 10) throw PreconditionViolated("shortest_vector: n <= 10 required");
    LLLResult red = lll_rational(B0);
    const Eigen::Index n = B0.cols();

    GramSchmidt gs = gram_schmidt(red.reduced);
    // Initial bound: the smallest reduced column norm (a valid candidate).
    BigRational bound(0);
    Eigen::Index bound_col = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        BigRational n2(0);
        for (Eigen::Index i = 0; i < n; ++i) n2 += red.reduced(i, j) * red.reduced(i, j);
        if (j == 0 || n2 < bound) {
            bound = n2;
            bound_col = j;
        }
    }

    Enumerator en(gs, n, bound);
    en.best_x.assign(static_cast<size_t>(n), 0);
    en.best_x[static_cast<size_t>(bound_col)] = 1;
    en.descend(n - 1);

    ShortestResult out;
    out.min_norm2 = en.best;
    IntVector xr(n);
    for (Eigen::Index i = 0; i < n; ++i) xr(i) = BigInt(en.best_x[static_cast<size_t>(i)]);
    out.coords = red.transform * xr;
    return out;
}

namespace {

/// Rational u > 0 with u^2 >= x, close to sqrt(x).
BigRational sqrt_upper(const BigRational& x) {
    if (x.sign() < 0) throw PreconditionViolated("sqrt_upper of negative value");
    return RealInterval::exact(x, 96).sqrt().upper();
}

} // namespace

SystoleResult systole(const UnimodularLattice& L, const BigRational& rel_width_target,
                      mpfr_prec_t prec0) {
    if (L.dim() > 10) throw PreconditionViolated("systole: n <= 10 required");
    const int n = L.dim();

    // Exact bases certify exactly (rho = 0).
    if (L.exact_basis()) {
        ShortestResult sv = shortest_vector(*L.exact_basis());
        SystoleResult out;
        out.surrogate_min_norm2 = sv.min_norm2;
        out.rho = BigRational(0);
        out.achieving_vector = sv.coords;
        out.length = refine_until(
            [&](mpfr_prec_t p) { return RealInterval::exact(sv.min_norm2, p).sqrt(); },
            [&](const RealInterval& iv) {
                return iv.width() <= rel_width_target * iv.lower();
            },
            prec0);
        return out;
    }

    for (mpfr_prec_t prec = prec0; prec <= precision_cap(); prec *= 2) {
        IntervalMatrix B = L.basis(prec);
        auto [mid, w] = midpoints_and_radius(B);
        ShortestResult sv = shortest_vector(mid);
        // Perturbation transfer: for the true basis B = mid + Delta with
        // |Delta_ij| <= w, every nonzero integer x satisfies
        //   (1 - rho) ||mid x|| <= ||B x|| <= (1 + rho) ||mid x||,
        // where rho = n * w * ||mid^{-1}||_F, so the surrogate's lambda_1
        // brackets the true systole.
        BigRational inv_norm = sqrt_upper(fro_norm2(rat_inverse(mid)));
        BigRational rho = BigRational(n) * w * inv_norm;
        if (rho >= BigRational(1, 8)) continue;
        RealInterval lam = RealInterval::exact(sv.min_norm2, prec).sqrt();
        RealInterval one_minus = RealInterval::exact(BigRational(1) - rho, prec);
        RealInterval one_plus = RealInterval::exact(BigRational(1) + rho, prec);
        RealInterval length = RealInterval::hull_of(lam * one_minus, lam * one_plus);
        if (length.width() > rel_width_target * length.lower()) continue;
        SystoleResult out;
        out.length = length;
        out.achieving_vector = sv.coords;
        out.surrogate_min_norm2 = sv.min_norm2;
        out.rho = rho;
        return out;
    }
    throw IndeterminatePrecision("systole: precision cap reached before certification");
}

namespace {

long long det_ll(std::vector<std::vector<long long>> a) {
    size_t n = a.size();
    long long det = 1;
    for (size_t k = 0; k < n; ++k) {
        size_t pivot = k;
        while (pivot < n && a[pivot][k] == 0) ++pivot;
        if (pivot == n) return 0;
        if (pivot != k) {
            std::swap(a[pivot], a[k]);
            det = -det;
        }
        // Fraction-free elimination on long long; entries stay tiny at the
        // search radii used here.
        for (size_t i = k + 1; i < n; ++i) {
            while (a[i][k] != 0) {
                long long q = a[k][k] / a[i][k];
                for (size_t j = k; j < n; ++j) a[k][j] -= q * a[i][j];
                std::swap(a[k], a[i]);
                det = -det;
            }
        }
        det *= a[k][k];
    }
    return det;
}

} // namespace

QuotientDistanceResult quotient_distance(const UnimodularLattice& L1, const UnimodularLattice& L2,
                                         int search_radius) {
    if (L1.dim() != L2.dim()) throw PreconditionViolated("quotient_distance: dimension mismatch");
    if (search_radius < 1) throw PreconditionViolated("quotient_distance: search_radius >= 1");
    const int n = L1.dim();

    Eigen::MatrixXd A = to_doubles(lll_reduce(L1).reduced_surrogate);
    Eigen::MatrixXd Bm = to_doubles(lll_reduce(L2).reduced_surrogate);

    QuotientDistanceResult out;
    out.value = std::numeric_limits<double>::infinity();
    out.gamma = Eigen::MatrixXi::Zero(n, n);

    // Candidate columns with their costs against each target column.
    long side = 2L * search_radius + 1;
    long ncand = 1;
    for (int i = 0; i < n; ++i) {
        if (ncand > 2'000'000 / side) throw PreconditionViolated("quotient_distance: radius too large");
        ncand *= side;
    }
    std::vector<Eigen::VectorXi> cands;
    cands.reserve(static_cast<size_t>(ncand));
    for (long idx = 0; idx < ncand; ++idx) {
        Eigen::VectorXi v(n);
        long rem = idx;
        for (int i = 0; i < n; ++i) {
            v(i) = static_cast<int>(rem % side) - search_radius;
            rem /= side;
        }
        cands.push_back(std::move(v));
    }
    // cost[j][k]: ||A * cand_k - Bm_j||^2, with candidate order sorted per column.
    std::vector<std::vector<std::pair<double, int>>> cost(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        auto& cj = cost[static_cast<size_t>(j)];
        cj.reserve(cands.size());
        for (size_t k = 0; k < cands.size(); ++k) {
            Eigen::VectorXd diff = A * cands[k].cast<double>() - Bm.col(j);
            cj.emplace_back(diff.squaredNorm(), static_cast<int>(k));
        }
        std::sort(cj.begin(), cj.end());
    }

    // Babai-style seed: when the two points are equivalent the rounded
    // change of basis is the witness, and seeding it tightens all pruning.
    {
        Eigen::MatrixXd rel = A.fullPivLu().solve(Bm);
        Eigen::MatrixXi guess(n, n);
        bool in_range = true;
        for (int r = 0; r < n && in_range; ++r)
            for (int c = 0; c < n; ++c) {
                double v = std::round(rel(r, c));
                if (std::abs(v) > search_radius) {
                    in_range = false;
                    break;
                }
                guess(r, c) = static_cast<int>(v);
            }
        if (in_range) {
            std::vector<std::vector<long long>> g(static_cast<size_t>(n),
                                                  std::vector<long long>(static_cast<size_t>(n)));
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) g[static_cast<size_t>(r)][static_cast<size_t>(c)] = guess(r, c);
            long long d = det_ll(g);
            if (d == 1 || d == -1) {
                out.value = (A * guess.cast<double>() - Bm).squaredNorm();
                out.gamma = guess;
                out.found = true;
            }
        }
    }

    Eigen::MatrixXi gamma(n, n);
    std::function<void(int, double)> dfs = [&](int j, double acc) {
        if (j == n) {
            std::vector<std::vector<long long>> g(static_cast<size_t>(n),
                                                  std::vector<long long>(static_cast<size_t>(n)));
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) g[static_cast<size_t>(r)][static_cast<size_t>(c)] = gamma(r, c);
            long long d = det_ll(g);
            if (d == 1 || d == -1) {
                if (acc < out.value) {
                    out.value = acc;
                    out.gamma = gamma;
                    out.found = true;
                }
            }
            return;
        }
        for (const auto& [c, k] : cost[static_cast<size_t>(j)]) {
            if (acc + c >= out.value) break; // sorted: nothing better follows
            gamma.col(j) = cands[static_cast<size_t>(k)];
            dfs(j + 1, acc + c);
        }
    };
    dfs(0, 0.0);
    if (out.found) out.value = std::sqrt(out.value);
    return out;
}

RatMatrix read_lattice_text(std::istream& in) {
    int n = 0;
    if (!(in >> n) || n < 1) throw ConfigError("lattice text: bad dimension line");
    RatMatrix M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::string tok;
            if (!(in >> tok)) throw ConfigError("lattice text: not enough entries");
            M(i, j) = parse_rational(tok);
        }
    return M;
}

void write_lattice_text(std::ostream& out, const RatMatrix& M) {
    out << M.rows() << "\n";
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) out << " ";
            out << M(i, j).to_string();
        }
        out << "\n";
    }
}

} // namespace orbitlab
