#pragma once

#include <Eigen/Core>

#include "orbitlab/interval.hpp"
#include "orbitlab/quartic.hpp"
#include "orbitlab/rational.hpp"

namespace Eigen {

template <>
struct NumTraits<orbitlab::BigRational> : GenericNumTraits<orbitlab::BigRational> {
    typedef orbitlab::BigRational Real;
    typedef orbitlab::BigRational NonInteger;
    typedef orbitlab::BigRational Nested;
    typedef orbitlab::BigRational Literal;
    static inline Real epsilon() { return Real(0); }
    static inline Real dummy_precision() { return Real(0); }
    static inline int digits10() { return 0; }
    enum {
        IsInteger = 0,
        IsSigned = 1,
        IsComplex = 0,
        RequireInitialization = 1,
        ReadCost = 8,
        AddCost = 60,
        MulCost = 60,
    };
};

template <>
struct NumTraits<orbitlab::BigInt> : GenericNumTraits<orbitlab::BigInt> {
    typedef orbitlab::BigInt Real;
    typedef orbitlab::BigRational NonInteger;
    typedef orbitlab::BigInt Nested;
    typedef orbitlab::BigInt Literal;
    static inline Real epsilon() { return Real(0); }
    static inline Real dummy_precision() { return Real(0); }
    static inline int digits10() { return 0; }
    enum {
        IsInteger = 1,
        IsSigned = 1,
        IsComplex = 0,
        RequireInitialization = 1,
        ReadCost = 8,
        AddCost = 40,
        MulCost = 40,
    };
};

template <>
struct NumTraits<orbitlab::RealInterval> : GenericNumTraits<orbitlab::RealInterval> {
    typedef orbitlab::RealInterval Real;
    typedef orbitlab::RealInterval NonInteger;
    typedef orbitlab::RealInterval Nested;
    typedef orbitlab::RealInterval Literal;
    static inline Real epsilon() { return Real(0); }
    static inline Real dummy_precision() { return Real(0); }
    static inline int digits10() { return 0; }
    enum {
        IsInteger = 0,
        IsSigned = 1,
        IsComplex = 0,
        RequireInitialization = 1,
        ReadCost = 16,
        AddCost = 100,
        MulCost = 200,
    };
};

template <>
struct NumTraits<orbitlab::QuarticInt> : GenericNumTraits<orbitlab::QuarticInt> {
    typedef orbitlab::QuarticInt Real;
    typedef orbitlab::QuarticInt NonInteger;
    typedef orbitlab::QuarticInt Nested;
    typedef orbitlab::QuarticInt Literal;
    static inline Real epsilon() { return Real(0); }
    static inline Real dummy_precision() { return Real(0); }
    static inline int digits10() { return 0; }
    enum {
        IsInteger = 1,
        IsSigned = 1,
        IsComplex = 0,
        RequireInitialization = 1,
        ReadCost = 32,
        AddCost = 160,
        MulCost = 600,
    };
};

} // namespace Eigen

namespace orbitlab {

using RatMatrix = Eigen::Matrix<BigRational, Eigen::Dynamic, Eigen::Dynamic>;
using RatVector = Eigen::Matrix<BigRational, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<BigInt, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<BigInt, Eigen::Dynamic, 1>;
using IntervalMatrix = Eigen::Matrix<RealInterval, Eigen::Dynamic, Eigen::Dynamic>;
using IntervalVector = Eigen::Matrix<RealInterval, Eigen::Dynamic, 1>;
using QuarticMatrix = Eigen::Matrix<QuarticInt, Eigen::Dynamic, Eigen::Dynamic>;

inline RatMatrix rat_identity(int n) {
    RatMatrix m = RatMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = BigRational(1);
    return m;
}

inline IntMatrix int_identity(int n) {
    IntMatrix m = IntMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = BigInt(1);
    return m;
}

inline QuarticMatrix quartic_identity(int n) {
    QuarticMatrix m = QuarticMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = QuarticInt(1);
    return m;
}

inline IntervalMatrix interval_identity(int n, mpfr_prec_t prec = RealInterval::kMinPrec) {
    IntervalMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = RealInterval::exact(BigRational(i == j ? 1 : 0), prec);
    return m;
}

inline IntervalMatrix to_intervals(const RatMatrix& m, mpfr_prec_t prec = RealInterval::kMinPrec) {
    IntervalMatrix r(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = RealInterval::exact(m(i, j), prec);
    return r;
}

inline RatMatrix to_rationals(const IntMatrix& m) {
    RatMatrix r(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = BigRational(m(i, j));
    return r;
}

inline Eigen::MatrixXd to_doubles(const IntervalMatrix& m) {
    Eigen::MatrixXd r(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).mid_double();
    return r;
}

inline Eigen::MatrixXd to_doubles(const RatMatrix& m) {
    Eigen::MatrixXd r(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).to_double();
    return r;
}

/// Midpoint rationals and the largest entrywise halfwidth of an interval matrix.
inline std::pair<RatMatrix, BigRational> midpoints_and_radius(const IntervalMatrix& m) {
    RatMatrix mid(m.rows(), m.cols());
    BigRational radius(0);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            mid(i, j) = m(i, j).midpoint();
            BigRational half = m(i, j).width() * BigRational(1, 2);
            if (half > radius) radius = half;
        }
    return {std::move(mid), radius};
}

/// Upper bound on max |entry| over the matrix.
inline BigRational sup_abs(const IntervalMatrix& m) {
    BigRational best(0);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            BigRational u = m(i, j).abs().upper();
            if (u > best) best = u;
        }
    return best;
}

} // namespace orbitlab
