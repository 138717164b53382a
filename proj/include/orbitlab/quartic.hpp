#pragma once

#include <array>
#include <iosfwd>
#include <string>

#include "orbitlab/interval.hpp"
#include "orbitlab/rational.hpp"

namespace orbitlab {

/// An element a + b*t + c*t^2 + d*t^3 of the ring Z[t]/(t^4 - 2), i.e. the
/// quartic integer ring Z[2^(1/4)] in the power basis. Coordinate equality
/// is ring equality. sigma is the automorphism t -> -t fixing sqrt(2).
class QuarticInt {
  public:
    QuarticInt() : c_{BigInt(0), BigInt(0), BigInt(0), BigInt(0)} {}
    QuarticInt(long v) : QuarticInt() { c_[0] = BigInt(v); }
    QuarticInt(int v) : QuarticInt(static_cast<long>(v)) {}
    QuarticInt(BigInt a, BigInt b, BigInt c, BigInt d)
        : c_{std::move(a), std::move(b), std::move(c), std::move(d)} {}

    const BigInt& operator[](int i) const { return c_[static_cast<size_t>(i)]; }
    const std::array<BigInt, 4>& coords() const { return c_; }

    QuarticInt operator+(const QuarticInt& o) const {
        return {c_[0] + o.c_[0], c_[1] + o.c_[1], c_[2] + o.c_[2], c_[3] + o.c_[3]};
    }
    QuarticInt operator-(const QuarticInt& o) const {
        return {c_[0] - o.c_[0], c_[1] - o.c_[1], c_[2] - o.c_[2], c_[3] - o.c_[3]};
    }
    QuarticInt operator-() const { return {-c_[0], -c_[1], -c_[2], -c_[3]}; }

    /// Product under t^4 = 2.
    QuarticInt operator*(const QuarticInt& o) const {
        const BigInt &a0 = c_[0], &a1 = c_[1], &a2 = c_[2], &a3 = c_[3];
        const BigInt &b0 = o.c_[0], &b1 = o.c_[1], &b2 = o.c_[2], &b3 = o.c_[3];
        BigInt two(2);
        return {
            a0 * b0 + two * (a1 * b3 + a2 * b2 + a3 * b1),
            a0 * b1 + a1 * b0 + two * (a2 * b3 + a3 * b2),
            a0 * b2 + a1 * b1 + a2 * b0 + two * (a3 * b3),
            a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0,
        };
    }

    QuarticInt& operator+=(const QuarticInt& o) { return *this = *this + o; }
    QuarticInt& operator-=(const QuarticInt& o) { return *this = *this - o; }
    QuarticInt& operator*=(const QuarticInt& o) { return *this = *this * o; }

    bool operator==(const QuarticInt& o) const { return c_ == o.c_; }
    bool operator!=(const QuarticInt& o) const { return !(*this == o); }

    bool is_zero() const {
        return c_[0].is_zero() && c_[1].is_zero() && c_[2].is_zero() && c_[3].is_zero();
    }
    /// True when the odd coordinates vanish, i.e. the element lies in Z[sqrt 2].
    bool is_even() const { return c_[1].is_zero() && c_[3].is_zero(); }

    QuarticInt pow(unsigned long e) const {
        QuarticInt acc(1), base = *this;
        while (e > 0) {
            if (e & 1UL) acc *= base;
            base *= base;
            e >>= 1;
        }
        return acc;
    }

    std::string to_string() const;

    static QuarticInt t() { return {BigInt(0), BigInt(1), BigInt(0), BigInt(0)}; }
    static QuarticInt sqrt2() { return {BigInt(0), BigInt(0), BigInt(1), BigInt(0)}; }

  private:
    std::array<BigInt, 4> c_;
};

std::ostream& operator<<(std::ostream& os, const QuarticInt& x);

/// The automorphism t -> -t: (a, b, c, d) -> (a, -b, c, -d).
inline QuarticInt sigma(const QuarticInt& x) {
    return {x[0], -x[1], x[2], -x[3]};
}

/// The generator alpha = (3 + 2*sqrt2) + t*(2 + 2*sqrt2) with alpha * sigma(alpha) = 1.
inline QuarticInt quartic_alpha() {
    return {BigInt(3), BigInt(2), BigInt(2), BigInt(2)};
}

/// alpha^e for any integer e, using alpha^(-1) = sigma(alpha).
QuarticInt quartic_alpha_power(const BigInt& e);

/// Certified enclosure of the real value a + b*2^(1/4) + c*2^(1/2) + d*2^(3/4),
/// with relative width at most 2^(-precision_bits). Requires precision_bits >= 8.
RealInterval enclose(const QuarticInt& x, mpfr_prec_t precision_bits);

/// An element a + c*sqrt(2) of the even subring Z[sqrt 2], used for the
/// pair-of-matrices presentation (X, Y) with M = X + t*Y.
class Sqrt2Int {
  public:
    Sqrt2Int() : a_(0), c_(0) {}
    Sqrt2Int(long a) : a_(a), c_(0) {}
    Sqrt2Int(BigInt a, BigInt c) : a_(std::move(a)), c_(std::move(c)) {}

    const BigInt& unit_part() const { return a_; }
    const BigInt& sqrt2_part() const { return c_; }

    Sqrt2Int operator+(const Sqrt2Int& o) const { return {a_ + o.a_, c_ + o.c_}; }
    Sqrt2Int operator-(const Sqrt2Int& o) const { return {a_ - o.a_, c_ - o.c_}; }
    Sqrt2Int operator-() const { return {-a_, -c_}; }
    Sqrt2Int operator*(const Sqrt2Int& o) const {
        return {a_ * o.a_ + BigInt(2) * c_ * o.c_, a_ * o.c_ + c_ * o.a_};
    }
    bool operator==(const Sqrt2Int& o) const { return a_ == o.a_ && c_ == o.c_; }
    bool operator!=(const Sqrt2Int& o) const { return !(*this == o); }
    bool is_zero() const { return a_.is_zero() && c_.is_zero(); }

    /// Galois conjugate over Q: sqrt2 -> -sqrt2.
    Sqrt2Int tau() const { return {a_, -c_}; }

    QuarticInt to_quartic() const { return {a_, BigInt(0), c_, BigInt(0)}; }

    RealInterval enclose(mpfr_prec_t prec) const {
        return orbitlab::enclose(to_quartic(), prec);
    }

  private:
    BigInt a_;
    BigInt c_;
};

/// Even part a + c*sqrt2 of a quartic integer.
inline Sqrt2Int even_part(const QuarticInt& x) { return {x[0], x[2]}; }
/// Odd part b + d*sqrt2, so that x = even + t*odd.
inline Sqrt2Int odd_part(const QuarticInt& x) { return {x[1], x[3]}; }

} // namespace orbitlab
