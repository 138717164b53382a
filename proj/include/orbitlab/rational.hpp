#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

#include "orbitlab/errors.hpp"

namespace orbitlab {

/// Arbitrary-precision integer. Thin value wrapper over GMP that returns
/// plain values from every operator (no expression templates), which keeps
/// it usable as an Eigen scalar.
class BigInt {
  public:
    BigInt() : v_(0) {}
    BigInt(long v) : v_(v) {}
    BigInt(int v) : v_(v) {}
    explicit BigInt(const std::string& s) : v_(s, 10) {}
    BigInt(mpz_class v) : v_(std::move(v)) {}

    const mpz_class& raw() const { return v_; }
    mpz_class& raw() { return v_; }

    BigInt operator+(const BigInt& o) const { return BigInt(mpz_class(v_ + o.v_)); }
    BigInt operator-(const BigInt& o) const { return BigInt(mpz_class(v_ - o.v_)); }
    BigInt operator*(const BigInt& o) const { return BigInt(mpz_class(v_ * o.v_)); }
    BigInt operator-() const { return BigInt(mpz_class(-v_)); }
    BigInt& operator+=(const BigInt& o) {
        v_ += o.v_;
        return *this;
    }
    BigInt& operator-=(const BigInt& o) {
        v_ -= o.v_;
        return *this;
    }
    BigInt& operator*=(const BigInt& o) {
        v_ *= o.v_;
        return *this;
    }

    bool operator==(const BigInt& o) const { return v_ == o.v_; }
    bool operator!=(const BigInt& o) const { return v_ != o.v_; }
    bool operator<(const BigInt& o) const { return v_ < o.v_; }
    bool operator<=(const BigInt& o) const { return v_ <= o.v_; }
    bool operator>(const BigInt& o) const { return v_ > o.v_; }
    bool operator>=(const BigInt& o) const { return v_ >= o.v_; }

    int sign() const { return sgn(v_); }
    BigInt abs() const { return BigInt(mpz_class(::abs(v_))); }
    bool is_zero() const { return v_ == 0; }
    bool is_odd() const { return mpz_odd_p(v_.get_mpz_t()) != 0; }

    /// Floor division quotient and remainder (remainder has divisor's sign
    /// convention of mpz_fdiv: 0 <= r < |d| for d > 0).
    static std::pair<BigInt, BigInt> fdiv_qr(const BigInt& a, const BigInt& d) {
        BigInt q, r;
        mpz_fdiv_qr(q.v_.get_mpz_t(), r.v_.get_mpz_t(), a.v_.get_mpz_t(), d.v_.get_mpz_t());
        return {q, r};
    }

    static BigInt gcd(const BigInt& a, const BigInt& b) {
        BigInt g;
        mpz_gcd(g.v_.get_mpz_t(), a.v_.get_mpz_t(), b.v_.get_mpz_t());
        return g;
    }

    /// Exact quotient; the caller guarantees divisibility (Bareiss pivots).
    static BigInt divexact(const BigInt& a, const BigInt& d) {
        BigInt q;
        mpz_divexact(q.v_.get_mpz_t(), a.v_.get_mpz_t(), d.v_.get_mpz_t());
        return q;
    }

    /// floor(sqrt(a)) for a >= 0.
    static BigInt isqrt(const BigInt& a) {
        if (a.sign() < 0) throw PreconditionViolated("BigInt::isqrt of negative value");
        BigInt r;
        mpz_sqrt(r.v_.get_mpz_t(), a.v_.get_mpz_t());
        return r;
    }

    /// a^e for e >= 0. Throws if e does not fit in an unsigned long
    /// (such powers would not be materializable anyway).
    static BigInt pow(const BigInt& a, const BigInt& e) {
        if (e.sign() < 0) throw PreconditionViolated("BigInt::pow: negative exponent");
        if (!e.v_.fits_ulong_p())
            throw IndeterminatePrecision("BigInt::pow: exponent too large to materialize");
        BigInt r;
        mpz_pow_ui(r.v_.get_mpz_t(), a.v_.get_mpz_t(), e.v_.get_ui());
        return r;
    }

    static BigInt pow(const BigInt& a, unsigned long e) {
        BigInt r;
        mpz_pow_ui(r.v_.get_mpz_t(), a.v_.get_mpz_t(), e);
        return r;
    }

    /// Exact k-th root: returns the integer r with r^k == a, if one exists.
    static std::optional<BigInt> exact_root(const BigInt& a, unsigned long k) {
        if (a.sign() < 0) return std::nullopt;
        BigInt r;
        int exact = mpz_root(r.v_.get_mpz_t(), a.v_.get_mpz_t(), k);
        if (exact) return r;
        return std::nullopt;
    }

    bool fits_long() const { return v_.fits_slong_p(); }
    long to_long() const {
        if (!fits_long()) throw PreconditionViolated("BigInt::to_long: out of range");
        return v_.get_si();
    }
    unsigned long to_ulong() const {
        if (sign() < 0 || !v_.fits_ulong_p())
            throw PreconditionViolated("BigInt::to_ulong: out of range");
        return v_.get_ui();
    }

    size_t bit_length() const { return mpz_sizeinbase(v_.get_mpz_t(), 2); }
    std::string to_string() const { return v_.get_str(); }

    friend std::ostream& operator<<(std::ostream& os, const BigInt& x);

  private:
    mpz_class v_;
};

inline std::ostream& operator<<(std::ostream& os, const BigInt& x) { return os << x.raw(); }

/// Exact rational with eagerly reduced representation: gcd(num, den) = 1
/// and den > 0 always hold after construction.
class BigRational {
  public:
    BigRational() : v_(0) {}
    BigRational(long v) : v_(v) {}
    BigRational(int v) : v_(v) {}
    BigRational(const BigInt& v) : v_(v.raw()) {}
    BigRational(const BigInt& num, const BigInt& den) : v_(num.raw(), den.raw()) {
        if (den.is_zero()) throw PreconditionViolated("BigRational: zero denominator");
        v_.canonicalize();
    }
    BigRational(long num, long den) : BigRational(BigInt(num), BigInt(den)) {}
    explicit BigRational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

    const mpq_class& raw() const { return v_; }

    BigInt numerator() const { return BigInt(mpz_class(v_.get_num())); }
    BigInt denominator() const { return BigInt(mpz_class(v_.get_den())); }

    BigRational operator+(const BigRational& o) const { return wrap(v_ + o.v_); }
    BigRational operator-(const BigRational& o) const { return wrap(v_ - o.v_); }
    BigRational operator*(const BigRational& o) const { return wrap(v_ * o.v_); }
    BigRational operator/(const BigRational& o) const {
        if (o.is_zero()) throw PreconditionViolated("BigRational: division by zero");
        return wrap(v_ / o.v_);
    }
    BigRational operator-() const { return wrap(-v_); }
    BigRational& operator+=(const BigRational& o) {
        v_ += o.v_;
        return *this;
    }
    BigRational& operator-=(const BigRational& o) {
        v_ -= o.v_;
        return *this;
    }
    BigRational& operator*=(const BigRational& o) {
        v_ *= o.v_;
        return *this;
    }
    BigRational& operator/=(const BigRational& o) {
        if (o.is_zero()) throw PreconditionViolated("BigRational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    bool operator==(const BigRational& o) const { return v_ == o.v_; }
    bool operator!=(const BigRational& o) const { return v_ != o.v_; }
    bool operator<(const BigRational& o) const { return v_ < o.v_; }
    bool operator<=(const BigRational& o) const { return v_ <= o.v_; }
    bool operator>(const BigRational& o) const { return v_ > o.v_; }
    bool operator>=(const BigRational& o) const { return v_ >= o.v_; }

    int sign() const { return sgn(v_); }
    bool is_zero() const { return v_ == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    BigRational abs() const { return wrap(::abs(v_)); }

    BigInt floor() const {
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
        return BigInt(q);
    }

    BigInt ceil() const {
        mpz_class q;
        mpz_cdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
        return BigInt(q);
    }

    /// Fractional part in [0, 1).
    BigRational frac() const { return *this - BigRational(floor()); }

    /// Nearest integer, half rounded up.
    BigInt round_nearest() const { return (*this + BigRational(1, 2)).floor(); }

    static BigRational pow(const BigRational& a, long e) {
        if (e < 0) {
            if (a.is_zero()) throw PreconditionViolated("BigRational::pow: 0^negative");
            return pow(BigRational(1) / a, -e);
        }
        BigRational num(BigInt::pow(a.numerator(), static_cast<unsigned long>(e)),
                        BigInt::pow(a.denominator(), static_cast<unsigned long>(e)));
        return num;
    }

    /// p^e for integer p and possibly negative big exponent e.
    static BigRational int_pow(const BigInt& p, const BigInt& e) {
        if (e.sign() >= 0) return BigRational(BigInt::pow(p, e));
        return BigRational(BigInt(1), BigInt::pow(p, -e));
    }

    double to_double() const { return v_.get_d(); }
    std::string to_string() const { return v_.get_str(); }

    friend std::ostream& operator<<(std::ostream& os, const BigRational& x);

  private:
    static BigRational wrap(mpq_class v) {
        BigRational r;
        r.v_ = std::move(v);
        return r;
    }
    mpq_class v_;
};

inline std::ostream& operator<<(std::ostream& os, const BigRational& x) { return os << x.raw(); }

/// Parses a decimal or scientific literal ("0.001", "1e-3", "-2.5e4", "3/8")
/// into an exact rational.
BigRational parse_rational(const std::string& text);

/// Rounds to a decimal string with the given significant digits, for reports.
std::string decimal_string(const BigRational& v, int significant_digits = 17);

} // namespace orbitlab
