#pragma once

#include <mpfr.h>

#include <functional>
#include <string>
#include <utility>

#include "orbitlab/errors.hpp"
#include "orbitlab/rational.hpp"

namespace orbitlab {

/// Escalation ceiling for certified comparisons, in bits. Defaults to 4096;
/// the ORBITLAB_PRECISION_CAP environment variable overrides it at startup.
mpfr_prec_t precision_cap();
void set_precision_cap(mpfr_prec_t bits);

/// A closed real interval [lo, hi] with dyadic endpoints, rounded outward.
/// Every value it certifies is guaranteed to lie inside. Immutable in use:
/// all arithmetic returns fresh intervals.
class RealInterval {
  public:
    static constexpr mpfr_prec_t kMinPrec = 64;

    RealInterval() { init(kMinPrec, kMinPrec); set_si(0); }
    RealInterval(long v) { init(kMinPrec, kMinPrec); set_si(v); }
    RealInterval(int v) { init(kMinPrec, kMinPrec); set_si(v); }

    RealInterval(const RealInterval& o) {
        init(mpfr_get_prec(o.lo_), mpfr_get_prec(o.hi_));
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    RealInterval(RealInterval&& o) noexcept {
        mpfr_init2(lo_, kMinPrec);
        mpfr_init2(hi_, kMinPrec);
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
    }
    RealInterval& operator=(const RealInterval& o) {
        if (this != &o) {
            mpfr_set_prec(lo_, mpfr_get_prec(o.lo_));
            mpfr_set_prec(hi_, mpfr_get_prec(o.hi_));
            mpfr_set(lo_, o.lo_, MPFR_RNDD);
            mpfr_set(hi_, o.hi_, MPFR_RNDU);
        }
        return *this;
    }
    RealInterval& operator=(RealInterval&& o) noexcept {
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
        return *this;
    }
    ~RealInterval() {
        mpfr_clear(lo_);
        mpfr_clear(hi_);
    }

    /// Tightest representable enclosure of an exact rational.
    static RealInterval exact(const BigRational& v, mpfr_prec_t prec = kMinPrec);
    static RealInterval exact_int(const BigInt& v);
    /// [lo, hi] from exact rational endpoints (outward).
    static RealInterval hull(const BigRational& lo, const BigRational& hi,
                             mpfr_prec_t prec = kMinPrec);

    mpfr_prec_t precision() const {
        mpfr_prec_t a = mpfr_get_prec(lo_), b = mpfr_get_prec(hi_);
        return a > b ? a : b;
    }

    BigRational lower() const;
    BigRational upper() const;
    BigRational width() const { return upper() - lower(); }
    BigRational midpoint() const;
    double lower_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
    double upper_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }
    double mid_double() const { return 0.5 * (lower_double() + upper_double()); }

    bool is_point() const { return mpfr_equal_p(lo_, hi_) != 0; }
    bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
    bool contains(const BigRational& v) const { return lower() <= v && v <= upper(); }
    bool contains(const RealInterval& o) const {
        return mpfr_lessequal_p(lo_, o.lo_) && mpfr_greaterequal_p(hi_, o.hi_);
    }
    bool intersects(const RealInterval& o) const {
        return !(mpfr_less_p(hi_, o.lo_) || mpfr_less_p(o.hi_, lo_));
    }
    bool is_positive() const { return mpfr_sgn(lo_) > 0; }
    bool is_negative() const { return mpfr_sgn(hi_) < 0; }
    /// +1 / -1 when the sign is certified, 0 when the interval straddles zero.
    int certified_sign() const {
        if (is_positive()) return 1;
        if (is_negative()) return -1;
        return 0;
    }
    bool definitely_less(const RealInterval& o) const { return mpfr_less_p(hi_, o.lo_) != 0; }
    bool definitely_le(const BigRational& v) const { return upper() <= v; }
    bool definitely_ge(const BigRational& v) const { return lower() >= v; }

    RealInterval operator+(const RealInterval& o) const;
    RealInterval operator-(const RealInterval& o) const;
    RealInterval operator*(const RealInterval& o) const;
    /// Throws PreconditionViolated if the divisor interval contains zero.
    RealInterval operator/(const RealInterval& o) const;
    RealInterval operator-() const;
    RealInterval& operator+=(const RealInterval& o) { return *this = *this + o; }
    RealInterval& operator-=(const RealInterval& o) { return *this = *this - o; }
    RealInterval& operator*=(const RealInterval& o) { return *this = *this * o; }

    /// Needed by Eigen's generic paths; true only for identical point intervals.
    bool operator==(const RealInterval& o) const {
        return mpfr_equal_p(lo_, o.lo_) && mpfr_equal_p(hi_, o.hi_);
    }
    bool operator!=(const RealInterval& o) const { return !(*this == o); }

    RealInterval abs() const;
    RealInterval sqrt() const;
    RealInterval exp() const;
    RealInterval log() const;
    RealInterval pow_int(long e) const;

    static RealInterval hull_of(const RealInterval& a, const RealInterval& b);

    std::string to_string(int digits = 8) const;

    friend std::ostream& operator<<(std::ostream& os, const RealInterval& x);

  private:
    void init(mpfr_prec_t plo, mpfr_prec_t phi) {
        mpfr_init2(lo_, plo);
        mpfr_init2(hi_, phi);
    }
    void set_si(long v) {
        mpfr_set_si(lo_, v, MPFR_RNDD);
        mpfr_set_si(hi_, v, MPFR_RNDU);
    }
    static mpfr_prec_t result_prec(const RealInterval& a, const RealInterval& b) {
        mpfr_prec_t p = a.precision() > b.precision() ? a.precision() : b.precision();
        return p < kMinPrec ? kMinPrec : p;
    }

    mpfr_t lo_;
    mpfr_t hi_;
};

std::ostream& operator<<(std::ostream& os, const RealInterval& x);

/// Enclosure of exp(x) for exact rational x at the given precision.
RealInterval interval_exp(const BigRational& x, mpfr_prec_t prec);
/// Enclosure of log(x) for exact rational x > 0.
RealInterval interval_log(const BigRational& x, mpfr_prec_t prec);
/// Enclosure of x^(num/den) for rational x > 0 (used for |disc|^(-1/2n)).
RealInterval interval_rational_power(const BigRational& x, long num, long den, mpfr_prec_t prec);

/// Recomputes `gen` at doubling precision until its result's certified sign
/// is nonzero or the enclosure is an exact zero point. Throws
/// IndeterminatePrecision at the cap.
int certified_sign_escalating(const std::function<RealInterval(mpfr_prec_t)>& gen,
                              mpfr_prec_t start = RealInterval::kMinPrec);

/// Recomputes `gen` at doubling precision until pred(result) or the cap.
RealInterval refine_until(const std::function<RealInterval(mpfr_prec_t)>& gen,
                          const std::function<bool(const RealInterval&)>& pred,
                          mpfr_prec_t start = RealInterval::kMinPrec);

} // namespace orbitlab
