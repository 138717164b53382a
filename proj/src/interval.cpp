#include "orbitlab/interval.hpp"

#include <atomic>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <vector>

namespace orbitlab {

namespace {

std::atomic<mpfr_prec_t>& cap_storage() {
    static std::atomic<mpfr_prec_t> cap = [] {
        mpfr_prec_t c = 4096;
        if (const char* env = std::getenv("ORBITLAB_PRECISION_CAP")) {
            long v = std::strtol(env, nullptr, 10);
            if (v >= 64) c = static_cast<mpfr_prec_t>(v);
        }
        return c;
    }();
    return cap;
}

} // namespace

mpfr_prec_t precision_cap() { return cap_storage().load(); }
void set_precision_cap(mpfr_prec_t bits) { cap_storage().store(bits < 64 ? 64 : bits); }

RealInterval RealInterval::exact(const BigRational& v, mpfr_prec_t prec) {
    RealInterval r;
    if (prec < kMinPrec) prec = kMinPrec;
    mpfr_set_prec(r.lo_, prec);
    mpfr_set_prec(r.hi_, prec);
    mpfr_set_q(r.lo_, v.raw().get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, v.raw().get_mpq_t(), MPFR_RNDU);
    return r;
}

RealInterval RealInterval::exact_int(const BigInt& v) {
    RealInterval r;
    mpfr_prec_t prec = static_cast<mpfr_prec_t>(v.bit_length()) + 2;
    if (prec < kMinPrec) prec = kMinPrec;
    mpfr_set_prec(r.lo_, prec);
    mpfr_set_prec(r.hi_, prec);
    mpfr_set_z(r.lo_, v.raw().get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi_, v.raw().get_mpz_t(), MPFR_RNDU);
    return r;
}

RealInterval RealInterval::hull(const BigRational& lo, const BigRational& hi, mpfr_prec_t prec) {
    if (lo > hi) throw PreconditionViolated("RealInterval::hull: lo > hi");
    RealInterval r;
    if (prec < kMinPrec) prec = kMinPrec;
    mpfr_set_prec(r.lo_, prec);
    mpfr_set_prec(r.hi_, prec);
    mpfr_set_q(r.lo_, lo.raw().get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, hi.raw().get_mpq_t(), MPFR_RNDU);
    return r;
}

namespace {

BigRational mpfr_to_rational(const mpfr_t x) {
    if (!mpfr_number_p(x)) throw PrecisionFailure("interval endpoint is not finite");
    if (mpfr_zero_p(x)) return BigRational(0);
    mpz_class m;
    mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), x);
    mpq_class q(m);
    if (e >= 0) {
        mpz_class p2;
        mpz_ui_pow_ui(p2.get_mpz_t(), 2, static_cast<unsigned long>(e));
        q *= mpq_class(p2);
    } else {
        mpz_class p2;
        mpz_ui_pow_ui(p2.get_mpz_t(), 2, static_cast<unsigned long>(-e));
        q /= mpq_class(p2);
    }
    return BigRational(std::move(q));
}

} // namespace

BigRational RealInterval::lower() const { return mpfr_to_rational(lo_); }
BigRational RealInterval::upper() const { return mpfr_to_rational(hi_); }
BigRational RealInterval::midpoint() const {
    return (lower() + upper()) * BigRational(1, 2);
}

RealInterval RealInterval::operator+(const RealInterval& o) const {
    RealInterval r;
    mpfr_prec_t p = result_prec(*this, o);
    mpfr_set_prec(r.lo_, p);
    mpfr_set_prec(r.hi_, p);
    mpfr_add(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, hi_, o.hi_, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::operator-(const RealInterval& o) const {
    RealInterval r;
    mpfr_prec_t p = result_prec(*this, o);
    mpfr_set_prec(r.lo_, p);
    mpfr_set_prec(r.hi_, p);
    mpfr_sub(r.lo_, lo_, o.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, hi_, o.lo_, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::operator*(const RealInterval& o) const {
    RealInterval r;
    mpfr_prec_t p = result_prec(*this, o);
    mpfr_set_prec(r.lo_, p);
    mpfr_set_prec(r.hi_, p);
    // Four corner products, outward.
    mpfr_t c[4];
    for (auto& x : c) mpfr_init2(x, p);
    mpfr_mul(c[0], lo_, o.lo_, MPFR_RNDD);
    mpfr_mul(c[1], lo_, o.hi_, MPFR_RNDD);
    mpfr_mul(c[2], hi_, o.lo_, MPFR_RNDD);
    mpfr_mul(c[3], hi_, o.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, c[0], c[1], MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, c[2], MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, c[3], MPFR_RNDD);
    mpfr_mul(c[0], lo_, o.lo_, MPFR_RNDU);
    mpfr_mul(c[1], lo_, o.hi_, MPFR_RNDU);
    mpfr_mul(c[2], hi_, o.lo_, MPFR_RNDU);
    mpfr_mul(c[3], hi_, o.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, c[0], c[1], MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, c[2], MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, c[3], MPFR_RNDU);
    for (auto& x : c) mpfr_clear(x);
    return r;
}

RealInterval RealInterval::operator/(const RealInterval& o) const {
    if (o.contains_zero()) throw PreconditionViolated("RealInterval: division by interval containing 0");
    RealInterval r;
    mpfr_prec_t p = result_prec(*this, o);
    mpfr_set_prec(r.lo_, p);
    mpfr_set_prec(r.hi_, p);
    mpfr_t c[4];
    for (auto& x : c) mpfr_init2(x, p);
    mpfr_div(c[0], lo_, o.lo_, MPFR_RNDD);
    mpfr_div(c[1], lo_, o.hi_, MPFR_RNDD);
    mpfr_div(c[2], hi_, o.lo_, MPFR_RNDD);
    mpfr_div(c[3], hi_, o.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, c[0], c[1], MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, c[2], MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, c[3], MPFR_RNDD);
    mpfr_div(c[0], lo_, o.lo_, MPFR_RNDU);
    mpfr_div(c[1], lo_, o.hi_, MPFR_RNDU);
    mpfr_div(c[2], hi_, o.lo_, MPFR_RNDU);
    mpfr_div(c[3], hi_, o.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, c[0], c[1], MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, c[2], MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, c[3], MPFR_RNDU);
    for (auto& x : c) mpfr_clear(x);
    return r;
}

RealInterval RealInterval::operator-() const {
    RealInterval r;
    mpfr_prec_t p = precision();
    mpfr_set_prec(r.lo_, p);
    mpfr_set_prec(r.hi_, p);
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::abs() const {
    if (mpfr_sgn(lo_) >= 0) return *this;
    if (mpfr_sgn(hi_) <= 0) return -*this;
    RealInterval r;
    mpfr_prec_t p = precision();
    mpfr_set_prec(r.lo_, p);
    mpfr_set_prec(r.hi_, p);
    mpfr_set_si(r.lo_, 0, MPFR_RNDD);
    mpfr_t na;
    mpfr_init2(na, p);
    mpfr_neg(na, lo_, MPFR_RNDU);
    mpfr_max(r.hi_, na, hi_, MPFR_RNDU);
    mpfr_clear(na);
    return r;
}

RealInterval RealInterval::sqrt() const {
    if (mpfr_sgn(lo_) < 0) throw PreconditionViolated("RealInterval::sqrt of negative interval");
    RealInterval r;
    mpfr_prec_t p = precision();
    mpfr_set_prec(r.lo_, p);
    mpfr_set_prec(r.hi_, p);
    mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
    mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::exp() const {
    RealInterval r;
    mpfr_prec_t p = precision();
    mpfr_set_prec(r.lo_, p);
    mpfr_set_prec(r.hi_, p);
    mpfr_exp(r.lo_, lo_, MPFR_RNDD);
    mpfr_exp(r.hi_, hi_, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::log() const {
    if (mpfr_sgn(lo_) <= 0) throw PreconditionViolated("RealInterval::log of nonpositive interval");
    RealInterval r;
    mpfr_prec_t p = precision();
    mpfr_set_prec(r.lo_, p);
    mpfr_set_prec(r.hi_, p);
    mpfr_log(r.lo_, lo_, MPFR_RNDD);
    mpfr_log(r.hi_, hi_, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::pow_int(long e) const {
    if (e == 0) return RealInterval(1);
    RealInterval base = *this;
    if (e < 0) {
        base = RealInterval(1) / base;
        e = -e;
    }
    RealInterval acc(1);
    while (e > 0) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

RealInterval RealInterval::hull_of(const RealInterval& a, const RealInterval& b) {
    RealInterval r;
    mpfr_prec_t p = result_prec(a, b);
    mpfr_set_prec(r.lo_, p);
    mpfr_set_prec(r.hi_, p);
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

std::string RealInterval::to_string(int digits) const {
    char* slo = nullptr;
    char* shi = nullptr;
    mpfr_asprintf(&slo, "%.*Rg", digits, lo_);
    mpfr_asprintf(&shi, "%.*Rg", digits, hi_);
    std::string out = std::string("[") + slo + ", " + shi + "]";
    mpfr_free_str(slo);
    mpfr_free_str(shi);
    return out;
}

std::ostream& operator<<(std::ostream& os, const RealInterval& x) {
    return os << x.to_string();
}

RealInterval interval_exp(const BigRational& x, mpfr_prec_t prec) {
    return RealInterval::exact(x, prec).exp();
}

RealInterval interval_log(const BigRational& x, mpfr_prec_t prec) {
    if (x.sign() <= 0) throw PreconditionViolated("interval_log: nonpositive argument");
    return RealInterval::exact(x, prec).log();
}

RealInterval interval_rational_power(const BigRational& x, long num, long den, mpfr_prec_t prec) {
    if (x.sign() <= 0) throw PreconditionViolated("interval_rational_power: nonpositive base");
    if (den <= 0) throw PreconditionViolated("interval_rational_power: nonpositive root index");
    // x^(num/den) = exp(num/den * log x), evaluated outward.
    RealInterval lx = interval_log(x, prec);
    RealInterval expo = lx * (RealInterval::exact(BigRational(num, den), prec));
    return expo.exp();
}

int certified_sign_escalating(const std::function<RealInterval(mpfr_prec_t)>& gen,
                              mpfr_prec_t start) {
    for (mpfr_prec_t p = start; p <= precision_cap(); p *= 2) {
        RealInterval v = gen(p);
        int s = v.certified_sign();
        if (s != 0) return s;
        if (v.is_point()) return 0; // exactly zero
    }
    throw IndeterminatePrecision("certified sign undecided at precision cap");
}

RealInterval refine_until(const std::function<RealInterval(mpfr_prec_t)>& gen,
                          const std::function<bool(const RealInterval&)>& pred,
                          mpfr_prec_t start) {
    for (mpfr_prec_t p = start; p <= precision_cap(); p *= 2) {
        RealInterval v = gen(p);
        if (pred(v)) return v;
    }
    throw IndeterminatePrecision("interval refinement exhausted precision cap");
}

} // namespace orbitlab
