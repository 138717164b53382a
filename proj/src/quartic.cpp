#include "orbitlab/quartic.hpp"

#include <ostream>
#include <sstream>

namespace orbitlab {

std::string QuarticInt::to_string() const {
    std::ostringstream os;
    os << "(" << c_[0] << ", " << c_[1] << ", " << c_[2] << ", " << c_[3] << ")";
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const QuarticInt& x) {
    return os << x.to_string();
}

QuarticInt quartic_alpha_power(const BigInt& e) {
    QuarticInt base = e.sign() >= 0 ? quartic_alpha() : sigma(quartic_alpha());
    return base.pow(e.abs().to_ulong());
}

RealInterval enclose(const QuarticInt& x, mpfr_prec_t precision_bits) {
    if (precision_bits < 8) throw PreconditionViolated("enclose: precision_bits >= 8 required");
    size_t coord_bits = 1;
    for (int i = 0; i < 4; ++i) coord_bits = std::max(coord_bits, x[i].bit_length());
    mpfr_prec_t work = precision_bits + static_cast<mpfr_prec_t>(coord_bits) + 16;

    auto eval = [&x](mpfr_prec_t p) {
        // t = 2^(1/4) enclosure, then Horner in t with outward rounding.
        mpfr_t tlo, thi;
        mpfr_init2(tlo, p);
        mpfr_init2(thi, p);
        mpfr_set_ui(tlo, 2, MPFR_RNDD);
        mpfr_set_ui(thi, 2, MPFR_RNDU);
        mpfr_rootn_ui(tlo, tlo, 4, MPFR_RNDD);
        mpfr_rootn_ui(thi, thi, 4, MPFR_RNDU);
        RealInterval t = RealInterval::exact(BigRational(1), p);
        {
            // Build the interval [tlo, thi] through exact rational endpoints.
            mpz_class mlo, mhi;
            mpfr_exp_t elo = mpfr_get_z_2exp(mlo.get_mpz_t(), tlo);
            mpfr_exp_t ehi = mpfr_get_z_2exp(mhi.get_mpz_t(), thi);
            auto scale = [](const mpz_class& m, mpfr_exp_t e) {
                mpq_class q(m);
                mpz_class p2;
                mpz_ui_pow_ui(p2.get_mpz_t(), 2, static_cast<unsigned long>(e < 0 ? -e : e));
                if (e >= 0)
                    q *= mpq_class(p2);
                else
                    q /= mpq_class(p2);
                return BigRational(q);
            };
            t = RealInterval::hull(scale(mlo, elo), scale(mhi, ehi), p);
        }
        mpfr_clear(tlo);
        mpfr_clear(thi);
        RealInterval acc = RealInterval::exact_int(x[3]);
        acc = acc * t + RealInterval::exact_int(x[2]);
        acc = acc * t + RealInterval::exact_int(x[1]);
        acc = acc * t + RealInterval::exact_int(x[0]);
        return acc;
    };

    // Escalate until the width meets the contract relative to max(1, |value|).
    for (mpfr_prec_t p = work; p <= precision_cap() + work; p *= 2) {
        RealInterval v = eval(p);
        BigRational tol = BigRational(1);
        BigRational mag = v.lower().abs();
        if (v.upper().abs() > mag) mag = v.upper().abs();
        if (mag > BigRational(1)) tol = mag;
        BigRational target = tol / BigRational(BigInt::pow(BigInt(2), static_cast<unsigned long>(precision_bits)));
        if (v.width() <= target) return v;
    }
    throw IndeterminatePrecision("enclose: could not reach requested width");
}

} // namespace orbitlab
