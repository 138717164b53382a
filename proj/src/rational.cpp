#include "orbitlab/rational.hpp"

#include <mpfr.h>

#include <cctype>
#include <cstdlib>

#include "orbitlab/interval.hpp"

namespace orbitlab {

BigRational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw ConfigError("parse_rational: empty literal");

    if (auto slash = s.find('/'); slash != std::string::npos) {
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        return BigRational(num, den);
    }

    bool neg = false;
    size_t i = 0;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_dot = false;
    for (; i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'); ++i) {
        if (s[i] == '.') {
            if (seen_dot) throw ConfigError("parse_rational: bad literal '" + text + "'");
            seen_dot = true;
        } else {
            digits.push_back(s[i]);
            if (seen_dot) ++frac_digits;
        }
    }
    long exponent = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        exponent = std::strtol(s.c_str() + i + 1, nullptr, 10);
        i = s.size();
    }
    if (i != s.size() || digits.empty())
        throw ConfigError("parse_rational: bad literal '" + text + "'");

    BigInt mantissa(digits);
    if (neg) mantissa = -mantissa;
    long e10 = exponent - frac_digits;
    BigRational v(mantissa);
    if (e10 > 0)
        v *= BigRational(BigInt::pow(BigInt(10), static_cast<unsigned long>(e10)));
    else if (e10 < 0)
        v /= BigRational(BigInt::pow(BigInt(10), static_cast<unsigned long>(-e10)));
    return v;
}

std::string decimal_string(const BigRational& v, int significant_digits) {
    if (v.is_zero()) return "0";
    // Render through MPFR with enough working precision that the printed
    // digits are faithful.
    mpfr_prec_t prec = static_cast<mpfr_prec_t>(significant_digits * 4 + 64);
    mpfr_t x;
    mpfr_init2(x, prec);
    mpfr_set_q(x, v.raw().get_mpq_t(), MPFR_RNDN);
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Rg", significant_digits, x);
    std::string out(buf);
    mpfr_free_str(buf);
    mpfr_clear(x);
    return out;
}

} // namespace orbitlab
