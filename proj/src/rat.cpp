#include "ncdx/rat.hpp"

namespace ncdx {

Rat Rat::parse(const std::string &s) {
    std::string trimmed;
    trimmed.reserve(s.size());
    for (char c : s)
        if (!isspace(static_cast<unsigned char>(c))) trimmed.push_back(c);
    if (trimmed.empty()) fail(Errc::SchemaError, "empty rational literal");

    auto slash = trimmed.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(trimmed));
        Int num(trimmed.substr(0, slash));
        Int den(trimmed.substr(slash + 1));
        if (den == 0) fail(Errc::ZeroDenominator, "rational literal with zero denominator");
        return Rat(num, den);
    } catch (const std::invalid_argument &) {
        fail(Errc::SchemaError, "malformed rational literal '" + s + "'");
    }
}

Rat Rat::pow(long e) const {
    if (e == 0) return Rat(1);
    Rat base = e < 0 ? inverse() : *this;
    unsigned long k = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), base.v_.get_num().get_mpz_t(), k);
    mpz_pow_ui(den.get_mpz_t(), base.v_.get_den().get_mpz_t(), k);
    return Rat(num, den);
}

std::string Rat::str() const {
    if (is_integer()) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Int int_gcd(const Int &a, const Int &b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

Int int_lcm(const Int &a, const Int &b) {
    Int l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

} // namespace ncdx
