#include "ncdx/parse.hpp"

#include <cctype>

namespace ncdx {

namespace {

class Parser {
public:
    Parser(const std::string &text, const Rat &u_scale) : s_(text), u_scale_(u_scale) {}

    RatFunc parse() {
        RatFunc r = expr();
        skip_ws();
        if (pos_ != s_.size()) fail(Errc::SchemaError, "trailing characters in expression '" + s_ + "'");
        return r;
    }

private:
    RatFunc expr() {
        RatFunc r = term();
        while (true) {
            skip_ws();
            if (accept('+'))
                r = r + term();
            else if (accept('-'))
                r = r - term();
            else
                return r;
        }
    }

    RatFunc term() {
        RatFunc r = factor();
        while (true) {
            skip_ws();
            if (accept('*'))
                r = r * factor();
            else if (accept('/'))
                r = r / factor();
            else
                return r;
        }
    }

    RatFunc factor() {
        skip_ws();
        bool neg = false;
        while (peek() == '+' || peek() == '-') {
            if (s_[pos_] == '-') neg = !neg;
            ++pos_;
            skip_ws();
        }
        RatFunc r = power();
        return neg ? -r : r;
    }

    RatFunc power() {
        RatFunc base = atom();
        skip_ws();
        if (accept('^')) {
            skip_ws();
            bool neg = accept('-');
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                fail(Errc::SchemaError, "exponent must be an integer in '" + s_ + "'");
            long e = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                e = e * 10 + (s_[pos_++] - '0');
                if (e > 60000) fail(Errc::Overflow, "exponent too large");
            }
            return base.pow(neg ? -e : e);
        }
        return base;
    }

    RatFunc atom() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            ++pos_;
            RatFunc r = expr();
            skip_ws();
            if (!accept(')')) fail(Errc::SchemaError, "missing ')' in '" + s_ + "'");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string digits;
            while (std::isdigit(static_cast<unsigned char>(peek()))) digits.push_back(s_[pos_++]);
            return RatFunc(Rat(Int(digits))).with_u_scale(u_scale_);
        }
        for (int i = 0; i < kNumVars; ++i) {
            Var v = static_cast<Var>(i);
            if (c == var_name(v)[0]) {
                ++pos_;
                return RatFunc::variable(v).with_u_scale(u_scale_);
            }
        }
        fail(Errc::SchemaError, "unexpected character '" + std::string(1, c) + "' in '" + s_ + "'");
    }

    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    bool accept(char c) {
        if (peek() == c) { ++pos_; return true; }
        return false;
    }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    const std::string &s_;
    Rat u_scale_;
    size_t pos_ = 0;
};

} // namespace

RatFunc parse_ratfunc(const std::string &text, const Rat &u_scale) {
    return Parser(text, u_scale).parse();
}

MPoly parse_poly(const std::string &text) {
    RatFunc r = parse_ratfunc(text);
    if (!r.is_polynomial()) fail(Errc::SchemaError, "expected a polynomial, got '" + text + "'");
    return r.num();
}

} // namespace ncdx
