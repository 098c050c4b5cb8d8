#pragma once

// Exact-rational / floating scalar with a runtime mode tag.
//
// Rational mode is closed under +,-,*,/ with exact results (arbitrary
// precision via Boost.Multiprecision). Mixing a rational with a floating
// scalar promotes the result to floating and sets a sticky `promoted`
// diagnostic flag on it.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace ergo {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

enum class ScalarMode { Rational, Floating };

class Scalar {
public:
    Scalar() = default;

    static Scalar rational(BigRational v) {
        Scalar s;
        s.mode_ = ScalarMode::Rational;
        s.rat_ = std::move(v);
        return s;
    }
    static Scalar rational(long long num, long long den = 1) {
        if (den == 0) throw error("Scalar: zero denominator");
        return rational(BigRational(BigInt(num), BigInt(den)));
    }
    static Scalar floating(double v) {
        Scalar s;
        s.mode_ = ScalarMode::Floating;
        s.flt_ = v;
        return s;
    }
    static Scalar zero(ScalarMode m) {
        return m == ScalarMode::Rational ? rational(0) : floating(0.0);
    }
    static Scalar one(ScalarMode m) {
        return m == ScalarMode::Rational ? rational(1) : floating(1.0);
    }

    // Accepts "3", "-2/3", "0.25", "2.5e-3". Decimal strings parse exactly
    // in rational mode (0.25 -> 1/4).
    static Scalar parse(const std::string& text, ScalarMode m) {
        if (m == ScalarMode::Floating) {
            std::size_t pos = 0;
            double v = std::stod(text, &pos);
            if (pos != text.size()) throw error("Scalar: bad numeric literal '" + text + "'");
            return floating(v);
        }
        return rational(parse_rational(text));
    }

    ScalarMode mode() const { return mode_; }
    bool is_rational() const { return mode_ == ScalarMode::Rational; }
    bool promoted() const { return promoted_; }

    const BigRational& rat() const {
        if (!is_rational()) throw error("Scalar: floating value has no exact form");
        return rat_;
    }
    double value() const {
        return is_rational() ? static_cast<double>(rat_) : flt_;
    }

    bool is_zero() const { return is_rational() ? rat_.is_zero() : flt_ == 0.0; }
    int sign() const {
        if (is_rational()) return rat_ < 0 ? -1 : (rat_.is_zero() ? 0 : 1);
        return flt_ < 0 ? -1 : (flt_ == 0.0 ? 0 : 1);
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        return combine(a, b, [](const BigRational& x, const BigRational& y) { return x + y; },
                       [](double x, double y) { return x + y; });
    }
    friend Scalar operator-(const Scalar& a, const Scalar& b) {
        return combine(a, b, [](const BigRational& x, const BigRational& y) { return x - y; },
                       [](double x, double y) { return x - y; });
    }
    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        return combine(a, b, [](const BigRational& x, const BigRational& y) { return x * y; },
                       [](double x, double y) { return x * y; });
    }
    friend Scalar operator/(const Scalar& a, const Scalar& b) {
        if (b.is_zero()) throw error("Scalar: division by zero");
        return combine(a, b, [](const BigRational& x, const BigRational& y) { return x / y; },
                       [](double x, double y) { return x / y; });
    }
    Scalar operator-() const {
        Scalar s = *this;
        if (s.is_rational()) s.rat_ = -s.rat_; else s.flt_ = -s.flt_;
        return s;
    }
    Scalar& operator+=(const Scalar& o) { *this = *this + o; return *this; }
    Scalar& operator-=(const Scalar& o) { *this = *this - o; return *this; }
    Scalar& operator*=(const Scalar& o) { *this = *this * o; return *this; }
    Scalar& operator/=(const Scalar& o) { *this = *this / o; return *this; }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        if (a.is_rational() && b.is_rational()) return a.rat_ == b.rat_;
        return a.value() == b.value();
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }
    friend bool operator<(const Scalar& a, const Scalar& b) {
        if (a.is_rational() && b.is_rational()) return a.rat_ < b.rat_;
        return a.value() < b.value();
    }
    friend bool operator>(const Scalar& a, const Scalar& b) { return b < a; }
    friend bool operator<=(const Scalar& a, const Scalar& b) { return !(b < a); }
    friend bool operator>=(const Scalar& a, const Scalar& b) { return !(a < b); }

    // "p/q" (or "p") in rational mode, shortest round-trip decimal otherwise.
    std::string str() const {
        if (is_rational()) {
            std::string s = numerator(rat_).str();
            if (denominator(rat_) != 1) s += "/" + denominator(rat_).str();
            return s;
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", flt_);
        return buf;
    }
    // Fixed-width decimal rendering used by CSV emitters.
    std::string decimal_str(int digits = 12) const {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.*g", digits, value());
        return buf;
    }

private:
    template <typename RatOp, typename FltOp>
    static Scalar combine(const Scalar& a, const Scalar& b, RatOp rop, FltOp fop) {
        Scalar s;
        if (a.is_rational() && b.is_rational()) {
            s.mode_ = ScalarMode::Rational;
            s.rat_ = rop(a.rat_, b.rat_);
            s.promoted_ = a.promoted_ || b.promoted_;
        } else {
            s.mode_ = ScalarMode::Floating;
            s.flt_ = fop(a.value(), b.value());
            // mixing modes is flagged; pure floating arithmetic is not
            s.promoted_ = a.promoted_ || b.promoted_ || (a.mode_ != b.mode_);
        }
        return s;
    }

    static BigRational parse_rational(const std::string& text) {
        std::string t = text;
        if (t.empty()) throw error("Scalar: empty numeric literal");
        auto slash = t.find('/');
        if (slash != std::string::npos) {
            BigInt num = parse_int(t.substr(0, slash));
            BigInt den = parse_int(t.substr(slash + 1));
            if (den == 0) throw error("Scalar: zero denominator in '" + text + "'");
            return BigRational(num, den);
        }
        // decimal / scientific form, parsed exactly
        bool neg = false;
        std::size_t i = 0;
        if (t[i] == '+' || t[i] == '-') { neg = t[i] == '-'; ++i; }
        BigInt mantissa = 0;
        long frac_digits = 0, exponent = 0;
        bool any_digit = false, in_frac = false;
        for (; i < t.size(); ++i) {
            char c = t[i];
            if (c >= '0' && c <= '9') {
                mantissa = mantissa * 10 + (c - '0');
                if (in_frac) ++frac_digits;
                any_digit = true;
            } else if (c == '.' && !in_frac) {
                in_frac = true;
            } else if ((c == 'e' || c == 'E') && any_digit) {
                exponent = std::stol(t.substr(i + 1));
                i = t.size() - 1;
            } else {
                throw error("Scalar: bad numeric literal '" + text + "'");
            }
        }
        if (!any_digit) throw error("Scalar: bad numeric literal '" + text + "'");
        BigRational r(mantissa, 1);
        long net = exponent - frac_digits;
        BigInt p10 = 1;
        for (long k = 0; k < std::labs(net); ++k) p10 *= 10;
        if (net >= 0) r *= BigRational(p10, 1); else r /= BigRational(p10, 1);
        return neg ? -r : r;
    }

    static BigInt parse_int(const std::string& s) {
        if (s.empty()) throw error("Scalar: bad integer literal");
        std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
        if (i == s.size()) throw error("Scalar: bad integer literal '" + s + "'");
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') throw error("Scalar: bad integer literal '" + s + "'");
        return BigInt(s);
    }

    ScalarMode mode_ = ScalarMode::Rational;
    BigRational rat_ = BigRational(0);
    double flt_ = 0.0;
    bool promoted_ = false;
};

} // namespace ergo
