#pragma once

// Exact pre-log arithmetic for entropy identities.
//
// Every entropy expression we compute is a rational combination of logs of
// cylinder measures, and cylinder measures are products of small fractions,
// so each expression has the exact form  sum_p c_p log p  over prime bases
// with rational coefficients. Unique factorization makes the representation
// canonical: two expressions are equal iff their coefficient maps coincide.
// Bases that resist trial division are kept as atomic factors.

#include "scalar.hpp"

#include <map>

namespace ergo {

namespace detail {

inline std::map<BigInt, int> factorize(BigInt n) {
    std::map<BigInt, int> out;
    if (n <= 0) throw error("factorize: positive integers only");
    int two = 0;
    while (n % 2 == 0) { ++two; n /= 2; }
    if (two) out[2] = two;
    for (BigInt d = 3; d * d <= n && d < 1000000; d += 2) {
        int e = 0;
        while (n % d == 0) { ++e; n /= d; }
        if (e) out[d] = e;
    }
    if (n > 1) ++out[n];
    return out;
}

} // namespace detail

class LogSum {
public:
    LogSum() = default;

    // log q, q > 0, expanded over the factorizations of numerator and
    // denominator.
    static LogSum log_of(const BigRational& q) {
        if (q <= 0) throw error("LogSum: log of a non-positive value");
        LogSum s;
        for (const auto& [p, e] : detail::factorize(numerator(q))) s.add_term(p, BigRational(e));
        for (const auto& [p, e] : detail::factorize(denominator(q))) s.add_term(p, BigRational(-e));
        return s;
    }

    LogSum& add_scaled(const BigRational& c, const LogSum& other) {
        if (!c.is_zero())
            for (const auto& [p, k] : other.coeff_) add_term(p, c * k);
        return *this;
    }

    friend LogSum operator+(const LogSum& a, const LogSum& b) {
        LogSum s = a;
        s.add_scaled(BigRational(1), b);
        return s;
    }
    friend LogSum operator-(const LogSum& a, const LogSum& b) {
        LogSum s = a;
        s.add_scaled(BigRational(-1), b);
        return s;
    }
    friend LogSum operator*(const BigRational& c, const LogSum& a) {
        LogSum s;
        s.add_scaled(c, a);
        return s;
    }

    bool is_zero() const { return coeff_.empty(); }
    friend bool operator==(const LogSum& a, const LogSum& b) { return a.coeff_ == b.coeff_; }
    friend bool operator!=(const LogSum& a, const LogSum& b) { return !(a == b); }

    double value() const {
        double v = 0;
        for (const auto& [p, c] : coeff_)
            v += static_cast<double>(c) * std::log(static_cast<double>(p));
        return v;
    }

    const std::map<BigInt, BigRational>& coefficients() const { return coeff_; }

private:
    void add_term(const BigInt& base, const BigRational& c) {
        if (c.is_zero()) return;
        auto it = coeff_.find(base);
        if (it == coeff_.end()) {
            coeff_.emplace(base, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) coeff_.erase(it);
        }
    }

    std::map<BigInt, BigRational> coeff_;
};

} // namespace ergo
