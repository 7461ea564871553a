#pragma once

// Exact rational scalars. Everything in this library is exact: no floating
// point appears anywhere in computations or persisted data.

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace gws {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(long long num, long long den = 1) {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    return Rational(BigInt(num), BigInt(den));
}

// Parses "p", "-p" or "p/q" with optional surrounding whitespace. Any other
// shape (floats, empty strings, q = 0) is rejected.
inline Rational parse_rational(const std::string& text) {
    std::size_t b = text.find_first_not_of(" \t");
    std::size_t e = text.find_last_not_of(" \t");
    if (b == std::string::npos) throw std::invalid_argument("rational: empty literal");
    std::string s = text.substr(b, e - b + 1);

    auto is_int = [](const std::string& t) {
        if (t.empty()) return false;
        std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9') return false;
        return true;
    };

    std::size_t slash = s.find('/');
    if (slash == std::string::npos) {
        if (!is_int(s)) throw std::invalid_argument("rational: bad literal '" + text + "'");
        return Rational(BigInt(s));
    }
    std::string p = s.substr(0, slash);
    std::string q = s.substr(slash + 1);
    if (!is_int(p) || !is_int(q)) throw std::invalid_argument("rational: bad literal '" + text + "'");
    BigInt den(q);
    if (den == 0) throw std::invalid_argument("rational: zero denominator in '" + text + "'");
    return Rational(BigInt(p), den);
}

// Canonical form: reduced, sign on the numerator, "/q" omitted when q = 1.
inline std::string rational_to_string(const Rational& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) s += "/" + denominator(r).str();
    return s;
}

inline Rational factorial(int n) {
    if (n < 0) throw std::invalid_argument("factorial of negative");
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return Rational(f);
}

}  // namespace gws
