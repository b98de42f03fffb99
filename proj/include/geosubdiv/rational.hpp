#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <string>
#include <string_view>

#include "geosubdiv/errors.hpp"

namespace geosubdiv {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& q) { return static_cast<double>(q); }

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

// "p/q" or "p". Decimal points and exponents are rejected so every value is exact.
inline Rational parse_rational(std::string_view text) {
    auto digits = [](std::string_view s, bool allow_sign) {
        if (s.empty()) return false;
        std::size_t i = 0;
        if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        return true;
    };
    const auto slash = text.find('/');
    const auto num = text.substr(0, slash);
    if (!digits(num, true)) throw ParseError("not a rational: '" + std::string(text) + "'");
    std::string num_str(num.front() == '+' ? num.substr(1) : num);
    BigInt p(num_str);
    if (slash == std::string_view::npos) return Rational(p);
    const auto den = text.substr(slash + 1);
    if (!digits(den, false)) throw ParseError("not a rational: '" + std::string(text) + "'");
    BigInt q{std::string(den)};
    if (q == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rational(p, q);
}

inline std::string to_string(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

} // namespace geosubdiv
