#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>

namespace varkit {

/// Exact rational scalar used for every symbolic coefficient.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Exact conversion: every finite double is a dyadic rational.
inline Rational rational_from_double(double v) {
    if (v == 0.0) return Rational(0);
    int exp = 0;
    double mant = std::frexp(v, &exp);        // v = mant * 2^exp, |mant| in [0.5, 1)
    const double scaled = std::ldexp(mant, 53); // integral by construction
    Integer num(static_cast<long long>(scaled));
    Rational r(num);
    const int shift = exp - 53;
    if (shift >= 0) {
        r *= Rational(Integer(1) << shift);
    } else {
        r /= Rational(Integer(1) << (-shift));
    }
    return r;
}

inline Integer factorial(int k) {
    Integer f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

inline std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

} // namespace varkit
