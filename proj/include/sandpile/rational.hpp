#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace sandpile {

// Exact arbitrary-precision rationals (GMP), always kept in reduced form
// with positive denominator by mpq_class canonicalization.
using Rational = mpq_class;

// Parses "a/b" or a plain integer "a". Throws std::invalid_argument on
// malformed input or zero denominator.
Rational parse_rational(const std::string& text);

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    Rational r(static_cast<long>(num), static_cast<long>(den));
    r.canonicalize();
    return r;
}

inline std::string numerator_string(const Rational& r) { return r.get_num().get_str(); }
inline std::string denominator_string(const Rational& r) { return r.get_den().get_str(); }

inline std::string rational_string(const Rational& r) { return r.get_str(); }

}  // namespace sandpile
