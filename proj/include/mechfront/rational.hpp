#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace mechfront {

/// Exact rational number. All arithmetic in this library is exact; no
/// floating point is used anywhere on the solve path.
using Rat = mpq_class;

inline Rat make_rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

/// Parses "a/b" or "a" (integers, optional sign). Throws on malformed input.
inline Rat parse_rat(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            return Rat(mpz_class{s});
        }
        mpz_class num(s.substr(0, slash));
        mpz_class den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        Rat r(num, den);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("malformed rational: '" + s + "'");
    }
}

/// Lowest-terms "a/b" (or "a" when the denominator is 1).
inline std::string rat_str(const Rat& r) {
    return r.get_str();
}

}  // namespace mechfront
