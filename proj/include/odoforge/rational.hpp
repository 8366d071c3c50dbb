#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace odoforge {

// Compare only against other Rationals: with Boost 1.74 under C++20, `r == 1`
// resolves to a rewritten candidate that recurses forever.
using Rational = boost::rational<std::int64_t>;

// "p/q", or "p" when q == 1.
std::string to_string(const Rational& r);

// Representative of r mod 1 in [0, 1).
Rational frac(const Rational& r);

double to_double(const Rational& r);

}  // namespace odoforge
