#pragma once

#include <doctest.h>

#include "odoforge/rational.hpp"

namespace doctest {
template <>
struct StringMaker<odoforge::Rational> {
  static String convert(const odoforge::Rational& r) { return odoforge::to_string(r).c_str(); }
};
}  // namespace doctest
