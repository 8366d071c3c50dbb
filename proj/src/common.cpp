#include "odoforge/error.hpp"
#include "odoforge/rational.hpp"

namespace odoforge {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownGenerator: return "UnknownGenerator";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::GroupMismatch: return "GroupMismatch";
    case ErrorKind::RadiusCap: return "RadiusCap";
    case ErrorKind::InvalidGroup: return "InvalidGroup";
    case ErrorKind::NotFiniteIndex: return "NotFiniteIndex";
    case ErrorKind::StateCap: return "StateCap";
    case ErrorKind::CoreCap: return "CoreCap";
    case ErrorKind::NestingViolation: return "NestingViolation";
    case ErrorKind::PointNotInCylinder: return "PointNotInCylinder";
    case ErrorKind::IndexOneLevel: return "IndexOneLevel";
    case ErrorKind::TransversalSearchCap: return "TransversalSearchCap";
    case ErrorKind::WindowOutsideTower: return "WindowOutsideTower";
    case ErrorKind::TranslateEscapesSpace: return "TranslateEscapesSpace";
    case ErrorKind::InclusionUndecided: return "InclusionUndecided";
    case ErrorKind::ColumnSumViolation: return "ColumnSumViolation";
    case ErrorKind::SemanticError: return "SemanticError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Error";
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational frac(const Rational& r) {
  const auto n = r.numerator();
  const auto d = r.denominator();
  auto m = n % d;
  if (m < 0) m += d;
  return Rational(m, d);
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace odoforge
