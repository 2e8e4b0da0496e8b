#pragma once

#include <string>
#include <vector>

#include "fb/polynomial.hpp"

namespace fb {

/// Named polynomial fixtures:
///   xy       n=2, degree 2
///   x2-y2    x^2 - y^2 embedded in R^3, degree 2
///   re-z3    Re((x+iy)^3), n=2, degree 3
///   zx       z*x in R^3, degree 2
///   szulkin  x^2 - y^2 + z^3 - 3 x^2 z in R^3 (harmonic, not homogeneous)
HarmonicPolynomial fixture(const std::string& id);

std::vector<std::string> fixture_ids();

}  // namespace fb
