#include "fb/fixtures.hpp"

#include <stdexcept>

namespace fb {

namespace {
MultiIndex mi(std::vector<int> e) { return MultiIndex(std::move(e)); }
}

HarmonicPolynomial fixture(const std::string& id) {
  if (id == "xy") {
    Polynomial p(2);
    p.add_term(mi({1, 1}), 1.0);
    return HarmonicPolynomial(p);
  }
  if (id == "x2-y2") {
    Polynomial p(3);
    p.add_term(mi({2, 0, 0}), 1.0);
    p.add_term(mi({0, 2, 0}), -1.0);
    return HarmonicPolynomial(p);
  }
  if (id == "re-z3") {
    // Re((x+iy)^3) = x^3 - 3 x y^2
    Polynomial p(2);
    p.add_term(mi({3, 0}), 1.0);
    p.add_term(mi({1, 2}), -3.0);
    return HarmonicPolynomial(p);
  }
  if (id == "zx") {
    Polynomial p(3);
    p.add_term(mi({1, 0, 1}), 1.0);
    return HarmonicPolynomial(p);
  }
  if (id == "szulkin") {
    Polynomial p(3);
    p.add_term(mi({2, 0, 0}), 1.0);
    p.add_term(mi({0, 2, 0}), -1.0);
    p.add_term(mi({0, 0, 3}), 1.0);
    p.add_term(mi({2, 0, 1}), -3.0);
    return HarmonicPolynomial(p);
  }
  throw std::invalid_argument("unknown fixture id: " + id);
}

std::vector<std::string> fixture_ids() { return {"xy", "x2-y2", "re-z3", "zx", "szulkin"}; }

}  // namespace fb
