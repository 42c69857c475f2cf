#pragma once

// Text form of multivariate polynomials: terms separated by + and -, each a
// *-separated product of rationals (p or p/q) and variables x<k>[^e], with
// variables numbered from x1. Example: "x1^2*x2 - 3/2*x3 + 7".

#include <string>

#include "ao/varieties.hpp"

namespace ao {

// Parse the grammar above. Variable count is the largest index seen, or
// n_min if that is larger. Throws ParseError with the byte offset.
MultiPoly parse_poly(const std::string& text, int n_min = 0);

// Canonical rendering; parse_poly(render(f)) round-trips exactly.
std::string render(const MultiPoly& f);

} // namespace ao
