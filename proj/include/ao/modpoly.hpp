#pragma once

// Modular polynomials Phi_N: construction from the coset product over
// (a, b, d) normal forms, Horner evaluation, and certified isogeny tests.

#include <gmpxx.h>

#include <map>
#include <string>
#include <utility>

#include "ao/ball.hpp"
#include "ao/halfplane.hpp"

namespace ao {

struct ModularPolynomial {
    long n = 1;
    // (i, j) exponent of (x, y) -> integer coefficient; no zeros stored.
    std::map<std::pair<long, long>, mpz_class> coeffs;

    long deg_x() const;
    bool is_symmetric() const; // coefficient-wise (i,j) <-> (j,i)
};

// psi(N) = N prod_{p|N} (1 + 1/p), the degree of Phi_N in each variable.
long psi(long n);

// Build Phi_N. Retries internally at doubled working precision until every
// coefficient is recognized as an integer; prec_hint = 0 picks a default.
// Results are memoized in-process per N. Throws SizeCapExceeded beyond the
// configured cap (default 20) and PrecisionExhausted after repeated retries.
ModularPolynomial phi(long n, Prec prec_hint = 0);

void set_phi_cap(long cap);
long phi_cap();

ComplexBall phi_eval(long n, const ComplexBall& x, const ComplexBall& y);

// Cache file format: one line per monomial, "i j coefficient" in decimal.
std::string phi_to_text(const ModularPolynomial& p);
ModularPolynomial phi_from_text(const std::string& text); // throws ParseError

enum class Tri { yes, no, undecided };

// Certified N-isogeny test: `no` needs the Phi_N ball to exclude 0; `yes`
// needs an exact coset witness g with g tau1 equivalent to tau2 (only
// possible when the inputs are exact); anything else is undecided.
Tri is_isogenous(const HalfPlanePoint& tau1, const HalfPlanePoint& tau2, long n,
                 Prec prec);

} // namespace ao
