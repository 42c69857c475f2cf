#pragma once

// Upper half plane, the classical fundamental domain F for SL2(Z), and the
// normalized hyperbolic measure (3/pi) dx dy / y^2 with mu(F) = 1.
//
// Boundary convention:
//   F = { -1/2 <= Re tau < 1/2, |tau| > 1 }  union  the left unit-circle arc
//       { -1/2 <= Re tau <= 0, |tau| = 1 }.
// All membership answers are certified three-valued decisions on balls; exact
// (radius-0) coordinates make boundary cases decidable (e.g. Re tau = 1/2).

#include <gmpxx.h>

#include <vector>

#include "ao/ball.hpp"

namespace ao {

struct HalfPlanePoint {
    ComplexBall z;
    // Throws OutOfDomain unless Im is certified positive.
    explicit HalfPlanePoint(ComplexBall zz);
};

enum class Location { inside, outside, undecided };

// Integer 2x2 matrix [[a, b], [c, d]].
struct Mat2z {
    mpz_class a = 1, b = 0, c = 0, d = 1;
    mpz_class det() const { return a * d - b * c; }
};

Mat2z mat_mul(const Mat2z& x, const Mat2z& y);
ComplexBall apply_moebius(const Mat2z& g, const ComplexBall& z);

struct Reduction {
    HalfPlanePoint tau;
    Mat2z gamma; // tau = gamma * input
};

// Certified membership in F under the boundary convention above.
Location in_f(const HalfPlanePoint& p);

// Reduce into F by the classical T/S alternation. The translation/inversion
// choices follow ball midpoints; the final membership claim is certified.
// Throws PrecisionExhausted when a boundary decision cannot be certified at
// the input's precision (callers rebuild the input at doubled precision).
Reduction reduce_to_f(const HalfPlanePoint& p);

// Relaxed reduction for evaluation purposes: lands within a small slack of F
// (|Re| <= 1/2 + 1/64, |tau|^2 >= 1 - 1/64), enough to make q-series tails
// geometric. Never needs exact boundary decisions.
struct EvalReduction {
    ComplexBall z;
    Mat2z gamma;
};
EvalReduction reduce_for_eval(const ComplexBall& tau);

// Region of integration: the whole of F, or Omega_R = F intersect
// { sqrt(3)/2 < Im tau < R } for rational R > 1.
struct Region {
    bool whole_f = true;
    mpq_class r = 0;
    static Region full();
    static Region omega(const mpq_class& r); // throws OutOfDomain unless r > 1
};

// Exact measure value: rational + over_pi / pi.
struct Measure {
    mpq_class rational;
    mpq_class over_pi;
    RealBall value(Prec prec) const;
};

Measure measure(const Region& reg);

} // namespace ao
