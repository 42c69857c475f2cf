#pragma once

// Rigorous evaluation of the modular j-invariant, its first three
// derivatives, the cusp estimate | |j| - e^{2 pi Im tau} |, the third-order
// operator chi, and the closed-form third derivative A(y, y', y'').
//
// Evaluation route: reduce tau into (a slack neighborhood of) F so that
// |q| <= exp(-2 pi * 0.84), sum the Eisenstein q-series E2, E4, E6 with
// certified geometric tail bounds, form
//     j = 1728 E4^3 / (E4^3 - E6^2),
// and obtain derivatives from the quasimodular closed forms for q d/dq of j,
// transported back through the reducing Moebius map by the chain rule.

#include <gmpxx.h>

#include "ao/ball.hpp"
#include "ao/halfplane.hpp"

namespace ao {

// 2-jet of a function at tau: value y, first derivative y_dot, second
// derivative y_ddot, all at a common precision.
struct Jet3 {
    HalfPlanePoint tau;
    ComplexBall y;
    ComplexBall y_dot;
    ComplexBall y_ddot;
};

// j(tau) as a ball certified to contain the exact value.
ComplexBall j(const HalfPlanePoint& tau, Prec prec);

// (j, j', j'') at tau.
Jet3 j_jet(const HalfPlanePoint& tau, Prec prec);

// j''' at tau from the same differentiated series; the independent reference
// for A on true jets.
ComplexBall j_third(const HalfPlanePoint& tau, Prec prec);

// Certified upper bound of | |j(tau)| - e^{2 pi Im tau} | over the ball.
// Requires tau in the closure of F (throws OutOfDomain when certified
// outside); precision is chosen internally from Im tau.
double cusp_gap(const HalfPlanePoint& tau);

// R(y) = (y^2 - 1968 y + 2654208) / (2 y^2 (y - 1728)^2).
// Throws SingularLocus when y or y - 1728 contains 0.
ComplexBall r_coefficient(const ComplexBall& y);

// chi evaluated on a 3-jet extended by y_dddot:
//     chi = y_dddot/y_dot - (3/2)(y_ddot/y_dot)^2 + R(y) y_dot^2.
// Throws SingularLocus when y, y - 1728, or y_dot contains 0.
ComplexBall chi_residual(const Jet3& jet, const ComplexBall& y_dddot);

// The unique solution of chi = 0 for the third derivative:
//     A = (3/2) y_ddot^2 / y_dot - R(y) y_dot^3.
ComplexBall A(const ComplexBall& y, const ComplexBall& y_dot, const ComplexBall& y_ddot);

} // namespace ao
