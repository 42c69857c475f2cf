#pragma once

// Polynomial vector fields with cleared denominators, Lie-derivative chains,
// trajectory membership by exact series transport, ball Runge-Kutta
// integration of the underlying rational field, and the modular-equation
// field whose trajectories track (tau, j, j', j'').

#include <gmpxx.h>

#include <vector>

#include "ao/ball.hpp"
#include "ao/varieties.hpp"

namespace ao {

// A vector field with polynomial components after clearing a common
// denominator: the actual (rational) field is components[i]/cleared_factor.
// Clearing rescales time along trajectories but not the trajectories
// themselves, so symbolic vanishing chains may use the polynomial field
// while numeric integration divides the factor back out.
struct VectorField {
    int m = 0;                         // ambient dimension
    std::vector<MultiPoly> components; // m entries, each in m variables
    MultiPoly cleared_factor = MultiPoly::constant(1, 1);
};

struct TrajectorySample {
    std::vector<double> times; // strictly increasing, in [0, 1]
    std::vector<std::vector<ComplexBall>> points;
    double step; // last accepted step size
};

enum class Membership { in, out, undecided };

// Sum_i xi_i dF/dx_i, exact.
MultiPoly lie_derivative(const VectorField& xi, const MultiPoly& f);

// All xi^k F_alpha for k = 1..K, flattened with k fastest: the result is
// [xi F_1, ..., xi^K F_1, xi F_2, ...]. Throws SizeCapExceeded if an
// intermediate polynomial grows past the internal term cap.
std::vector<MultiPoly> derivative_chain(const VectorField& xi,
                                        const std::vector<MultiPoly>& fs, int K);

// Does xi^(K+1) F_alpha lie in the rational span of {xi^k F_beta : k <= K}
// for every alpha? A checkable proxy for the vanishing conditions having
// stabilized. Exact Gaussian elimination on the monomial basis.
bool chain_stabilized(const VectorField& xi, const std::vector<MultiPoly>& fs,
                      int K);

// Membership of p in the locus where all F_alpha vanish along the flow
// through p, tested through order K. Derivative values are computed by
// exact series transport: x(t) solves x' = xi(x) as a truncated power
// series (Picard iteration, K rounds), and xi^k F(p) = k! [t^k] F(x(t)).
//
// The rational overload decides exactly. The ball overload first unifies
// coordinates carrying bit-identical balls (callers mark "the same
// quantity" by passing the same ball twice); when the field respects the
// unification and every F_alpha collapses to the zero polynomial, the
// chain vanishes identically and the answer is `in` regardless of radii.
// Otherwise balls certify only `out` (a coefficient excluding zero), and
// all-enclosing-zero stays `undecided`.
//
// Throws SingularLocus when the cleared factor vanishes at p (or its ball
// fails to exclude zero).
Membership trajectory_member(const VectorField& xi,
                             const std::vector<MultiPoly>& fs,
                             const std::vector<mpq_class>& p, int K);
Membership trajectory_member(const VectorField& xi,
                             const std::vector<MultiPoly>& fs,
                             const std::vector<ComplexBall>& p, int K);

// Integrate x' = T * components(x)/cleared_factor(x) over sigma in [0, 1]
// by explicit fourth-order Runge-Kutta on balls. Each step is checked
// against its two-half-steps refinement; the discrepancy shrinks the step
// (down to a floor) and is added to the output radii, so the samples carry
// an honest estimate of the method error. Throws SingularityApproached
// when the cleared factor stops excluding zero or the step floor is hit.
TrajectorySample integrate(const VectorField& xi,
                           const std::vector<ComplexBall>& p0,
                           const ComplexBall& t_dir, double step, Prec prec);

// Coordinate layout of j_field(n, s): variable 0 is tau, then blocks in
// label order; a block in s holds (y_i, y_i', y_i''), others a single
// frozen coordinate.
struct JetLayout {
    int m = 0;
    std::vector<int> y_index; // y_index[i-1] = first coordinate of block i
    std::vector<bool> jet;    // jet[i-1] = block i carries a 3-jet
};
JetLayout j_field_layout(int n, const std::vector<int>& s);

// The field d/dtau + sum_{i in s} (y_i' d/dy_i + y_i'' d/dy_i' +
// A_i d/dy_i'') with A_i = (3/2) y_i''^2 / y_i' - R(y_i) y_i'^3, cleared
// by prod_{i in s} 2 y_i^2 (y_i - 1728)^2 y_i'. Labels in s are 1-based;
// blocks outside s are frozen (zero component).
VectorField j_field(int n, const std::vector<int>& s);

// Stated degree bounds, evaluated exactly: c * degX^(16 n^2) and
// c * degW^(m^2). The leading constants are caller-supplied.
mpz_class qsp_degree_bound(int n, long deg_x, const mpz_class& c_user);
mpz_class redegree_bound(int m, long deg_w, const mpz_class& c_xi);

} // namespace ao
