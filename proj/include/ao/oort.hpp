#pragma once

// The search engine on Y(1)^n: Hilbert class polynomials, enumeration of
// special points below a discriminant bound, certified hypersurface
// membership, cusp-dominance certificates over a fundamental discriminant,
// linear special varieties on hdnd hypersurfaces, and the
// equidistribution / quadratic-point-counting experiments.

#include <gmpxx.h>

#include <map>
#include <optional>
#include <vector>

#include "ao/ball.hpp"
#include "ao/quad.hpp"
#include "ao/varieties.hpp"

namespace ao {

// One coordinate of a special point: a discriminant together with the
// index of the chosen conjugate in the canonical reduced-form order of
// Lambda_d.
struct SpecialCoord {
    Discriminant disc;
    long conj_index = 0;
};

class SpecialPoint {
  public:
    // Throws OutOfDomain on an empty tuple or an index outside [0, h(d)).
    explicit SpecialPoint(std::vector<SpecialCoord> coords);

    int n() const { return static_cast<int>(coords_.size()); }
    const std::vector<SpecialCoord>& coords() const { return coords_; }

    // max |d_i| over the coordinates.
    const mpz_class& max_abs_disc() const { return max_abs_; }
    // Same maximum, but restricted to coordinates whose fundamental
    // discriminant differs from the given one; 0 when no coordinate
    // qualifies. Pass nullopt to exclude nothing.
    mpz_class max_abs_disc_excluding(const std::optional<mpz_class>& d_k) const;

    // The j-invariant balls of the coordinates, cached per precision.
    const std::vector<ComplexBall>& balls(Prec prec) const;

  private:
    std::vector<SpecialCoord> coords_;
    mpz_class max_abs_;
    mutable std::map<Prec, std::vector<ComplexBall>> cache_;
};

// Monic integer polynomial Prod_{tau in Lambda_d} (x - j(tau)), coefficients
// recognized by rounding certified balls (residual < 1/2, precision doubled
// on failure). prec_hint = 0 lets the coefficient-size heuristic choose.
// Throws NotADiscriminant, PrecisionExhausted.
MultiPoly hilbert_class_poly(const mpz_class& d, Prec prec_hint = 0);

// All coordinates (d, index) with |d| <= b, ordered by (|d|, index). This
// is the per-position alphabet of the tuple enumeration. Requires b >= 3.
std::vector<SpecialCoord> special_alphabet(const mpz_class& b);

// Odometer over the alphabet, last coordinate fastest; yields all
// alphabet^n tuples in a deterministic order. fix_first >= 0 restricts the
// first coordinate to that alphabet index — the partition handle for
// parallel scans.
class SpecialPointStream {
  public:
    SpecialPointStream(int n, const mpz_class& b, long fix_first = -1);
    std::optional<SpecialPoint> next();
    const std::vector<SpecialCoord>& alphabet() const { return alphabet_; }

  private:
    std::vector<SpecialCoord> alphabet_;
    std::vector<size_t> odo_;
    int n_;
    long fixed_;
    bool done_;
};

// Materialized stream, for desk-scale bounds.
std::vector<SpecialPoint> enumerate_special_points(int n, const mpz_class& b);

enum class Answer { yes, no, undecided };

// Is F(P) = 0? `no` is certified by a ball exclusion; `yes` only by exact
// arithmetic: coordinates with identical (d, index) are unified first, and
// the result must reduce to zero modulo the Hilbert class polynomials of
// the remaining coordinates (the conjugate-grid ideal; sufficient, not
// necessary). Everything else is `undecided` — soundness over completeness.
Answer on_hypersurface(const MultiPoly& f, const SpecialPoint& p, Prec prec);

struct SpecialSearch {
    std::vector<SpecialPoint> points;    // certified on the hypersurface
    std::vector<SpecialPoint> undecided; // reported, never dropped
};

// Exhaustive filter of the enumeration below bound b through
// on_hypersurface; n is read off F.
SpecialSearch special_points_on(const MultiPoly& f, const mpz_class& b, Prec prec);

// One candidate bound tried during the dominance search. u_lower is a
// certified rational lower bound of e^{pi f0 sqrt|d|/2} and alpha_upper a
// certified rational upper bound of e^{-pi sqrt|d|}; `positive` records
// whether the shifted-coefficient positivity certificate succeeded with
// these endpoints.
struct DominanceStep {
    long f0 = 0;
    mpq_class u_lower;
    mpq_class alpha_upper;
    bool positive = false;
};

// Certificate that the leading pure power of x1 dominates every other
// monomial of a dnd polynomial at special points whose coordinates all
// carry the fundamental discriminant d_fund, for every conductor f >= bound_f.
// The certified inequality, in u = e^{pi f sqrt|d_fund|/2}:
//
//   c0 (u^2 - 2079)^d  >  sum_mu |c_mu| (u^2 + 2079)^{a1(mu)} (alpha u^2 + u + 2079)^{deg mu - a1(mu)}
//
// where the sum runs over the non-leading monomials, a1 is the x1-exponent,
// and alpha = e^{-pi sqrt|d_fund|}. The x1 factor is bounded by the largest
// possible j-value at conductor f, the remaining factors by the larger of
// the smaller-conductor bound (alpha u^2 + 2079) and the equal-conductor,
// distinct-point bound (u + 2079; half the principal height). Positivity
// for all u >= u_lower is certified by nonnegativity of the Taylor shift:
// P(u_lower + t) has nonnegative coefficients and P(u_lower) > 0.
struct DominanceCertificate {
    MultiPoly poly = MultiPoly(1);
    mpq_class c0;     // |coefficient of x1^d|
    mpq_class c1;     // max magnitude among the remaining coefficients
    long d = 0;       // total degree
    mpz_class d_fund; // the fundamental discriminant certified against
    mpz_class bound_f;
    std::vector<DominanceStep> transcript;
};

// Smallest bound_f whose positivity certificate succeeds, searched upward
// from 0. Throws NotDnd, ZeroLeadingCoefficient, NotADiscriminant,
// CertificateNotFound (search cap; unreachable for genuine dnd input).
DominanceCertificate dominance_bound(const MultiPoly& f, const mpz_class& d_fund);

// Recheck a certificate from scratch with exact interval arithmetic: the
// transcript endpoints really bound their exponentials, the recorded
// c0/c1/d match the polynomial, and the accepted step's shifted
// coefficients are nonnegative with a positive constant term.
bool verify_certificate(const DominanceCertificate& cert);

struct LinearSearchReport {
    std::vector<SpecialVarietyDescriptor> varieties; // maximal, deduplicated
    mpz_class bound; // discriminant bound used for integer sections
    long leaves = 0; // search-tree leaves examined
};

// Recursive search for linear special subvarieties of V(F), F hdnd (an
// identically-vanishing diagonal restriction is allowed; a dnd failure
// anywhere in the recursion tree is not). Diagonals are detected by exact
// divisibility, fibers by exact integer sections at the class-number-one
// singular moduli with |d| <= bound; univariate leaves additionally admit
// class-number > 1 roots via exact Hilbert-class-polynomial divisibility.
// Varieties contained in an emitted one are dropped. Throws NotHdnd.
LinearSearchReport linear_special_on_hdnd(const MultiPoly& f,
                                          const mpz_class& bound = 200);

struct EquidistRow {
    mpz_class d;
    bool fundamental = false;
    long h = 0;      // #Lambda_d
    long inside = 0; // #(Lambda_d with Im tau < R)
    bool meets_threshold = false;
};

struct EquidistTable {
    mpq_class r;
    std::vector<EquidistRow> rows;
    long violations = 0;
};

// For every discriminant with lo <= |d| <= hi: the exact proportion of
// Lambda_d below height R (integer comparison |d| q^2 < 4 a^2 p^2 per
// reduced form, R = p/q), tested against the threshold 1 - 6/(pi R).
// Requires R > 1.
EquidistTable equidist_experiment(const mpz_class& lo, const mpz_class& hi,
                                  const mpq_class& r, Prec prec = 128);

struct QuadraticPointCount {
    long on_curve = 0;  // certified F = 0
    long undecided = 0; // reported, never dropped
    long pool = 0;      // per-coordinate candidates in the window
};

// Count tuples of imaginary quadratic points in the window {Im tau < R} of
// the fundamental domain with multiplicative height at most H, certified to
// lie on V(F). Candidates are the reduced primitive forms (a, b, c) with
// c <= H^2 (the Mahler measure of the minimal polynomial is c there), so
// the scan is exact integer enumeration; membership goes through
// on_hypersurface. No attempt is made to separate the algebraic part of
// V(F). Requires 1 <= n_vars <= 3, H >= 1, R > 1; throws SizeCapExceeded
// when the tuple grid exceeds the desk-scale cap.
QuadraticPointCount count_quadratic_points(const MultiPoly& f, const mpq_class& r,
                                           const mpq_class& h_bound, Prec prec);

} // namespace ao
