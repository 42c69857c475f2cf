#include "ao/halfplane.hpp"

#include <cmath>

#include "ao/errors.hpp"

namespace ao {

namespace {

const mpq_class kHalf(1, 2);
const mpq_class kOne(1);

} // namespace

HalfPlanePoint::HalfPlanePoint(ComplexBall zz) : z(std::move(zz)) {
    if (!z.im().cert_gt_q(mpq_class(0)))
        throw OutOfDomain("point not certified in the upper half plane");
}

Mat2z mat_mul(const Mat2z& x, const Mat2z& y) {
    Mat2z r;
    r.a = x.a * y.a + x.b * y.c;
    r.b = x.a * y.b + x.b * y.d;
    r.c = x.c * y.a + x.d * y.c;
    r.d = x.c * y.b + x.d * y.d;
    return r;
}

ComplexBall apply_moebius(const Mat2z& g, const ComplexBall& z) {
    ComplexBall num = add_q(mul_q(z, mpq_class(g.a)), mpq_class(g.b));
    ComplexBall den = add_q(mul_q(z, mpq_class(g.c)), mpq_class(g.d));
    return div(num, den);
}

Location in_f(const HalfPlanePoint& p) {
    const ComplexBall& z = p.z;
    const RealBall& x = z.re();
    RealBall n2 = norm_b(z);

    // Certainly outside: Re < -1/2, Re >= 1/2, or |z| < 1.
    if (x.cert_lt_q(-kHalf) || x.cert_ge_q(kHalf) || n2.cert_lt_q(kOne))
        return Location::outside;

    // Interior together with the vertical boundary: -1/2 <= Re < 1/2, |z| > 1.
    bool re_ok_lo = x.cert_ge_q(-kHalf);
    bool re_ok_hi = x.cert_lt_q(kHalf);
    if (re_ok_lo && re_ok_hi && n2.cert_gt_q(kOne))
        return Location::inside;

    // Arc clause: the left half of the unit circle (-1/2 <= Re <= 0) belongs
    // to F, the right half does not. Numerically decidable only when |z|^2
    // comes out exact, which happens for dyadic points such as tau = i.
    if (n2.is_exact() && n2.exact_eq(RealBall::from_q(kOne, n2.prec()))) {
        if (re_ok_lo && x.cert_le_q(mpq_class(0)))
            return Location::inside;
        if (x.cert_gt_q(mpq_class(0)) && re_ok_hi)
            return Location::outside;
    }
    return Location::undecided;
}

Reduction reduce_to_f(const HalfPlanePoint& p) {
    ComplexBall z = p.z;
    Mat2z g; // accumulated, z = g * input

    // T/S alternation steered by the ball midpoint; membership claims are
    // certified by in_f. Each S strictly increases Im when |z| < 1, so the
    // walk terminates for any ball clear of the real axis.
    const int kMaxSteps = 64 + 8 * static_cast<int>(z.prec());
    for (int step = 0; step < kMaxSteps; ++step) {
        Location loc = in_f(HalfPlanePoint(z));
        if (loc == Location::inside)
            return Reduction{HalfPlanePoint(z), g};

        // Translate the midpoint of Re into [-1/2, 1/2).
        double xc = z.re().center_d();
        long n = static_cast<long>(std::floor(xc + 0.5));
        if (n != 0) {
            Mat2z t;
            t.b = mpz_class(-n);
            z = apply_moebius(t, z);
            g = mat_mul(t, g);
            continue;
        }

        RealBall n2 = norm_b(z);
        if (n2.cert_lt_q(kOne)) {
            Mat2z s;
            s.a = 0; s.b = -1; s.c = 1; s.d = 0;
            z = apply_moebius(s, z);
            g = mat_mul(s, g);
            continue;
        }
        if (n2.cert_ge_q(kOne) && loc == Location::outside) {
            // Only reachable for an exact point on the right half of the
            // arc; S flips it onto the kept left half.
            Mat2z s;
            s.a = 0; s.b = -1; s.c = 1; s.d = 0;
            z = apply_moebius(s, z);
            g = mat_mul(s, g);
            continue;
        }
        // |z| ~ 1 or Re ~ +-1/2 without a certified resolution.
        throw PrecisionExhausted("fundamental-domain boundary not decidable at this precision");
    }
    throw PrecisionExhausted("fundamental-domain reduction did not converge");
}

EvalReduction reduce_for_eval(const ComplexBall& tau) {
    if (!tau.im().cert_gt_q(mpq_class(0)))
        throw OutOfDomain("evaluation point not certified in the upper half plane");
    ComplexBall z = tau;
    Mat2z g;
    const mpq_class slack_re = kHalf + mpq_class(1, 64);
    const mpq_class slack_n2 = kOne - mpq_class(1, 64);

    const int kMaxSteps = 4096;
    for (int step = 0; step < kMaxSteps; ++step) {
        double xc = z.re().center_d();
        long n = static_cast<long>(std::floor(xc + 0.5));
        if (n != 0) {
            Mat2z t;
            t.b = mpz_class(-n);
            z = apply_moebius(t, z);
            g = mat_mul(t, g);
        }
        RealBall n2 = norm_b(z);
        if (abs_b(z.re()).cert_le_q(slack_re) && n2.cert_ge_q(slack_n2) &&
            z.im().cert_ge_q(mpq_class(84, 100))) {
            // Inside the slack box with Im bounded away from the circle, so
            // |q| <= exp(-2 pi 0.84) and the q-series tails are geometric.
            return EvalReduction{z, g};
        }
        if (n == 0) {
            if (!n2.cert_lt_q(kOne)) {
                if (n2.cert_ge_q(slack_n2) && abs_b(z.re()).cert_le_q(slack_re))
                    throw PrecisionExhausted("evaluation point pinned near the corner of the fundamental domain");
                throw PrecisionExhausted("evaluation reduction stalled near the unit circle");
            }
            Mat2z s;
            s.a = 0; s.b = -1; s.c = 1; s.d = 0;
            z = apply_moebius(s, z);
            g = mat_mul(s, g);
        }
    }
    throw PrecisionExhausted("evaluation reduction did not converge");
}

Region Region::full() { return Region{}; }

Region Region::omega(const mpq_class& r) {
    if (r <= 1)
        throw OutOfDomain("region cutoff must exceed 1");
    Region reg;
    reg.whole_f = false;
    reg.r = r;
    return reg;
}

Measure measure(const Region& reg) {
    Measure m;
    if (reg.whole_f) {
        m.rational = 1;
        m.over_pi = 0;
        return m;
    }
    // Integrating (3/pi) dx dy / y^2 over F with the cap Im < R removed
    // leaves a strip of mass 3/(pi R), hence mu(Omega_R) = 1 - 3/(pi R).
    m.rational = 1;
    m.over_pi = mpq_class(-3) / reg.r;
    m.over_pi.canonicalize();
    return m;
}

RealBall Measure::value(Prec prec) const {
    RealBall pi = RealBall::pi(prec);
    RealBall t = div(RealBall::from_q(over_pi, prec), pi);
    return add(RealBall::from_q(rational, prec), t);
}

} // namespace ao
