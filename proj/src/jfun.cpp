#include "ao/jfun.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ao/errors.hpp"

namespace ao {

namespace {

// E2, E4, E6 and the normalized discriminant denominator at one point,
// together with the working precision used.
struct EisPack {
    ComplexBall p, q, r; // E2, E4, E6
    ComplexBall qvar;    // the nome itself
};

// Upper bound (as a plain int exponent) of log2 |x| over the ball; INT_MIN
// style sentinel avoided by clamping.
long log2_upper(const RealBall& x) {
    mpfr_t hi;
    mpfr_init2(hi, x.prec());
    x.upper(hi);
    long e = mpfr_zero_p(hi) ? -(1L << 30) : mpfr_get_exp(hi);
    mpfr_clear(hi);
    return e;
}

// Certified tail bound for sum_{n>N} sigma_e(n) z^n with sigma_e(n) <= n^pw,
// |z| <= xb: (N+1)^pw xb^{N+1} / (1 - rho), rho = (1 + 1/(N+1))^pw xb.
RealBall sigma_tail(const RealBall& xb, unsigned long n_trunc, unsigned long pw) {
    Prec w = xb.prec();
    RealBall base = add(RealBall::from_si(1, w),
                        RealBall::from_q(mpq_class(1, n_trunc + 1), w));
    RealBall rho = mul(pow_ui(base, pw), xb);
    if (!rho.cert_lt_q(mpq_class(63, 64)))
        throw PrecisionExhausted("q-series tail ratio not certified below 1");
    RealBall head = mul(pow_ui(RealBall::from_si(static_cast<long>(n_trunc) + 1, w), pw),
                        pow_ui(xb, n_trunc + 1));
    return div(head, sub(RealBall::from_si(1, w), rho));
}

// Divisor-power sums sigma_1, sigma_3, sigma_5 for 1..n by sieving.
void sigma_sieve(unsigned long n, std::vector<mpz_class>& s1,
                 std::vector<mpz_class>& s3, std::vector<mpz_class>& s5) {
    s1.assign(n + 1, 0);
    s3.assign(n + 1, 0);
    s5.assign(n + 1, 0);
    for (unsigned long d = 1; d <= n; ++d) {
        mpz_class d1(static_cast<long>(d));
        mpz_class d3 = d1 * d1 * d1;
        mpz_class d5 = d3 * d1 * d1;
        for (unsigned long m = d; m <= n; m += d) {
            s1[m] += d1;
            s3[m] += d3;
            s5[m] += d5;
        }
    }
}

// Horner sum q * (c_1 + q (c_2 + ... )) with a certified sigma tail folded in.
ComplexBall sigma_series(const ComplexBall& q, const std::vector<mpz_class>& c,
                         unsigned long n_trunc, unsigned long pw) {
    Prec w = q.prec();
    ComplexBall s = ComplexBall::from_si(0, 0, w);
    for (unsigned long n = n_trunc; n >= 1; --n)
        s = add_q(mul(s, q), mpq_class(c[n]));
    s = mul(s, q);
    RealBall tail = sigma_tail(abs_b(q), n_trunc, pw);
    ComplexBall out = s;
    // |missing terms| <= tail bounds both the real and imaginary parts.
    RealBall re = out.re(), im = out.im();
    re.add_radius_ball(tail);
    im.add_radius_ball(tail);
    return ComplexBall(re, im);
}

// Eisenstein values at the (already slack-reduced) point z at precision w.
EisPack eisenstein(const ComplexBall& z, Prec w) {
    // Nome q = exp(2 pi i z) = e^{-2 pi y} (cos 2 pi x + i sin 2 pi x).
    RealBall two_pi = mul_2si(RealBall::pi(w), 1);
    RealBall ang = mul(two_pi, z.re());
    RealBall mag = exp_b(neg(mul(two_pi, z.im())));
    ComplexBall q(mul(mag, cos_b(ang)), mul(mag, sin_b(ang)));

    // Truncation point: |q|^n must fall below 2^-w; the sieve cost is tiny.
    long lg = log2_upper(abs_b(q));
    if (lg >= -4)
        throw PrecisionExhausted("nome not certified small after reduction");
    unsigned long n_trunc =
        static_cast<unsigned long>(std::max<long>(8, w / (-lg) + 8));

    std::vector<mpz_class> s1, s3, s5;
    sigma_sieve(n_trunc, s1, s3, s5);

    EisPack e{ComplexBall::from_si(0, 0, w), ComplexBall::from_si(0, 0, w),
              ComplexBall::from_si(0, 0, w), q};
    e.p = add_q(mul_q(sigma_series(q, s1, n_trunc, 2), mpq_class(-24)), 1);
    e.q = add_q(mul_q(sigma_series(q, s3, n_trunc, 4), mpq_class(240)), 1);
    e.r = add_q(mul_q(sigma_series(q, s5, n_trunc, 6), mpq_class(-504)), 1);
    return e;
}

// Derivatives of j with respect to tau at the reduced point, from the
// closed forms for D = q d/dq applied to j = 1728 Q^3/(Q^3 - R^2):
//   D j   = -Q^2 R / Delta
//   D^2 j = (-(1/6) P Q^2 R + (2/3) Q R^2 + (1/2) Q^4) / Delta
//   D^3 j = (-(1/24) P^2 Q^2 R - (95/72) Q^3 R + (1/3) P Q R^2
//            + (1/4) P Q^4 - (2/9) R^3) / Delta
// with Delta = (Q^3 - R^2)/1728 and d/dtau = 2 pi i D.
struct JDerivs {
    ComplexBall j0, j1, j2, j3;
};

JDerivs j_derivs_at(const ComplexBall& z, Prec w, int order) {
    EisPack e = eisenstein(z, w);
    const ComplexBall& p = e.p;
    const ComplexBall& q = e.q;
    const ComplexBall& r = e.r;

    ComplexBall q2 = mul(q, q);
    ComplexBall q3 = mul(q2, q);
    ComplexBall r2 = mul(r, r);
    ComplexBall den = sub(q3, r2); // 1728 * Delta
    if (!den.cert_nonzero())
        throw PrecisionExhausted("discriminant ball not separated from 0");

    JDerivs out{ComplexBall::from_si(0, 0, w), ComplexBall::from_si(0, 0, w),
                ComplexBall::from_si(0, 0, w), ComplexBall::from_si(0, 0, w)};
    out.j0 = div(mul_q(q3, mpq_class(1728)), den);
    if (order < 1)
        return out;

    // 2 pi i at working precision.
    ComplexBall tpi(RealBall::from_si(0, w), mul_2si(RealBall::pi(w), 1));

    ComplexBall d1 = neg(mul(q2, r));
    out.j1 = mul(tpi, div(mul_q(d1, mpq_class(1728)), den));
    if (order < 2)
        return out;

    ComplexBall d2 = add(add(mul_q(mul(p, mul(q2, r)), mpq_class(-1, 6)),
                             mul_q(mul(q, r2), mpq_class(2, 3))),
                         mul_q(mul(q2, q2), mpq_class(1, 2)));
    out.j2 = mul(mul(tpi, tpi), div(mul_q(d2, mpq_class(1728)), den));
    if (order < 3)
        return out;

    ComplexBall p2 = mul(p, p);
    ComplexBall d3 = add(
        add(add(mul_q(mul(p2, mul(q2, r)), mpq_class(-1, 24)),
                mul_q(mul(q3, r), mpq_class(-95, 72))),
            add(mul_q(mul(p, mul(q, r2)), mpq_class(1, 3)),
                mul_q(mul(p, mul(q2, q2)), mpq_class(1, 4)))),
        mul_q(mul(r, r2), mpq_class(-2, 9)));
    out.j3 = mul(mul(tpi, mul(tpi, tpi)), div(mul_q(d3, mpq_class(1728)), den));
    return out;
}

// Working precision: requested bits plus guard bits plus the cancellation
// loss in E4^3 - E6^2 near the cusp, which costs 2 pi Im / log 2 < 9.07 Im
// bits of agreement between the two cubes.
Prec working_prec(Prec prec, const RealBall& im) {
    double hi = im.upper_d();
    if (!(hi > 0) || hi > 1e9)
        throw OutOfDomain("imaginary part out of evaluable range");
    return prec + 64 + static_cast<Prec>(std::ceil(9.07 * hi));
}

// Shared core: derivatives of j at tau itself, chain-ruled through the
// reducing matrix. order selects how many derivatives are required.
JDerivs j_at(const HalfPlanePoint& tau, Prec prec, int order) {
    for (int attempt = 0;; ++attempt) {
        Prec w = working_prec(prec << attempt, tau.z.im());
        ComplexBall t(round_to_prec(tau.z.re(), w), round_to_prec(tau.z.im(), w));
        EvalReduction red = reduce_for_eval(t);
        JDerivs at_z = j_derivs_at(red.z, w, order);

        // w(tau) = (a tau + b)/(c tau + d):  w' = u^-2, w'' = -2c u^-3,
        // w''' = 6 c^2 u^-4 with u = c tau + d, det = 1.
        JDerivs out = at_z;
        if (order >= 1) {
            ComplexBall u = add_q(mul_q(t, mpq_class(red.gamma.c)), mpq_class(red.gamma.d));
            ComplexBall u2 = mul(u, u);
            ComplexBall w1 = div(ComplexBall::from_si(1, 0, w), u2);
            ComplexBall w2 = mul_q(div(w1, u), mpq_class(mpz_class(-2 * red.gamma.c)));
            ComplexBall w3 = mul_q(div(w1, u2), mpq_class(mpz_class(6 * red.gamma.c * red.gamma.c)));
            out.j1 = mul(at_z.j1, w1);
            if (order >= 2)
                out.j2 = add(mul(at_z.j2, mul(w1, w1)), mul(at_z.j1, w2));
            if (order >= 3)
                out.j3 = add(add(mul(at_z.j3, mul(w1, mul(w1, w1))),
                                 mul_q(mul(at_z.j2, mul(w1, w2)), mpq_class(3))),
                             mul(at_z.j1, w3));
        }

        bool finite = out.j0.is_finite() && (order < 1 || out.j1.is_finite()) &&
                      (order < 2 || out.j2.is_finite()) &&
                      (order < 3 || out.j3.is_finite());
        if (finite)
            return out;
        if (attempt >= 3)
            throw PrecisionExhausted("j evaluation radius overflow after retries");
    }
}

} // namespace

ComplexBall j(const HalfPlanePoint& tau, Prec prec) {
    return j_at(tau, prec, 0).j0;
}

Jet3 j_jet(const HalfPlanePoint& tau, Prec prec) {
    JDerivs d = j_at(tau, prec, 2);
    return Jet3{tau, d.j0, d.j1, d.j2};
}

ComplexBall j_third(const HalfPlanePoint& tau, Prec prec) {
    return j_at(tau, prec, 3).j3;
}

double cusp_gap(const HalfPlanePoint& tau) {
    // Closure check: reject only when certified outside F-bar.
    const RealBall& x = tau.z.re();
    RealBall n2 = norm_b(tau.z);
    if (x.cert_gt_q(mpq_class(1, 2)) || x.cert_lt_q(mpq_class(-1, 2)) ||
        n2.cert_lt_q(mpq_class(1)))
        throw OutOfDomain("point certified outside the closure of F");

    if (!tau.z.im().cert_ge_q(mpq_class(4, 5)))
        throw OutOfDomain("ball reaches below the cusp strip Im >= 4/5");

    // Work with S(q) = q j = 1 + 744 q + ...: since |q| = e^{-2 pi Im tau}
    // exactly, the gap equals | |S| - 1 | / |q|, and the cancellation of the
    // two e^{2 pi Im} sized quantities happens inside |S| - 1 where errors
    // act at scale |q|. The series is evaluated at the exact center of the
    // input; the ball width is then charged through a Lipschitz bound
    //     |gap(tau) - gap(center)| <= 4 pi Cs |tau - center|
    // with |S'| <= Cs on |q| <= e^{-8 pi/5} from the Cauchy estimate on the
    // circle |q| = rho = 1/128, where |S| <= rho |E4|^3 / |Delta| is bounded
    // by the sigma series for E4 and |Delta| >= rho (1 - rho/(1-rho))^24
    // from the product formula Delta = q prod (1-q^n)^24. Both halves of the
    // gap vary at most that fast: |S| directly, and |S|-1 against the
    // e^{2 pi Im} factor via |S(q) - 1| <= Cs |q| (S(0) = 1).
    double im_hi = tau.z.im().upper_d();
    Prec base = 96 + static_cast<Prec>(std::ceil(9.07 * im_hi));
    for (int attempt = 0;; ++attempt) {
        Prec w = working_prec(base << attempt, tau.z.im());
        RealBall cx = RealBall::from_endpoints(x.center(), x.center(), w);
        RealBall cy = RealBall::from_endpoints(tau.z.im().center(), tau.z.im().center(), w);
        ComplexBall c(cx, cy);
        EisPack e = eisenstein(c, w);
        ComplexBall q3 = mul(mul(e.q, e.q), e.q);
        ComplexBall den = sub(q3, mul(e.r, e.r));
        if (den.cert_nonzero()) {
            ComplexBall s = div(mul_q(mul(e.qvar, q3), mpq_class(1728)), den);
            RealBall gap = div(abs_b(sub(abs_b(s), RealBall::from_si(1, w))),
                               abs_b(e.qvar));

            RealBall rho = RealBall::from_q(mpq_class(1, 128), w);
            RealBall xmax = exp_b(neg(mul(RealBall::pi(w),
                                          RealBall::from_q(mpq_class(8, 5), w))));
            RealBall margin = sub(rho, xmax);
            if (margin.cert_gt_q(mpq_class(0)) && gap.is_finite()) {
                std::vector<mpz_class> s1, s3, s5;
                sigma_sieve(48, s1, s3, s5);
                ComplexBall t3 =
                    sigma_series(ComplexBall(rho, RealBall::from_si(0, w)), s3, 48, 4);
                RealBall b4 = add(RealBall::from_si(1, w),
                                  mul(RealBall::from_si(240, w), abs_b(t3)));
                mpq_class prod_lb(126, 127); // 1 - rho/(1-rho) at rho = 1/128
                mpq_class prod_lb24 = 1;
                for (int k = 0; k < 24; ++k)
                    prod_lb24 *= prod_lb;
                RealBall delta_lo = mul(rho, RealBall::from_q(prod_lb24, w));
                RealBall ms = mul(rho, div(pow_ui(b4, 3), delta_lo));
                RealBall cs = div(mul(ms, rho), mul(margin, margin));

                mpfr_t width;
                mpfr_init2(width, 64);
                mpfr_add(width, tau.z.re().radius(), tau.z.im().radius(), MPFR_RNDU);
                RealBall wball = RealBall::from_endpoints(width, width, w);
                mpfr_clear(width);
                RealBall lip = mul(mul(RealBall::pi(w), RealBall::from_si(4, w)), cs);
                RealBall total = add(gap, mul(lip, wball));
                if (total.is_finite())
                    return total.upper_d();
            }
        }
        if (attempt >= 3)
            throw PrecisionExhausted("cusp gap radius overflow after retries");
    }
}

ComplexBall r_coefficient(const ComplexBall& y) {
    if (!y.cert_nonzero() || !add_q(y, mpq_class(-1728)).cert_nonzero())
        throw SingularLocus("R(y) has poles at 0 and 1728");
    ComplexBall y2 = mul(y, y);
    ComplexBall num = add_q(add(y2, mul_q(y, mpq_class(-1968))), mpq_class(2654208));
    ComplexBall shift = add_q(y, mpq_class(-1728));
    ComplexBall den = mul_q(mul(y2, mul(shift, shift)), mpq_class(2));
    return div(num, den);
}

ComplexBall chi_residual(const Jet3& jet, const ComplexBall& y_dddot) {
    if (!jet.y_dot.cert_nonzero())
        throw SingularLocus("chi needs y_dot separated from 0");
    ComplexBall rr = r_coefficient(jet.y); // also screens y, y - 1728
    ComplexBall t1 = div(y_dddot, jet.y_dot);
    ComplexBall s = div(jet.y_ddot, jet.y_dot);
    ComplexBall t2 = mul_q(mul(s, s), mpq_class(-3, 2));
    ComplexBall t3 = mul(rr, mul(jet.y_dot, jet.y_dot));
    return add(add(t1, t2), t3);
}

ComplexBall A(const ComplexBall& y, const ComplexBall& y_dot, const ComplexBall& y_ddot) {
    if (!y_dot.cert_nonzero())
        throw SingularLocus("A needs y_dot separated from 0");
    ComplexBall rr = r_coefficient(y);
    ComplexBall t1 = mul_q(div(mul(y_ddot, y_ddot), y_dot), mpq_class(3, 2));
    ComplexBall t2 = mul(rr, mul(y_dot, mul(y_dot, y_dot)));
    return sub(t1, t2);
}

} // namespace ao
