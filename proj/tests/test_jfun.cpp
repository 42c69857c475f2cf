#include <doctest.h>

#include <gmpxx.h>

#include <random>

#include "ao/ball.hpp"
#include "ao/errors.hpp"
#include "ao/halfplane.hpp"
#include "ao/jfun.hpp"

using namespace ao;

namespace {

HalfPlanePoint hp(const mpq_class& re, const mpq_class& im, Prec p = 128) {
    return HalfPlanePoint(ComplexBall::from_q(re, im, p));
}

// sqrt(n) as a tight ball, for CM-point imaginary parts.
RealBall sqrt_si(long n, Prec p) { return sqrt_b(RealBall::from_si(n, p)); }

double abs_upper(const ComplexBall& z) { return abs_b(z).upper_d(); }

} // namespace

TEST_SUITE("jfun") {

TEST_CASE("critical values: j(i) = 1728 and j(zeta_3) = 0") {
    ComplexBall ji = j(hp(0, 1), 128);
    CHECK(ji.re().contains_q(1728));
    CHECK(ji.im().contains_q(0));
    CHECK(ji.radius_bound().upper_d() < 1e-20);

    HalfPlanePoint zeta3(ComplexBall(RealBall::from_q(mpq_class(-1, 2), 128),
                                     mul_2si(sqrt_si(3, 128), -1)));
    ComplexBall jz = j(zeta3, 128);
    CHECK(jz.re().contains_q(0));
    CHECK(jz.im().contains_q(0));
    CHECK(jz.radius_bound().upper_d() < 1e-20);
}

TEST_CASE("class-number-one giant: j((1+i sqrt 163)/2) is an integer cube") {
    HalfPlanePoint t(ComplexBall(RealBall::from_q(mpq_class(1, 2), 256),
                                 mul_2si(sqrt_si(163, 256), -1)));
    ComplexBall v = j(t, 256);
    mpz_class expect(-640320);
    expect = expect * expect * expect;
    auto rec = recognize_int(v);
    CHECK(rec.ok);
    CHECK(rec.value == expect);
}

TEST_CASE("modular invariance as ball containment") {
    std::mt19937 rng(20260816);
    std::uniform_int_distribution<long> num(-100, 100);
    for (int trial = 0; trial < 12; ++trial) {
        mpq_class x(num(rng), 211), y(std::abs(num(rng)) + 150, 173);
        HalfPlanePoint t = hp(x, y, 160);
        ComplexBall v = j(t, 160);
        ComplexBall v_shift = j(hp(x + 1, y, 160), 160);
        CHECK(sub(v, v_shift).re().contains_q(0));
        CHECK(sub(v, v_shift).im().contains_q(0));
        // -1/tau via exact rational arithmetic: -1/(x+iy) = (-x+iy)/(x^2+y^2).
        mpq_class n2 = x * x + y * y;
        ComplexBall v_inv = j(hp(-x / n2, y / n2, 160), 160);
        CHECK(sub(v, v_inv).re().contains_q(0));
        CHECK(sub(v, v_inv).im().contains_q(0));
    }
}

TEST_CASE("jet matches central finite differences of j") {
    // Oracle: central differences at rational steps, high base precision so
    // the differencing error dominates and stays below 1e-6 relative.
    HalfPlanePoint t = hp(mpq_class(1, 10), 2, 320);
    Jet3 jet = j_jet(t, 320);
    mpq_class h(1, 1 << 27); // ~7.5e-9
    ComplexBall jp = j(hp(mpq_class(1, 10) + h, 2, 320), 320);
    ComplexBall jm = j(hp(mpq_class(1, 10) - h, 2, 320), 320);
    ComplexBall d1 = mul_q(sub(jp, jm), mpq_class(1) / (2 * h));
    double rel1 = abs_upper(sub(d1, jet.y_dot)) / abs_upper(jet.y_dot);
    CHECK(rel1 < 1e-6);
    ComplexBall d2 = mul_q(add(add(jp, jm), mul_q(jet.y, mpq_class(-2))),
                           mpq_class(1) / (h * h));
    double rel2 = abs_upper(sub(d2, jet.y_ddot)) / abs_upper(jet.y_ddot);
    CHECK(rel2 < 1e-6);
}

TEST_CASE("j' vanishes at the critical point i") {
    Jet3 jet = j_jet(hp(0, 1), 128);
    CHECK(jet.y_dot.re().contains_q(0));
    CHECK(jet.y_dot.im().contains_q(0));
}

TEST_CASE("periodicity carries the whole jet") {
    Jet3 a = j_jet(hp(0, 1, 160), 160);
    Jet3 b = j_jet(hp(1, 1, 160), 160);
    CHECK(sub(a.y, b.y).re().contains_q(0));
    CHECK(sub(a.y_dot, b.y_dot).re().contains_q(0));
    CHECK(sub(a.y_dot, b.y_dot).im().contains_q(0));
    CHECK(sub(a.y_ddot, b.y_ddot).re().contains_q(0));
    CHECK(sub(a.y_ddot, b.y_ddot).im().contains_q(0));
}

TEST_CASE("chi residual vanishes on true jets of j") {
    std::mt19937 rng(4242);
    std::uniform_int_distribution<long> num(-90, 90);
    for (int trial = 0; trial < 25; ++trial) {
        mpq_class x(num(rng), 199), y(std::abs(num(rng)) + 120, 131);
        HalfPlanePoint t = hp(x, y, 256);
        Jet3 jet = j_jet(t, 256);
        ComplexBall third = j_third(t, 256);
        ComplexBall res = chi_residual(jet, third);
        CHECK(res.re().contains_q(0));
        CHECK(res.im().contains_q(0));
        CHECK(res.radius_bound().upper_d() < 1e-15);
        // A reproduces the third derivative on the same jet.
        ComplexBall a = A(jet.y, jet.y_dot, jet.y_ddot);
        CHECK(sub(a, third).re().contains_q(0));
        CHECK(sub(a, third).im().contains_q(0));
    }
}

TEST_CASE("chi residual vanishes on a reparametrized jet") {
    // g: tau -> tau + 1/2 is not in SL2(Z), so j(g tau) is a genuinely
    // different solution of the same third-order equation.
    mpq_class x(1, 5), y(9, 4);
    Prec p = 256;
    HalfPlanePoint t = hp(x, y, p);
    Jet3 shifted = j_jet(hp(x + mpq_class(1, 2), y, p), p);
    ComplexBall third = j_third(hp(x + mpq_class(1, 2), y, p), p);
    Jet3 jet{t, shifted.y, shifted.y_dot, shifted.y_ddot};
    ComplexBall res = chi_residual(jet, third);
    CHECK(res.re().contains_q(0));
    CHECK(res.im().contains_q(0));
}

TEST_CASE("constant jet reproduces the bare R coefficient") {
    Prec p = 128;
    ComplexBall y = ComplexBall::from_si(2 * 1728, 0, p);
    Jet3 jet{hp(0, 2, p), y, ComplexBall::from_si(1, 0, p), ComplexBall::from_si(0, 0, p)};
    ComplexBall res = chi_residual(jet, ComplexBall::from_si(0, 0, p));
    ComplexBall rr = r_coefficient(y);
    CHECK(sub(res, rr).re().contains_q(0));
    CHECK(sub(res, rr).im().contains_q(0));
    CHECK(res.cert_nonzero());
}

TEST_CASE("singular locus guards") {
    Prec p = 128;
    ComplexBall zero = ComplexBall::from_si(0, 0, p);
    ComplexBall one = ComplexBall::from_si(1, 0, p);
    CHECK_THROWS_AS(r_coefficient(zero), SingularLocus);
    CHECK_THROWS_AS(r_coefficient(ComplexBall::from_si(1728, 0, p)), SingularLocus);
    CHECK_THROWS_AS(A(one, zero, one), SingularLocus);
    CHECK_NOTHROW(A(ComplexBall::from_si(7, 0, p), one, one));
    // Pole approach: |A| grows as y walks toward 1728.
    double prev = 0;
    for (long k = 1; k <= 3; ++k) {
        ComplexBall y = add_q(ComplexBall::from_si(1728, 0, p), mpq_class(1, 1L << (8 * k)));
        double mag = abs_b(A(y, one, one)).lower_d();
        CHECK(mag > prev);
        prev = mag;
    }
}

TEST_CASE("cusp gap stays under the uniform bound at spot points") {
    CHECK(cusp_gap(hp(0, 10)) < 2079.0);
    CHECK(cusp_gap(hp(0, 1)) < 2079.0);
    // Corner of F: gap = e^{pi sqrt 3} since j vanishes there.
    HalfPlanePoint zeta3(ComplexBall(RealBall::from_q(mpq_class(-1, 2), 128),
                                     mul_2si(sqrt_si(3, 128), -1)));
    double g = cusp_gap(zeta3);
    CHECK(g < 2079.0);
    CHECK(g > 230.0);
    CHECK(g < 231.0);
    // tau = i: gap = e^{2 pi} - 1728 in magnitude.
    double gi = cusp_gap(hp(0, 1));
    CHECK(gi > 1192.0);
    CHECK(gi < 1194.0);
    CHECK_THROWS_AS(cusp_gap(hp(2, 2)), OutOfDomain);
}

TEST_CASE("cusp gap certified on a coarse grid up to Im 50") {
    // Dense version runs in the acceptance suite; keep a sparse sweep here.
    for (int kx = -4; kx <= 4; ++kx) {
        for (int ky = 0; ky < 12; ++ky) {
            mpq_class x(kx, 8);
            mpq_class y = mpq_class(87, 100) + mpq_class(ky * 49, 11);
            if (x * x + y * y < 1)
                continue;
            CHECK(cusp_gap(hp(x, y)) < 2079.0);
        }
    }
}

} // TEST_SUITE
