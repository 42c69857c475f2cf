#include <doctest.h>

#include <gmpxx.h>

#include <random>

#include "ao/ball.hpp"
#include "ao/errors.hpp"
#include "ao/halfplane.hpp"

using namespace ao;

namespace {

ComplexBall cq(const mpq_class& re, const mpq_class& im, Prec p = 128) {
    return ComplexBall::from_q(re, im, p);
}

// Plain double-precision reduction oracle: same T/S walk, no certification.
// Only used on random interior points that stay away from the boundary.
void oracle_reduce(double& x, double& y) {
    for (int i = 0; i < 10000; ++i) {
        double n = std::floor(x + 0.5);
        x -= n;
        double n2 = x * x + y * y;
        if (n2 >= 1.0)
            return;
        x = -x / n2;
        y = y / n2;
    }
}

} // namespace

TEST_SUITE("halfplane") {

TEST_CASE("constructor rejects points touching the real axis") {
    CHECK_THROWS_AS(HalfPlanePoint(cq(0, 0)), OutOfDomain);
    CHECK_THROWS_AS(HalfPlanePoint(cq(1, mpq_class(-1, 2))), OutOfDomain);
    CHECK_NOTHROW(HalfPlanePoint(cq(0, mpq_class(1, 1000))));
}

TEST_CASE("membership on clear-cut points") {
    CHECK(in_f(HalfPlanePoint(cq(0, 2))) == Location::inside);
    CHECK(in_f(HalfPlanePoint(cq(mpq_class(1, 4), mpq_class(3, 2)))) == Location::inside);
    CHECK(in_f(HalfPlanePoint(cq(2, 2))) == Location::outside);
    CHECK(in_f(HalfPlanePoint(cq(0, mpq_class(1, 2)))) == Location::outside);
}

TEST_CASE("vertical boundary convention: left edge in, right edge out") {
    CHECK(in_f(HalfPlanePoint(cq(mpq_class(-1, 2), 3))) == Location::inside);
    CHECK(in_f(HalfPlanePoint(cq(mpq_class(1, 2), 3))) == Location::outside);
}

TEST_CASE("the corner i is inside via the exact arc clause") {
    CHECK(in_f(HalfPlanePoint(cq(0, 1))) == Location::inside);
}

TEST_CASE("moebius action composes and preserves the upper half plane") {
    std::mt19937 rng(20260816);
    std::uniform_int_distribution<long> entry(-5, 5);
    std::uniform_int_distribution<long> coord(-40, 40);
    for (int trial = 0; trial < 200; ++trial) {
        Mat2z g;
        // Random determinant-1 matrix from T/S generators.
        g = Mat2z{};
        for (int k = 0; k < 6; ++k) {
            Mat2z t;
            if (k % 2 == 0) {
                t.b = entry(rng);
            } else {
                t.a = 0; t.b = -1; t.c = 1; t.d = 0;
            }
            g = mat_mul(t, g);
        }
        CHECK(g.det() == 1);
        long v = coord(rng);
        ComplexBall z = cq(mpq_class(coord(rng), 17), mpq_class(v * v + 1, 23));
        ComplexBall w = apply_moebius(g, z);
        CHECK(w.im().cert_gt_q(mpq_class(0)));
        // Inverse matrix undoes the action.
        Mat2z inv{g.d, -g.b, -g.c, g.a};
        ComplexBall back = apply_moebius(inv, w);
        RealBall dx = sub(back.re(), z.re()), dy = sub(back.im(), z.im());
        CHECK(dx.contains_zero());
        CHECK(dy.contains_zero());
    }
}

TEST_CASE("reduction lands in F and matches a double-precision oracle") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<long> num(-400, 400);
    for (int trial = 0; trial < 120; ++trial) {
        mpq_class x(num(rng), 101), y(std::abs(num(rng)) + 25, 97);
        HalfPlanePoint p(cq(x, y, 192));
        Reduction red = reduce_to_f(p);
        CHECK(in_f(red.tau) == Location::inside);
        CHECK(red.gamma.det() == 1);
        // gamma applied to the input reproduces the reduced point.
        ComplexBall again = apply_moebius(red.gamma, p.z);
        CHECK(sub(again.re(), red.tau.z.re()).contains_zero());
        CHECK(sub(again.im(), red.tau.z.im()).contains_zero());
        // Oracle agreement away from the boundary.
        double ox = mpq_class(x).get_d(), oy = mpq_class(y).get_d();
        oracle_reduce(ox, oy);
        bool near_boundary = std::abs(std::abs(ox) - 0.5) < 1e-9 ||
                             std::abs(ox * ox + oy * oy - 1.0) < 1e-9;
        if (!near_boundary) {
            CHECK(std::abs(red.tau.z.re().center_d() - ox) < 1e-7);
            CHECK(std::abs(red.tau.z.im().center_d() - oy) < 1e-7);
        }
    }
}

TEST_CASE("reduction is the identity on interior points") {
    HalfPlanePoint p(cq(mpq_class(1, 5), 7));
    Reduction red = reduce_to_f(p);
    CHECK(red.gamma.a == 1);
    CHECK(red.gamma.b == 0);
    CHECK(red.gamma.c == 0);
    CHECK(red.gamma.d == 1);
}

TEST_CASE("relaxed reduction reaches the slack box with the correct matrix") {
    std::mt19937 rng(1234);
    std::uniform_int_distribution<long> num(-300, 300);
    for (int trial = 0; trial < 80; ++trial) {
        mpq_class x(num(rng), 103), y(std::abs(num(rng)) + 11, 211);
        ComplexBall tau = cq(x, y, 192);
        EvalReduction er = reduce_for_eval(tau);
        CHECK(er.gamma.det() == 1);
        CHECK(abs_b(er.z.re()).cert_le_q(mpq_class(1, 2) + mpq_class(1, 64)));
        CHECK(er.z.im().cert_ge_q(mpq_class(84, 100)));
        ComplexBall again = apply_moebius(er.gamma, tau);
        CHECK(sub(again.re(), er.z.re()).contains_zero());
        CHECK(sub(again.im(), er.z.im()).contains_zero());
    }
}

TEST_CASE("measure of the whole domain is one") {
    Measure m = measure(Region::full());
    CHECK(m.rational == 1);
    CHECK(m.over_pi == 0);
    RealBall v = m.value(128);
    CHECK(v.contains_q(1));
}

TEST_CASE("truncated-region measure matches 1 - 3/(pi R)") {
    Measure m = measure(Region::omega(mpq_class(2)));
    CHECK(m.rational == 1);
    CHECK(m.over_pi == mpq_class(-3, 2));
    RealBall v = m.value(128);
    // 1 - 3/(2 pi) = 0.52253...
    CHECK(v.cert_gt_q(mpq_class(52, 100)));
    CHECK(v.cert_lt_q(mpq_class(53, 100)));
    CHECK_THROWS_AS(Region::omega(mpq_class(1)), OutOfDomain);
}

TEST_CASE("truncated-region measure against Monte Carlo") {
    // Sample uniformly w.r.t. the hyperbolic measure restricted to the box
    // [-1/2,1/2) x (0, R] via inverse transform in y (density 1/y^2), keep
    // points inside Omega_R, and compare frequencies. Purely statistical
    // sanity bound, hence the loose tolerance.
    std::mt19937 rng(31337);
    std::uniform_real_distribution<double> ux(-0.5, 0.5);
    const double R = 3.0;
    // y distributed on (y0, R] with density prop. to 1/y^2, y0 small.
    const double y0 = 0.05;
    std::uniform_real_distribution<double> uu(0.0, 1.0);
    const int n = 400000;
    int in_omega = 0;
    for (int k = 0; k < n; ++k) {
        double x = ux(rng);
        double u = uu(rng);
        double y = 1.0 / (1.0 / y0 - u * (1.0 / y0 - 1.0 / R));
        bool in_f_box = (x * x + y * y > 1.0);
        if (in_f_box)
            ++in_omega;
    }
    // Mass of the sampling box w.r.t. (3/pi) dx dy / y^2 is (3/pi)(1/y0-1/R).
    double box_mass = (3.0 / M_PI) * (1.0 / y0 - 1.0 / R);
    double est = box_mass * in_omega / n;
    double exact = 1.0 - 3.0 / (M_PI * R);
    CHECK(std::abs(est - exact) < 0.01);
}

} // TEST_SUITE
