#include "ao/quad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ao/errors.hpp"

namespace ao {

namespace {

bool valid_disc(const mpz_class& d) {
    if (d >= 0)
        return false;
    mpz_class r = d % 4; // -3..0 for negative d
    return r == 0 || r == -3;
}

void require_disc(const mpz_class& d) {
    if (!valid_disc(d))
        throw NotADiscriminant("need d < 0 with d = 0 or 1 mod 4");
}

// Trial-division factorization of |n|; returns (prime, exponent) pairs.
std::vector<std::pair<mpz_class, unsigned long>> factorize(mpz_class n) {
    std::vector<std::pair<mpz_class, unsigned long>> out;
    n = abs(n);
    for (mpz_class p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            unsigned long e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            out.emplace_back(p, e);
        }
    }
    if (n > 1)
        out.emplace_back(n, 1);
    return out;
}

// Fast enumeration core for |d| fitting in a long: all primitive reduced
// forms in (a, b) order.
std::vector<QuadForm> reduced_forms_long(long dn) {
    std::vector<QuadForm> out;
    long abs_d = -dn;
    long amax = static_cast<long>(std::sqrt(static_cast<double>(abs_d) / 3.0)) + 2;
    long parity = ((dn % 2) + 2) % 2;
    for (long a = 1; a <= amax; ++a) {
        if (3 * a * a > abs_d)
            break;
        for (long b = -a; b <= a; ++b) {
            if (((b % 2) + 2) % 2 != parity)
                continue;
            long num = b * b - dn;
            if (num % (4 * a) != 0)
                continue;
            long c = num / (4 * a);
            if (c < a)
                continue;
            if (b == -a)
                continue; // (a,-a,c) ~ (a,a,c); keep b = a
            if (a == c && b < 0)
                continue; // (a,b,a) ~ (a,-b,a); keep b >= 0
            long g = std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c));
            if (g != 1)
                continue;
            out.push_back(QuadForm{a, b, c});
        }
    }
    return out;
}

std::vector<QuadForm> reduced_forms_mpz(const mpz_class& d) {
    std::vector<QuadForm> out;
    mpz_class abs_d = -d;
    mpz_class amax_sq = abs_d / 3;
    mpz_class amax = sqrt(amax_sq) + 2;
    mpz_class parity = ((d % 2) + 2) % 2;
    for (mpz_class a = 1; a <= amax; ++a) {
        if (3 * a * a > abs_d)
            break;
        for (mpz_class b = -a; b <= a; ++b) {
            if (((b % 2) + 2) % 2 != parity)
                continue;
            mpz_class num = b * b - d;
            if (num % (4 * a) != 0)
                continue;
            mpz_class c = num / (4 * a);
            if (c < a)
                continue;
            if (b == -a)
                continue;
            if (a == c && b < 0)
                continue;
            mpz_class g = gcd(gcd(a, b), c);
            if (g != 1)
                continue;
            out.push_back(QuadForm{a, b, c});
        }
    }
    return out;
}

} // namespace

Discriminant Discriminant::of(const mpz_class& d) {
    require_disc(d);
    // Pull out the square part; then d_K is -m or -4m for squarefree m.
    auto factors = factorize(d);
    mpz_class s = 1, m = 1;
    for (const auto& [p, e] : factors) {
        for (unsigned long k = 0; k + 1 < e; k += 2)
            s *= p;
        if (e % 2 == 1)
            m *= p;
    }
    Discriminant out;
    out.d = d;
    mpz_class neg_m = -m;
    mpz_class r = ((neg_m % 4) + 4) % 4;
    if (r == 1) {
        out.d_k = neg_m;
        out.f = s;
    } else {
        // s must be even here or d would not be 0,1 mod 4.
        out.d_k = 4 * neg_m;
        out.f = s / 2;
    }
    return out;
}

Discriminant decompose(const mpz_class& d) { return Discriminant::of(d); }

bool QuadForm::is_reduced() const {
    if (a <= 0)
        return false;
    mpz_class ab = abs(b);
    if (!(ab <= a && a <= c))
        return false;
    if ((ab == a || a == c) && b < 0)
        return false;
    return true;
}

bool QuadForm::is_ambiguous() const { return b == 0 || a == b || a == c; }

std::vector<QuadForm> reduced_forms(const mpz_class& d) {
    require_disc(d);
    if (d.fits_slong_p() && d > -(1L << 40))
        return reduced_forms_long(d.get_si());
    return reduced_forms_mpz(d);
}

QuadForm reduce_form(QuadForm g) {
    if (g.a <= 0 || g.disc() >= 0)
        throw NotADiscriminant("form must be positive definite");
    for (;;) {
        // Normalize b into (-a, a] by translation.
        mpz_class two_a = 2 * g.a;
        mpz_class k = (g.b + g.a);
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), k.get_mpz_t(), two_a.get_mpz_t());
        if (q != 0) {
            // (a, b, c) -> (a, b - 2qa, a q^2 - b q + c)
            g.c = g.a * q * q - g.b * q + g.c;
            g.b = g.b - two_a * q;
        }
        if (g.a > g.c) {
            // Invert: (a, b, c) -> (c, -b, a).
            std::swap(g.a, g.c);
            g.b = -g.b;
            continue;
        }
        break;
    }
    if ((g.a == g.c || abs(g.b) == g.a) && g.b < 0)
        g.b = -g.b;
    return g;
}

long class_number(const mpz_class& d) {
    return static_cast<long>(reduced_forms(d).size());
}

long two_torsion_count(const mpz_class& d) {
    auto forms = reduced_forms(d);
    long n = 0;
    for (const auto& f : forms)
        if (f.is_ambiguous())
            ++n;
    return n;
}

long omega(const mpz_class& d) {
    require_disc(d);
    return static_cast<long>(factorize(d).size());
}

std::vector<CMPoint> lambda_points(const mpz_class& d, Prec prec) {
    auto forms = reduced_forms(d);
    std::vector<CMPoint> out;
    out.reserve(forms.size());
    RealBall root = sqrt_b(RealBall::from_z(-d, prec));
    for (const auto& f : forms) {
        // tau = (-b + i sqrt|d|)/(2a). Reduced forms land in F exactly:
        // Re = -b/2a in [-1/2, 1/2) since b = -a is excluded, and
        // |tau|^2 = c/a >= 1 with the a = c boundary forced to b >= 0,
        // i.e. onto the kept left half of the arc.
        RealBall re = RealBall::from_q(mpq_class(-f.b, 2 * f.a), prec);
        RealBall im = div(root, RealBall::from_z(2 * f.a, prec));
        out.push_back(CMPoint{f, HalfPlanePoint(ComplexBall(re, im))});
    }
    return out;
}

CMPoint tau_principal(const mpz_class& d, Prec prec) {
    require_disc(d);
    mpz_class b = ((d % 2) + 2) % 2; // 0 or 1, matching d mod 2
    QuadForm f{1, b, (b * b - d) / 4};
    RealBall re = RealBall::from_q(mpq_class(-b, 2), prec);
    RealBall im = mul_2si(sqrt_b(RealBall::from_z(-d, prec)), -1);
    return CMPoint{f, HalfPlanePoint(ComplexBall(re, im))};
}

int kronecker_chi(const mpz_class& d_k, const mpz_class& n) {
    return mpz_kronecker(d_k.get_mpz_t(), n.get_mpz_t());
}

int unit_count(const mpz_class& d) {
    if (d == -3)
        return 6;
    if (d == -4)
        return 4;
    return 2;
}

RealBall l_one(const mpz_class& d_k, double target_err, Prec prec) {
    Discriminant dec = decompose(d_k);
    if (dec.f != 1)
        throw NotADiscriminant("L(1, chi) wants a fundamental discriminant");
    if (!(target_err > 0))
        throw OutOfDomain("target error must be positive");
    mpz_class q = -d_k;
    double qd = q.get_d();

    // Partial sums of chi are bounded by B = sqrt(q)(ln q + 2)
    // (Polya-Vinogradov with an explicit small-q safe constant, re-verified
    // exhaustively in the tests for q <= 500); Abel summation then bounds
    // the tail beyond N by 2B/(N+1).
    double bound = std::sqrt(qd) * (std::log(qd) + 2.0);
    unsigned long n_terms =
        static_cast<unsigned long>(std::ceil(2.0 * bound / (target_err * 0.5))) + 1;

    // Character table over one period.
    if (!q.fits_ulong_p())
        throw SizeCapExceeded("modulus too large for the L(1) series");
    unsigned long period = mpz_get_ui(q.get_mpz_t());
    std::vector<signed char> chi(period);
    for (unsigned long r = 0; r < period; ++r)
        chi[r] = static_cast<signed char>(kronecker_chi(d_k, mpz_class(r)));

    // Double-precision Kahan sum with a rigorous rounding-error budget:
    // each term has relative error <= u, and compensated summation adds
    // at most 2u per term against sum |chi(n)/n| <= ln N + 1.
    double sum = 0.0, comp = 0.0;
    for (unsigned long n = 1; n <= n_terms; ++n) {
        double term = static_cast<double>(chi[n % period]) / static_cast<double>(n);
        double yv = term - comp;
        double t = sum + yv;
        comp = (t - sum) - yv;
        sum = t;
    }
    double harmonic = std::log(static_cast<double>(n_terms)) + 1.0;
    double round_err = 4.0 * 2.220446049250313e-16 * harmonic *
                       (1.0 + static_cast<double>(n_terms) * 1e-16);
    double tail = 2.0 * bound / (static_cast<double>(n_terms) + 1.0);

    // mpq_class(double) is exact, so no digits are lost moving to a ball.
    RealBall out = RealBall::from_q(mpq_class(sum), prec);
    out.add_radius_ball(RealBall::from_q(mpq_class(round_err + tail), 64));
    return out;
}

TatuzawaReport tatuzawa_scan(const mpz_class& lo, const mpz_class& hi,
                             const mpq_class& eps, const TatuzawaConfig& config) {
    if (!(config.epsilon_star > 0 && config.epsilon_star < mpq_class(1, 16)))
        throw OutOfDomain("epsilon_star must lie in (0, 1/16)");
    TatuzawaReport rep;
    rep.min_ratio = 0.0;
    bool first = true;
    double e = eps.get_d();
    for (mpz_class n = lo; n <= hi; ++n) {
        mpz_class d = -n;
        if (!valid_disc(d))
            continue;
        if (config.exceptional_d && *config.exceptional_d == d)
            continue;
        long h = class_number(d);
        TatuzawaRow row;
        row.d = d;
        row.h = h;
        row.omega = omega(d);
        row.two_torsion = two_torsion_count(d);
        row.ratio = static_cast<double>(h) / std::pow(n.get_d(), 0.5 - e);
        if (first || row.ratio < rep.min_ratio) {
            rep.min_ratio = row.ratio;
            rep.argmin_d = d;
            first = false;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace ao
