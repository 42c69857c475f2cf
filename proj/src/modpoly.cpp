#include "ao/modpoly.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <sstream>
#include <vector>

#include "ao/errors.hpp"
#include "ao/jfun.hpp"

namespace ao {

namespace {

long g_phi_cap = 20;

// --- exact integer q-series ------------------------------------------------

// Coefficients c_m of j = q^-1 + 744 + 196884 q + ..., for m = -1..hi;
// returned vector has c[m+1] = coefficient of q^m. Built from the integer
// series of E4^3 divided by q prod (1-q^n)^24.
std::vector<mpz_class> j_coeffs(long hi) {
    long deg = hi + 1; // degree needed for j*q
    std::vector<mpz_class> e4(deg + 1, 0);
    // sigma_3 by a divisor sieve.
    {
        std::vector<mpz_class> s3(deg + 1, 0);
        for (long a = 1; a <= deg; ++a) {
            mpz_class a3 = mpz_class(a) * a * a;
            for (long m = a; m <= deg; m += a)
                s3[m] += a3;
        }
        e4[0] = 1;
        for (long m = 1; m <= deg; ++m)
            e4[m] = 240 * s3[m];
    }
    auto mul_trunc = [deg](const std::vector<mpz_class>& a,
                           const std::vector<mpz_class>& b) {
        std::vector<mpz_class> out(deg + 1, 0);
        for (long i = 0; i <= deg; ++i) {
            if (a[i] == 0)
                continue;
            for (long k = 0; i + k <= deg; ++k)
                if (b[k] != 0)
                    out[i + k] += a[i] * b[k];
        }
        return out;
    };
    std::vector<mpz_class> e4cube = mul_trunc(mul_trunc(e4, e4), e4);

    // prod_{n>=1} (1-q^n)^24, truncated.
    std::vector<mpz_class> eta(deg + 1, 0);
    eta[0] = 1;
    for (long n = 1; n <= deg; ++n)
        for (int rep = 0; rep < 24; ++rep)
            for (long m = deg; m >= n; --m)
                eta[m] -= eta[m - n];
    // Power-series inverse (constant term 1).
    std::vector<mpz_class> inv(deg + 1, 0);
    inv[0] = 1;
    for (long m = 1; m <= deg; ++m) {
        mpz_class s = 0;
        for (long i = 1; i <= m; ++i)
            if (eta[i] != 0)
                s += eta[i] * inv[m - i];
        inv[m] = -s;
    }
    std::vector<mpz_class> jq = mul_trunc(e4cube, inv); // = j * q
    std::vector<mpz_class> out(hi + 2);
    for (long m = -1; m <= hi; ++m)
        out[m + 1] = jq[m + 1];
    return out;
}

// --- ball Laurent series in Q = q^(1/N) ------------------------------------

// Fixed window [lo, lo+len): all arithmetic truncates to it.
struct BSeries {
    long lo;
    std::vector<ComplexBall> c;
};

struct Window {
    long lo, hi; // inclusive exponent range in Q
    Prec w;
    long len() const { return hi - lo + 1; }

    BSeries zero() const {
        return BSeries{lo, std::vector<ComplexBall>(len(), ComplexBall::from_si(0, 0, w))};
    }
    BSeries one() const {
        BSeries s = zero();
        if (lo <= 0 && 0 <= hi)
            s.c[-lo] = ComplexBall::from_si(1, 0, w);
        return s;
    }
    static bool exact_zero(const ComplexBall& z) {
        return z.re().is_exact() && z.im().is_exact() &&
               z.re().center_d() == 0.0 && z.im().center_d() == 0.0;
    }
    BSeries mul(const BSeries& a, const BSeries& b) const {
        BSeries out = zero();
        for (long i = 0; i < len(); ++i) {
            if (exact_zero(a.c[i]))
                continue;
            long ea = lo + i;
            for (long k = 0; k < len(); ++k) {
                long e = ea + lo + k;
                if (e < lo || e > hi)
                    continue;
                out.c[e - lo] = add(out.c[e - lo], ::ao::mul(a.c[i], b.c[k]));
            }
        }
        return out;
    }
    BSeries sub(const BSeries& a, const BSeries& b) const {
        BSeries out = a;
        for (long i = 0; i < len(); ++i)
            out.c[i] = ::ao::sub(out.c[i], b.c[i]);
        return out;
    }
};

struct CosetRep {
    long a, b, d;
};

std::vector<CosetRep> coset_reps(long n) {
    std::vector<CosetRep> reps;
    for (long a = 1; a <= n; ++a) {
        if (n % a != 0)
            continue;
        long d = n / a;
        for (long b = 0; b < d; ++b)
            if (std::gcd(std::gcd(a, b), d) == 1)
                reps.push_back({a, b, d});
    }
    return reps;
}

struct BuildResult {
    bool ok;
    std::map<std::pair<long, long>, mpz_class> coeffs;
};

BuildResult build_phi(long n, Prec w) {
    long deg = psi(n);
    // Only exponents up to 2n survive into the final q-window, but the
    // partial products need every factor out to 2n plus the total pole
    // depth of the complementary factors (sum of a^2 over cosets = n deg):
    // a Q^-5 from one root times a Q^9 from another still lands at Q^4.
    // Entries above 2n are truncated partial sums and are never read.
    Window win{-n * deg, 2 * n + n * deg, w};
    long m_hi = std::max(2 * n + n * deg, deg + 2);
    std::vector<mpz_class> jc = j_coeffs(m_hi);

    // Roots of unity e^(2 pi i t / d) for every divisor d of n.
    std::vector<std::vector<ComplexBall>> zeta(n + 1);
    RealBall pi = RealBall::pi(w);
    for (long d = 1; d <= n; ++d) {
        if (n % d != 0)
            continue;
        zeta[d].reserve(d);
        for (long t = 0; t < d; ++t) {
            RealBall ang = mul(pi, RealBall::from_q(mpq_class(2 * t, d), w));
            zeta[d].emplace_back(cos_b(ang), sin_b(ang));
        }
    }

    // prod over cosets of (x - j((a tau + b)/d)), coefficients in x.
    std::vector<BSeries> poly;
    poly.push_back(win.one());
    for (const CosetRep& r : coset_reps(n)) {
        // j((a tau + b)/d) = sum c_m zeta_d^{bm} Q^{a^2 m}.
        BSeries root = win.zero();
        for (long m = -1; m * r.a * r.a <= win.hi; ++m) {
            long e = m * r.a * r.a;
            if (e < win.lo || m > m_hi)
                continue;
            long t = ((r.b * m) % r.d + r.d) % r.d;
            root.c[e - win.lo] =
                add(root.c[e - win.lo], mul_q(zeta[r.d][t], mpq_class(jc[m + 1])));
        }
        std::vector<BSeries> next(poly.size() + 1, win.zero());
        for (size_t k = 0; k < poly.size(); ++k)
            next[k + 1] = poly[k];
        for (size_t k = 0; k < poly.size(); ++k)
            next[k] = win.sub(next[k], win.mul(root, poly[k]));
        poly = std::move(next);
    }

    // j^m windows over q-exponents [-deg, deg+2], exact integers. The band
    // is wider than the exponents ultimately read (<= 2) because each extra
    // factor of j costs one exponent of validity at the top: j^(m-1) must
    // be exact up to q^(e+1) for j^m to be exact at q^e.
    long qlo = -deg, qhi = 2;
    long qlen = qhi - qlo + 1;
    long top = deg + 2;
    long wlen = top - qlo + 1;
    std::vector<std::vector<mpz_class>> jpow(deg + 1);
    jpow[0] = std::vector<mpz_class>(wlen, 0);
    jpow[0][0 - qlo] = 1;
    {
        std::vector<mpz_class> cur(wlen, 0); // j^1 on the band
        for (long e = -1; e <= top; ++e)
            cur[e - qlo] = jc[e + 1];
        jpow[1] = cur;
        for (long m = 2; m <= deg; ++m) {
            std::vector<mpz_class> nx(wlen, 0);
            for (long u = -(m - 1); u <= top; ++u) {
                const mpz_class& a = jpow[m - 1][u - qlo];
                if (a == 0)
                    continue;
                for (long v = -1; u + v <= top; ++v)
                    nx[u + v - qlo] += a * jc[v + 1];
            }
            jpow[m] = std::move(nx);
        }
    }

    BuildResult res;
    res.ok = true;
    res.coeffs[{deg, 0}] = 1; // monic in x by construction
    for (long k = 0; k < deg; ++k) {
        // Collapse to a q-series; exponents not divisible by n must vanish.
        std::vector<ComplexBall> qc(qlen, ComplexBall::from_si(0, 0, w));
        for (long i = 0; i < win.len(); ++i) {
            long e = win.lo + i;
            if (e > 2 * n)
                break; // beyond this point the window holds truncated sums
            if (e % n != 0) {
                if (!poly[k].c[i].re().contains_zero() ||
                    !poly[k].c[i].im().contains_zero())
                    return {false, {}};
                continue;
            }
            long qe = e / n;
            if (qe >= qlo && qe <= qhi)
                qc[qe - qlo] = poly[k].c[i];
        }
        // Peel powers of j from the deepest pole up, recognizing integers.
        for (long m = deg; m >= 0; --m) {
            ComplexBall c = qc[-m - qlo];
            IntRecognition re_i = recognize_int(c.re());
            IntRecognition im_i = recognize_int(c.im());
            if (!re_i.ok || !im_i.ok || im_i.value != 0)
                return {false, {}};
            if (re_i.value == 0)
                continue;
            for (long e = -m; e <= qhi; ++e)
                qc[e - qlo] = add_q(
                    qc[e - qlo], mpq_class(mpz_class(-re_i.value * jpow[m][e - qlo])));
            res.coeffs[{k, m}] = re_i.value;
        }
        // Residual must contain zero everywhere (certifies the expansion).
        for (long i = 0; i < qlen; ++i)
            if (!qc[i].re().contains_zero() || !qc[i].im().contains_zero())
                return {false, {}};
    }
    return res;
}

} // namespace

long ModularPolynomial::deg_x() const {
    long d = 0;
    for (const auto& [ij, c] : coeffs)
        d = std::max(d, ij.first);
    return d;
}

bool ModularPolynomial::is_symmetric() const {
    for (const auto& [ij, c] : coeffs) {
        auto it = coeffs.find({ij.second, ij.first});
        if (it == coeffs.end() || it->second != c)
            return false;
    }
    return true;
}

long psi(long n) {
    if (n < 1)
        throw OutOfDomain("psi wants n >= 1");
    long out = n;
    long m = n;
    for (long p = 2; p * p <= m; ++p) {
        if (m % p != 0)
            continue;
        out += out / p;
        while (m % p == 0)
            m /= p;
    }
    if (m > 1)
        out += out / m;
    return out;
}

void set_phi_cap(long cap) {
    if (cap < 1)
        throw OutOfDomain("phi cap must be positive");
    g_phi_cap = cap;
}

long phi_cap() { return g_phi_cap; }

ModularPolynomial phi(long n, Prec prec_hint) {
    if (n < 1)
        throw OutOfDomain("phi wants N >= 1");
    if (n > g_phi_cap)
        throw SizeCapExceeded("modular polynomial level beyond the size cap");

    static std::map<long, ModularPolynomial> memo;
    static std::mutex memo_mu;
    if (prec_hint == 0) {
        std::lock_guard<std::mutex> lk(memo_mu);
        auto it = memo.find(n);
        if (it != memo.end())
            return it->second;
    }

    ModularPolynomial out;
    out.n = n;
    if (n == 1) {
        out.coeffs[{1, 0}] = 1;
        out.coeffs[{0, 1}] = -1;
        if (prec_hint == 0) {
            std::lock_guard<std::mutex> lk(memo_mu);
            memo[n] = out;
        }
        return out;
    }

    Prec w0 = prec_hint != 0 ? prec_hint : Prec(160 + 24 * psi(n));
    for (int attempt = 0; attempt < 4; ++attempt) {
        BuildResult r = build_phi(n, w0 << attempt);
        if (r.ok) {
            out.coeffs = std::move(r.coeffs);
            if (prec_hint == 0) {
                std::lock_guard<std::mutex> lk(memo_mu);
                memo[n] = out;
            }
            return out;
        }
    }
    throw PrecisionExhausted("modular polynomial coefficients did not settle");
}

ComplexBall phi_eval(long n, const ComplexBall& x, const ComplexBall& y) {
    ModularPolynomial p = phi(n);
    Prec w = std::max(x.re().prec(), y.re().prec());
    long dx = p.deg_x();
    long dy = 0;
    for (const auto& [ij, c] : p.coeffs)
        dy = std::max(dy, ij.second);
    std::vector<ComplexBall> ypow;
    ypow.push_back(ComplexBall::from_si(1, 0, w));
    for (long j = 1; j <= dy; ++j)
        ypow.push_back(mul(ypow.back(), y));
    // Horner in x over y-collapsed rows.
    ComplexBall acc = ComplexBall::from_si(0, 0, w);
    for (long i = dx; i >= 0; --i) {
        ComplexBall row = ComplexBall::from_si(0, 0, w);
        for (const auto& [ij, c] : p.coeffs)
            if (ij.first == i)
                row = add(row, mul_q(ypow[ij.second], mpq_class(c)));
        acc = add(mul(acc, x), row);
    }
    return acc;
}

std::string phi_to_text(const ModularPolynomial& p) {
    std::ostringstream os;
    for (const auto& [ij, c] : p.coeffs)
        os << ij.first << " " << ij.second << " " << c.get_str() << "\n";
    return os.str();
}

ModularPolynomial phi_from_text(const std::string& text) {
    ModularPolynomial out;
    out.n = 0; // level is not part of the file format
    size_t pos = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos)
            eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        if (!line.empty()) {
            std::istringstream is(line);
            long i, j;
            std::string coeff;
            if (!(is >> i >> j >> coeff) || i < 0 || j < 0)
                throw ParseError("bad modular-polynomial line", pos);
            try {
                out.coeffs[{i, j}] = mpz_class(coeff);
            } catch (const std::invalid_argument&) {
                throw ParseError("bad coefficient", pos);
            }
        }
        pos = eol + 1;
    }
    return out;
}

namespace {

// Exact SL2(Z) reduction of a rational point of the upper half-plane.
std::pair<mpq_class, mpq_class> reduce_exact(mpq_class x, mpq_class y) {
    for (;;) {
        // Nearest integer, ties toward -infinity side of [-1/2, 1/2).
        mpq_class shifted = x + mpq_class(1, 2);
        mpz_class fl;
        mpz_fdiv_q(fl.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
        x -= mpq_class(fl);
        mpq_class n2 = x * x + y * y;
        if (n2 < 1 || (n2 == 1 && x > 0)) {
            x = -x / n2;
            y = y / n2;
            continue;
        }
        return {x, y};
    }
}

bool exact_coords(const ComplexBall& z, mpq_class& x, mpq_class& y) {
    if (!z.re().is_exact() || !z.im().is_exact())
        return false;
    auto to_q = [](mpfr_srcptr v, mpq_class& out) {
        if (!mpfr_number_p(v))
            return false;
        mpz_class mant;
        mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), v);
        out = mpq_class(mant);
        if (e >= 0) {
            mpz_class p;
            mpz_ui_pow_ui(p.get_mpz_t(), 2, e);
            out *= p;
        } else {
            mpz_class p;
            mpz_ui_pow_ui(p.get_mpz_t(), 2, -e);
            out /= p;
        }
        return true;
    };
    return to_q(z.re().center(), x) && to_q(z.im().center(), y);
}

} // namespace

Tri is_isogenous(const HalfPlanePoint& tau1, const HalfPlanePoint& tau2, long n,
                 Prec prec) {
    // Numeric exclusion first.
    bool excluded = false;
    try {
        ComplexBall j1 = j(tau1, prec);
        ComplexBall j2 = j(tau2, prec);
        ComplexBall v = phi_eval(n, j1, j2);
        excluded = !v.re().contains_zero() || !v.im().contains_zero();
    } catch (const PrecisionExhausted&) {
    }
    if (excluded)
        return Tri::no;

    // Exact witness search: only meaningful when both inputs are exact
    // rationals, where coset images and reduction stay in Q + Qi.
    mpq_class x1, y1, x2, y2;
    if (exact_coords(tau1.z, x1, y1) && exact_coords(tau2.z, x2, y2)) {
        auto [rx2, ry2] = reduce_exact(x2, y2);
        for (const CosetRep& r : coset_reps(n)) {
            mpq_class wx = (mpq_class(r.a) * x1 + r.b) / r.d;
            mpq_class wy = mpq_class(r.a) * y1 / r.d;
            auto [rx, ry] = reduce_exact(wx, wy);
            if (rx == rx2 && ry == ry2)
                return Tri::yes;
        }
    }
    return Tri::undecided;
}

} // namespace ao
