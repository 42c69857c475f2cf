#include "ao/ball.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

namespace ao {

namespace {

// Scratch mpfr value with RAII.
struct Scratch {
    mpfr_t v;
    explicit Scratch(Prec p) { mpfr_init2(v, p); }
    ~Scratch() { mpfr_clear(v); }
    Scratch(const Scratch&) = delete;
    Scratch& operator=(const Scratch&) = delete;
};

} // namespace

RealBall::RealBall(Prec prec) {
    mpfr_init2(c_, std::max<Prec>(prec, MPFR_PREC_MIN));
    mpfr_init2(r_, kRadiusPrec);
    mpfr_set_zero(c_, 1);
    mpfr_set_zero(r_, 1);
}

RealBall::RealBall(const RealBall& o) {
    mpfr_init2(c_, mpfr_get_prec(o.c_));
    mpfr_init2(r_, kRadiusPrec);
    mpfr_set(c_, o.c_, MPFR_RNDN);
    mpfr_set(r_, o.r_, MPFR_RNDU);
}

RealBall::RealBall(RealBall&& o) noexcept {
    mpfr_init2(c_, MPFR_PREC_MIN);
    mpfr_init2(r_, kRadiusPrec);
    mpfr_swap(c_, o.c_);
    mpfr_swap(r_, o.r_);
}

RealBall& RealBall::operator=(const RealBall& o) {
    if (this != &o) {
        mpfr_set_prec(c_, mpfr_get_prec(o.c_));
        mpfr_set(c_, o.c_, MPFR_RNDN);
        mpfr_set(r_, o.r_, MPFR_RNDU);
    }
    return *this;
}

RealBall& RealBall::operator=(RealBall&& o) noexcept {
    if (this != &o) {
        mpfr_swap(c_, o.c_);
        mpfr_swap(r_, o.r_);
    }
    return *this;
}

RealBall::~RealBall() {
    mpfr_clear(c_);
    mpfr_clear(r_);
}

void RealBall::swap(RealBall& o) noexcept {
    mpfr_swap(c_, o.c_);
    mpfr_swap(r_, o.r_);
}

void RealBall::add_radius_ulp_of_center() {
    Scratch u(kRadiusPrec);
    if (mpfr_zero_p(c_)) {
        // Center rounded to zero while inexact: true value below the smallest
        // representable magnitude at the current exponent range.
        mpfr_set_ui_2exp(u.v, 1, mpfr_get_emin(), MPFR_RNDU);
    } else {
        mpfr_exp_t e = mpfr_get_exp(c_);
        mpfr_set_ui_2exp(u.v, 1, e - mpfr_get_prec(c_) + 1, MPFR_RNDU);
    }
    mpfr_add(r_, r_, u.v, MPFR_RNDU);
}

void RealBall::add_radius(mpfr_srcptr extra) { mpfr_add(r_, r_, extra, MPFR_RNDU); }

void RealBall::add_radius_ball(const RealBall& extra) {
    Scratch t(kRadiusPrec);
    mpfr_abs(t.v, extra.c_, MPFR_RNDU);
    mpfr_add(t.v, t.v, extra.r_, MPFR_RNDU);
    mpfr_add(r_, r_, t.v, MPFR_RNDU);
}

void RealBall::set_radius_inf() { mpfr_set_inf(r_, 1); }

RealBall RealBall::from_si(long v, Prec prec) {
    RealBall x(prec);
    if (mpfr_set_si(x.c_, v, MPFR_RNDN) != 0) x.add_radius_ulp_of_center();
    return x;
}

RealBall RealBall::from_z(const mpz_class& v, Prec prec) {
    RealBall x(prec);
    if (mpfr_set_z(x.c_, v.get_mpz_t(), MPFR_RNDN) != 0) x.add_radius_ulp_of_center();
    return x;
}

RealBall RealBall::from_q(const mpq_class& v, Prec prec) {
    RealBall x(prec);
    if (mpfr_set_q(x.c_, v.get_mpq_t(), MPFR_RNDN) != 0) x.add_radius_ulp_of_center();
    return x;
}

RealBall RealBall::from_str(const std::string& s, Prec prec) {
    RealBall x(prec);
    if (mpfr_set_str(x.c_, s.c_str(), 10, MPFR_RNDN) != 0) x.add_radius_ulp_of_center();
    return x;
}

RealBall RealBall::pi(Prec prec) {
    RealBall x(prec);
    if (mpfr_const_pi(x.c_, MPFR_RNDN) != 0) x.add_radius_ulp_of_center();
    return x;
}

RealBall RealBall::from_endpoints(mpfr_srcptr lo, mpfr_srcptr hi, Prec prec) {
    RealBall x(prec);
    Scratch mid(prec + 8), half(prec + 8);
    mpfr_add(mid.v, lo, hi, MPFR_RNDN);
    mpfr_div_2si(mid.v, mid.v, 1, MPFR_RNDN);
    if (mpfr_set(x.c_, mid.v, MPFR_RNDN) != 0) x.add_radius_ulp_of_center();
    // radius >= max(hi - mid, mid - lo), rounded up; one extra ulp covers the
    // midpoint rounding already, but be generous: r = (hi - lo)/2 + 2 ulp.
    mpfr_sub(half.v, hi, lo, MPFR_RNDU);
    mpfr_div_2si(half.v, half.v, 1, MPFR_RNDU);
    Scratch r32(kRadiusPrec);
    mpfr_set(r32.v, half.v, MPFR_RNDU);
    mpfr_add(x.r_, x.r_, r32.v, MPFR_RNDU);
    x.add_radius_ulp_of_center();
    x.add_radius_ulp_of_center();
    return x;
}

void RealBall::lower(mpfr_ptr out) const { mpfr_sub(out, c_, r_, MPFR_RNDD); }
void RealBall::upper(mpfr_ptr out) const { mpfr_add(out, c_, r_, MPFR_RNDU); }

double RealBall::lower_d() const {
    Scratch t(prec() + 8);
    lower(t.v);
    return mpfr_get_d(t.v, MPFR_RNDD);
}

double RealBall::upper_d() const {
    Scratch t(prec() + 8);
    upper(t.v);
    return mpfr_get_d(t.v, MPFR_RNDU);
}

double RealBall::radius_d() const { return mpfr_get_d(r_, MPFR_RNDU); }

bool RealBall::contains_zero() const {
    Scratch t(kRadiusPrec);
    mpfr_abs(t.v, c_, MPFR_RNDD);
    return mpfr_cmp(t.v, r_) <= 0;
}

bool RealBall::contains_q(const mpq_class& x) const {
    Scratch lo(prec() + 8), hi(prec() + 8);
    lower(lo.v);
    upper(hi.v);
    return mpfr_cmp_q(lo.v, x.get_mpq_t()) <= 0 && mpfr_cmp_q(hi.v, x.get_mpq_t()) >= 0;
}

bool RealBall::exact_eq(const RealBall& o) const {
    return is_exact() && o.is_exact() && mpfr_equal_p(c_, o.c_);
}

bool RealBall::cert_lt(const RealBall& o) const {
    Prec p = std::max(prec(), o.prec()) + 8;
    Scratch a(p), b(p);
    upper(a.v);
    o.lower(b.v);
    return mpfr_less_p(a.v, b.v);
}

bool RealBall::cert_le(const RealBall& o) const {
    Prec p = std::max(prec(), o.prec()) + 8;
    Scratch a(p), b(p);
    upper(a.v);
    o.lower(b.v);
    return mpfr_lessequal_p(a.v, b.v);
}

bool RealBall::cert_lt_q(const mpq_class& x) const {
    Scratch a(prec() + 8);
    upper(a.v);
    return mpfr_cmp_q(a.v, x.get_mpq_t()) < 0;
}

bool RealBall::cert_le_q(const mpq_class& x) const {
    Scratch a(prec() + 8);
    upper(a.v);
    return mpfr_cmp_q(a.v, x.get_mpq_t()) <= 0;
}

bool RealBall::cert_gt_q(const mpq_class& x) const {
    Scratch a(prec() + 8);
    lower(a.v);
    return mpfr_cmp_q(a.v, x.get_mpq_t()) > 0;
}

bool RealBall::cert_ge_q(const mpq_class& x) const {
    Scratch a(prec() + 8);
    lower(a.v);
    return mpfr_cmp_q(a.v, x.get_mpq_t()) >= 0;
}

bool RealBall::cert_nonzero() const { return !contains_zero() && is_finite(); }

std::string RealBall::to_string(size_t digits) const {
    char* cs = nullptr;
    char* rs = nullptr;
    mpfr_asprintf(&cs, "%.*Rg", (int)digits, c_);
    mpfr_asprintf(&rs, "%.3Rg", r_);
    std::string out = std::string(cs) + " +/- " + rs;
    mpfr_free_str(cs);
    mpfr_free_str(rs);
    return out;
}

RealBall add(const RealBall& a, const RealBall& b) {
    RealBall x(std::max(a.prec(), b.prec()));
    int t = mpfr_add(x.c_, a.c_, b.c_, MPFR_RNDN);
    mpfr_add(x.r_, a.r_, b.r_, MPFR_RNDU);
    if (t != 0) x.add_radius_ulp_of_center();
    return x;
}

RealBall sub(const RealBall& a, const RealBall& b) {
    RealBall x(std::max(a.prec(), b.prec()));
    int t = mpfr_sub(x.c_, a.c_, b.c_, MPFR_RNDN);
    mpfr_add(x.r_, a.r_, b.r_, MPFR_RNDU);
    if (t != 0) x.add_radius_ulp_of_center();
    return x;
}

RealBall neg(const RealBall& a) {
    RealBall x(a.prec());
    mpfr_neg(x.c_, a.c_, MPFR_RNDN); // exact
    mpfr_set(x.r_, a.r_, MPFR_RNDU);
    return x;
}

RealBall abs_b(const RealBall& a) {
    // | |x| - |c| | <= |x - c| <= r, and clip below at 0 implicitly.
    RealBall x(a.prec());
    mpfr_abs(x.c_, a.c_, MPFR_RNDN); // exact
    mpfr_set(x.r_, a.r_, MPFR_RNDU);
    return x;
}

RealBall mul(const RealBall& a, const RealBall& b) {
    RealBall x(std::max(a.prec(), b.prec()));
    // The ball {0} absorbs everything, including infinite-radius factors;
    // without this short-circuit 0 * inf below would poison the radius
    // with NaN, which contains_zero() then treats as "contains zero".
    if ((a.is_exact() && mpfr_zero_p(a.c_)) ||
        (b.is_exact() && mpfr_zero_p(b.c_))) {
        mpfr_set_zero(x.c_, 1);
        return x;
    }
    int t = mpfr_mul(x.c_, a.c_, b.c_, MPFR_RNDN);
    // r = |a.c| * b.r + |b.c| * a.r + a.r * b.r, all rounded up.
    Scratch t1(kRadiusPrec), t2(kRadiusPrec);
    mpfr_abs(t1.v, a.c_, MPFR_RNDU);
    mpfr_mul(t1.v, t1.v, b.r_, MPFR_RNDU);
    mpfr_abs(t2.v, b.c_, MPFR_RNDU);
    mpfr_mul(t2.v, t2.v, a.r_, MPFR_RNDU);
    mpfr_add(t1.v, t1.v, t2.v, MPFR_RNDU);
    mpfr_mul(t2.v, a.r_, b.r_, MPFR_RNDU);
    mpfr_add(x.r_, t1.v, t2.v, MPFR_RNDU);
    if (t != 0) x.add_radius_ulp_of_center();
    if (mpfr_nan_p(x.r_)) x.set_radius_inf();
    return x;
}

RealBall div(const RealBall& a, const RealBall& b) {
    RealBall x(std::max(a.prec(), b.prec()));
    // Enclosure only valid when b excludes zero; otherwise radius = inf.
    Scratch babs(kRadiusPrec);
    mpfr_abs(babs.v, b.c_, MPFR_RNDD);
    if (!b.is_finite() || mpfr_cmp(babs.v, b.r_) <= 0) {
        mpfr_div(x.c_, a.c_, b.c_, MPFR_RNDN);
        x.set_radius_inf();
        return x;
    }
    int t = mpfr_div(x.c_, a.c_, b.c_, MPFR_RNDN);
    // |x/y - ac/bc| <= (ar*|bc| + br*|ac|) / (|bc| * (|bc| - br))
    Scratch num(kRadiusPrec), den(kRadiusPrec), t1(kRadiusPrec);
    mpfr_abs(t1.v, b.c_, MPFR_RNDU);
    mpfr_mul(num.v, a.r_, t1.v, MPFR_RNDU);
    mpfr_abs(t1.v, a.c_, MPFR_RNDU);
    mpfr_mul(t1.v, t1.v, b.r_, MPFR_RNDU);
    mpfr_add(num.v, num.v, t1.v, MPFR_RNDU);
    mpfr_abs(den.v, b.c_, MPFR_RNDD);
    mpfr_sub(t1.v, den.v, b.r_, MPFR_RNDD); // |bc| - br > 0 here
    mpfr_mul(den.v, den.v, t1.v, MPFR_RNDD);
    mpfr_div(num.v, num.v, den.v, MPFR_RNDU);
    mpfr_add(x.r_, x.r_, num.v, MPFR_RNDU);
    if (t != 0) x.add_radius_ulp_of_center();
    return x;
}

RealBall mul_2si(const RealBall& a, long e) {
    RealBall x(a.prec());
    mpfr_mul_2si(x.c_, a.c_, e, MPFR_RNDN); // exact
    mpfr_mul_2si(x.r_, a.r_, e, MPFR_RNDU);
    return x;
}

RealBall round_to_prec(const RealBall& a, Prec p) {
    RealBall x(p);
    int t = mpfr_set(x.c_, a.c_, MPFR_RNDN);
    mpfr_set(x.r_, a.r_, MPFR_RNDU);
    if (t != 0) x.add_radius_ulp_of_center();
    return x;
}

namespace {

// Monotone increasing f on endpoints with directed rounding.
template <typename F>
RealBall monotone_increasing(const RealBall& a, F&& f) {
    Prec p = a.prec();
    Scratch lo(p + 8), hi(p + 8), flo(p + 8), fhi(p + 8);
    a.lower(lo.v);
    a.upper(hi.v);
    f(flo.v, lo.v, MPFR_RNDD);
    f(fhi.v, hi.v, MPFR_RNDU);
    return RealBall::from_endpoints(flo.v, fhi.v, p);
}

} // namespace

RealBall sqrt_b(const RealBall& a) {
    Prec p = a.prec();
    Scratch lo(p + 8), hi(p + 8);
    a.lower(lo.v);
    a.upper(hi.v);
    if (mpfr_sgn(hi.v) < 0) throw OutOfDomain("sqrt of certified-negative ball");
    if (mpfr_sgn(lo.v) < 0) mpfr_set_zero(lo.v, 1); // clip: enclosure of sqrt on [0, hi]
    Scratch flo(p + 8), fhi(p + 8);
    mpfr_sqrt(flo.v, lo.v, MPFR_RNDD);
    mpfr_sqrt(fhi.v, hi.v, MPFR_RNDU);
    return RealBall::from_endpoints(flo.v, fhi.v, p);
}

RealBall exp_b(const RealBall& a) {
    if (!a.is_finite()) {
        RealBall x(a.prec());
        x.set_radius_inf();
        return x;
    }
    return monotone_increasing(a, [](mpfr_ptr out, mpfr_srcptr in, mpfr_rnd_t r) {
        mpfr_exp(out, in, r);
    });
}

RealBall log_b(const RealBall& a) {
    if (!a.cert_gt_q(mpq_class(0))) throw OutOfDomain("log of ball not certified positive");
    return monotone_increasing(a, [](mpfr_ptr out, mpfr_srcptr in, mpfr_rnd_t r) {
        mpfr_log(out, in, r);
    });
}

RealBall sin_b(const RealBall& a) {
    RealBall x(a.prec());
    int t = mpfr_sin(x.c_, a.c_, MPFR_RNDN);
    mpfr_set(x.r_, a.r_, MPFR_RNDU); // |sin'| <= 1
    if (t != 0) x.add_radius_ulp_of_center();
    return x;
}

RealBall cos_b(const RealBall& a) {
    RealBall x(a.prec());
    int t = mpfr_cos(x.c_, a.c_, MPFR_RNDN);
    mpfr_set(x.r_, a.r_, MPFR_RNDU);
    if (t != 0) x.add_radius_ulp_of_center();
    return x;
}

RealBall pow_ui(const RealBall& a, unsigned long e) {
    RealBall acc = RealBall::from_si(1, a.prec());
    RealBall base = a;
    while (e > 0) {
        if (e & 1) acc = mul(acc, base);
        e >>= 1;
        if (e) base = mul(base, base);
    }
    return acc;
}

// ---------------------------------------------------------------- complex

ComplexBall ComplexBall::from_q(const mpq_class& re, const mpq_class& im, Prec prec) {
    return ComplexBall(RealBall::from_q(re, prec), RealBall::from_q(im, prec));
}

ComplexBall ComplexBall::from_si(long re, long im, Prec prec) {
    return ComplexBall(RealBall::from_si(re, prec), RealBall::from_si(im, prec));
}

RealBall ComplexBall::radius_bound() const {
    // sqrt(rr^2 + ri^2) <= rr + ri (both nonnegative).
    RealBall rr(kRadiusPrec), ri(kRadiusPrec);
    mpfr_set((mpfr_ptr)rr.center(), re_.radius(), MPFR_RNDU);
    mpfr_set((mpfr_ptr)ri.center(), im_.radius(), MPFR_RNDU);
    return add(rr, ri);
}

std::string ComplexBall::to_string(size_t digits) const {
    return "(" + re_.to_string(digits) + ", " + im_.to_string(digits) + " i)";
}

ComplexBall add(const ComplexBall& a, const ComplexBall& b) {
    return ComplexBall(add(a.re(), b.re()), add(a.im(), b.im()));
}

ComplexBall sub(const ComplexBall& a, const ComplexBall& b) {
    return ComplexBall(sub(a.re(), b.re()), sub(a.im(), b.im()));
}

ComplexBall mul(const ComplexBall& a, const ComplexBall& b) {
    RealBall re = sub(mul(a.re(), b.re()), mul(a.im(), b.im()));
    RealBall im = add(mul(a.re(), b.im()), mul(a.im(), b.re()));
    return ComplexBall(std::move(re), std::move(im));
}

ComplexBall neg(const ComplexBall& a) { return ComplexBall(neg(a.re()), neg(a.im())); }

ComplexBall conj(const ComplexBall& a) { return ComplexBall(a.re(), neg(a.im())); }

ComplexBall mul_i(const ComplexBall& a) { return ComplexBall(neg(a.im()), a.re()); }

RealBall norm_b(const ComplexBall& a) {
    return add(mul(a.re(), a.re()), mul(a.im(), a.im()));
}

RealBall abs_b(const ComplexBall& a) { return sqrt_b(norm_b(a)); }

ComplexBall div(const ComplexBall& a, const ComplexBall& b) {
    RealBall n = norm_b(b);
    ComplexBall num = mul(a, conj(b));
    return ComplexBall(div(num.re(), n), div(num.im(), n));
}

ComplexBall pow_ui(const ComplexBall& a, unsigned long e) {
    ComplexBall acc = ComplexBall::from_si(1, 0, a.prec());
    ComplexBall base = a;
    while (e > 0) {
        if (e & 1) acc = mul(acc, base);
        e >>= 1;
        if (e) base = mul(base, base);
    }
    return acc;
}

ComplexBall mul_real(const ComplexBall& a, const RealBall& s) {
    return ComplexBall(mul(a.re(), s), mul(a.im(), s));
}

ComplexBall mul_q(const ComplexBall& a, const mpq_class& s) {
    RealBall sb = RealBall::from_q(s, a.prec());
    return mul_real(a, sb);
}

ComplexBall add_q(const ComplexBall& a, const mpq_class& re) {
    RealBall rb = RealBall::from_q(re, a.prec());
    return ComplexBall(add(a.re(), rb), a.im());
}

IntRecognition recognize_int(const RealBall& x) {
    IntRecognition out;
    if (!x.is_finite()) return out;
    // radius < 1/4
    {
        mpfr_t q;
        mpfr_init2(q, kRadiusPrec);
        mpfr_set_ui_2exp(q, 1, -2, MPFR_RNDN); // 0.25
        bool small = mpfr_cmp(x.radius(), q) < 0;
        mpfr_clear(q);
        if (!small) return out;
    }
    // nearest integer to center
    mpfr_t rounded;
    mpfr_init2(rounded, std::max<Prec>(x.prec(), 64));
    mpfr_rint(rounded, x.center(), MPFR_RNDN);
    mpz_class n;
    mpfr_get_z(n.get_mpz_t(), rounded, MPFR_RNDN);
    mpfr_clear(rounded);
    // |center - n| < 1/4
    RealBall diff = sub(x, RealBall::from_z(n, x.prec() + 8));
    if (!abs_b(diff).cert_lt_q(mpq_class(1, 4))) return out;
    out.ok = true;
    out.value = n;
    return out;
}

IntRecognition recognize_int(const ComplexBall& x) {
    IntRecognition out;
    // imaginary part must be small and contain zero region-wise: |im| < 1/4
    if (!abs_b(x.im()).cert_lt_q(mpq_class(1, 4))) return out;
    return recognize_int(x.re());
}

} // namespace ao
