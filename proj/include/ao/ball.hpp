#pragma once

// Certified ball arithmetic on MPFR. A RealBall is a center at working
// precision plus a nonnegative radius kept at low precision and always
// rounded upward, so every operation returns an enclosure of the exact
// image set. A ComplexBall is a rectangle (independent re/im balls).
//
// Soundness rules used throughout:
//   - centers are rounded to nearest; whenever MPFR reports the result
//     inexact, one ulp of the center is added to the radius;
//   - all radius arithmetic is done with MPFR_RNDU;
//   - monotone elementary functions (exp, log, sqrt) are evaluated on the
//     endpoints with directed rounding; sin/cos use |derivative| <= 1.
// Dyadic-exact inputs stay exact (radius 0) through exact operations, which
// is what makes boundary decisions like Re(tau) = 1/2 decidable.

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <utility>

#include "ao/errors.hpp"

namespace ao {

using Prec = mpfr_prec_t;

constexpr Prec kRadiusPrec = 32;

class RealBall {
  public:
    explicit RealBall(Prec prec = 64);
    RealBall(const RealBall& o);
    RealBall(RealBall&& o) noexcept;
    RealBall& operator=(const RealBall& o);
    RealBall& operator=(RealBall&& o) noexcept;
    ~RealBall();

    static RealBall from_si(long v, Prec prec);
    static RealBall from_z(const mpz_class& v, Prec prec);
    static RealBall from_q(const mpq_class& v, Prec prec);
    // Decimal string, exact value enclosed.
    static RealBall from_str(const std::string& s, Prec prec);
    static RealBall pi(Prec prec);
    // Ball spanning [lo, hi] given as exact mpfr endpoints.
    static RealBall from_endpoints(mpfr_srcptr lo, mpfr_srcptr hi, Prec prec);

    Prec prec() const { return mpfr_get_prec(c_); }
    mpfr_srcptr center() const { return c_; }
    mpfr_srcptr radius() const { return r_; }

    bool is_exact() const { return mpfr_zero_p(r_); }
    bool is_finite() const { return mpfr_number_p(c_) && mpfr_number_p(r_); }
    bool contains_zero() const;
    bool contains_q(const mpq_class& x) const;
    // Both exact with equal centers.
    bool exact_eq(const RealBall& o) const;

    // Exact endpoint extraction: out must be initialized; rounded outward.
    void lower(mpfr_ptr out) const;
    void upper(mpfr_ptr out) const;
    double lower_d() const; // rounded down
    double upper_d() const; // rounded up
    double center_d() const { return mpfr_get_d(c_, MPFR_RNDN); }
    double radius_d() const; // rounded up

    // Certified order predicates against another ball / exact rational.
    bool cert_lt(const RealBall& o) const;  // sup(this) <  inf(o)
    bool cert_le(const RealBall& o) const;  // sup(this) <= inf(o)
    bool cert_gt(const RealBall& o) const { return o.cert_lt(*this); }
    bool cert_ge(const RealBall& o) const { return o.cert_le(*this); }
    bool cert_lt_q(const mpq_class& x) const;
    bool cert_le_q(const mpq_class& x) const;
    bool cert_gt_q(const mpq_class& x) const;
    bool cert_ge_q(const mpq_class& x) const;
    bool cert_nonzero() const;

    // Mutating helpers used by the arithmetic layer.
    void add_radius_ulp_of_center();
    void add_radius(mpfr_srcptr extra);
    void add_radius_ball(const RealBall& extra); // center+radius of extra, RNDU
    void set_radius_inf();
    void swap(RealBall& o) noexcept;

    std::string to_string(size_t digits = 20) const;

    friend RealBall add(const RealBall&, const RealBall&);
    friend RealBall sub(const RealBall&, const RealBall&);
    friend RealBall mul(const RealBall&, const RealBall&);
    friend RealBall div(const RealBall&, const RealBall&);
    friend RealBall neg(const RealBall&);
    friend RealBall abs_b(const RealBall&);
    friend RealBall sqrt_b(const RealBall&);
    friend RealBall exp_b(const RealBall&);
    friend RealBall log_b(const RealBall&);
    friend RealBall sin_b(const RealBall&);
    friend RealBall cos_b(const RealBall&);
    friend RealBall mul_2si(const RealBall&, long);
    friend RealBall round_to_prec(const RealBall&, Prec);

  private:
    mpfr_t c_; // center, working precision
    mpfr_t r_; // radius >= 0, kRadiusPrec, rounded up
};

RealBall add(const RealBall& a, const RealBall& b);
RealBall sub(const RealBall& a, const RealBall& b);
RealBall mul(const RealBall& a, const RealBall& b);
RealBall div(const RealBall& a, const RealBall& b);
RealBall neg(const RealBall& a);
RealBall abs_b(const RealBall& a);
RealBall sqrt_b(const RealBall& a); // throws OutOfDomain if certified negative
RealBall exp_b(const RealBall& a);
RealBall log_b(const RealBall& a); // throws OutOfDomain unless certified positive
RealBall sin_b(const RealBall& a);
RealBall cos_b(const RealBall& a);
RealBall mul_2si(const RealBall& a, long e); // exact scaling by 2^e
RealBall pow_ui(const RealBall& a, unsigned long e);
RealBall round_to_prec(const RealBall& a, Prec p);

inline RealBall operator+(const RealBall& a, const RealBall& b) { return add(a, b); }
inline RealBall operator-(const RealBall& a, const RealBall& b) { return sub(a, b); }
inline RealBall operator*(const RealBall& a, const RealBall& b) { return mul(a, b); }
inline RealBall operator/(const RealBall& a, const RealBall& b) { return div(a, b); }
inline RealBall operator-(const RealBall& a) { return neg(a); }

class ComplexBall {
  public:
    explicit ComplexBall(Prec prec = 64) : re_(prec), im_(prec) {}
    ComplexBall(RealBall re, RealBall im) : re_(std::move(re)), im_(std::move(im)) {}

    static ComplexBall from_q(const mpq_class& re, const mpq_class& im, Prec prec);
    static ComplexBall from_si(long re, long im, Prec prec);

    const RealBall& re() const { return re_; }
    const RealBall& im() const { return im_; }
    RealBall& re() { return re_; }
    RealBall& im() { return im_; }
    Prec prec() const { return std::max(re_.prec(), im_.prec()); }

    bool is_exact() const { return re_.is_exact() && im_.is_exact(); }
    bool is_finite() const { return re_.is_finite() && im_.is_finite(); }
    bool contains_zero() const { return re_.contains_zero() && im_.contains_zero(); }
    bool cert_nonzero() const { return re_.cert_nonzero() || im_.cert_nonzero(); }
    bool exact_eq(const ComplexBall& o) const {
        return re_.exact_eq(o.re_) && im_.exact_eq(o.im_);
    }

    // Upper bound of the distance from the center to any enclosed point.
    RealBall radius_bound() const;

    std::string to_string(size_t digits = 20) const;

  private:
    RealBall re_, im_;
};

ComplexBall add(const ComplexBall& a, const ComplexBall& b);
ComplexBall sub(const ComplexBall& a, const ComplexBall& b);
ComplexBall mul(const ComplexBall& a, const ComplexBall& b);
ComplexBall div(const ComplexBall& a, const ComplexBall& b);
ComplexBall neg(const ComplexBall& a);
ComplexBall conj(const ComplexBall& a);
ComplexBall mul_i(const ComplexBall& a);   // multiply by i, exact
RealBall norm_b(const ComplexBall& a);     // |z|^2
RealBall abs_b(const ComplexBall& a);      // |z|
ComplexBall pow_ui(const ComplexBall& a, unsigned long e);
ComplexBall mul_real(const ComplexBall& a, const RealBall& s);
ComplexBall mul_q(const ComplexBall& a, const mpq_class& s);
ComplexBall add_q(const ComplexBall& a, const mpq_class& re);

inline ComplexBall operator+(const ComplexBall& a, const ComplexBall& b) { return add(a, b); }
inline ComplexBall operator-(const ComplexBall& a, const ComplexBall& b) { return sub(a, b); }
inline ComplexBall operator*(const ComplexBall& a, const ComplexBall& b) { return mul(a, b); }
inline ComplexBall operator/(const ComplexBall& a, const ComplexBall& b) { return div(a, b); }
inline ComplexBall operator-(const ComplexBall& a) { return neg(a); }

// Nearest-integer recognition: accepts when the radius is < 1/4 and the
// center is within 1/4 of an integer (so the integer is unique in the ball).
struct IntRecognition {
    bool ok = false;
    mpz_class value;
};
IntRecognition recognize_int(const RealBall& x);
IntRecognition recognize_int(const ComplexBall& x);

} // namespace ao
