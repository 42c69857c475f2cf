#pragma once

// Negative discriminants, binary quadratic forms, class numbers, the CM
// points Lambda_d in F, Dirichlet characters and L(1, chi), and the
// Siegel-Tatuzawa scan driver.

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "ao/ball.hpp"
#include "ao/halfplane.hpp"

namespace ao {

struct Discriminant {
    mpz_class d;   // the discriminant itself, negative, 0 or 1 mod 4
    mpz_class d_k; // fundamental part
    mpz_class f;   // conductor, d = f^2 d_k

    // Validate and factor d. Throws NotADiscriminant.
    static Discriminant of(const mpz_class& d);
};

// Shorthand used everywhere: decompose(d) = Discriminant::of(d).
Discriminant decompose(const mpz_class& d);

struct QuadForm {
    mpz_class a, b, c;
    mpz_class disc() const { return b * b - 4 * a * c; }
    bool is_reduced() const;
    // Ambiguous forms (b = 0, a = b, or a = c) are the 2-torsion classes.
    bool is_ambiguous() const;
};

// One reduced representative per class, sorted by (a, b). Primitive forms
// only. Throws NotADiscriminant.
std::vector<QuadForm> reduced_forms(const mpz_class& d);

// Reduce an arbitrary positive-definite form to its canonical representative.
QuadForm reduce_form(QuadForm g);

long class_number(const mpz_class& d);
long two_torsion_count(const mpz_class& d);
// Number of distinct primes dividing d.
long omega(const mpz_class& d);

struct CMPoint {
    QuadForm form;
    HalfPlanePoint tau; // (-b + i sqrt|d|) / (2a)
};

// The CM points of discriminant d in F, ordered like reduced_forms.
// Membership in F is certified symbolically from the reduced form
// (|tau|^2 = c/a and Re tau = -b/2a are exact rationals).
std::vector<CMPoint> lambda_points(const mpz_class& d, Prec prec);

// The highest point of Lambda_d: tau = (-b + i sqrt|d|)/2 with b in {0,1},
// b = |d| mod 2.
CMPoint tau_principal(const mpz_class& d, Prec prec = 128);

// Kronecker symbol (d_k / n) as the real character modulo |d_k|.
int kronecker_chi(const mpz_class& d_k, const mpz_class& n);

// L(1, chi_{d_k}) as a ball: truncated sum plus a certified
// Polya-Vinogradov tail. target_err steers the truncation point.
RealBall l_one(const mpz_class& d_k, double target_err, Prec prec);

struct TatuzawaConfig {
    mpq_class epsilon_star = mpq_class(1, 100);
    std::optional<mpz_class> exceptional_d; // unknown by default
};

struct TatuzawaRow {
    mpz_class d;
    long h;
    long omega;
    long two_torsion;
    double ratio; // h(d) / |d|^{1/2 - eps}
};

struct TatuzawaReport {
    std::vector<TatuzawaRow> rows;
    mpz_class argmin_d;
    double min_ratio;
};

// Scan |d| in [lo, hi] (as positive bounds) over valid discriminants,
// excluding config.exceptional_d; reports min of h/|d|^{1/2-eps}.
TatuzawaReport tatuzawa_scan(const mpz_class& lo, const mpz_class& hi,
                             const mpq_class& eps,
                             const TatuzawaConfig& config = TatuzawaConfig{});

// Unit count of the order: 6 for d=-3, 4 for d=-4, else 2.
int unit_count(const mpz_class& d);

} // namespace ao
