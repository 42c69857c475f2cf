// Acceptance suite: eleven end-to-end checks, one per invocation argument,
// each printing a single [PASS]/[FAIL] verdict line followed by indented
// detail. Every tolerance and bound is pinned here, in code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ao/dynamics.hpp"
#include "ao/errors.hpp"
#include "ao/jfun.hpp"
#include "ao/modpoly.hpp"
#include "ao/oort.hpp"
#include "ao/polytext.hpp"
#include "ao/quad.hpp"

using namespace ao;

namespace {

using Clock = std::chrono::steady_clock;

double secs_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_dev(const ComplexBall& got, const ComplexBall& want) {
    double num = abs_b(sub(got, want)).upper_d();
    double den = abs_b(want).lower_d();
    return num / den;
}

// 1. Phi_2 rebuilt from scratch at two working precisions, with the eight
// classical off-cusp coefficients pinned exactly and any further monomials
// reported rather than asserted.
bool crit_phi2(std::ostream& out) {
    auto t0 = Clock::now();
    ModularPolynomial a = phi(2, 300);
    ModularPolynomial b = phi(2, 520);
    double dt = secs_since(t0);
    if (!(a.coeffs == b.coeffs)) {
        out << "  coefficient sets differ between working precisions\n";
        return false;
    }
    const std::map<std::pair<long, long>, mpz_class> required = {
        {{2, 1}, 1488},
        {{1, 2}, 1488},
        {{2, 0}, -162000},
        {{0, 2}, -162000},
        {{1, 1}, 40773375},
        {{1, 0}, 8748000000L},
        {{0, 1}, 8748000000L},
        {{0, 0}, -157464000000000L},
    };
    for (const auto& [ij, c] : required) {
        auto it = a.coeffs.find(ij);
        if (it == a.coeffs.end() || it->second != c) {
            out << "  coefficient of x^" << ij.first << " y^" << ij.second
                << " is not " << c.get_str() << "\n";
            return false;
        }
    }
    for (const auto& [ij, c] : a.coeffs)
        if (!required.count(ij))
            out << "  additional monomial x^" << ij.first << " y^" << ij.second
                << " -> " << c.get_str() << "\n";
    out << "  " << a.coeffs.size() << " terms, rebuilt twice in " << dt << "s\n";
    return dt < 30.0;
}

// Reduced-form count by the naive triple condition, written independently
// of the library's enumeration.
long oracle_class_number(long q) {
    long count = 0;
    for (long a = 1; 3 * a * a <= q; ++a)
        for (long b = -a + 1; b <= a; ++b) {
            long num = b * b + q;
            if (num % (4 * a) != 0)
                continue;
            long c = num / (4 * a);
            if (c < a)
                continue;
            if (a == c && b < 0)
                continue;
            if (std::gcd(std::gcd(a, std::labs(b)), c) != 1)
                continue;
            ++count;
        }
    return count;
}

// 2. Class numbers against the oracle up to 10^4, CM-point counts, and the
// thirteen discriminants whose class polynomial is linear.
bool crit_classnum(std::ostream& out) {
    auto t0 = Clock::now();
    for (long q = 3; q <= 10000; ++q) {
        if (q % 4 != 0 && q % 4 != 3)
            continue;
        long h = class_number(mpz_class(-q));
        if (h != oracle_class_number(q)) {
            out << "  class_number(-" << q << ") = " << h
                << " disagrees with the oracle " << oracle_class_number(q) << "\n";
            return false;
        }
        if (static_cast<long>(lambda_points(mpz_class(-q), 64).size()) != h) {
            out << "  #Lambda_{-" << q << "} != h\n";
            return false;
        }
    }
    std::set<long> degree_one;
    for (long q = 3; q <= 200; ++q) {
        if (q % 4 != 0 && q % 4 != 3)
            continue;
        if (hilbert_class_poly(mpz_class(-q)).var_degree(0) == 1)
            degree_one.insert(-q);
    }
    const std::set<long> classical = {-3,  -4,  -7,  -8,  -11, -12, -16,
                                      -19, -27, -28, -43, -67, -163};
    double dt = secs_since(t0);
    out << "  all |d| <= 10^4 agree; degree-1 set has " << degree_one.size()
        << " elements; " << dt << "s\n";
    return degree_one == classical && dt < 60.0;
}

// 3. The cusp estimate | |j| - e^{2 pi Im} | stays below 2079 on a dense
// deterministic grid of the closed fundamental domain up to height 50.
bool crit_cusp(std::ostream& out) {
    long points = 0;
    double worst = 0;
    for (long k = 0; k <= 100; ++k) {
        mpq_class x(k - 50, 100);
        x.canonicalize();
        for (long l = 0; l <= 100; ++l) {
            mpq_class y(8700 + 4913 * l, 10000);
            y.canonicalize();
            if (x * x + y * y < 1)
                continue;
            HalfPlanePoint tau(ComplexBall::from_q(x, y, 128));
            double gap = cusp_gap(tau);
            worst = std::max(worst, gap);
            ++points;
            if (gap >= 2079) {
                out << "  gap " << gap << " at x=" << x.get_str()
                    << " y=" << y.get_str() << "\n";
                return false;
            }
        }
    }
    out << "  " << points << " grid points, worst certified gap " << worst << "\n";
    return points >= 10000;
}

// 4. The third-order operator vanishes on true jets of j, and the
// closed-form third derivative matches the differentiated series.
bool crit_chi(std::ostream& out) {
    const Prec prec = 256;
    const mpq_class tol(1, 1000000000000000L); // 1e-15
    std::mt19937_64 rng(20260816);
    std::uniform_real_distribution<double> ux(-0.5, 0.5);
    std::uniform_real_distribution<double> uy(0.87, 2.0);
    int done = 0;
    while (done < 100) {
        double x = ux(rng), y = uy(rng);
        if (x * x + y * y <= 1.001)
            continue;
        HalfPlanePoint tau(
            ComplexBall::from_q(mpq_class(x), mpq_class(y), prec));
        Jet3 jet = j_jet(tau, prec);
        ComplexBall j3 = j_third(tau, prec);
        ComplexBall res = chi_residual(jet, j3);
        if (!res.re().contains_zero() || !res.im().contains_zero() ||
            !res.radius_bound().cert_lt_q(tol)) {
            out << "  residual fails at x=" << x << " y=" << y << "\n";
            return false;
        }
        ComplexBall gap = sub(A(jet.y, jet.y_dot, jet.y_ddot), j3);
        if (!gap.re().contains_zero() || !gap.im().contains_zero() ||
            !gap.radius_bound().cert_lt_q(tol)) {
            out << "  closed form misses j''' at x=" << x << " y=" << y << "\n";
            return false;
        }
        ++done;
    }
    out << "  100 jets certified to radius < 1e-15 at 256 bits\n";
    return true;
}

// 5. Integrating the jet field from 2i over T = 0.3i lands on the jet of j
// at 2.3i; coordinates outside the moving block stay put.
bool crit_flow(std::ostream& out) {
    const Prec prec = 256;
    HalfPlanePoint tau0(ComplexBall::from_si(0, 2, prec));
    Jet3 start = j_jet(tau0, prec);
    VectorField mf = j_field(1, {1});
    ComplexBall t_dir = ComplexBall::from_q(0, mpq_class(3, 10), prec);
    TrajectorySample run =
        integrate(mf, {start.tau.z, start.y, start.y_dot, start.y_ddot}, t_dir,
                  1.0 / 1024, prec);
    HalfPlanePoint tau1(ComplexBall::from_q(0, mpq_class(23, 10), prec));
    Jet3 want = j_jet(tau1, prec);
    const std::vector<ComplexBall>& end = run.points.back();
    double worst = std::max({rel_dev(end[1], want.y), rel_dev(end[2], want.y_dot),
                             rel_dev(end[3], want.y_ddot)});
    if (!(worst < 1e-8) || !(rel_dev(end[0], tau1.z) < 1e-8)) {
        out << "  endpoint deviates by " << worst << " relative\n";
        return false;
    }

    VectorField two = j_field(2, {1});
    ComplexBall frozen =
        j(HalfPlanePoint(ComplexBall::from_q(0, mpq_class(3, 2), prec)), prec);
    TrajectorySample run2 =
        integrate(two, {start.tau.z, start.y, start.y_dot, start.y_ddot, frozen},
                  t_dir, 1.0 / 64, prec);
    for (const std::vector<ComplexBall>& pt : run2.points) {
        ComplexBall drift = sub(pt[4], frozen);
        if (!drift.re().contains_zero() || !drift.im().contains_zero()) {
            out << "  frozen coordinate drifted\n";
            return false;
        }
    }
    out << "  worst moving-jet deviation " << worst << " relative; "
        << run2.points.size() << " frozen samples constant\n";
    return true;
}

// 6. In every Lambda_d the runner-up imaginary part is at most half the
// principal one: exactly the statement that only one reduced form has a = 1,
// since Im tau = sqrt|d| / (2a).
bool crit_halving(std::ostream& out) {
    for (long q = 3; q <= 10000; ++q) {
        if (q % 4 != 0 && q % 4 != 3)
            continue;
        std::vector<QuadForm> forms = reduced_forms(mpz_class(-q));
        if (forms.empty() || forms[0].a != 1) {
            out << "  principal form missing for d=-" << q << "\n";
            return false;
        }
        if (forms.size() >= 2 && forms[1].a < 2) {
            out << "  second form of d=-" << q << " has a = "
                << forms[1].a.get_str() << "\n";
            return false;
        }
    }
    out << "  halving holds exactly for all 3 <= |d| <= 10^4\n";
    return true;
}

// 7. |h - w sqrt|d| L(1,chi) / 2pi| < 1/2 with certified truncation tails,
// over all fundamental discriminants up to 5000.
bool crit_formula(std::ostream& out) {
    const Prec prec = 192;
    const mpq_class half(1, 2);
    auto t0 = Clock::now();
    long checked = 0;
    for (long q = 3; q <= 5000; ++q) {
        if (q % 4 != 0 && q % 4 != 3)
            continue;
        mpz_class d(-q);
        if (decompose(d).f != 1)
            continue;
        long h = class_number(d);
        int w = unit_count(d);
        double target = 0.8 * 3.14159 / (w * std::sqrt(static_cast<double>(q)));
        RealBall value = div(
            mul(mul(sqrt_b(RealBall::from_z(mpz_class(q), prec)),
                    l_one(d, target, prec)),
                RealBall::from_si(w, prec)),
            mul_2si(RealBall::pi(prec), 1));
        RealBall gap = sub(value, RealBall::from_si(h, prec));
        if (!gap.cert_lt_q(half) || !neg(gap).cert_lt_q(half)) {
            out << "  d=-" << q << ": h=" << h << " not within 1/2\n";
            return false;
        }
        ++checked;
    }
    out << "  " << checked << " fundamental discriminants certified in "
        << secs_since(t0) << "s\n";
    return true;
}

// 8. At R = 8 at least 99% of fundamental discriminants in [10^4, 10^5]
// keep the stated proportion of their CM points below the cutoff.
bool crit_equidist(std::ostream& out) {
    auto t0 = Clock::now();
    EquidistTable table = equidist_experiment(10000, 100000, 8, 128);
    long total = 0, met = 0;
    std::vector<std::string> violations;
    for (const EquidistRow& row : table.rows) {
        if (!row.fundamental)
            continue;
        ++total;
        if (row.meets_threshold)
            ++met;
        else
            violations.push_back(row.d.get_str());
    }
    double dt = secs_since(t0);
    out << "  " << met << " of " << total << " fundamental rows meet 1 - 6/(pi R); "
        << dt << "s\n";
    for (size_t k = 0; k < violations.size(); ++k) {
        if (k == 20) {
            out << "  ... " << violations.size() - 20 << " more\n";
            break;
        }
        out << "  violation at d=" << violations[k] << "\n";
    }
    return met * 100 >= total * 99 && dt < 600.0;
}

bool ref_dnd(const MultiPoly& f) {
    long d = f.total_degree();
    for (int i = 0; i < f.n_vars(); ++i) {
        long di = f.var_degree(i);
        if (di != 0 && di != d)
            return false;
    }
    return true;
}

bool ref_hdnd(const MultiPoly& f) {
    if (!ref_dnd(f))
        return false;
    for (int i = 0; i < f.n_vars(); ++i)
        for (int j = i + 1; j < f.n_vars(); ++j) {
            MultiPoly r = restrict_diagonal(f, i, j);
            if (r.is_zero() || !ref_hdnd(r))
                return false;
        }
    return true;
}

// 9. Phi_2 breaks the degree dichotomy, and the classifier agrees with the
// definition-level recursion on a randomized corpus.
bool crit_dichotomy(std::ostream& out) {
    ModularPolynomial p2 = phi(2);
    MultiPoly f2(2);
    for (const auto& [ij, c] : p2.coeffs)
        f2.add_term({static_cast<unsigned>(ij.first),
                     static_cast<unsigned>(ij.second)},
                    mpq_class(c));
    if (is_dnd(f2).dnd || is_hdnd(f2).hdnd) {
        out << "  Phi_2 was not classified as breaking the dichotomy\n";
        return false;
    }

    std::mt19937_64 rng(99173);
    int done = 0;
    while (done < 50) {
        int n = 1 + static_cast<int>(rng() % 3);
        MultiPoly f(n);
        if (done % 2 == 0) {
            // structured: sums of pure powers, usually dnd
            long d = 1 + static_cast<long>(rng() % 4);
            for (int i = 0; i < n; ++i) {
                long c = static_cast<long>(rng() % 7) - 3;
                if (c == 0)
                    c = 1;
                Exps e(static_cast<size_t>(n), 0);
                e[static_cast<size_t>(i)] = static_cast<unsigned>(d);
                f.add_term(e, c);
            }
            if (rng() % 2)
                f.add_term(Exps(static_cast<size_t>(n), 0), 1 + (rng() % 5));
        } else {
            int terms = 1 + static_cast<int>(rng() % 5);
            for (int t = 0; t < terms; ++t) {
                Exps e(static_cast<size_t>(n), 0);
                for (int i = 0; i < n; ++i)
                    e[static_cast<size_t>(i)] = static_cast<unsigned>(rng() % 4);
                long c = static_cast<long>(rng() % 11) - 5;
                if (c != 0)
                    f.add_term(e, c);
            }
        }
        if (f.is_zero())
            continue;
        if (is_dnd(f).dnd != ref_dnd(f) || is_hdnd(f).hdnd != ref_hdnd(f)) {
            out << "  classifier disagrees with the reference on "
                << render(f) << "\n";
            return false;
        }
        ++done;
    }
    out << "  Phi_2 not dnd, not hdnd; 50-polynomial corpus agrees\n";
    return true;
}

// 10. Dominance certificates for x1 + x2 - 1 at the first three fundamental
// discriminants, re-verified, with exhaustive emptiness below each bound.
bool crit_dominance(std::ostream& out) {
    MultiPoly f = parse_poly("x1 + x2 - 1");
    for (long dk : {-3L, -4L, -7L}) {
        DominanceCertificate cert = dominance_bound(f, mpz_class(dk));
        if (!verify_certificate(cert)) {
            out << "  transcript failed re-verification at d=" << dk << "\n";
            return false;
        }
        long f0 = cert.bound_f.get_si();
        std::vector<SpecialCoord> orbit;
        for (long g = 1; g <= f0; ++g) {
            mpz_class dg(g * g * dk);
            for (long i = 0; i < class_number(dg); ++i)
                orbit.push_back({decompose(dg), i});
        }
        long pairs = 0;
        for (const SpecialCoord& u : orbit)
            for (const SpecialCoord& v : orbit) {
                if (u.disc.d == v.disc.d && u.conj_index == v.conj_index)
                    continue;
                SpecialPoint p({u, v});
                if (on_hypersurface(f, p, 128) != Answer::no) {
                    out << "  unexpected point below the bound at d=" << dk << "\n";
                    return false;
                }
                ++pairs;
            }
        out << "  d=" << dk << ": f0=" << f0 << " verified, " << pairs
            << " distinct-coordinate pairs below the bound all certified off\n";
    }
    return true;
}

// 11. The search on x - y returns exactly the matched-index diagonal below
// B = 50, nothing undecided, and every returned point survives exact
// re-verification.
bool crit_search(std::ostream& out) {
    MultiPoly f = parse_poly("x1 - x2");
    SpecialSearch s = special_points_on(f, 50, 128);
    if (!s.undecided.empty()) {
        out << "  " << s.undecided.size() << " undecided cases\n";
        return false;
    }
    std::vector<SpecialCoord> alphabet = special_alphabet(50);
    if (s.points.size() != alphabet.size()) {
        out << "  found " << s.points.size() << " points, expected "
            << alphabet.size() << "\n";
        return false;
    }
    for (size_t k = 0; k < s.points.size(); ++k) {
        const std::vector<SpecialCoord>& c = s.points[k].coords();
        bool diagonal = c[0].disc.d == c[1].disc.d &&
                        c[0].conj_index == c[1].conj_index &&
                        c[0].disc.d == alphabet[k].disc.d &&
                        c[0].conj_index == alphabet[k].conj_index;
        if (!diagonal || on_hypersurface(f, s.points[k], 256) != Answer::yes) {
            out << "  point " << k << " failed exact re-verification\n";
            return false;
        }
    }
    out << "  " << s.points.size()
        << " diagonal points, all re-verified, none undecided\n";
    return true;
}

struct Criterion {
    const char* label;
    bool (*fn)(std::ostream&);
};

const Criterion kCriteria[] = {
    {"modular polynomial reconstruction", crit_phi2},
    {"class numbers against the triple-loop oracle", crit_classnum},
    {"cusp gap below 2079 on the tall grid", crit_cusp},
    {"third-order residual and closed-form j'''", crit_chi},
    {"jet flow consistency and frozen coordinates", crit_flow},
    {"imaginary-part halving below the principal point", crit_halving},
    {"class number formula within one half", crit_formula},
    {"equidistribution proportions at R = 8", crit_equidist},
    {"degree dichotomy classifier against the reference", crit_dichotomy},
    {"dominance certificates with exhaustive cross-check", crit_dominance},
    {"search soundness on the exact diagonal", crit_search},
};

} // namespace

int main(int argc, char** argv) {
    long pick = 0;
    if (argc > 1) {
        pick = std::strtol(argv[1], nullptr, 10);
        if (pick < 1 || pick > 11) {
            std::cerr << "usage: acceptance [1..11]\n";
            return 1;
        }
    }
    bool all_ok = true;
    for (long k = 1; k <= 11; ++k) {
        if (pick != 0 && k != pick)
            continue;
        std::ostringstream detail;
        bool ok = false;
        try {
            ok = kCriteria[k - 1].fn(detail);
        } catch (const std::exception& e) {
            detail << "  exception: " << e.what() << "\n";
        }
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << k << ": "
                  << kCriteria[k - 1].label << "\n"
                  << detail.str();
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
