#include "ao/oort.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "ao/errors.hpp"
#include "ao/jfun.hpp"

namespace ao {

namespace {

constexpr long kBoundFCap = 64;      // dominance search never gets near this
constexpr long kGridClassCap = 64;   // largest class number the exact path reduces by
constexpr long kTupleCap = 200000;   // quadratic-point tuple grid

// ---------------------------------------------------------------------------
// Exact rational endpoints of real balls. mpfr values are dyadic, so the
// conversion z * 2^e is lossless; lower()/upper() already round outward.

mpq_class q_of_mpfr(mpfr_srcptr x) {
    if (mpfr_zero_p(x))
        return 0;
    mpz_class z;
    mpfr_exp_t e = mpfr_get_z_2exp(z.get_mpz_t(), x);
    mpq_class q(z);
    if (e > 0)
        mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
    else if (e < 0)
        mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
    return q;
}

mpq_class lower_q(const RealBall& x) {
    mpfr_t t;
    mpfr_init2(t, mpfr_get_prec(x.center()) + 64);
    x.lower(t);
    mpq_class q = q_of_mpfr(t);
    mpfr_clear(t);
    return q;
}

mpq_class upper_q(const RealBall& x) {
    mpfr_t t;
    mpfr_init2(t, mpfr_get_prec(x.center()) + 64);
    x.upper(t);
    mpq_class q = q_of_mpfr(t);
    mpfr_clear(t);
    return q;
}

// ---------------------------------------------------------------------------
// Dense univariate rationals for the dominance certificates.

using QPoly = std::vector<mpq_class>; // coefficient of u^k at index k

QPoly qp_mul(const QPoly& a, const QPoly& b) {
    QPoly c(a.size() + b.size() - 1, mpq_class(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            c[i + j] += a[i] * b[j];
    return c;
}

QPoly qp_pow(const QPoly& a, long e) {
    QPoly r{mpq_class(1)};
    for (long i = 0; i < e; ++i)
        r = qp_mul(r, a);
    return r;
}

void qp_sub_scaled(QPoly& p, const QPoly& m, const mpq_class& s) {
    if (p.size() < m.size())
        p.resize(m.size(), mpq_class(0));
    for (size_t i = 0; i < m.size(); ++i)
        p[i] -= s * m[i];
}

// p(u) -> coefficients of p(s + t) in t, in place (repeated synthetic
// division).
void qp_taylor_shift(QPoly& p, const mpq_class& s) {
    if (p.size() < 2)
        return;
    size_t m = p.size() - 1;
    for (size_t i = 0; i < m; ++i)
        for (size_t j = m - 1; j + 1 > i; --j)
            p[j] += s * p[j + 1];
}

// The certificate polynomial at fixed rational endpoints: positive constant
// term and nonnegative higher coefficients after shifting to u0 proves
// P(u) > 0 for all u >= u0.
bool dominance_positive(const MultiPoly& f, long d, const mpq_class& c0,
                        const mpq_class& u0, const mpq_class& alpha) {
    Exps lead(static_cast<size_t>(f.n_vars()), 0);
    lead[0] = static_cast<unsigned>(d);
    QPoly p = qp_pow({-2079, 0, 1}, d);
    for (mpq_class& c : p)
        c *= c0;
    for (const auto& [e, c] : f.terms()) {
        if (e == lead)
            continue;
        long a1 = e[0];
        long rest = 0;
        for (size_t i = 1; i < e.size(); ++i)
            rest += e[i];
        QPoly m = qp_mul(qp_pow({2079, 0, 1}, a1), qp_pow({2079, 1, alpha}, rest));
        qp_sub_scaled(p, m, abs(c));
    }
    qp_taylor_shift(p, u0);
    if (!(p[0] > 0))
        return false;
    for (size_t k = 1; k < p.size(); ++k)
        if (p[k] < 0)
            return false;
    return true;
}

// Certified rational endpoints for one candidate bound: a lower bound of
// u = e^{pi f0 sqrt(q)/2} and an upper bound of alpha = e^{-pi sqrt(q)}.
std::pair<mpq_class, mpq_class> dominance_endpoints(long f0, const mpz_class& q,
                                                    Prec w) {
    RealBall sq = sqrt_b(RealBall::from_z(q, w));
    RealBall pisq = mul(RealBall::pi(w), sq);
    RealBall u = exp_b(mul_2si(mul(pisq, RealBall::from_si(f0, w)), -1));
    RealBall alpha = exp_b(neg(pisq));
    return {lower_q(u), upper_q(alpha)};
}

// ---------------------------------------------------------------------------
// Shared lookup tables for a membership scan: class polynomials per
// discriminant and j-balls per (coordinate, precision).

struct EvalTables {
    std::map<mpz_class, MultiPoly> hcp;
    std::map<std::pair<mpz_class, long>, std::map<Prec, ComplexBall>> jb;

    const MultiPoly& class_poly(const mpz_class& d) {
        auto it = hcp.find(d);
        if (it == hcp.end())
            it = hcp.emplace(d, hilbert_class_poly(d)).first;
        return it->second;
    }

    const ComplexBall& j_ball(const SpecialCoord& c, Prec prec) {
        auto& per = jb[{c.disc.d, c.conj_index}];
        auto it = per.find(prec);
        if (it == per.end()) {
            std::vector<CMPoint> pts = lambda_points(c.disc.d, prec);
            it = per.emplace(prec, j(pts[static_cast<size_t>(c.conj_index)].tau, prec))
                     .first;
        }
        return it->second;
    }
};

// Substitute later copies of syntactically equal coordinates into the
// earliest one. Exact, and the only `yes` route for repeated class-number
// > 1 coordinates.
MultiPoly unify_equal_coords(MultiPoly f, std::vector<SpecialCoord>& coords) {
    for (int i = static_cast<int>(coords.size()) - 1; i >= 1; --i) {
        for (int k = 0; k < i; ++k) {
            if (coords[static_cast<size_t>(k)].disc.d == coords[static_cast<size_t>(i)].disc.d &&
                coords[static_cast<size_t>(k)].conj_index ==
                    coords[static_cast<size_t>(i)].conj_index) {
                f = restrict_diagonal(f, i, k);
                coords.erase(coords.begin() + i);
                break;
            }
        }
    }
    return f;
}

// Normal form of f modulo {H_{d_i}(x_i)}. The leading monomials x_i^{h_i}
// are pairwise coprime, so one monic division pass per variable computes a
// normal form for the ideal; zero means f vanishes on the whole grid of
// conjugate tuples — in particular at the requested one.
MultiPoly grid_normal_form(MultiPoly f, const std::vector<SpecialCoord>& coords,
                           EvalTables& tab) {
    int n = f.n_vars();
    for (int i = 0; i < n; ++i) {
        const MultiPoly& h = tab.class_poly(coords[static_cast<size_t>(i)].disc.d);
        long deg = h.var_degree(0);
        MultiPoly hi(n);
        for (const auto& [e, c] : h.terms()) {
            Exps ei(static_cast<size_t>(n), 0);
            ei[static_cast<size_t>(i)] = e[0];
            hi.add_term(ei, c);
        }
        while (true) {
            const Exps* top = nullptr;
            mpq_class coef;
            for (const auto& [e, c] : f.terms()) {
                if (e[static_cast<size_t>(i)] >= static_cast<unsigned>(deg) &&
                    (!top || e[static_cast<size_t>(i)] > (*top)[static_cast<size_t>(i)])) {
                    top = &e;
                    coef = c;
                }
            }
            if (!top)
                break;
            Exps q = *top;
            q[static_cast<size_t>(i)] -= static_cast<unsigned>(deg);
            f = sub(f, mul(MultiPoly::monomial(n, q, coef), hi));
        }
    }
    return f;
}

Answer decide_membership(const MultiPoly& f, const std::vector<SpecialCoord>& coords0,
                         Prec prec, EvalTables& tab) {
    std::vector<SpecialCoord> coords = coords0;
    MultiPoly g = unify_equal_coords(f, coords);
    if (g.is_zero())
        return Answer::yes;

    bool small_classes = true;
    for (const SpecialCoord& c : coords)
        if (class_number(c.disc.d) > kGridClassCap)
            small_classes = false;
    if (small_classes) {
        try {
            MultiPoly nf = grid_normal_form(g, coords, tab);
            if (nf.is_zero())
                return Answer::yes;
            if (nf.total_degree() == 0)
                return Answer::no; // constant residue: nonzero on the whole grid
        } catch (const PrecisionExhausted&) {
        }
    }

    for (Prec w = prec; w <= 4 * prec; w *= 2) {
        try {
            std::vector<ComplexBall> pt;
            pt.reserve(coords.size());
            for (const SpecialCoord& c : coords)
                pt.push_back(tab.j_ball(c, w));
            if (g.eval_ball(pt, w).cert_nonzero())
                return Answer::no;
        } catch (const PrecisionExhausted&) {
        }
    }
    return Answer::undecided;
}

} // namespace

// ---------------------------------------------------------------------------
// SpecialPoint

SpecialPoint::SpecialPoint(std::vector<SpecialCoord> coords)
    : coords_(std::move(coords)), max_abs_(0) {
    if (coords_.empty())
        throw OutOfDomain("a special point needs at least one coordinate");
    for (const SpecialCoord& c : coords_) {
        if (c.conj_index < 0 || c.conj_index >= class_number(c.disc.d))
            throw OutOfDomain("conjugate index outside the class group order");
        mpz_class a = abs(c.disc.d);
        if (a > max_abs_)
            max_abs_ = a;
    }
}

mpz_class SpecialPoint::max_abs_disc_excluding(const std::optional<mpz_class>& d_k) const {
    mpz_class m = 0;
    for (const SpecialCoord& c : coords_) {
        if (d_k && c.disc.d_k == *d_k)
            continue;
        mpz_class a = abs(c.disc.d);
        if (a > m)
            m = a;
    }
    return m;
}

const std::vector<ComplexBall>& SpecialPoint::balls(Prec prec) const {
    auto it = cache_.find(prec);
    if (it != cache_.end())
        return it->second;
    std::vector<ComplexBall> v;
    v.reserve(coords_.size());
    for (const SpecialCoord& c : coords_) {
        std::vector<CMPoint> pts = lambda_points(c.disc.d, prec);
        v.push_back(j(pts[static_cast<size_t>(c.conj_index)].tau, prec));
    }
    return cache_.emplace(prec, std::move(v)).first->second;
}

// ---------------------------------------------------------------------------
// Hilbert class polynomials

MultiPoly hilbert_class_poly(const mpz_class& d, Prec prec_hint) {
    std::vector<QuadForm> forms = reduced_forms(d); // validates d
    size_t h = forms.size();

    // log2 of the largest coefficient is about pi sqrt|d| sum(1/a) / ln 2.
    double inv_a = 0;
    for (const QuadForm& g : forms)
        inv_a += 1.0 / g.a.get_d();
    double bits = 4.5324 * std::sqrt(mpz_class(abs(d)).get_d()) * inv_a;
    Prec w = prec_hint > 0 ? prec_hint
                           : static_cast<Prec>(64 + h + std::ceil(bits));

    for (int attempt = 0; attempt < 6; ++attempt, w *= 2) {
        std::vector<ComplexBall> coef;
        coef.push_back(ComplexBall::from_si(1, 0, w));
        bool bad = false;
        try {
            for (const CMPoint& pt : lambda_points(d, w)) {
                ComplexBall jv = j(pt.tau, w);
                std::vector<ComplexBall> nxt(coef.size() + 1, ComplexBall(w));
                for (size_t k = 0; k < coef.size(); ++k) {
                    nxt[k + 1] = add(nxt[k + 1], coef[k]);
                    nxt[k] = sub(nxt[k], mul(jv, coef[k]));
                }
                coef = std::move(nxt);
            }
        } catch (const PrecisionExhausted&) {
            continue;
        }

        MultiPoly out(1);
        for (size_t k = 0; k <= h && !bad; ++k) {
            const ComplexBall& cb = coef[k];
            if (!cb.is_finite()) {
                bad = true;
                break;
            }
            mpz_class z;
            mpfr_get_z(z.get_mpz_t(), cb.re().center(), MPFR_RNDN);
            RealBall dev = sub(cb.re(), RealBall::from_z(z, w));
            RealBall residual = add(abs_b(dev), abs_b(cb.im()));
            if (!residual.cert_lt_q(mpq_class(1, 2))) {
                bad = true;
                break;
            }
            if (z != 0)
                out.add_term({static_cast<unsigned>(k)}, mpq_class(z));
        }
        if (!bad)
            return out;
    }
    throw PrecisionExhausted("class polynomial coefficients would not round");
}

// ---------------------------------------------------------------------------
// Enumeration

std::vector<SpecialCoord> special_alphabet(const mpz_class& b) {
    if (b < 3)
        throw OutOfDomain("discriminant bound below 3");
    std::vector<SpecialCoord> out;
    for (mpz_class q = 3; q <= b; ++q) {
        long r = mpz_class(q % 4).get_si();
        if (r != 0 && r != 3)
            continue;
        Discriminant dd = decompose(-q);
        long h = class_number(dd.d);
        for (long i = 0; i < h; ++i)
            out.push_back({dd, i});
    }
    return out;
}

SpecialPointStream::SpecialPointStream(int n, const mpz_class& b, long fix_first)
    : alphabet_(special_alphabet(b)), n_(n), fixed_(fix_first), done_(false) {
    if (n_ < 1)
        throw OutOfDomain("tuples need at least one coordinate");
    if (fixed_ >= static_cast<long>(alphabet_.size()))
        throw OutOfDomain("partition index outside the alphabet");
    odo_.assign(static_cast<size_t>(n_), 0);
    if (fixed_ >= 0)
        odo_[0] = static_cast<size_t>(fixed_);
}

std::optional<SpecialPoint> SpecialPointStream::next() {
    if (done_)
        return std::nullopt;
    std::vector<SpecialCoord> c;
    c.reserve(odo_.size());
    for (size_t i : odo_)
        c.push_back(alphabet_[i]);

    int pos = n_ - 1;
    const int low = fixed_ >= 0 ? 1 : 0;
    for (; pos >= low; --pos) {
        if (++odo_[static_cast<size_t>(pos)] < alphabet_.size())
            break;
        odo_[static_cast<size_t>(pos)] = 0;
    }
    if (pos < low)
        done_ = true;
    return SpecialPoint(std::move(c));
}

std::vector<SpecialPoint> enumerate_special_points(int n, const mpz_class& b) {
    SpecialPointStream s(n, b);
    std::vector<SpecialPoint> out;
    while (auto p = s.next())
        out.push_back(std::move(*p));
    return out;
}

// ---------------------------------------------------------------------------
// Membership

Answer on_hypersurface(const MultiPoly& f, const SpecialPoint& p, Prec prec) {
    if (f.n_vars() != p.n())
        throw DimensionMismatch("polynomial and point dimensions differ");
    EvalTables tab;
    return decide_membership(f, p.coords(), prec, tab);
}

SpecialSearch special_points_on(const MultiPoly& f, const mpz_class& b, Prec prec) {
    SpecialSearch out;
    EvalTables tab;
    SpecialPointStream stream(f.n_vars(), b);
    while (auto p = stream.next()) {
        switch (decide_membership(f, p->coords(), prec, tab)) {
        case Answer::yes:
            out.points.push_back(std::move(*p));
            break;
        case Answer::undecided:
            out.undecided.push_back(std::move(*p));
            break;
        case Answer::no:
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dominance certificates

DominanceCertificate dominance_bound(const MultiPoly& f, const mpz_class& d_fund) {
    Discriminant dd = decompose(d_fund);
    if (dd.f != 1)
        throw OutOfDomain("dominance runs per fundamental discriminant");
    DndResult dr = is_dnd(f);
    if (!dr.dnd)
        throw NotDnd("dominance needs the degree dichotomy");
    long d = f.total_degree();
    if (d < 1)
        throw OutOfDomain("constant polynomial has no leading power");

    Exps lead(static_cast<size_t>(f.n_vars()), 0);
    lead[0] = static_cast<unsigned>(d);
    mpq_class c0 = abs(f.coefficient(lead));
    if (c0 == 0)
        throw ZeroLeadingCoefficient("no pure power of the first variable");
    mpq_class c1 = 0;
    for (const auto& [e, c] : f.terms())
        if (e != lead && abs(c) > c1)
            c1 = abs(c);

    DominanceCertificate cert;
    cert.poly = f;
    cert.c0 = c0;
    cert.c1 = c1;
    cert.d = d;
    cert.d_fund = d_fund;

    mpz_class q = abs(d_fund);
    for (long f0 = 0; f0 <= kBoundFCap; ++f0) {
        auto [u_lo, alpha_up] = dominance_endpoints(f0, q, 128);
        bool ok = u_lo * u_lo > 2079 && dominance_positive(f, d, c0, u_lo, alpha_up);
        cert.transcript.push_back({f0, u_lo, alpha_up, ok});
        if (ok) {
            cert.bound_f = f0;
            return cert;
        }
    }
    throw CertificateNotFound("no conductor bound within the search cap");
}

bool verify_certificate(const DominanceCertificate& cert) {
    try {
        if (cert.transcript.empty() || !cert.transcript.back().positive)
            return false;
        if (cert.transcript.back().f0 != cert.bound_f)
            return false;
        if (decompose(cert.d_fund).f != 1)
            return false;
        if (!is_dnd(cert.poly).dnd)
            return false;
        long d = cert.poly.total_degree();
        if (d != cert.d || d < 1)
            return false;
        Exps lead(static_cast<size_t>(cert.poly.n_vars()), 0);
        lead[0] = static_cast<unsigned>(d);
        if (abs(cert.poly.coefficient(lead)) != cert.c0 || cert.c0 == 0)
            return false;
        mpq_class c1 = 0;
        for (const auto& [e, c] : cert.poly.terms())
            if (e != lead && abs(c) > c1)
                c1 = abs(c);
        if (c1 != cert.c1)
            return false;

        mpz_class q = abs(cert.d_fund);
        Prec w = 192;
        RealBall sq = sqrt_b(RealBall::from_z(q, w));
        RealBall pisq = mul(RealBall::pi(w), sq);
        for (const DominanceStep& step : cert.transcript) {
            // The recorded endpoints must genuinely bound their exponentials...
            RealBall u = exp_b(mul_2si(mul(pisq, RealBall::from_si(step.f0, w)), -1));
            RealBall alpha = exp_b(neg(pisq));
            if (!u.cert_ge_q(step.u_lower) || !alpha.cert_le_q(step.alpha_upper))
                return false;
            // ...and reproduce the recorded verdict.
            bool ok = step.u_lower * step.u_lower > 2079 &&
                      dominance_positive(cert.poly, d, cert.c0, step.u_lower,
                                         step.alpha_upper);
            if (ok != step.positive)
                return false;
        }
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

// ---------------------------------------------------------------------------
// Linear special varieties on hdnd hypersurfaces

namespace {

// A found variety in closure form: coordinate -> merge class, plus the
// fixed value per class where one exists. Containment is constraint
// implication: V inside W iff V forces every merge and every fixed value
// that W forces.
struct Shape {
    std::vector<int> cls;
    std::map<int, std::pair<mpz_class, long>> val; // class -> (d, index)
};

Shape shape_of(const SpecialVarietyDescriptor& v) {
    Shape s;
    s.cls.assign(static_cast<size_t>(v.n), -1);
    int next = 0;
    for (size_t k = 0; k < v.blocks[0].size(); ++k) {
        int i = v.blocks[0][k];
        s.cls[static_cast<size_t>(i)] = next;
        s.val[next] = {v.fixed[k].disc.d, v.fixed[k].conj_index};
        ++next;
    }
    for (size_t k = 1; k < v.blocks.size(); ++k) {
        for (int i : v.blocks[k])
            s.cls[static_cast<size_t>(i)] = next;
        ++next;
    }
    return s;
}

bool shape_fixes(const Shape& s, int i, std::pair<mpz_class, long>& out) {
    auto it = s.val.find(s.cls[static_cast<size_t>(i)]);
    if (it == s.val.end())
        return false;
    out = it->second;
    return true;
}

// Is V contained in W?
bool shape_inside(const Shape& v, const Shape& w) {
    int n = static_cast<int>(v.cls.size());
    for (int i = 0; i < n; ++i) {
        std::pair<mpz_class, long> wv;
        if (shape_fixes(w, i, wv)) {
            std::pair<mpz_class, long> vv;
            if (!shape_fixes(v, i, vv) || vv != wv)
                return false;
        }
        for (int j = i + 1; j < n; ++j) {
            if (w.cls[static_cast<size_t>(i)] != w.cls[static_cast<size_t>(j)])
                continue;
            if (v.cls[static_cast<size_t>(i)] == v.cls[static_cast<size_t>(j)])
                continue;
            std::pair<mpz_class, long> a, b;
            if (shape_fixes(v, i, a) && shape_fixes(v, j, b) && a == b)
                continue;
            return false;
        }
    }
    return true;
}

struct LinearCollector {
    int n_orig = 0;
    mpz_class bound;
    long leaves = 0;
    // Class-number-one singular moduli below the bound, and the class
    // polynomials of the h > 1 discriminants for the univariate leaves.
    std::vector<std::pair<mpz_class, Discriminant>> sections;
    std::vector<std::pair<Discriminant, MultiPoly>> leaf_polys;
    std::vector<SpecialVarietyDescriptor> found;
    std::vector<Shape> shapes;
};

void emit_variety(const std::vector<std::vector<int>>& owners,
                  const std::vector<std::pair<std::vector<int>, FixedCoordinate>>& fixed,
                  LinearCollector& col) {
    SpecialVarietyDescriptor v;
    v.n = col.n_orig;
    std::vector<std::pair<int, FixedCoordinate>> s0;
    for (const auto& [group, value] : fixed)
        for (int i : group)
            s0.emplace_back(i, value);
    std::sort(s0.begin(), s0.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    v.blocks.emplace_back();
    for (const auto& [i, value] : s0) {
        v.blocks[0].push_back(i);
        v.fixed.push_back(value);
    }
    std::vector<std::vector<int>> free_blocks = owners;
    for (auto& blk : free_blocks)
        std::sort(blk.begin(), blk.end());
    std::sort(free_blocks.begin(), free_blocks.end());
    for (const auto& blk : free_blocks) {
        v.blocks.push_back(blk);
        for (size_t k = 1; k < blk.size(); ++k)
            v.isogeny_degree[blk[k]] = 1;
    }
    v.validate();

    Shape s = shape_of(v);
    for (const Shape& seen : col.shapes)
        if (shape_inside(s, seen) && shape_inside(seen, s))
            return; // exact duplicate
    col.found.push_back(std::move(v));
    col.shapes.push_back(std::move(s));
}

void linear_search(const MultiPoly& g, const std::vector<std::vector<int>>& owners,
                   const std::vector<std::pair<std::vector<int>, FixedCoordinate>>& fixed,
                   LinearCollector& col) {
    if (g.is_zero()) {
        emit_variety(owners, fixed, col);
        return;
    }
    int k = g.n_vars();
    if (k == 0 || g.total_degree() == 0) {
        ++col.leaves; // nonzero constant: nothing vanishes here
        return;
    }
    if (k == 1) {
        ++col.leaves;
        for (const auto& [value, dd] : col.sections) {
            if (g.eval_q({mpq_class(value)}) == 0) {
                auto fx = fixed;
                fx.emplace_back(owners[0], FixedCoordinate{dd, 0});
                emit_variety({}, fx, col);
            }
        }
        for (const auto& [dd, hp] : col.leaf_polys) {
            if (divides(hp, g)) {
                long h = hp.var_degree(0);
                for (long idx = 0; idx < h; ++idx) {
                    auto fx = fixed;
                    fx.emplace_back(owners[0], FixedCoordinate{dd, idx});
                    emit_variety({}, fx, col);
                }
            }
        }
        return;
    }

    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            MultiPoly r = restrict_diagonal(g, j, i);
            std::vector<std::vector<int>> own = owners;
            own[static_cast<size_t>(i)].insert(own[static_cast<size_t>(i)].end(),
                                               own[static_cast<size_t>(j)].begin(),
                                               own[static_cast<size_t>(j)].end());
            own.erase(own.begin() + j);
            linear_search(r, own, fixed, col);
        }
    }
    for (int i = 0; i < k; ++i) {
        for (const auto& [value, dd] : col.sections) {
            MultiPoly s = special_section(g, {i}, {value});
            std::vector<std::vector<int>> own = owners;
            auto fx = fixed;
            fx.emplace_back(own[static_cast<size_t>(i)], FixedCoordinate{dd, 0});
            own.erase(own.begin() + i);
            linear_search(s, own, fx, col);
        }
    }
}

} // namespace

LinearSearchReport linear_special_on_hdnd(const MultiPoly& f, const mpz_class& bound) {
    HdndStatus hs = is_hdnd(f);
    if (hs.fails_dnd)
        throw NotHdnd("a recursion node breaks the degree dichotomy");

    LinearCollector col;
    col.n_orig = f.n_vars();
    col.bound = bound;
    for (mpz_class q = 3; q <= bound; ++q) {
        long r = mpz_class(q % 4).get_si();
        if (r != 0 && r != 3)
            continue;
        Discriminant dd = decompose(-q);
        if (class_number(dd.d) == 1) {
            MultiPoly hp = hilbert_class_poly(dd.d);
            Exps zero(1, 0);
            col.sections.emplace_back(mpz_class(-mpq_class(hp.coefficient(zero)).get_num()),
                                      dd);
        } else {
            col.leaf_polys.emplace_back(dd, hilbert_class_poly(dd.d));
        }
    }

    std::vector<std::vector<int>> owners;
    for (int i = 0; i < col.n_orig; ++i)
        owners.push_back({i});
    linear_search(f, owners, {}, col);

    LinearSearchReport out;
    out.bound = bound;
    out.leaves = col.leaves;
    for (size_t a = 0; a < col.found.size(); ++a) {
        bool maximal = true;
        for (size_t b = 0; b < col.found.size() && maximal; ++b) {
            if (a == b)
                continue;
            if (shape_inside(col.shapes[a], col.shapes[b]) &&
                !(shape_inside(col.shapes[b], col.shapes[a]) && a < b))
                maximal = false;
        }
        if (maximal)
            out.varieties.push_back(col.found[a]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Experiments

EquidistTable equidist_experiment(const mpz_class& lo, const mpz_class& hi,
                                  const mpq_class& r, Prec prec) {
    if (!(r > 1))
        throw OutOfDomain("window height must exceed 1");
    if (lo < 3 || hi < lo)
        throw OutOfDomain("empty discriminant range");
    EquidistTable out;
    out.r = r;
    mpq_class r2 = r * r;
    for (mpz_class qv = lo; qv <= hi; ++qv) {
        long rem = mpz_class(qv % 4).get_si();
        if (rem != 0 && rem != 3)
            continue;
        EquidistRow row;
        row.d = -qv;
        row.fundamental = decompose(row.d).f == 1;
        std::vector<QuadForm> forms = reduced_forms(row.d);
        row.h = static_cast<long>(forms.size());
        for (const QuadForm& g : forms)
            if (mpq_class(qv) < mpq_class(4 * g.a * g.a) * r2)
                ++row.inside; // Im tau = sqrt|d| / 2a < R, exactly
        if (row.inside == row.h) {
            row.meets_threshold = true;
        } else {
            // proportion >= 1 - 6/(pi R), i.e. pi R (inside - h) + 6 h >= 0;
            // pi is irrational, so some precision decides.
            for (Prec w = prec;; w *= 2) {
                RealBall t = add(mul(RealBall::pi(w),
                                     RealBall::from_q(r * (row.inside - row.h), w)),
                                 RealBall::from_q(mpq_class(6) * row.h, w));
                if (t.cert_gt_q(0)) {
                    row.meets_threshold = true;
                    break;
                }
                if (t.cert_lt_q(0)) {
                    row.meets_threshold = false;
                    break;
                }
                if (w > (Prec{1} << 24))
                    throw PrecisionExhausted("threshold comparison stuck");
            }
        }
        if (!row.meets_threshold)
            ++out.violations;
        out.rows.push_back(std::move(row));
    }
    return out;
}

QuadraticPointCount count_quadratic_points(const MultiPoly& f, const mpq_class& r,
                                           const mpq_class& h_bound, Prec prec) {
    int n = f.n_vars();
    if (n < 1 || n > 3)
        throw OutOfDomain("point counting is desk scale: at most 3 coordinates");
    if (!(r > 1))
        throw OutOfDomain("window height must exceed 1");
    if (h_bound < 1)
        throw OutOfDomain("height bound below 1");

    // The candidates are reduced primitive (a, b, c); the Mahler measure of
    // a x^2 + b x + c at a point of the fundamental domain is c, so height
    // <= H means c <= H^2, and Im tau < R is |d| < 4 a^2 R^2.
    mpq_class h2 = h_bound * h_bound;
    mpq_class r2 = r * r;
    std::vector<QuadForm> window;
    for (mpz_class c = 1; mpq_class(c) <= h2; ++c) {
        for (mpz_class a = 1; a <= c; ++a) {
            for (mpz_class b = -a; b <= a; ++b) {
                QuadForm g{a, b, c};
                if (!g.is_reduced())
                    continue;
                if (gcd(gcd(a, b), c) != 1)
                    continue;
                if (!(mpq_class(mpz_class(-g.disc())) < mpq_class(mpz_class(4 * a * a)) * r2))
                    continue;
                window.push_back(g);
                if (static_cast<long>(window.size()) > kTupleCap)
                    throw SizeCapExceeded("height window beyond the desk-scale cap");
            }
        }
    }

    QuadraticPointCount out;
    out.pool = static_cast<long>(window.size());
    if (window.empty())
        return out;
    double grid = std::pow(static_cast<double>(window.size()), n);
    if (grid > static_cast<double>(kTupleCap))
        throw SizeCapExceeded("tuple grid beyond the desk-scale cap");

    std::vector<SpecialCoord> pool;
    pool.reserve(window.size());
    for (const QuadForm& g : window) {
        mpz_class d = g.disc();
        std::vector<QuadForm> all = reduced_forms(d);
        long idx = -1;
        for (size_t k = 0; k < all.size(); ++k)
            if (all[k].a == g.a && all[k].b == g.b && all[k].c == g.c)
                idx = static_cast<long>(k);
        pool.push_back({decompose(d), idx});
    }

    EvalTables tab;
    std::vector<size_t> odo(static_cast<size_t>(n), 0);
    while (true) {
        std::vector<SpecialCoord> coords;
        coords.reserve(odo.size());
        for (size_t i : odo)
            coords.push_back(pool[i]);
        switch (decide_membership(f, coords, prec, tab)) {
        case Answer::yes:
            ++out.on_curve;
            break;
        case Answer::undecided:
            ++out.undecided;
            break;
        case Answer::no:
            break;
        }
        int pos = n - 1;
        for (; pos >= 0; --pos) {
            if (++odo[static_cast<size_t>(pos)] < pool.size())
                break;
            odo[static_cast<size_t>(pos)] = 0;
        }
        if (pos < 0)
            break;
    }
    return out;
}

} // namespace ao
