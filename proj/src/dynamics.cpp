#include "ao/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "ao/errors.hpp"

namespace ao {

namespace {

constexpr size_t kChainTermCap = 100000;
constexpr size_t kSpanMonomialCap = 20000;

void validate_field(const VectorField& xi) {
    if (xi.m < 1)
        throw DimensionMismatch("vector field needs a positive dimension");
    if (static_cast<int>(xi.components.size()) != xi.m)
        throw DimensionMismatch("component count differs from the dimension");
    for (const MultiPoly& c : xi.components)
        if (c.n_vars() != xi.m)
            throw DimensionMismatch("component lives in the wrong ring");
    if (xi.cleared_factor.n_vars() != xi.m)
        throw DimensionMismatch("cleared factor lives in the wrong ring");
    if (xi.cleared_factor.is_zero())
        throw ZeroPolynomial("cleared factor must be nonzero");
}

// --- truncated power series over a coefficient ring -------------------------

// The same transport runs over exact rationals and over balls; the ring
// object carries the handful of operations that differ.
struct QRing {
    using V = mpq_class;
    V zero() const { return mpq_class(0); }
    V from_q(const mpq_class& q) const { return q; }
    V add(const V& a, const V& b) const { return a + b; }
    V mul(const V& a, const V& b) const { return a * b; }
};

struct BRing {
    Prec prec;
    using V = ComplexBall;
    V zero() const { return ComplexBall::from_si(0, 0, prec); }
    V from_q(const mpq_class& q) const {
        return ComplexBall(RealBall::from_q(q, prec), RealBall::from_si(0, prec));
    }
    V add(const V& a, const V& b) const { return ::ao::add(a, b); }
    V mul(const V& a, const V& b) const { return ::ao::mul(a, b); }
};

template <class R> using Ser = std::vector<typename R::V>;

template <class R>
Ser<R> ser_mul(const R& r, const Ser<R>& a, const Ser<R>& b, int k_max) {
    Ser<R> out(k_max + 1, r.zero());
    for (int i = 0; i <= k_max; ++i)
        for (int k = 0; i + k <= k_max; ++k)
            out[i + k] = r.add(out[i + k], r.mul(a[i], b[k]));
    return out;
}

template <class R>
Ser<R> poly_on_series(const R& r, const MultiPoly& f,
                      const std::vector<Ser<R>>& x, int k_max) {
    Ser<R> one(k_max + 1, r.zero());
    one[0] = r.from_q(1);
    std::vector<std::vector<Ser<R>>> pw(x.size());
    for (size_t i = 0; i < x.size(); ++i)
        pw[i].push_back(one);
    Ser<R> acc(k_max + 1, r.zero());
    for (const auto& [e, c] : f.terms()) {
        Ser<R> t(k_max + 1, r.zero());
        t[0] = r.from_q(c);
        for (size_t i = 0; i < x.size(); ++i) {
            while (pw[i].size() <= e[i])
                pw[i].push_back(ser_mul(r, pw[i].back(), x[i], k_max));
            if (e[i] > 0)
                t = ser_mul(r, t, pw[i][e[i]], k_max);
        }
        for (int k = 0; k <= k_max; ++k)
            acc[k] = r.add(acc[k], t[k]);
    }
    return acc;
}

// Formal flow of the cleared (polynomial) field through p, truncated at
// order K: K Picard rounds fix one further coefficient each.
template <class R>
std::vector<Ser<R>> flow_series(const R& r, const VectorField& xi,
                                const std::vector<typename R::V>& p, int K) {
    std::vector<Ser<R>> x(xi.m);
    for (int i = 0; i < xi.m; ++i) {
        x[i] = Ser<R>(K + 1, r.zero());
        x[i][0] = p[i];
    }
    for (int round = 0; round < K; ++round) {
        std::vector<Ser<R>> nx(xi.m);
        for (int i = 0; i < xi.m; ++i) {
            Ser<R> v = poly_on_series(r, xi.components[i], x, K);
            Ser<R> xi_new(K + 1, r.zero());
            xi_new[0] = p[i];
            for (int k = 0; k + 1 <= K; ++k)
                xi_new[k + 1] = r.mul(v[k], r.from_q(mpq_class(1, k + 1)));
            nx[i] = std::move(xi_new);
        }
        x = std::move(nx);
    }
    return x;
}

// --- coordinate unification for ball points ---------------------------------

// Bit-identical balls (same center, same radius). This is the caller's
// marker for "the same quantity", deliberately stricter than overlap and
// independent of whether the ball is exact.
bool identical_ball(const ComplexBall& a, const ComplexBall& b) {
    return mpfr_equal_p(a.re().center(), b.re().center()) != 0 &&
           mpfr_equal_p(a.im().center(), b.im().center()) != 0 &&
           mpfr_equal_p(a.re().radius(), b.re().radius()) != 0 &&
           mpfr_equal_p(a.im().radius(), b.im().radius()) != 0;
}

// Substitute each variable by its class representative and renumber.
MultiPoly apply_sigma(const MultiPoly& f, const std::vector<int>& newidx,
                      int m_out) {
    MultiPoly out(m_out);
    for (const auto& [e, c] : f.terms()) {
        Exps r(m_out, 0);
        for (size_t v = 0; v < e.size(); ++v)
            r[newidx[v]] += e[v];
        out.add_term(r, c);
    }
    return out;
}

} // namespace

MultiPoly lie_derivative(const VectorField& xi, const MultiPoly& f) {
    validate_field(xi);
    if (f.n_vars() != xi.m)
        throw DimensionMismatch("function lives in the wrong ring");
    MultiPoly acc(xi.m);
    for (int i = 0; i < xi.m; ++i) {
        if (xi.components[i].is_zero())
            continue;
        acc = add(acc, mul(xi.components[i], f.derivative(i)));
    }
    return acc;
}

std::vector<MultiPoly> derivative_chain(const VectorField& xi,
                                        const std::vector<MultiPoly>& fs, int K) {
    validate_field(xi);
    if (K < 1)
        throw OutOfDomain("derivative chains need K >= 1");
    std::vector<MultiPoly> out;
    out.reserve(fs.size() * K);
    for (const MultiPoly& f : fs) {
        MultiPoly g = f;
        for (int k = 1; k <= K; ++k) {
            g = lie_derivative(xi, g);
            if (g.term_count() > kChainTermCap)
                throw SizeCapExceeded("derivative chain grew past the term cap");
            out.push_back(g);
        }
    }
    return out;
}

bool chain_stabilized(const VectorField& xi, const std::vector<MultiPoly>& fs,
                      int K) {
    validate_field(xi);
    if (K < 0)
        throw OutOfDomain("stabilization check needs K >= 0");
    if (fs.empty())
        return true;

    std::vector<MultiPoly> span_polys;
    std::vector<MultiPoly> targets;
    for (const MultiPoly& f : fs) {
        MultiPoly g = f;
        span_polys.push_back(g);
        for (int k = 1; k <= K; ++k) {
            g = lie_derivative(xi, g);
            if (g.term_count() > kChainTermCap)
                throw SizeCapExceeded("derivative chain grew past the term cap");
            span_polys.push_back(g);
        }
        targets.push_back(lie_derivative(xi, g));
    }

    // Column index per monomial, over everything involved.
    std::map<Exps, int> cols;
    auto index_monomials = [&cols](const MultiPoly& f) {
        for (const auto& [e, c] : f.terms()) {
            cols.emplace(e, static_cast<int>(cols.size()));
            if (cols.size() > kSpanMonomialCap)
                throw SizeCapExceeded("span test grew past the monomial cap");
        }
    };
    for (const MultiPoly& f : span_polys)
        index_monomials(f);
    for (const MultiPoly& f : targets)
        index_monomials(f);

    using Row = std::map<int, mpq_class>; // sparse, keyed by column
    auto to_row = [&cols](const MultiPoly& f) {
        Row r;
        for (const auto& [e, c] : f.terms())
            r[cols.at(e)] = c;
        return r;
    };
    // Reduce r against the pivots (pivot rows are normalized to lead 1).
    std::map<int, Row> pivots; // leading column -> row
    auto reduce = [&pivots](Row r) {
        while (!r.empty()) {
            auto lead = r.begin();
            auto it = pivots.find(lead->first);
            if (it == pivots.end())
                return r;
            mpq_class factor = lead->second;
            for (const auto& [col, val] : it->second) {
                auto [jt, fresh] = r.emplace(col, 0);
                jt->second -= factor * val;
                if (jt->second == 0)
                    r.erase(jt);
            }
        }
        return r;
    };
    for (const MultiPoly& f : span_polys) {
        Row r = reduce(to_row(f));
        if (r.empty())
            continue;
        int lead_col = r.begin()->first;
        mpq_class lead = r.begin()->second;
        for (auto& [col, val] : r)
            val /= lead;
        pivots.emplace(lead_col, std::move(r));
    }
    for (const MultiPoly& f : targets)
        if (!reduce(to_row(f)).empty())
            return false;
    return true;
}

Membership trajectory_member(const VectorField& xi,
                             const std::vector<MultiPoly>& fs,
                             const std::vector<mpq_class>& p, int K) {
    validate_field(xi);
    if (static_cast<int>(p.size()) != xi.m)
        throw DimensionMismatch("point has the wrong dimension");
    if (K < 0)
        throw OutOfDomain("membership needs K >= 0");
    for (const MultiPoly& f : fs)
        if (f.n_vars() != xi.m)
            throw DimensionMismatch("function lives in the wrong ring");
    if (xi.cleared_factor.eval_q(p) == 0)
        throw SingularLocus("point lies on the cleared singular locus");

    QRing r;
    std::vector<Ser<QRing>> x = flow_series(r, xi, p, K);
    for (const MultiPoly& f : fs) {
        Ser<QRing> u = poly_on_series(r, f, x, K);
        for (int k = 0; k <= K; ++k)
            if (u[k] != 0)
                return Membership::out;
    }
    return Membership::in;
}

Membership trajectory_member(const VectorField& xi,
                             const std::vector<MultiPoly>& fs,
                             const std::vector<ComplexBall>& p, int K) {
    validate_field(xi);
    if (static_cast<int>(p.size()) != xi.m)
        throw DimensionMismatch("point has the wrong dimension");
    if (K < 0)
        throw OutOfDomain("membership needs K >= 0");
    for (const MultiPoly& f : fs)
        if (f.n_vars() != xi.m)
            throw DimensionMismatch("function lives in the wrong ring");

    Prec prec = 64;
    for (const ComplexBall& c : p)
        prec = std::max(prec, c.prec());

    ComplexBall den = xi.cleared_factor.eval_ball(p, prec);
    if (den.re().contains_zero() && den.im().contains_zero())
        throw SingularLocus("cleared factor not certified nonzero at the point");

    // Coordinates carrying bit-identical balls are the caller's way of
    // saying "the same quantity"; unify them when the field agrees.
    std::vector<int> rep(xi.m);
    for (int i = 0; i < xi.m; ++i) {
        rep[i] = i;
        for (int k = 0; k < i; ++k)
            if (identical_ball(p[k], p[i])) {
                rep[i] = k;
                break;
            }
    }
    std::vector<int> newidx(xi.m, -1);
    int m_red = 0;
    for (int i = 0; i < xi.m; ++i)
        if (rep[i] == i)
            newidx[i] = m_red++;
    for (int i = 0; i < xi.m; ++i)
        newidx[i] = newidx[rep[i]];

    bool unified = m_red < xi.m;
    if (unified) {
        // The reduction is legitimate only if unified coordinates carry
        // componentwise-identical dynamics.
        for (int i = 0; i < xi.m && unified; ++i)
            if (rep[i] != i &&
                apply_sigma(xi.components[i], newidx, m_red) !=
                    apply_sigma(xi.components[rep[i]], newidx, m_red))
                unified = false;
    }

    VectorField field = xi;
    std::vector<ComplexBall> pt = p;
    std::vector<MultiPoly> gs;
    gs.reserve(fs.size());
    if (unified) {
        VectorField red;
        red.m = m_red;
        red.components.assign(m_red, MultiPoly(m_red));
        for (int i = 0; i < xi.m; ++i)
            if (rep[i] == i)
                red.components[newidx[i]] = apply_sigma(xi.components[i], newidx, m_red);
        red.cleared_factor = apply_sigma(xi.cleared_factor, newidx, m_red);
        field = std::move(red);
        pt.clear();
        for (int i = 0; i < xi.m; ++i)
            if (rep[i] == i)
                pt.push_back(p[i]);
        for (const MultiPoly& f : fs)
            gs.push_back(apply_sigma(f, newidx, m_red));
    } else {
        gs = fs;
    }

    bool all_identically_zero = true;
    bool computed_flow = false;
    std::vector<Ser<BRing>> x;
    BRing r{prec};
    for (const MultiPoly& g : gs) {
        if (g.is_zero())
            continue; // the chain vanishes identically on the unified locus
        all_identically_zero = false;
        if (!computed_flow) {
            x = flow_series(r, field, pt, K);
            computed_flow = true;
        }
        Ser<BRing> u = poly_on_series(r, g, x, K);
        for (int k = 0; k <= K; ++k)
            if (!u[k].re().contains_zero() || !u[k].im().contains_zero())
                return Membership::out;
    }
    return all_identically_zero ? Membership::in : Membership::undecided;
}

TrajectorySample integrate(const VectorField& xi,
                           const std::vector<ComplexBall>& p0,
                           const ComplexBall& t_dir, double step, Prec prec) {
    validate_field(xi);
    if (static_cast<int>(p0.size()) != xi.m)
        throw DimensionMismatch("start point has the wrong dimension");
    if (!(step > 0.0) || step > 1.0)
        throw OutOfDomain("step must lie in (0, 1]");

    auto velocity = [&](const std::vector<ComplexBall>& x) {
        ComplexBall den = xi.cleared_factor.eval_ball(x, prec);
        if (!den.cert_nonzero())
            throw SingularityApproached("cleared factor no longer excluded zero");
        std::vector<ComplexBall> v(xi.m, ComplexBall(prec));
        for (int i = 0; i < xi.m; ++i)
            v[i] = mul(t_dir, div(xi.components[i].eval_ball(x, prec), den));
        return v;
    };
    auto rk4 = [&](const std::vector<ComplexBall>& x, double h) {
        RealBall hb = RealBall::from_q(mpq_class(h), prec);
        RealBall hb2 = mul_2si(hb, -1);
        auto shift = [&](const std::vector<ComplexBall>& base,
                         const std::vector<ComplexBall>& k, const RealBall& s) {
            std::vector<ComplexBall> out(xi.m, ComplexBall(prec));
            for (int i = 0; i < xi.m; ++i)
                out[i] = add(base[i], mul_real(k[i], s));
            return out;
        };
        std::vector<ComplexBall> k1 = velocity(x);
        std::vector<ComplexBall> k2 = velocity(shift(x, k1, hb2));
        std::vector<ComplexBall> k3 = velocity(shift(x, k2, hb2));
        std::vector<ComplexBall> k4 = velocity(shift(x, k3, hb));
        RealBall h6 = mul(hb, RealBall::from_q(mpq_class(1, 6), prec));
        std::vector<ComplexBall> out(xi.m, ComplexBall(prec));
        for (int i = 0; i < xi.m; ++i) {
            ComplexBall s = add(add(k1[i], mul_real(add(k2[i], k3[i]),
                                                    RealBall::from_si(2, prec))),
                                k4[i]);
            out[i] = add(x[i], mul_real(s, h6));
        }
        return out;
    };

    const double h_floor = step / 1048576.0;
    const double tol = 1e-12;
    TrajectorySample out;
    out.step = step;

    velocity(p0); // certifies the start point off the singular locus
    out.times.push_back(0.0);
    out.points.push_back(p0);

    // The internal state stays a pure ball transport: its radii track only
    // the arithmetic error, which is what keeps the singular-locus
    // certification sharp. The step-doubling discrepancies are a method
    // error on the centers; they accumulate in a separate channel and are
    // folded into the radii of the emitted samples only, where they cannot
    // feed back into the propagation.
    std::vector<ComplexBall> x = p0;
    std::vector<double> acc(xi.m, 0.0);
    double sigma = 0.0;
    double h = step;
    struct Mp {
        mpfr_t v;
        explicit Mp(mpfr_prec_t p) { mpfr_init2(v, p); }
        ~Mp() { mpfr_clear(v); }
    };
    Mp d_re(64), d_im(64), d_tot(64);
    while (sigma < 1.0 - 1e-12) {
        double h_try = std::min(h, 1.0 - sigma);
        std::vector<ComplexBall> full = rk4(x, h_try);
        std::vector<ComplexBall> fine = rk4(rk4(x, h_try / 2), h_try / 2);
        std::vector<double> defect(xi.m);
        double err = 0.0;
        double scale = 1.0;
        for (int i = 0; i < xi.m; ++i) {
            mpfr_sub(d_re.v, full[i].re().center(), fine[i].re().center(), MPFR_RNDA);
            mpfr_sub(d_im.v, full[i].im().center(), fine[i].im().center(), MPFR_RNDA);
            mpfr_abs(d_re.v, d_re.v, MPFR_RNDU);
            mpfr_abs(d_im.v, d_im.v, MPFR_RNDU);
            mpfr_add(d_tot.v, d_re.v, d_im.v, MPFR_RNDU);
            defect[i] = mpfr_get_d(d_tot.v, MPFR_RNDU);
            err = std::max(err, defect[i]);
            scale = std::max(scale, std::abs(fine[i].re().center_d()) +
                                        std::abs(fine[i].im().center_d()));
        }
        if (err > tol * scale) {
            if (h_try <= h_floor)
                throw SingularityApproached("step control collapsed to the floor");
            h = h_try / 2;
            continue;
        }
        x = std::move(fine);
        sigma += h_try;
        out.times.push_back(sigma);
        std::vector<ComplexBall> sample = x;
        for (int i = 0; i < xi.m; ++i) {
            acc[i] += defect[i];
            if (acc[i] == 0.0)
                continue;
            mpfr_set_d(d_tot.v, acc[i], MPFR_RNDU);
            RealBall re = sample[i].re();
            RealBall im = sample[i].im();
            re.add_radius(d_tot.v);
            im.add_radius(d_tot.v);
            sample[i] = ComplexBall(re, im);
        }
        out.points.push_back(std::move(sample));
        out.step = h_try;
        if (err < tol * scale / 100.0)
            h = std::min(step, 2 * h_try);
    }
    return out;
}

JetLayout j_field_layout(int n, const std::vector<int>& s) {
    if (n < 1)
        throw OutOfDomain("the field needs at least one modular block");
    JetLayout layout;
    layout.jet.assign(n, false);
    for (int i : s) {
        if (i < 1 || i > n)
            throw OutOfDomain("active block labels run from 1 to n");
        if (layout.jet[i - 1])
            throw OutOfDomain("duplicate active block label");
        layout.jet[i - 1] = true;
    }
    layout.y_index.resize(n);
    int idx = 1; // variable 0 is tau
    for (int i = 0; i < n; ++i) {
        layout.y_index[i] = idx;
        idx += layout.jet[i] ? 3 : 1;
    }
    layout.m = idx;
    return layout;
}

VectorField j_field(int n, const std::vector<int>& s) {
    if (s.empty())
        throw OutOfDomain("at least one block must carry the modular jet");
    JetLayout layout = j_field_layout(n, s);
    int m = layout.m;

    auto var = [m](int i) { return MultiPoly::variable(m, i); };
    MultiPoly c1728 = MultiPoly::constant(m, 1728);

    // g_i = 2 y_i^2 (y_i - 1728)^2 y_i' for every active block.
    std::vector<MultiPoly> g;
    std::vector<int> active;
    for (int i = 0; i < n; ++i) {
        if (!layout.jet[i])
            continue;
        int b = layout.y_index[i];
        MultiPoly y = var(b);
        MultiPoly core = mul(pow_ui(y, 2), pow_ui(sub(y, c1728), 2));
        g.push_back(mul_q(mul(core, var(b + 1)), 2));
        active.push_back(i);
    }
    MultiPoly big_g = MultiPoly::constant(m, 1);
    for (const MultiPoly& gi : g)
        big_g = mul(big_g, gi);

    VectorField xi;
    xi.m = m;
    xi.components.assign(m, MultiPoly(m));
    xi.cleared_factor = big_g;
    xi.components[0] = big_g; // d/dtau

    for (size_t a = 0; a < active.size(); ++a) {
        int b = layout.y_index[active[a]];
        MultiPoly y = var(b);
        MultiPoly yd = var(b + 1);
        MultiPoly ydd = var(b + 2);
        MultiPoly others = MultiPoly::constant(m, 1);
        for (size_t k = 0; k < g.size(); ++k)
            if (k != a)
                others = mul(others, g[k]);
        xi.components[b] = mul(big_g, yd);
        xi.components[b + 1] = mul(big_g, ydd);
        // Cleared form of (3/2) y''^2 / y' - R(y) y'^3, with
        // R(f) = (f^2 - 1968 f + 2654208) / (2 f^2 (f - 1728)^2).
        MultiPoly core = mul(pow_ui(y, 2), pow_ui(sub(y, c1728), 2));
        MultiPoly lead = mul_q(mul(mul(core, pow_ui(ydd, 2)), others), 3);
        MultiPoly rnum = add(sub(pow_ui(y, 2), mul_q(y, 1968)),
                             MultiPoly::constant(m, 2654208));
        MultiPoly tail = mul(mul(rnum, pow_ui(yd, 4)), others);
        xi.components[b + 2] = sub(lead, tail);
    }
    return xi;
}

mpz_class qsp_degree_bound(int n, long deg_x, const mpz_class& c_user) {
    if (n < 1 || deg_x < 1 || c_user < 1)
        throw OutOfDomain("degree bound wants n, degX, c >= 1");
    mpz_class out;
    unsigned long e = 16UL * static_cast<unsigned long>(n) * static_cast<unsigned long>(n);
    mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(deg_x), e);
    return out * c_user;
}

mpz_class redegree_bound(int m, long deg_w, const mpz_class& c_xi) {
    if (m < 1 || deg_w < 1 || c_xi < 1)
        throw OutOfDomain("degree bound wants m, degW, c >= 1");
    mpz_class out;
    unsigned long e = static_cast<unsigned long>(m) * static_cast<unsigned long>(m);
    mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(deg_w), e);
    return out * c_xi;
}

} // namespace ao
