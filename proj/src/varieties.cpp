#include "ao/varieties.hpp"

#include <algorithm>

#include "ao/errors.hpp"
#include "ao/modpoly.hpp"

namespace ao {

namespace {

long term_degree(const Exps& e) {
    long s = 0;
    for (unsigned k : e)
        s += k;
    return s;
}

// Lex comparison on exponent vectors is std::vector's operator<, so the
// map's last entry is the lex-leading term.
const std::pair<const Exps, mpq_class>& lead(const std::map<Exps, mpq_class>& t) {
    return *t.rbegin();
}

bool monomial_divides(const Exps& a, const Exps& b) {
    for (size_t k = 0; k < a.size(); ++k)
        if (a[k] > b[k])
            return false;
    return true;
}

} // namespace

MultiPoly::MultiPoly(int n_vars) : n_(n_vars) {
    if (n_vars <= 0)
        throw DimensionMismatch("polynomial needs at least one variable");
}

MultiPoly MultiPoly::constant(int n_vars, const mpq_class& c) {
    MultiPoly f(n_vars);
    f.add_term(Exps(n_vars, 0), c);
    return f;
}

MultiPoly MultiPoly::variable(int n_vars, int i) {
    if (i < 0 || i >= n_vars)
        throw DimensionMismatch("variable index out of range");
    MultiPoly f(n_vars);
    Exps e(n_vars, 0);
    e[i] = 1;
    f.add_term(e, 1);
    return f;
}

MultiPoly MultiPoly::monomial(int n_vars, Exps e, const mpq_class& c) {
    if (static_cast<int>(e.size()) != n_vars)
        throw DimensionMismatch("exponent vector length mismatch");
    MultiPoly f(n_vars);
    f.add_term(e, c);
    return f;
}

mpq_class MultiPoly::coefficient(const Exps& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? mpq_class(0) : it->second;
}

void MultiPoly::add_term(const Exps& e, const mpq_class& c) {
    if (static_cast<int>(e.size()) != n_)
        throw DimensionMismatch("exponent vector length mismatch");
    // mpq_class(a, b) does not canonicalize, and comparisons on
    // non-canonical values are unreliable; restore the invariant here so
    // the whole ring stays canonical.
    mpq_class cc = c;
    cc.canonicalize();
    if (cc == 0)
        return;
    auto [it, fresh] = terms_.emplace(e, cc);
    if (!fresh) {
        it->second += cc;
        if (it->second == 0)
            terms_.erase(it);
    }
}

long MultiPoly::total_degree() const {
    if (is_zero())
        throw ZeroPolynomial("degree of the zero polynomial");
    long d = 0;
    for (const auto& [e, c] : terms_)
        d = std::max(d, term_degree(e));
    return d;
}

long MultiPoly::var_degree(int i) const {
    if (is_zero())
        throw ZeroPolynomial("degree of the zero polynomial");
    if (i < 0 || i >= n_)
        throw DimensionMismatch("variable index out of range");
    long d = 0;
    for (const auto& [e, c] : terms_)
        d = std::max(d, static_cast<long>(e[i]));
    return d;
}

mpq_class MultiPoly::eval_q(const std::vector<mpq_class>& x) const {
    if (static_cast<int>(x.size()) != n_)
        throw DimensionMismatch("evaluation point has the wrong dimension");
    // Power tables avoid re-exponentiating shared factors.
    std::vector<std::vector<mpq_class>> pw(n_);
    for (int i = 0; i < n_; ++i)
        pw[i].push_back(1);
    mpq_class acc = 0;
    for (const auto& [e, c] : terms_) {
        mpq_class t = c;
        for (int i = 0; i < n_; ++i) {
            while (pw[i].size() <= e[i])
                pw[i].push_back(pw[i].back() * x[i]);
            if (e[i] > 0)
                t *= pw[i][e[i]];
        }
        acc += t;
    }
    return acc;
}

ComplexBall MultiPoly::eval_ball(const std::vector<ComplexBall>& x, Prec prec) const {
    if (static_cast<int>(x.size()) != n_)
        throw DimensionMismatch("evaluation point has the wrong dimension");
    std::vector<std::vector<ComplexBall>> pw(n_);
    for (int i = 0; i < n_; ++i)
        pw[i].push_back(ComplexBall::from_si(1, 0, prec));
    ComplexBall acc = ComplexBall::from_si(0, 0, prec);
    for (const auto& [e, c] : terms_) {
        ComplexBall t = ComplexBall::from_si(1, 0, prec);
        for (int i = 0; i < n_; ++i) {
            while (pw[i].size() <= e[i])
                pw[i].push_back(mul(pw[i].back(), x[i]));
            if (e[i] > 0)
                t = mul(t, pw[i][e[i]]);
        }
        acc = add(acc, mul_q(t, c));
    }
    return acc;
}

MultiPoly MultiPoly::derivative(int i) const {
    if (i < 0 || i >= n_)
        throw DimensionMismatch("variable index out of range");
    MultiPoly out(n_);
    for (const auto& [e, c] : terms_) {
        if (e[i] == 0)
            continue;
        Exps d = e;
        d[i] -= 1;
        out.add_term(d, c * e[i]);
    }
    return out;
}

MultiPoly add(const MultiPoly& f, const MultiPoly& g) {
    if (f.n_ != g.n_)
        throw DimensionMismatch("adding polynomials in different rings");
    MultiPoly out = f;
    for (const auto& [e, c] : g.terms_)
        out.add_term(e, c);
    return out;
}

MultiPoly sub(const MultiPoly& f, const MultiPoly& g) {
    if (f.n_ != g.n_)
        throw DimensionMismatch("subtracting polynomials in different rings");
    MultiPoly out = f;
    for (const auto& [e, c] : g.terms_)
        out.add_term(e, -c);
    return out;
}

MultiPoly mul(const MultiPoly& f, const MultiPoly& g) {
    if (f.n_ != g.n_)
        throw DimensionMismatch("multiplying polynomials in different rings");
    MultiPoly out(f.n_);
    for (const auto& [ef, cf] : f.terms_) {
        for (const auto& [eg, cg] : g.terms_) {
            Exps e = ef;
            for (size_t k = 0; k < e.size(); ++k)
                e[k] += eg[k];
            out.add_term(e, cf * cg);
        }
    }
    return out;
}

MultiPoly neg(const MultiPoly& f) {
    MultiPoly out(f.n_);
    for (const auto& [e, c] : f.terms_)
        out.terms_.emplace(e, -c);
    return out;
}

MultiPoly mul_q(const MultiPoly& f, const mpq_class& c) {
    MultiPoly out(f.n_);
    if (c == 0)
        return out;
    for (const auto& [e, k] : f.terms_)
        out.terms_.emplace(e, k * c);
    return out;
}

MultiPoly pow_ui(const MultiPoly& f, unsigned long k) {
    MultiPoly acc = MultiPoly::constant(f.n_vars(), 1);
    MultiPoly base = f;
    while (k > 0) {
        if (k & 1)
            acc = mul(acc, base);
        k >>= 1;
        if (k > 0)
            base = mul(base, base);
    }
    return acc;
}

Height height(const MultiPoly& f) {
    if (f.is_zero())
        throw ZeroPolynomial("height of the zero polynomial");
    // log max(|p|, q) via mpfr so huge coefficients don't overflow doubles.
    mpfr_t t;
    mpfr_init2(t, 64);
    double best = 0.0;
    for (const auto& [e, c] : f.terms()) {
        mpz_class m = abs(c.get_num());
        if (m < c.get_den())
            m = c.get_den();
        mpfr_set_z(t, m.get_mpz_t(), MPFR_RNDU);
        mpfr_log(t, t, MPFR_RNDU);
        best = std::max(best, mpfr_get_d(t, MPFR_RNDU));
    }
    mpfr_clear(t);
    return Height{best};
}

DndResult is_dnd(const MultiPoly& f) {
    long d = f.total_degree(); // throws ZeroPolynomial
    for (int i = 0; i < f.n_vars(); ++i) {
        long di = f.var_degree(i);
        if (di != 0 && di != d)
            return DndResult{false, i};
    }
    return DndResult{true, -1};
}

MultiPoly restrict_diagonal(const MultiPoly& f, int i, int j) {
    int n = f.n_vars();
    if (n < 2)
        throw DimensionMismatch("diagonal restriction needs two variables");
    if (i == j || i < 0 || j < 0 || i >= n || j >= n)
        throw DimensionMismatch("bad diagonal variable pair");
    MultiPoly out(n - 1);
    for (const auto& [e, c] : f.terms()) {
        Exps r(n - 1, 0);
        for (int k = 0; k < n; ++k) {
            if (k == i)
                continue;
            int kk = k > i ? k - 1 : k;
            r[kk] += e[k];
        }
        int jj = j > i ? j - 1 : j;
        r[jj] += e[i];
        out.add_term(r, c);
    }
    return out;
}

namespace {

HdndStatus hdnd_rec(const MultiPoly& f) {
    DndResult d = is_dnd(f);
    if (!d.dnd)
        return HdndStatus{false, true, false, {}};
    int n = f.n_vars();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            MultiPoly r = restrict_diagonal(f, i, j);
            if (r.is_zero())
                return HdndStatus{false, false, true, {{i, j}}};
            HdndStatus s = hdnd_rec(r);
            if (!s.hdnd) {
                s.path.insert(s.path.begin(), {i, j});
                return s;
            }
        }
    }
    return HdndStatus{true, false, false, {}};
}

} // namespace

HdndStatus is_hdnd(const MultiPoly& f) {
    if (f.is_zero())
        throw ZeroPolynomial("hdnd of the zero polynomial");
    return hdnd_rec(f);
}

MultiPoly special_section(const MultiPoly& f, const std::vector<int>& sigma,
                          const std::vector<mpz_class>& values) {
    int n = f.n_vars();
    if (sigma.size() != values.size())
        throw DimensionMismatch("section indices and values differ in length");
    if (static_cast<int>(sigma.size()) >= n)
        throw DimensionMismatch("section must leave at least one variable");
    std::vector<int> pos(n, -1); // position of each var in sigma, or -1
    for (size_t k = 0; k < sigma.size(); ++k) {
        int i = sigma[k];
        if (i < 0 || i >= n || pos[i] != -1)
            throw DimensionMismatch("bad section index set");
        pos[i] = static_cast<int>(k);
    }
    std::vector<int> renum(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i)
        if (pos[i] == -1)
            renum[i] = next++;
    MultiPoly out(next);
    for (const auto& [e, c] : f.terms()) {
        mpq_class coeff = c;
        Exps r(next, 0);
        for (int i = 0; i < n; ++i) {
            if (pos[i] >= 0) {
                if (e[i] > 0) {
                    mpz_class p;
                    mpz_pow_ui(p.get_mpz_t(), values[pos[i]].get_mpz_t(), e[i]);
                    coeff *= p;
                }
            } else {
                r[renum[i]] = e[i];
            }
        }
        out.add_term(r, coeff);
    }
    return out;
}

bool divides(const MultiPoly& g, const MultiPoly& f) {
    if (g.is_zero())
        throw ZeroPolynomial("division by the zero polynomial");
    if (g.n_vars() != f.n_vars())
        throw DimensionMismatch("divisibility across different rings");
    if (f.is_zero())
        return true;
    const auto& gl = lead(g.terms());
    MultiPoly r = f;
    while (!r.is_zero()) {
        const auto& rl = lead(r.terms());
        if (!monomial_divides(gl.first, rl.first))
            return false; // this term can never be cancelled later
        Exps q = rl.first;
        for (size_t k = 0; k < q.size(); ++k)
            q[k] -= gl.first[k];
        MultiPoly m = MultiPoly::monomial(f.n_vars(), q, rl.second / gl.second);
        r = sub(r, mul(m, g));
    }
    return true;
}

bool divides_modular(const MultiPoly& f, int i, int j, long n_isog) {
    int n = f.n_vars();
    if (i == j || i < 0 || j < 0 || i >= n || j >= n)
        throw DimensionMismatch("bad modular-divisibility variable pair");
    ModularPolynomial p = phi(n_isog);
    MultiPoly g(n);
    for (const auto& [ij, c] : p.coeffs) {
        Exps e(n, 0);
        e[i] = static_cast<unsigned>(ij.first);
        e[j] = static_cast<unsigned>(ij.second);
        g.add_term(e, mpq_class(c));
    }
    return divides(g, f);
}

void SpecialVarietyDescriptor::validate() const {
    if (n <= 0 || blocks.empty())
        throw DimensionMismatch("descriptor needs a coordinate partition");
    std::vector<bool> seen(n, false);
    for (const auto& blk : blocks) {
        for (int i : blk) {
            if (i < 0 || i >= n || seen[i])
                throw DimensionMismatch("blocks must disjointly cover coordinates");
            seen[i] = true;
        }
    }
    for (bool b : seen)
        if (!b)
            throw DimensionMismatch("blocks must disjointly cover coordinates");
    for (size_t k = 1; k < blocks.size(); ++k)
        if (blocks[k].empty())
            throw DimensionMismatch("only S_0 may be empty");
    if (fixed.size() != blocks[0].size())
        throw DimensionMismatch("fixed points must match S_0");
    for (const auto& [j, deg] : isogeny_degree)
        if (deg < 1)
            throw DimensionMismatch("isogeny degrees are positive");
}

bool is_linear_descriptor(const SpecialVarietyDescriptor& v) {
    for (const auto& [j, deg] : v.isogeny_degree)
        if (deg != 1)
            return false;
    return true;
}

} // namespace ao
