#pragma once

// Exact sparse multivariate polynomials over Q, the dnd/hdnd degree
// dichotomies, diagonal restrictions, integer special sections, exact
// divisibility, and special-variety descriptors.

#include <gmpxx.h>

#include <map>
#include <utility>
#include <vector>

#include "ao/ball.hpp"
#include "ao/quad.hpp"

namespace ao {

// Exponent vectors are dense, one entry per variable. Variables are
// positional and 0-based in code; the text grammar names them x1..xn.
using Exps = std::vector<unsigned>;

class MultiPoly {
  public:
    explicit MultiPoly(int n_vars);
    static MultiPoly constant(int n_vars, const mpq_class& c);
    static MultiPoly variable(int n_vars, int i);
    static MultiPoly monomial(int n_vars, Exps e, const mpq_class& c);

    int n_vars() const { return n_; }
    bool is_zero() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }
    // Terms in lexicographic exponent order; no zero coefficients stored.
    const std::map<Exps, mpq_class>& terms() const { return terms_; }
    mpq_class coefficient(const Exps& e) const;
    void add_term(const Exps& e, const mpq_class& c);

    long total_degree() const;  // throws ZeroPolynomial
    long var_degree(int i) const;

    mpq_class eval_q(const std::vector<mpq_class>& x) const;
    ComplexBall eval_ball(const std::vector<ComplexBall>& x, Prec prec) const;
    MultiPoly derivative(int i) const;

    bool operator==(const MultiPoly& o) const {
        return n_ == o.n_ && terms_ == o.terms_;
    }
    bool operator!=(const MultiPoly& o) const { return !(*this == o); }

    friend MultiPoly add(const MultiPoly& f, const MultiPoly& g);
    friend MultiPoly sub(const MultiPoly& f, const MultiPoly& g);
    friend MultiPoly mul(const MultiPoly& f, const MultiPoly& g);
    friend MultiPoly neg(const MultiPoly& f);
    friend MultiPoly mul_q(const MultiPoly& f, const mpq_class& c);
    friend MultiPoly pow_ui(const MultiPoly& f, unsigned long k);

  private:
    int n_;
    std::map<Exps, mpq_class> terms_;
};

// Logarithmic Weil height of the coefficient vector: max over coefficients
// p/q in lowest terms of log max(|p|, q).
struct Height {
    double value;
};
Height height(const MultiPoly& f); // throws ZeroPolynomial

struct DndResult {
    bool dnd;
    int witness; // first variable violating the dichotomy, or -1
};

// Degree dichotomy: every variable has partial degree equal to the total
// degree or zero.
DndResult is_dnd(const MultiPoly& f); // throws ZeroPolynomial

// Substitute x_i = x_j and renumber densely to n-1 variables (index i is
// removed; indices above it shift down).
MultiPoly restrict_diagonal(const MultiPoly& f, int i, int j);

struct HdndStatus {
    bool hdnd;
    bool fails_dnd;        // some node of the recursion tree is not dnd
    bool identically_zero; // some diagonal restriction vanished identically
    // Substitution path (i, j) to the first failing node, indices local to
    // each recursion level's variable numbering. Empty when hdnd, or when
    // the failure is at the root.
    std::vector<std::pair<int, int>> path;
};

// Hereditary dnd: dnd at every node of the recursion tree over diagonal
// restrictions. An identically-vanishing restriction is reported as the
// distinguished identically_zero outcome and fails hdnd (the dominance
// argument needs a nonzero leading term).
HdndStatus is_hdnd(const MultiPoly& f); // throws ZeroPolynomial

// Substitute exact integers for the variables in sigma (0-based, strictly
// increasing) and renumber the rest densely.
MultiPoly special_section(const MultiPoly& f, const std::vector<int>& sigma,
                          const std::vector<mpz_class>& values);

// Exact divisibility of f by g over Q[x]. Since {g} is trivially a Groebner
// basis of the principal ideal (g), lex division with zero remainder is an
// exact test.
bool divides(const MultiPoly& g, const MultiPoly& f); // does g divide f?

// Does Phi_N(x_i, x_j) divide f? (Hypersurface containment criterion.)
bool divides_modular(const MultiPoly& f, int i, int j, long n_isog);

struct FixedCoordinate {
    Discriminant disc;
    long conj_index; // into the canonical Lambda_d ordering
};

// A special variety of Y(1)^n: a partition S_0,...,S_w of the coordinates,
// fixed CM values on S_0, and isogeny relations Phi_N(y_{s_i}, y_j) = 0
// tying each non-minimal j in S_i to the block minimum s_i.
struct SpecialVarietyDescriptor {
    int n = 0;
    std::vector<std::vector<int>> blocks;  // blocks[0] = S_0, possibly empty
    std::vector<FixedCoordinate> fixed;    // parallel to blocks[0]
    std::map<int, long> isogeny_degree;    // non-minimal member -> N >= 1

    int dimension() const { return static_cast<int>(blocks.size()) - 1; }
    bool is_basic() const { return blocks.empty() || blocks[0].empty(); }
    void validate() const; // throws DimensionMismatch
};

// True iff every modular relation in the descriptor is x_i = x_j, i.e. all
// isogeny degrees are 1 (vacuously true for points).
bool is_linear_descriptor(const SpecialVarietyDescriptor& v);

} // namespace ao
