#include "ao/polytext.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

#include "ao/errors.hpp"

namespace ao {

namespace {

struct RawTerm {
    mpq_class coeff;
    std::map<int, unsigned long> exps; // 1-based variable -> exponent
};

class Parser {
  public:
    explicit Parser(const std::string& s) : s_(s) {}

    std::vector<RawTerm> run() {
        std::vector<RawTerm> terms;
        skip_ws();
        if (eof())
            throw ParseError("empty polynomial", pos_);
        bool negative = accept_sign();
        for (;;) {
            RawTerm t = term();
            if (negative)
                t.coeff = -t.coeff;
            terms.push_back(std::move(t));
            skip_ws();
            if (eof())
                return terms;
            char c = s_[pos_];
            if (c != '+' && c != '-')
                throw ParseError("expected + or - between terms", pos_);
            negative = c == '-';
            ++pos_;
            skip_ws();
        }
    }

  private:
    bool eof() const { return pos_ >= s_.size(); }
    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }
    bool accept_sign() {
        if (!eof() && (s_[pos_] == '+' || s_[pos_] == '-')) {
            bool neg = s_[pos_] == '-';
            ++pos_;
            skip_ws();
            return neg;
        }
        return false;
    }

    unsigned long digits() {
        size_t start = pos_;
        while (!eof() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (pos_ == start)
            throw ParseError("expected digits", pos_);
        try {
            return std::stoul(s_.substr(start, pos_ - start));
        } catch (const std::out_of_range&) {
            throw ParseError("number too large", start);
        }
    }

    mpq_class rational() {
        size_t start = pos_;
        while (!eof() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (pos_ == start)
            throw ParseError("expected a number", pos_);
        mpz_class num(s_.substr(start, pos_ - start));
        if (!eof() && s_[pos_] == '/') {
            ++pos_;
            size_t dstart = pos_;
            while (!eof() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            if (pos_ == dstart)
                throw ParseError("expected a denominator", dstart);
            mpz_class den(s_.substr(dstart, pos_ - dstart));
            if (den == 0)
                throw ParseError("zero denominator", dstart);
            mpq_class q(num, den);
            q.canonicalize();
            return q;
        }
        return mpq_class(num);
    }

    void factor(RawTerm& t) {
        if (eof())
            throw ParseError("expected a factor", pos_);
        char c = s_[pos_];
        if (c == 'x') {
            ++pos_;
            size_t istart = pos_;
            unsigned long k = digits();
            if (k == 0)
                throw ParseError("variables are numbered from x1", istart);
            unsigned long e = 1;
            if (!eof() && s_[pos_] == '^') {
                ++pos_;
                e = digits();
            }
            t.exps[static_cast<int>(k)] += e;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            t.coeff *= rational();
            // An immediately following variable needs no explicit '*'.
            if (!eof() && s_[pos_] == 'x')
                factor(t);
        } else {
            throw ParseError("unknown token", pos_);
        }
    }

    RawTerm term() {
        RawTerm t;
        t.coeff = 1;
        factor(t);
        for (;;) {
            skip_ws();
            if (eof() || s_[pos_] != '*')
                return t;
            ++pos_;
            skip_ws();
            factor(t);
        }
    }

    const std::string& s_;
    size_t pos_ = 0;
};

std::string coeff_str(const mpq_class& c) {
    mpq_class a = abs(c);
    if (a.get_den() == 1)
        return a.get_num().get_str();
    return a.get_num().get_str() + "/" + a.get_den().get_str();
}

} // namespace

MultiPoly parse_poly(const std::string& text, int n_min) {
    Parser p(text);
    std::vector<RawTerm> raw = p.run();
    int n = n_min;
    for (const auto& t : raw)
        for (const auto& [k, e] : t.exps)
            n = std::max(n, k);
    if (n == 0)
        n = 1; // a pure constant still needs an ambient ring
    MultiPoly f(n);
    for (const auto& t : raw) {
        Exps e(n, 0);
        for (const auto& [k, ex] : t.exps)
            e[k - 1] += static_cast<unsigned>(ex);
        f.add_term(e, t.coeff);
    }
    return f;
}

std::string render(const MultiPoly& f) {
    if (f.is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    // Reverse lex order puts higher powers of x1 first, matching the
    // conventional reading order.
    const auto& terms = f.terms();
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
        const auto& [e, c] = *it;
        if (first) {
            if (c < 0)
                os << "-";
            first = false;
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        bool any_var = false;
        for (unsigned k : e)
            if (k > 0)
                any_var = true;
        std::string cs = coeff_str(c);
        bool wrote_coeff = false;
        if (!any_var || cs != "1") {
            os << cs;
            wrote_coeff = true;
        }
        bool first_factor = !wrote_coeff;
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0)
                continue;
            if (!first_factor)
                os << "*";
            first_factor = false;
            os << "x" << (i + 1);
            if (e[i] > 1)
                os << "^" << e[i];
        }
    }
    return os.str();
}

} // namespace ao
