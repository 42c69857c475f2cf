#include "ao/cli.hpp"

#include <mpfr.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ao/dynamics.hpp"
#include "ao/errors.hpp"
#include "ao/jfun.hpp"
#include "ao/modpoly.hpp"
#include "ao/oort.hpp"

namespace ao {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitUsage = 64;

const char* tf(bool b) { return b ? "true" : "false"; }

std::string fmt_mpfr(mpfr_srcptr x, const char* spec) {
    char* s = nullptr;
    mpfr_asprintf(&s, spec, x);
    std::string out(s);
    mpfr_free_str(s);
    return out;
}

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// One output line. Both renderings are built up front so the emitter can
// switch formats without touching the handlers.
struct Record {
    std::string text;   // key=value pairs
    std::string values; // the values alone (--format compact)

    void add(const std::string& key, const std::string& value) {
        if (!text.empty()) {
            text += ' ';
            values += ' ';
        }
        text += key;
        text += '=';
        text += value;
        values += value;
    }
    void add_ball(const std::string& key, const RealBall& x) {
        add(key, fmt_mpfr(x.center(), "%.17Re"));
        add(key + "_radius", fmt_mpfr(x.radius(), "%.3Re"));
    }
    void add_complex(const std::string& key, const ComplexBall& z) {
        add_ball(key + "_re", z.re());
        add_ball(key + "_im", z.im());
    }
};

// Buffered emitter: handlers append records, run() flushes once at the end,
// so partial output never escapes on an error path and parallel scans can
// merge worker buffers in canonical order.
struct Sink {
    bool compact = false;
    std::vector<std::string> lines;

    void put(const Record& r) { lines.push_back(compact ? r.values : r.text); }
    void put_all(const std::vector<Record>& rs) {
        for (const Record& r : rs)
            put(r);
    }
    void flush(std::ostream& out) const {
        for (const std::string& l : lines)
            out << l << '\n';
        out.flush();
    }
};

// "p", "p/q", or a decimal like "2.5", as an exact rational.
mpq_class parse_rational(const std::string& s) {
    if (s.empty())
        throw ParseError("empty number", 0);
    try {
        size_t dot = s.find('.');
        if (dot != std::string::npos) {
            std::string digits = s.substr(0, dot) + s.substr(dot + 1);
            mpq_class q{mpz_class(digits)};
            mpz_class scale;
            mpz_ui_pow_ui(scale.get_mpz_t(), 10,
                          static_cast<unsigned long>(s.size() - dot - 1));
            return q / scale;
        }
        mpq_class q(s);
        if (q.get_den() == 0)
            throw std::invalid_argument(s);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw ParseError("not a rational: " + s, 0);
    }
}

RealBall ball_from_decimal(const std::string& s, Prec prec) {
    // Probe first: from_str folds a parse failure into a NaN center, which
    // would surface later as a baffling domain error.
    mpfr_t probe;
    mpfr_init2(probe, 64);
    int rc = mpfr_set_str(probe, s.c_str(), 10, MPFR_RNDN);
    mpfr_clear(probe);
    if (rc != 0)
        throw ParseError("not a decimal number: " + s, 0);
    return RealBall::from_str(s, prec);
}

ComplexBall parse_complex(const std::string& s, Prec prec) {
    size_t comma = s.find(',');
    if (comma == std::string::npos)
        throw ParseError("expected re,im: " + s, s.size());
    return ComplexBall(ball_from_decimal(s.substr(0, comma), prec),
                       ball_from_decimal(s.substr(comma + 1), prec));
}

// --poly accepts either a literal polynomial or the name of a file holding
// one.
MultiPoly load_poly(const std::string& arg) {
    std::string text = arg;
    std::error_code ec;
    if (std::filesystem::is_regular_file(arg, ec)) {
        std::ifstream in(arg);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    size_t a = text.find_first_not_of(" \t\r\n");
    size_t b = text.find_last_not_of(" \t\r\n");
    if (a == std::string::npos)
        throw ParseError("empty polynomial", 0);
    return parse_poly(text.substr(a, b - a + 1));
}

// Run `work(k)` for k = 0..parts-1 on up to `jobs` threads. Workers write
// only into their own slot of caller-owned per-part storage, so merging is
// a concatenation in part order and the schedule never shows in the output.
void parallel_parts(size_t parts, long jobs,
                    const std::function<void(size_t)>& work) {
    size_t workers = static_cast<size_t>(
        std::max<long>(1, std::min<long>(jobs, static_cast<long>(parts))));
    if (workers <= 1) {
        for (size_t k = 0; k < parts; ++k)
            work(k);
        return;
    }
    std::atomic<size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (;;) {
                size_t k = next.fetch_add(1);
                if (k >= parts)
                    return;
                try {
                    work(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error)
                        first_error = std::current_exception();
                    return;
                }
            }
        });
    for (std::thread& th : pool)
        th.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

// ---- on-disk polynomial caches ------------------------------------------
//
// The cache directory is the only shared mutable resource: writes go to a
// process-unique temp file followed by an atomic rename, plus an in-process
// mutex so --jobs workers serialize among themselves.

std::mutex g_cache_mu;

void write_text_atomic(const std::filesystem::path& p, const std::string& body) {
    std::lock_guard<std::mutex> lock(g_cache_mu);
    std::filesystem::create_directories(p.parent_path());
    std::filesystem::path tmp = p;
    tmp += "." + std::to_string(getpid()) + ".tmp";
    {
        std::ofstream out(tmp);
        out << body;
    }
    std::filesystem::rename(tmp, p);
}

// hcp_<|d|>.txt: one integer coefficient per line, degree-descending,
// dense. An unreadable or inconsistent file is recomputed and rewritten.
MultiPoly hcp_cached(const mpz_class& d, const std::string& cache_dir) {
    long h = class_number(d);
    std::filesystem::path file;
    if (!cache_dir.empty()) {
        file = std::filesystem::path(cache_dir) /
               ("hcp_" + mpz_class(abs(d)).get_str() + ".txt");
        std::ifstream in(file);
        if (in) {
            std::vector<mpz_class> cs;
            std::string line;
            bool ok = true;
            while (std::getline(in, line)) {
                if (line.empty())
                    continue;
                try {
                    cs.emplace_back(line);
                } catch (const std::invalid_argument&) {
                    ok = false;
                    break;
                }
            }
            if (ok && static_cast<long>(cs.size()) == h + 1 && cs[0] == 1) {
                MultiPoly f(1);
                for (size_t k = 0; k < cs.size(); ++k)
                    if (cs[k] != 0)
                        f.add_term({static_cast<unsigned>(h - static_cast<long>(k))},
                                   mpq_class(cs[k]));
                return f;
            }
        }
    }
    MultiPoly f = hilbert_class_poly(d);
    if (!cache_dir.empty()) {
        std::string body;
        for (long k = h; k >= 0; --k) {
            body += mpq_class(f.coefficient({static_cast<unsigned>(k)}))
                        .get_num()
                        .get_str();
            body += '\n';
        }
        write_text_atomic(file, body);
    }
    return f;
}

// phi_<N>.txt in the serialized text form of `modpoly`.
ModularPolynomial phi_cached(long n, const std::string& cache_dir) {
    std::filesystem::path file;
    if (!cache_dir.empty()) {
        file = std::filesystem::path(cache_dir) / ("phi_" + std::to_string(n) + ".txt");
        std::ifstream in(file);
        if (in) {
            std::ostringstream ss;
            ss << in.rdbuf();
            try {
                ModularPolynomial mp = phi_from_text(ss.str());
                if (mp.n == n)
                    return mp;
            } catch (const ParseError&) {
                // fall through to recompute
            }
        }
    }
    ModularPolynomial mp = phi(n);
    if (!cache_dir.empty())
        write_text_atomic(file, phi_to_text(mp));
    return mp;
}

// ---- subcommand handlers -------------------------------------------------

std::string point_text(const SpecialPoint& p) {
    std::string s;
    for (const SpecialCoord& c : p.coords()) {
        if (!s.empty())
            s += ',';
        s += '(' + c.disc.d.get_str() + ',' + std::to_string(c.conj_index) + ')';
    }
    return s;
}

int cmd_j(const std::string& tau_text, Prec prec, Sink& sink) {
    HalfPlanePoint tau(parse_complex(tau_text, prec));
    ComplexBall v = j(tau, prec);
    Record r;
    r.add("tau", tau_text);
    r.add_complex("value", v);
    sink.put(r);
    return kExitOk;
}

int cmd_classnum(bool have_range, long lo, long hi, bool have_d, long d_flag,
                 Sink& sink) {
    std::vector<mpz_class> ds;
    if (have_d)
        ds.emplace_back(d_flag);
    else if (have_range)
        for (long q = std::max(3L, lo); q <= hi; ++q) {
            if (q % 4 == 0 || q % 4 == 3)
                ds.emplace_back(-q);
        }
    else {
        std::cerr << "error: classnum needs --range or --d\n";
        return kExitUsage;
    }
    for (const mpz_class& d : ds) {
        Record r;
        r.add("d", d.get_str());
        r.add("h", std::to_string(class_number(d)));
        r.add("fundamental", tf(decompose(d).f == 1));
        sink.put(r);
    }
    return kExitOk;
}

int cmd_lambda(long d_flag, Prec prec, Sink& sink) {
    mpz_class d(d_flag);
    std::vector<CMPoint> pts = lambda_points(d, prec);
    for (size_t k = 0; k < pts.size(); ++k) {
        Record r;
        r.add("index", std::to_string(k));
        r.add("a", pts[k].form.a.get_str());
        r.add("b", pts[k].form.b.get_str());
        r.add("c", pts[k].form.c.get_str());
        r.add_complex("tau", pts[k].tau.z);
        sink.put(r);
    }
    return kExitOk;
}

int cmd_hcp(long d_flag, const Config& cfg, Sink& sink) {
    mpz_class d(d_flag);
    MultiPoly f = hcp_cached(d, cfg.cache_dir);
    long h = f.var_degree(0);
    Record head;
    head.add("d", d.get_str());
    head.add("h", std::to_string(h));
    sink.put(head);
    for (long k = h; k >= 0; --k) {
        Record r;
        r.add("k", std::to_string(k));
        r.add("c",
              mpq_class(f.coefficient({static_cast<unsigned>(k)})).get_num().get_str());
        sink.put(r);
    }
    return kExitOk;
}

int cmd_phi(long n, const Config& cfg, Sink& sink) {
    ModularPolynomial mp = phi_cached(n, cfg.cache_dir);
    Record head;
    head.add("n", std::to_string(mp.n));
    head.add("degree", std::to_string(mp.deg_x()));
    head.add("terms", std::to_string(mp.coeffs.size()));
    head.add("symmetric", tf(mp.is_symmetric()));
    sink.put(head);
    for (const auto& [ij, c] : mp.coeffs) {
        Record r;
        r.add("i", std::to_string(ij.first));
        r.add("j", std::to_string(ij.second));
        r.add("c", c.get_str());
        sink.put(r);
    }
    return kExitOk;
}

int cmd_dnd(const std::string& poly_arg, Sink& sink) {
    MultiPoly f = load_poly(poly_arg);
    DndResult dr = is_dnd(f);
    HdndStatus hs = is_hdnd(f);
    Record r;
    r.add("dnd", tf(dr.dnd));
    r.add("hdnd", tf(hs.hdnd));
    if (!dr.dnd && dr.witness >= 0)
        r.add("witness", "x" + std::to_string(dr.witness + 1));
    if (dr.dnd && !hs.hdnd && !hs.path.empty()) {
        std::string path;
        for (const auto& [i, j] : hs.path) {
            if (!path.empty())
                path += ';';
            path += "x" + std::to_string(i + 1) + "=x" + std::to_string(j + 1);
        }
        r.add("path", path);
    }
    if (hs.identically_zero)
        r.add("identically_zero", "true");
    sink.put(r);
    return kExitOk;
}

int cmd_search(const std::string& poly_arg, long bound, Prec prec, long jobs,
               const Config& cfg, Sink& sink) {
    MultiPoly f = load_poly(poly_arg);
    int n = f.n_vars();
    mpz_class b(bound);
    std::vector<SpecialCoord> alphabet = special_alphabet(b);
    mpz_class grid = 1;
    for (int k = 0; k < n; ++k)
        grid *= static_cast<long>(alphabet.size());
    if (grid > cfg.size_caps.search)
        throw SizeCapExceeded("search enumeration beyond the configured cap");

    std::vector<std::vector<Record>> found;
    std::vector<std::vector<Record>> undecided;
    long n_found = 0;
    long n_undecided = 0;

    if (jobs <= 1) {
        // Sequential path: one shared evaluation table over the whole stream.
        SpecialSearch s = special_points_on(f, b, prec);
        found.resize(1);
        undecided.resize(1);
        for (const SpecialPoint& p : s.points) {
            Record r;
            r.add("point", point_text(p));
            r.add("status", "on");
            found[0].push_back(r);
        }
        for (const SpecialPoint& p : s.undecided) {
            Record r;
            r.add("point", point_text(p));
            r.add("status", "undecided");
            undecided[0].push_back(r);
        }
        n_found = static_cast<long>(s.points.size());
        n_undecided = static_cast<long>(s.undecided.size());
    } else {
        // Parallel path: the stream partitions by its leading coordinate,
        // and concatenating the parts in alphabet order reproduces the
        // sequential stream order exactly.
        size_t parts = alphabet.size();
        found.resize(parts);
        undecided.resize(parts);
        parallel_parts(parts, jobs, [&](size_t k) {
            SpecialPointStream stream(n, b, static_cast<long>(k));
            while (auto p = stream.next()) {
                Answer a = on_hypersurface(f, *p, prec);
                if (a == Answer::no)
                    continue;
                Record r;
                r.add("point", point_text(*p));
                r.add("status", a == Answer::yes ? "on" : "undecided");
                (a == Answer::yes ? found : undecided)[k].push_back(r);
            }
        });
        for (const auto& v : found)
            n_found += static_cast<long>(v.size());
        for (const auto& v : undecided)
            n_undecided += static_cast<long>(v.size());
    }

    for (const auto& v : found)
        sink.put_all(v);
    for (const auto& v : undecided)
        sink.put_all(v);
    Record tail;
    tail.add("found", std::to_string(n_found));
    tail.add("undecided", std::to_string(n_undecided));
    tail.add("bound", std::to_string(bound));
    sink.put(tail);
    return n_undecided > 0 ? kExitUndecided : kExitOk;
}

int cmd_certify_dominance(const std::string& poly_arg, long dfund, Sink& sink) {
    MultiPoly f = load_poly(poly_arg);
    DominanceCertificate cert = dominance_bound(f, mpz_class(dfund));
    for (const DominanceStep& step : cert.transcript) {
        Record r;
        r.add("f", std::to_string(step.f0));
        r.add("u_lower", step.u_lower.get_str());
        r.add("alpha_upper", step.alpha_upper.get_str());
        r.add("positive", tf(step.positive));
        sink.put(r);
    }
    Record tail;
    tail.add("f0", cert.bound_f.get_str());
    tail.add("c0", cert.c0.get_str());
    tail.add("c1", cert.c1.get_str());
    tail.add("degree", std::to_string(cert.d));
    tail.add("verified", tf(verify_certificate(cert)));
    sink.put(tail);
    return kExitOk;
}

int cmd_equidist(long lo, long hi, const std::string& r_text, Prec prec,
                 long jobs, Sink& sink) {
    mpq_class r = parse_rational(r_text);
    long count = hi - lo + 1;
    if (count < 1)
        throw OutOfDomain("empty discriminant range");
    size_t parts = jobs <= 1 ? 1
                             : static_cast<size_t>(std::min<long>(
                                   count, std::max<long>(1, jobs) * 4));
    long width = (count + static_cast<long>(parts) - 1) / static_cast<long>(parts);
    std::vector<std::vector<Record>> rows(parts);
    std::vector<long> violations(parts, 0);
    parallel_parts(parts, jobs, [&](size_t k) {
        long clo = lo + static_cast<long>(k) * width;
        long chi = std::min(hi, clo + width - 1);
        if (clo > chi)
            return;
        EquidistTable t = equidist_experiment(clo, chi, r, prec);
        violations[k] = t.violations;
        for (const EquidistRow& row : t.rows) {
            Record rec;
            rec.add("d", row.d.get_str());
            rec.add("fundamental", tf(row.fundamental));
            rec.add("h", std::to_string(row.h));
            rec.add("inside", std::to_string(row.inside));
            rec.add("meets", tf(row.meets_threshold));
            rows[k].push_back(rec);
        }
    });
    long n_rows = 0;
    long n_violations = 0;
    for (size_t k = 0; k < parts; ++k) {
        sink.put_all(rows[k]);
        n_rows += static_cast<long>(rows[k].size());
        n_violations += violations[k];
    }
    Record tail;
    tail.add("rows", std::to_string(n_rows));
    tail.add("violations", std::to_string(n_violations));
    sink.put(tail);
    return kExitOk;
}

int cmd_flow(const std::string& from_text, const std::string& t_text,
             double step, Prec prec, Sink& sink) {
    if (!(step > 0) || step > 1)
        throw OutOfDomain("step must lie in (0, 1]");
    HalfPlanePoint tau0(parse_complex(from_text, prec));
    Jet3 jet = j_jet(tau0, prec);
    ComplexBall t_dir = parse_complex(t_text, prec);
    VectorField xi = j_field(1, {1});
    TrajectorySample s = integrate(
        xi, {tau0.z, jet.y, jet.y_dot, jet.y_ddot}, t_dir, step, prec);
    const std::vector<ComplexBall>& last = s.points.back();
    const char* names[4] = {"tau", "j", "j1", "j2"};
    for (int k = 0; k < 4; ++k) {
        Record r;
        r.add("coord", names[k]);
        r.add_complex("value", last[static_cast<size_t>(k)]);
        sink.put(r);
    }
    Record tail;
    tail.add("samples", std::to_string(s.points.size()));
    tail.add("step", fmt_double(s.step));
    sink.put(tail);
    return kExitOk;
}

int cmd_scan_tatuzawa(long lo, long hi, const std::string& eps_text,
                      const Config& cfg, Sink& sink) {
    mpq_class eps =
        eps_text.empty() ? cfg.tatuzawa.epsilon_star : parse_rational(eps_text);
    TatuzawaReport rep =
        tatuzawa_scan(mpz_class(lo), mpz_class(hi), eps, cfg.tatuzawa);
    for (const TatuzawaRow& row : rep.rows) {
        Record r;
        r.add("d", row.d.get_str());
        r.add("h", std::to_string(row.h));
        r.add("omega", std::to_string(row.omega));
        r.add("two_torsion", std::to_string(row.two_torsion));
        r.add("ratio", fmt_double(row.ratio));
        sink.put(r);
    }
    Record tail;
    tail.add("argmin_d", rep.argmin_d.get_str());
    tail.add("min_ratio", fmt_double(rep.min_ratio));
    sink.put(tail);
    return kExitOk;
}

int cmd_count_points(const std::string& poly_arg, const std::string& r_text,
                     long h_bound, Prec prec, Sink& sink) {
    MultiPoly f = load_poly(poly_arg);
    QuadraticPointCount c =
        count_quadratic_points(f, parse_rational(r_text), h_bound, prec);
    Record r;
    r.add("pool", std::to_string(c.pool));
    r.add("on_curve", std::to_string(c.on_curve));
    r.add("undecided", std::to_string(c.undecided));
    sink.put(r);
    return c.undecided > 0 ? kExitUndecided : kExitOk;
}

void validate_config(const Config& c) {
    if (c.default_prec < 64)
        throw OutOfDomain("default_prec below the 64-bit floor");
    if (c.size_caps.phi_level <= 0 || c.size_caps.search <= 0)
        throw OutOfDomain("size caps must be positive");
}

} // namespace

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw OutOfDomain("config file not readable: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ParseError(std::string("config: ") + e.what(), 0);
    }
    Config c;
    try {
        if (doc.contains("default_prec"))
            c.default_prec = static_cast<Prec>(doc["default_prec"].get<long>());
        if (doc.contains("size_caps")) {
            const auto& sc = doc["size_caps"];
            if (sc.contains("phi_level"))
                c.size_caps.phi_level = sc["phi_level"].get<long>();
            if (sc.contains("search"))
                c.size_caps.search = sc["search"].get<long>();
        }
        if (doc.contains("tatuzawa")) {
            const auto& tz = doc["tatuzawa"];
            if (tz.contains("epsilon_star")) {
                if (tz["epsilon_star"].is_string())
                    c.tatuzawa.epsilon_star =
                        parse_rational(tz["epsilon_star"].get<std::string>());
                else
                    c.tatuzawa.epsilon_star = mpq_class(tz["epsilon_star"].get<double>());
            }
            if (tz.contains("exceptional_d"))
                c.tatuzawa.exceptional_d = mpz_class(tz["exceptional_d"].get<long>());
        }
        if (doc.contains("cache_dir"))
            c.cache_dir = doc["cache_dir"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: ") + e.what(), 0);
    }
    validate_config(c);
    return c;
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"certified computations around special points of Y(1)^n"};
    app.name("aoy1");
    app.require_subcommand(1);

    std::string config_path;
    long prec_flag = 0;
    std::string format = "records";
    long jobs = 1;
    std::string cache_flag;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--prec", prec_flag, "working precision in bits (>= 64)")
        ->check(CLI::Range(static_cast<long>(64), static_cast<long>(1) << 20));
    app.add_option("--format", format, "records (key=value) or compact (values)")
        ->check(CLI::IsMember({"records", "compact"}));
    app.add_option("--jobs", jobs, "worker threads for partitionable scans")
        ->check(CLI::PositiveNumber);
    app.add_option("--cache-dir", cache_flag,
                   "directory for hcp_<|d|>.txt / phi_<N>.txt caches");

    std::string tau_text, poly_arg, r_text, t_text, eps_text = "";
    long d_flag = 0, n_flag = 0, bound = 0, h_bound = 0, dfund = 0;
    std::vector<long> range;
    double step = 1.0 / 64;

    CLI::App* c_j = app.add_subcommand("j", "evaluate j at a half-plane point");
    c_j->add_option("--tau", tau_text, "point as re,im")->required();

    CLI::App* c_cn = app.add_subcommand("classnum", "class numbers over a range");
    CLI::Option* cn_range =
        c_cn->add_option("--range", range, "|d| from A to B")->expected(2);
    c_cn->add_option("--d", d_flag, "a single discriminant")->excludes(cn_range);

    CLI::App* c_lam = app.add_subcommand("lambda", "CM points of a discriminant");
    c_lam->add_option("--d", d_flag, "discriminant (< 0)")->required();

    CLI::App* c_hcp = app.add_subcommand("hcp", "Hilbert class polynomial");
    c_hcp->add_option("--disc", d_flag, "discriminant (< 0)")->required();

    CLI::App* c_phi = app.add_subcommand("phi", "modular polynomial Phi_N");
    c_phi->add_option("--N", n_flag, "level")->required()->check(CLI::PositiveNumber);

    CLI::App* c_dnd = app.add_subcommand("dnd", "degree dichotomy classification");
    c_dnd->add_option("--poly", poly_arg, "polynomial text or file")->required();

    CLI::App* c_se = app.add_subcommand("search", "special points on a hypersurface");
    c_se->add_option("--poly", poly_arg, "polynomial text or file")->required();
    c_se->add_option("--bound", bound, "discriminant bound B")->required();

    CLI::App* c_cd = app.add_subcommand("certify-dominance",
                                        "conductor bound with transcript");
    c_cd->add_option("--poly", poly_arg, "polynomial text or file")->required();
    c_cd->add_option("--dfund", dfund, "fundamental discriminant")->required();

    CLI::App* c_eq = app.add_subcommand("equidist", "CM points below height R");
    c_eq->add_option("--range", range, "|d| from A to B")->required()->expected(2);
    c_eq->add_option("--R", r_text, "height cutoff (rational)")->required();

    CLI::App* c_fl = app.add_subcommand("flow", "integrate the modular jet field");
    c_fl->add_option("--from", tau_text, "initial tau as re,im")->required();
    c_fl->add_option("--T", t_text, "total flow time as re,im")->required();
    c_fl->add_option("--step", step, "initial step in (0, 1]");

    CLI::App* c_tz = app.add_subcommand("scan-tatuzawa",
                                        "class-number growth ratios");
    c_tz->add_option("--range", range, "|d| from A to B")->required()->expected(2);
    c_tz->add_option("--eps", eps_text, "exponent offset (rational)");

    CLI::App* c_cp = app.add_subcommand("count-points",
                                        "quadratic points in a height window");
    c_cp->add_option("--poly", poly_arg, "polynomial text or file")->required();
    c_cp->add_option("--R", r_text, "height cutoff (rational)")->required();
    c_cp->add_option("--H", h_bound, "multiplicative height bound")->required();

    for (CLI::App* sub : app.get_subcommands(nullptr))
        sub->fallthrough();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    }

    try {
        Config cfg;
        if (!config_path.empty())
            cfg = load_config(config_path);
        if (prec_flag != 0)
            cfg.default_prec = static_cast<Prec>(prec_flag);
        if (app.count("--cache-dir") > 0)
            cfg.cache_dir = cache_flag;
        validate_config(cfg);
        set_phi_cap(cfg.size_caps.phi_level);
        Prec prec = cfg.default_prec;

        Sink sink;
        sink.compact = format == "compact";
        int code = kExitError;
        if (c_j->parsed())
            code = cmd_j(tau_text, prec, sink);
        else if (c_cn->parsed())
            code = cmd_classnum(c_cn->count("--range") > 0, range.size() > 1 ? range[0] : 0,
                                range.size() > 1 ? range[1] : 0,
                                c_cn->count("--d") > 0, d_flag, sink);
        else if (c_lam->parsed())
            code = cmd_lambda(d_flag, prec, sink);
        else if (c_hcp->parsed())
            code = cmd_hcp(d_flag, cfg, sink);
        else if (c_phi->parsed())
            code = cmd_phi(n_flag, cfg, sink);
        else if (c_dnd->parsed())
            code = cmd_dnd(poly_arg, sink);
        else if (c_se->parsed())
            code = cmd_search(poly_arg, bound, prec, jobs, cfg, sink);
        else if (c_cd->parsed())
            code = cmd_certify_dominance(poly_arg, dfund, sink);
        else if (c_eq->parsed())
            code = cmd_equidist(range[0], range[1], r_text, prec, jobs, sink);
        else if (c_fl->parsed())
            code = cmd_flow(tau_text, t_text, step, prec, sink);
        else if (c_tz->parsed())
            code = cmd_scan_tatuzawa(range[0], range[1], eps_text, cfg, sink);
        else if (c_cp->parsed())
            code = cmd_count_points(poly_arg, r_text, h_bound, prec, sink);
        sink.flush(std::cout);
        return code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
}

} // namespace ao
