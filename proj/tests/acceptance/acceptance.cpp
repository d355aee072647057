// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Random inputs use seeds disjoint from the calibration corpus (seed 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "varhardy/atomic.hpp"
#include "varhardy/errors.hpp"
#include "varhardy/ineq_lab.hpp"
#include "varhardy/io.hpp"
#include "varhardy/random.hpp"

using namespace varhardy;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 7;

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        if (failures.size() < 8) failures.push_back(what);
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Rng stream(const char* name) { return Rng(derive_seed(kSeed, fnv1a(name), 0)); }

FiltrationSpace random_space(Rng& rng, int max_depth = 8) {
    return generate_dyadic_space(rng.uniform_int(0, max_depth), rng.uniform(0.25, 0.75), rng.bits(), true);
}

RandomVariable random_vector(Rng& rng, const FiltrationSpace& s) {
    const double scale = std::exp(rng.uniform(-3.0, 3.0));
    std::vector<double> v(s.outcome_count());
    for (auto& x : v) x = scale * rng.gaussian();
    return RandomVariable(std::move(v));
}

Exponent random_exponent(Rng& rng, const FiltrationSpace& s, double lo, double hi) {
    double a = rng.uniform(lo, hi);
    double b = rng.uniform(lo, hi);
    if (a > b) std::swap(a, b);
    return sample_exponent(s, a, b, rng.bits());
}

Martingale random_martingale(Rng& rng, int max_depth = 8) {
    const auto s = generate_dyadic_space(rng.uniform_int(1, max_depth), rng.uniform(0.25, 0.75), rng.bits(), true);
    const auto gen = static_cast<Generator>(rng.uniform_int(0, 2));
    return sample_martingale(s, gen, std::exp(rng.uniform(-3.0, 3.0)), rng.bits());
}

FrozenBounds load_bounds() { return parse_bounds(io::read_file(VARHARDY_DEFAULT_BOUNDS)); }

double bound_of(const FrozenBounds& b, const std::string& id) {
    const auto it = b.find(id);
    if (it == b.end()) throw FormatError("frozen bounds file has no entry for " + id);
    return it->second;
}

// Runs suites through the harness and requires every record to pass.
void check_suites(Outcome& o, TrialConfig cfg, const FrozenBounds& bounds, const std::vector<std::string>& only = {}) {
    const auto report = run_inequality_suite(cfg, bounds);
    std::ostringstream d;
    for (const auto& r : report.records) {
        if (!only.empty() && std::find(only.begin(), only.end(), r.id) == only.end()) continue;
        o.require(r.pass, r.suite + "/" + r.id + " max=" + num(r.max_ratio) + " bound=" +
                              (r.has_bound ? num(r.frozen_bound) : "none") + " at " + r.argmax);
        if (r.count == 0) continue;
        d << (o.detail.empty() && d.tellp() == 0 ? "" : ", ") << r.id << " " << num(r.max_ratio) << "/"
          << num(r.frozen_bound);
    }
    o.detail += d.str();
}

Outcome constant_norm_oracle() {
    Outcome o;
    Rng rng = stream("constant_norm_oracle");
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const auto s = random_space(rng);
        const auto u = random_vector(rng, s);
        const double p = rng.uniform(0.3, 8.0);
        long double acc = 0.0L;
        for (std::size_t w = 0; w < u.size(); ++w)
            acc += static_cast<long double>(s.weights()[w]) * std::pow(std::fabs(static_cast<long double>(u[w])), p);
        const double oracle = static_cast<double>(std::pow(acc, 1.0L / p));
        const double got = luxemburg_norm(s, u, Exponent::constant(s.outcome_count(), p));
        const double err = std::abs(got - oracle) / oracle;
        worst = std::max(worst, err);
        o.require(err <= 1e-9, "trial " + std::to_string(i) + " rel err " + num(err));
    }
    o.detail = "max rel err " + num(worst);
    return o;
}

Outcome modular_norm_relation() {
    Outcome o;
    Rng rng = stream("modular_norm_relation");
    double worst_unit = 0.0;
    double worst_sandwich = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto s = random_space(rng);
        const auto u = random_vector(rng, s);
        const auto p = random_exponent(rng, s, 0.3, 8.0);
        const double n = luxemburg_norm(s, u, p);
        const double unit = modular(s, scale(u, 1.0 / n), p);
        worst_unit = std::max(worst_unit, std::abs(unit - 1.0));
        o.require(std::abs(unit - 1.0) <= 1e-8, "trial " + std::to_string(i) + " rho(u/|u|) = " + num(unit));

        const double rho = modular(s, u, p);
        const double a = std::pow(n, p.p_plus());
        const double b = std::pow(n, p.p_minus());
        const double lo = n <= 1.0 ? a : b;
        const double hi = n <= 1.0 ? b : a;
        const double gap = std::max((lo - rho) / rho, (rho - hi) / rho);
        worst_sandwich = std::max(worst_sandwich, gap);
        o.require(gap <= 1e-9, "trial " + std::to_string(i) + " sandwich gap " + num(gap));
    }
    o.detail = "max |rho(u/|u|)-1| " + num(worst_unit) + ", max sandwich excess " + num(std::max(0.0, worst_sandwich));
    return o;
}

Outcome power_identity() {
    Outcome o;
    Rng rng = stream("power_identity");
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const auto sp = random_space(rng);
        const auto u = random_vector(rng, sp);
        const auto p = random_exponent(rng, sp, 0.3, 4.0);
        const double s = rng.uniform(0.25, 4.0);
        const double d = power_identity_defect(sp, u, p, s);
        worst = std::max(worst, d);
        o.require(d <= 1e-8, "trial " + std::to_string(i) + " defect " + num(d));
    }
    o.detail = "max defect " + num(worst);
    return o;
}

struct DecompositionStats {
    double residual = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double tail_increase = -INFINITY;
    double tail_end = 0.0;
    double gauge_low = INFINITY;
    double gauge_high = 0.0;
    std::size_t terms = 0;
};

void decomposition_checks(Outcome& o, AtomCategory cat, int trials, const char* name, const FrozenBounds& bounds,
                          bool tail, DecompositionStats& st) {
    const std::string prefix = cat == AtomCategory::First ? "atomic_hs" : cat == AtomCategory::Second ? "atomic_q"
                                                                                                     : "atomic_d";
    const double lower_bound = bound_of(bounds, prefix + "_lower") * kRegressionMargin;
    const double upper_bound = bound_of(bounds, prefix + "_upper") * kRegressionMargin;
    Rng rng = stream(name);
    for (int i = 0; i < trials; ++i) {
        const auto f = random_martingale(rng);
        const auto& s = f.space();
        const auto p = random_exponent(rng, s, 0.3, 4.0);
        const std::string tag = "trial " + std::to_string(i) + ": ";
        const auto dec = decompose(f, p, cat);
        st.terms += dec.terms.size();
        const double fscale = f.scale();

        double res = 0.0;
        for (int n = 0; n <= f.depth(); ++n) {
            const auto r = reconstruct(dec, s, n);
            for (std::size_t w = 0; w < s.outcome_count(); ++w) res = std::max(res, std::abs(r[w] - f.at(n)[w]));
        }
        st.residual = std::max(st.residual, res / (1.0 + fscale));
        o.require(res <= 1e-8 * (1.0 + fscale), tag + "reconstruction residual " + num(res));

        for (const auto& term : dec.terms) {
            const auto rep = validate_atom(s, term.atom, term.tau, p, cat);
            o.require(rep.pass(), tag + "atom k=" + std::to_string(term.k) + " fails validation (size " +
                                      num(rep.size) + " bound " + num(rep.size_bound) + " hs " + num(rep.hs_norm) +
                                      " vanish " + num(rep.vanishing_residual) + ")");
        }

        const auto cb = coefficient_bounds(dec, f, p);
        st.lower = std::max(st.lower, cb.lower_ratio);
        st.upper = std::max(st.upper, cb.upper_ratio);
        o.require(cb.lower_ratio <= lower_bound, tag + "lower ratio " + num(cb.lower_ratio));
        o.require(cb.upper_ratio <= upper_bound, tag + "upper ratio " + num(cb.upper_ratio));

        if (cat == AtomCategory::First) {
            const double g = luxemburg_norm(s, gauge_function(dec), p);
            const double hs = hardy_norm(f, p, HardyKind::s);
            st.gauge_low = std::min(st.gauge_low, g / hs);
            st.gauge_high = std::max(st.gauge_high, g / hs);
            o.require(g >= 3.0 * hs * (1.0 - 1e-6) && g <= 6.0 * hs * (1.0 + 1e-6),
                      tag + "gauge ratio " + num(g / hs));
        }

        if (tail) {
            const auto profile = tail_convergence_profile(dec, f, p);
            const double inc = tail_profile_max_increase(profile);
            st.tail_increase = std::max(st.tail_increase, inc);
            o.require(inc <= 1e-9, tag + "tail profile increases by " + num(inc) + " (relative)");
            double end = 0.0;
            for (const auto& w : profile) {
                if (!w.empty() && w.j == dec.k_min && w.m == dec.k_max) end = w.residual;
            }
            st.tail_end = std::max(st.tail_end, end);
            o.require(end <= 1e-8 * std::max(1.0, fscale), tag + "full-window residual " + num(end));
        }
    }
}

Outcome atomic_first_category(const FrozenBounds& bounds) {
    Outcome o;
    // hand-derived terms of the two-step Rademacher martingale at p = 1
    const auto s = generate_dyadic_space(2, 0.5, 0);
    const auto f = martingale_from_terminal(s, RandomVariable({2.0, 0.0, 0.0, -2.0}));
    const auto dec = decompose(f, Exponent::constant(4, 1.0), AtomCategory::First);
    const bool fixture = dec.terms.size() == 2 && dec.terms[0].k == -1 && dec.terms[1].k == 0 &&
                         std::abs(dec.terms[0].theta - 1.5) <= 1.5e-10 && std::abs(dec.terms[1].theta - 3.0) <= 3e-10;
    o.require(fixture, "Rademacher fixture does not give k=-1 (theta 1.5) and k=0 (theta 3)");

    DecompositionStats st;
    decomposition_checks(o, AtomCategory::First, 300, "atomic_first", bounds, false, st);
    o.detail = "fixture " + std::string(fixture ? "ok" : "wrong") + ", " + std::to_string(st.terms) +
               " atoms, max residual " + num(st.residual) + ", gauge/||f|| in [" + num(st.gauge_low) + ", " +
               num(st.gauge_high) + "], ratios " + num(st.lower) + "/" + num(st.upper);
    return o;
}

Outcome atomic_q_d(const FrozenBounds& bounds) {
    Outcome o;
    std::ostringstream d;
    for (AtomCategory cat : {AtomCategory::Second, AtomCategory::Third}) {
        DecompositionStats st;
        decomposition_checks(o, cat, 300, cat == AtomCategory::Second ? "atomic_q" : "atomic_d", bounds, true, st);
        d << (cat == AtomCategory::Second ? "Q: " : "; D: ") << st.terms << " atoms, residual " << num(st.residual)
          << ", ratios " << num(st.lower) << "/" << num(st.upper) << ", tail max increase " << num(st.tail_increase)
          << ", tail end " << num(st.tail_end);
    }
    o.detail = d.str();
    return o;
}

TrialConfig config(std::vector<std::string> suites, int trials) {
    TrialConfig cfg;
    cfg.seed = kSeed;
    cfg.trials = trials;
    cfg.suites = std::move(suites);
    return cfg;
}

Outcome indicator_estimates(const FrozenBounds& bounds) {
    Outcome o;
    check_suites(o, config({"indicator"}, 100), bounds);
    // constant exponents on their own: ratio exactly one on every cell
    Rng rng = stream("indicator_constant");
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto s = random_space(rng);
        const auto p = Exponent::constant(s.outcome_count(), rng.uniform(0.3, 8.0));
        for (int n = -1; n <= s.depth(); ++n) {
            for (const auto& cell : s.cells(n)) worst = std::max(worst, std::abs(indicator_norm_ratio(s, p, cell) - 1.0));
        }
    }
    o.require(worst <= 1e-9, "constant exponent indicator ratio off by " + num(worst));
    o.detail += ", constant-p |ratio-1| " + num(worst);
    return o;
}

Outcome embeddings(const FrozenBounds& bounds) {
    Outcome o;
    auto cfg = config({"embedding", "regular"}, 500);
    cfg.exponent_range = {0.3, 4.0};
    check_suites(o, cfg, bounds);
    return o;
}

Outcome transforms(const FrozenBounds& bounds) {
    Outcome o;
    check_suites(o, config({"transforms"}, 500), bounds);
    return o;
}

Outcome projection_lemma(const FrozenBounds& bounds) {
    Outcome o;
    check_suites(o, config({"projection"}, 200), bounds);
    return o;
}

Outcome doob(const FrozenBounds& bounds) {
    Outcome o;
    const auto s = generate_dyadic_space(2, 0.5, 0);
    const auto f = martingale_from_terminal(s, RandomVariable({2.0, 0.0, 0.0, -2.0}));
    const double fixture = doob_weak_constant(f, Exponent::constant(4, 2.0));
    o.require(std::abs(fixture - 1.0) <= 1e-9, "Rademacher fixture constant " + num(fixture));
    o.detail = "fixture " + num(fixture);
    check_suites(o, config({"doob"}, 500), bounds);
    return o;
}

std::string shell(const std::string& cmd, int& status) {
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) throw IoError("cannot run " + cmd);
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    status = pclose(pipe);
    return out;
}

Outcome determinism() {
    Outcome o;
    const std::string bin = VARHARDY_CLI_PATH;
    const fs::path dir = fs::temp_directory_path() / "varhardy_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    int status = 0;
    const std::string verify = bin + " verify --suite embedding,transforms,atomic,varlp --trials 60 --seed 11 --bounds " +
                               std::string(VARHARDY_DEFAULT_BOUNDS) + " -o ";
    shell(verify + (dir / "a.json").string() + " > /dev/null", status);
    shell(verify + (dir / "b.json").string() + " --jobs 2 > /dev/null", status);
    const auto a = io::read_file(dir / "a.json");
    const auto b = io::read_file(dir / "b.json");
    o.require(!a.empty() && a == b, "verify reports differ between runs");

    int round_trips = 0;
    for (int seed = 1; seed <= 5; ++seed) {
        const auto text = shell(bin + " gen --depth " + std::to_string(2 * seed) + " --bias 0.35 --seed " +
                                    std::to_string(seed) + " --randomize-orientation",
                                status);
        const bool same = status == 0 && io::serialize_space(io::parse_space(text)) == text;
        o.require(same, "gen round trip differs for seed " + std::to_string(seed));
        round_trips += same ? 1 : 0;
    }
    fs::remove_all(dir);
    o.detail = "verify reports " + std::string(a == b ? "identical" : "differ") + " (" + std::to_string(a.size()) +
               " bytes), " + std::to_string(round_trips) + "/5 gen round trips identical";
    return o;
}

}  // namespace

int main() {
    FrozenBounds bounds;
    try {
        bounds = load_bounds();
    } catch (const Error& e) {
        std::printf("FAIL cannot load frozen bounds: %s\n", e.what());
        return 1;
    }

    struct Criterion {
        int id;
        const char* name;
        double budget;  // seconds, 0 when no per-criterion limit applies
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "constant-exponent norm oracle", 2.0, constant_norm_oracle},
        {2, "modular/norm relation and sandwich", 0.0, modular_norm_relation},
        {3, "power identity", 0.0, power_identity},
        {4, "atomic decomposition, first category", 30.0, [&] { return atomic_first_category(bounds); }},
        {5, "atomic decomposition, Q and D", 0.0, [&] { return atomic_q_d(bounds); }},
        {6, "indicator estimates", 0.0, [&] { return indicator_estimates(bounds); }},
        {7, "embeddings and five-space equivalence", 0.0, [&] { return embeddings(bounds); }},
        {8, "proof-transform identities", 0.0, [&] { return transforms(bounds); }},
        {9, "predictable projection lemma", 0.0, [&] { return projection_lemma(bounds); }},
        {10, "Doob weak-type constant", 0.0, [&] { return doob(bounds); }},
        {11, "determinism and round trips", 0.0, determinism},
    };

    int failed = 0;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.failures.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget > 0.0 && secs > c.budget) {
            o.pass = false;
            o.failures.push_back("runtime " + num(secs) + " s exceeds " + num(c.budget) + " s");
        }
        std::printf("%s [%2d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        for (const auto& f : o.failures) std::printf("       %s\n", f.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of %zu criteria passed in %.1f s\n", static_cast<int>(criteria.size()) - failed, criteria.size(),
                total);
    return failed == 0 ? 0 : 1;
}
