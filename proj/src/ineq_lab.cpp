#include "varhardy/ineq_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <optional>
#include <thread>

#include <json.hpp>

#include "varhardy/atomic.hpp"
#include "varhardy/errors.hpp"
#include "varhardy/io.hpp"
#include "varhardy/random.hpp"

namespace varhardy {

namespace {

constexpr double kSkip = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Anchors are theorem names; several ids may share one.
constexpr std::string_view kQuasiTriangle = "quasi-triangle inequality";
constexpr std::string_view kEtaPower = "eta-power subadditivity";
constexpr std::string_view kPowerIdentity = "power identity";
constexpr std::string_view kHolder = "variable Holder inequality";
constexpr std::string_view kIndicatorHarmonic = "indicator norm via harmonic mean";
constexpr std::string_view kIndicatorConjugate = "indicator conjugate product";
constexpr std::string_view kIndicatorProduct = "indicator Holder product";
constexpr std::string_view kAveraging = "averaging operator bound";
constexpr std::string_view kDoob = "Doob weak type";
constexpr std::string_view kAtomicS = "H^s atomic decomposition coefficients";
constexpr std::string_view kAtomicQD = "Q/D atomic decomposition coefficients";
constexpr std::string_view kSmallHs = "small-exponent H^s embedding";
constexpr std::string_view kSquared = "squared square-function form";
constexpr std::string_view kSmallQD = "small-exponent Q/D embedding";
constexpr std::string_view kAtomMaximal = "atom maximal estimate";
constexpr std::string_view kStarByQ = "H* by Q";
constexpr std::string_view kByD = "H^s and H^S by D";
constexpr std::string_view kQD = "Q equivalent to D";
constexpr std::string_view kFiveSpace = "five-space equivalence";
constexpr std::string_view kProjection = "predictable projection lemma";
constexpr std::string_view kChevalier = "Chevalier transform";
constexpr std::string_view kNormalized = "control-normalized transform";
constexpr std::string_view kL2 = "L2 square function identity";

const std::vector<InequalitySpec> kRegistry = {
    {"varlp", "quasi_triangle", kQuasiTriangle, 0.0},
    {"varlp", "eta_triangle", kEtaPower, 1.0 + 1e-9},
    {"varlp", "power_identity", kPowerIdentity, 1.0 + 1e-8},
    {"varlp", "holder", kHolder, 0.0},
    {"varlp", "holder_constant", kHolder, 1.0 + 1e-9},

    {"indicator", "indicator_harmonic", kIndicatorHarmonic, 0.0},
    {"indicator", "indicator_harmonic_constant", kIndicatorHarmonic, 1.0 + 1e-9},
    {"indicator", "indicator_conjugate", kIndicatorConjugate, 0.0},
    {"indicator", "indicator_conjugate_constant", kIndicatorConjugate, 1.0 + 1e-9},
    {"indicator", "indicator_product", kIndicatorProduct, 0.0},
    {"indicator", "indicator_product_constant", kIndicatorProduct, 1.0 + 1e-9},
    {"indicator", "averaging", kAveraging, 0.0},

    {"doob", "doob_weak", kDoob, 0.0},

    {"atomic", "atomic_hs_lower", kAtomicS, 0.0},
    {"atomic", "atomic_hs_upper", kAtomicS, 0.0},
    {"atomic", "atomic_q_lower", kAtomicQD, 0.0},
    {"atomic", "atomic_q_upper", kAtomicQD, 0.0},
    {"atomic", "atomic_d_lower", kAtomicQD, 0.0},
    {"atomic", "atomic_d_upper", kAtomicQD, 0.0},

    {"small_exponent", "hstar_hs", kSmallHs, 0.0},
    {"small_exponent", "hS_hs", kSmallHs, 0.0},
    {"small_exponent", "S2_s2", kSquared, 0.0},
    {"small_exponent", "hstar_q_small", kSmallQD, 0.0},
    {"small_exponent", "hS_d_small", kSmallQD, 0.0},
    {"small_exponent", "atom_maximal", kAtomMaximal, 0.0},

    {"embedding", "hstar_q", kStarByQ, 0.0},
    {"embedding", "hs_d", kByD, 0.0},
    {"embedding", "hS_d", kByD, 0.0},
    {"embedding", "q_over_d", kQD, 0.0},
    {"embedding", "d_over_q", kQD, 0.0},

    {"regular", "five_space", kFiveSpace, 0.0},

    {"projection", "projection_q025", kProjection, 0.0},
    {"projection", "projection_q050", kProjection, 0.0},
    {"projection", "projection_q090", kProjection, 0.0},

    {"transforms", "chevalier_identity", kChevalier, 1.0 + 1e-10},
    {"transforms", "chevalier_increment", kChevalier, 1.0 + 1e-10},
    {"transforms", "normalized_bound", kNormalized, 1.0 + 1e-9},
    {"transforms", "transfer_s", kNormalized, 1.0 + 1e-9},
    {"transforms", "transfer_S", kNormalized, 1.0 + 1e-9},

    {"classical", "bgd_l2", kL2, 1.0 + 1e-9},
};

const std::vector<std::string_view> kManifest = {
    kQuasiTriangle, kEtaPower,  kPowerIdentity, kHolder,     kIndicatorHarmonic,
    kIndicatorConjugate, kIndicatorProduct, kAveraging, kDoob, kAtomicS,
    kAtomicQD,      kSmallHs,   kSquared,       kSmallQD,    kAtomMaximal,
    kStarByQ,       kByD,       kQD,            kFiveSpace,  kProjection,
    kChevalier,     kNormalized, kL2,
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Trial {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    Rng rng{0};
    FiltrationSpace space = FiltrationSpace::build({1.0}, {{{0}}});
    std::string notes;

    Trial(std::size_t i, std::uint64_t s) : index(i), seed(s), rng(s) {}

    void note(const std::string& key, const std::string& value) {
        notes += ' ';
        notes += key;
        notes += '=';
        notes += value;
    }

    [[nodiscard]] std::string describe() const {
        char buf[64];
        std::snprintf(buf, sizeof buf, "trial=%zu seed=0x%016llx", index,
                      static_cast<unsigned long long>(seed));
        return buf + notes;
    }
};

void new_space(Trial& t, const TrialConfig& cfg, std::optional<double> bias = std::nullopt) {
    const int depth = t.rng.uniform_int(cfg.depth_range.first, cfg.depth_range.second);
    const double b = bias ? *bias : t.rng.uniform(cfg.bias_range.first, cfg.bias_range.second);
    t.space = generate_dyadic_space(depth, b, t.rng.bits(), !bias.has_value());
    t.note("depth", std::to_string(depth));
    t.note("bias", fmt(b));
}

Exponent draw_exponent(Trial& t, const std::string& name, double lo, double hi) {
    double a = t.rng.uniform(lo, hi);
    double b = t.rng.uniform(lo, hi);
    if (a > b) std::swap(a, b);
    t.note(name, "[" + fmt(a) + "," + fmt(b) + "]");
    return sample_exponent(t.space, a, b, t.rng.bits());
}

Exponent draw_constant(Trial& t, const std::string& name, double lo, double hi) {
    const double c = t.rng.uniform(lo, hi);
    t.note(name, fmt(c));
    return Exponent::constant(t.space.outcome_count(), c);
}

RandomVariable draw_vector(Trial& t) {
    std::vector<double> u(t.space.outcome_count());
    for (double& x : u) x = t.rng.gaussian();
    return RandomVariable(std::move(u));
}

Martingale draw_martingale(Trial& t) {
    const auto gen = static_cast<Generator>(t.index % 3);
    t.note("gen", to_string(gen));
    return sample_martingale(t.space, gen, 1.0, t.rng.bits());
}

std::pair<double, double> at_least_one(std::pair<double, double> r) {
    const double lo = std::max(1.0, r.first);
    return {lo, std::max(lo, r.second)};
}

std::optional<std::pair<double, double>> at_most_one(std::pair<double, double> r) {
    const double hi = std::min(1.0, r.second);
    if (r.first > hi) return std::nullopt;
    return std::pair{r.first, hi};
}

double two_sided(double r) { return std::max(r, 1.0 / r); }

void put(std::vector<double>& out, std::size_t j, double v) {
    out[j] = std::isnan(v) ? kInf : v;
}

using SuiteFn = void (*)(const TrialConfig&, Trial&, std::vector<double>&);

void suite_varlp(const TrialConfig& cfg, Trial& t, std::vector<double>& out) {
    new_space(t, cfg);
    const auto [lo, hi] = cfg.exponent_range;
    const auto& sc = cfg.solver;
    const Exponent p = draw_exponent(t, "p", lo, hi);
    const RandomVariable u = draw_vector(t);
    const RandomVariable v = draw_vector(t);
    const double nu = luxemburg_norm(t.space, u, p, sc);
    const double nv = luxemburg_norm(t.space, v, p, sc);
    const double nuv = luxemburg_norm(t.space, add(u, v), p, sc);
    put(out, 0, nuv / (nu + nv));
    const double eta = std::min(1.0, p.p_minus());
    put(out, 1, std::pow(nuv, eta) / (std::pow(nu, eta) + std::pow(nv, eta)));

    const double s = t.rng.uniform(0.25, 4.0);
    t.note("s", fmt(s));
    put(out, 2, 1.0 + power_identity_defect(t.space, u, p, s, sc));

    const Exponent q = draw_exponent(t, "q", lo, hi);
    put(out, 3, holder_defect(t.space, u, v, p, q, harmonic_sum(p, q), sc));
    const Exponent pc = draw_constant(t, "pc", lo, hi);
    const Exponent qc = draw_constant(t, "qc", lo, hi);
    put(out, 4, holder_defect(t.space, u, v, pc, qc, harmonic_sum(pc, qc), sc));
}

void suite_indicator(const TrialConfig& cfg, Trial& t, std::vector<double>& out) {
    new_space(t, cfg);
    const auto [lo, hi] = cfg.exponent_range;
    const auto [lo1, hi1] = at_least_one(cfg.exponent_range);
    const auto& sc = cfg.solver;
    const FiltrationSpace& space = t.space;

    const Exponent p = draw_exponent(t, "p", lo, hi);
    const Exponent pc = draw_constant(t, "pc", lo, hi);
    const Exponent q = draw_exponent(t, "q", lo, hi);
    const Exponent qc = draw_constant(t, "qc", lo, hi);
    const Exponent r = harmonic_sum(p, q);
    const Exponent rc = harmonic_sum(pc, qc);
    const Exponent p1 = draw_exponent(t, "p1", lo1, hi1);
    const Exponent p1c = draw_constant(t, "p1c", lo1, hi1);
    const Exponent p1_conj = conjugate_exponent(p1);
    const Exponent p1c_conj = conjugate_exponent(p1c);
    const RandomVariable u = draw_vector(t);
    const double u_norm = luxemburg_norm(space, u, p1, sc);

    std::vector<double> worst(out.size(), 0.0);
    auto update = [&](std::size_t j, double v) { worst[j] = std::max(worst[j], std::isnan(v) ? kInf : v); };
    auto norm = [&](const RandomVariable& x, const Exponent& e) { return luxemburg_norm(space, x, e, sc); };

    for (int n = -1; n <= space.depth(); ++n) {
        for (const auto& cell : space.cells(n)) {
            const RandomVariable chi = indicator(space, cell);
            const double mass = event_measure(space, cell);
            const double np = norm(chi, p);
            const double npc = norm(chi, pc);
            update(0, two_sided(np / std::pow(mass, 1.0 / harmonic_mean(space, p, cell))));
            update(1, two_sided(npc / std::pow(mass, 1.0 / pc[0])));
            update(2, two_sided(norm(chi, p1) * norm(chi, p1_conj) / mass));
            update(3, two_sided(norm(chi, p1c) * norm(chi, p1c_conj) / mass));
            update(4, two_sided(norm(chi, r) / (np * norm(chi, q))));
            update(5, two_sided(norm(chi, rc) / (npc * norm(chi, qc))));
            update(6, norm(averaging_operator(space, u, cell), p1) / u_norm);
        }
    }
    out = worst;
}

void suite_doob(const TrialConfig& cfg, Trial& t, std::vector<double>& out) {
    new_space(t, cfg);
    const auto [lo1, hi1] = at_least_one(cfg.exponent_range);
    const Exponent p = draw_exponent(t, "p", lo1, hi1);
    const Martingale f = draw_martingale(t);
    if (f.is_zero()) return;
    put(out, 0, doob_weak_constant(f, p, cfg.solver));
}

void suite_atomic(const TrialConfig& cfg, Trial& t, std::vector<double>& out) {
    new_space(t, cfg);
    const Exponent p = draw_exponent(t, "p", cfg.exponent_range.first, cfg.exponent_range.second);
    const Martingale f = draw_martingale(t);
    if (f.is_zero()) return;
    for (int c = 1; c <= 3; ++c) {
        const auto dec = decompose(f, p, atom_category_from_int(c), cfg.solver);
        if (dec.empty()) continue;
        const auto bounds = coefficient_bounds(dec, f, p, cfg.solver);
        put(out, 2 * (c - 1), bounds.lower_ratio);
        put(out, 2 * (c - 1) + 1, bounds.upper_ratio);
    }
}

void suite_small_exponent(const TrialConfig& cfg, Trial& t, std::vector<double>& out) {
    new_space(t, cfg);
    const auto range = at_most_one(cfg.exponent_range);
    if (!range) return;
    const Exponent p = draw_exponent(t, "p", range->first, range->second);
    const Martingale f = draw_martingale(t);
    if (f.is_zero()) return;
    const auto& sc = cfg.solver;
    const HardyNormReport h = hardy_norms(f, p, sc);
    put(out, 0, h.h_star / h.h_s);
    put(out, 1, h.h_S / h.h_s);
    const auto sf = square_functions(f);
    put(out, 2, luxemburg_norm(t.space, pow_abs(sf.S(), 2.0), p, sc) /
                    luxemburg_norm(t.space, pow_abs(sf.s(), 2.0), p, sc));
    put(out, 3, h.h_star / h.q_norm);
    put(out, 4, h.h_S / h.d_norm);

    const auto dec = decompose(f, p, AtomCategory::Second, sc);
    if (dec.empty()) return;
    double worst = 0.0;
    for (const auto& term : dec.terms) {
        const Martingale a = martingale_from_terminal(t.space, term.atom);
        worst = std::max(worst, luxemburg_norm(t.space, square_functions(a).f_star(), p, sc));
    }
    put(out, 5, worst);
}

void suite_embedding(const TrialConfig& cfg, Trial& t, std::vector<double>& out) {
    new_space(t, cfg);
    const Exponent p = draw_exponent(t, "p", cfg.exponent_range.first, cfg.exponent_range.second);
    const Martingale f = draw_martingale(t);
    if (f.is_zero()) return;
    const HardyNormReport h = hardy_norms(f, p, cfg.solver);
    put(out, 0, h.h_star / h.q_norm);
    put(out, 1, h.h_s / h.d_norm);
    put(out, 2, h.h_S / h.d_norm);
    put(out, 3, h.q_norm / h.d_norm);
    put(out, 4, h.d_norm / h.q_norm);
}

void suite_regular(const TrialConfig& cfg, Trial& t, std::vector<double>& out) {
    new_space(t, cfg, 0.5);
    const Exponent p = draw_exponent(t, "p", cfg.exponent_range.first, cfg.exponent_range.second);
    const Martingale f = draw_martingale(t);
    if (f.is_zero()) return;
    const HardyNormReport h = hardy_norms(f, p, cfg.solver);
    const double all[] = {h.h_star, h.h_S, h.h_s, h.q_norm, h.d_norm};
    const auto [mn, mx] = std::minmax_element(std::begin(all), std::end(all));
    put(out, 0, *mx / *mn);
}

void suite_projection(const TrialConfig& cfg, Trial& t, std::vector<double>& out) {
    new_space(t, cfg);
    const auto [lo1, hi1] = at_least_one(cfg.exponent_range);
    const Exponent p = draw_exponent(t, "p", lo1, hi1);
    const Martingale f = draw_martingale(t);
    if (f.is_zero()) return;
    const double hS = hardy_norm(f, p, HardyKind::S, cfg.solver);
    const Martingale g = martingale_from_terminal(t.space, scale(f.terminal(), 1.0 / hS));
    const RandomVariable proj = predictable_projection_sup(g);
    const double qs[] = {0.25, 0.5, 0.9};
    for (std::size_t j = 0; j < 3; ++j) {
        put(out, j, luxemburg_norm(t.space, pow_abs(proj, qs[j]), p, cfg.solver));
    }
}

void suite_transforms(const TrialConfig& cfg, Trial& t, std::vector<double>& out) {
    new_space(t, cfg);
    const Martingale f = draw_martingale(t);
    if (f.is_zero()) return;
    const double unit = std::max(1.0, f.scale() * f.scale());
    const ChevalierTransform ct = chevalier_transform(f);
    put(out, 0, 1.0 + ct.identity_residual / unit);
    put(out, 1, 1.0 + ct.increment_residual / unit);
    const NormalizedTransform nt =
        control_normalized_transform(f, optimal_predictable_control(f, ControlMode::D));
    put(out, 2, nt.bound_ratio);
    put(out, 3, nt.transfer_s_ratio);
    put(out, 4, nt.transfer_S_ratio);
}

void suite_classical(const TrialConfig& cfg, Trial& t, std::vector<double>& out) {
    new_space(t, cfg);
    const Martingale f = draw_martingale(t);
    if (f.is_zero()) return;
    const Exponent two = Exponent::constant(t.space.outcome_count(), 2.0);
    const double S = hardy_norm(f, two, HardyKind::S, cfg.solver);
    put(out, 0, two_sided(S / luxemburg_norm(t.space, f.terminal(), two, cfg.solver)));
}

struct SuiteDef {
    std::string_view id;
    SuiteFn fn;
};

const SuiteDef kSuites[] = {
    {"varlp", suite_varlp},
    {"indicator", suite_indicator},
    {"doob", suite_doob},
    {"atomic", suite_atomic},
    {"small_exponent", suite_small_exponent},
    {"embedding", suite_embedding},
    {"regular", suite_regular},
    {"projection", suite_projection},
    {"transforms", suite_transforms},
    {"classical", suite_classical},
};

const SuiteDef& find_suite(std::string_view id) {
    for (const auto& s : kSuites) {
        if (s.id == id) return s;
    }
    std::string known;
    for (const auto& s : kSuites) {
        if (!known.empty()) known += ", ";
        known += s.id;
    }
    throw UnknownSuiteError("unknown suite '" + std::string(id) + "' (known: " + known + ")");
}

struct SuiteRun {
    std::vector<std::vector<double>> values;
    std::vector<std::string> descriptors;
};

SuiteRun run_trials(const TrialConfig& cfg, const SuiteDef& suite, std::size_t width) {
    const auto n = static_cast<std::size_t>(cfg.trials);
    SuiteRun run;
    run.values.assign(n, std::vector<double>(width, kSkip));
    run.descriptors.resize(n);
    std::vector<std::exception_ptr> errors(n);
    const std::uint64_t stream = fnv1a(suite.id);

    auto work = [&](std::size_t i) {
        Trial t(i, derive_seed(cfg.seed, stream, i));
        try {
            suite.fn(cfg, t, run.values[i]);
        } catch (const std::exception& e) {
            errors[i] = std::make_exception_ptr(
                TrialError("suite " + std::string(suite.id) + " " + t.describe() + ": " + e.what()));
        }
        run.descriptors[i] = t.describe();
    };

    const auto jobs = static_cast<std::size_t>(std::max(1, cfg.jobs));
    if (jobs == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < std::min(jobs, n); ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) work(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return run;
}

std::string escape(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

}  // namespace

void TrialConfig::validate() const {
    if (trials < 1) throw RangeError("trials must be >= 1");
    if (depth_range.first < 0 || depth_range.first > depth_range.second ||
        depth_range.second > kMaxDyadicDepth) {
        throw RangeError("depth range must satisfy 0 <= lo <= hi <= " + std::to_string(kMaxDyadicDepth));
    }
    if (!(bias_range.first > 0.0 && bias_range.first <= bias_range.second && bias_range.second < 1.0)) {
        throw RangeError("bias range must lie in (0, 1) with lo <= hi");
    }
    if (!(exponent_range.first > 0.0 && exponent_range.first <= exponent_range.second &&
          exponent_range.second <= 64.0)) {
        throw RangeError("exponent range must lie in (0, 64] with lo <= hi");
    }
    if (jobs < 1) throw RangeError("jobs must be >= 1");
    solver.validate();
}

Exponent sample_exponent(const FiltrationSpace& space, double p_min, double p_max,
                         std::uint64_t seed) {
    if (!(p_min > 0.0 && p_min <= p_max && std::isfinite(p_max))) {
        throw RangeError("exponent range needs 0 < p_min <= p_max < inf, got [" + fmt(p_min) + ", " +
                         fmt(p_max) + "]");
    }
    Rng rng(seed);
    std::vector<double> values(space.outcome_count());
    for (const auto& cell : space.cells(space.depth())) {
        const double v = rng.uniform(p_min, p_max);
        for (std::size_t w : cell) values[w] = v;
    }
    return Exponent(std::move(values));
}

Generator generator_from_string(std::string_view name) {
    if (name == "rademacher") return Generator::Rademacher;
    if (name == "gaussian") return Generator::Gaussian;
    if (name == "predictable_multiplier") return Generator::PredictableMultiplier;
    throw DomainError("unknown martingale generator '" + std::string(name) + "'");
}

const char* to_string(Generator g) {
    switch (g) {
        case Generator::Rademacher: return "rademacher";
        case Generator::Gaussian: return "gaussian";
        case Generator::PredictableMultiplier: return "predictable_multiplier";
    }
    return "?";
}

Martingale sample_martingale(const FiltrationSpace& space, Generator generator, double scale,
                             std::uint64_t seed) {
    Rng rng(seed);
    std::vector<RandomVariable> increments;
    for (int n = 0; n <= space.depth(); ++n) {
        const auto& cells = space.cells(n);
        const auto masses = space.cell_masses(n);
        const std::size_t parents = n == 0 ? 1 : space.cells(n - 1).size();
        auto parent = [&](std::size_t c) { return n == 0 ? std::size_t{0} : space.parent_of(n)[c]; };

        std::vector<bool> sign(parents);
        std::vector<double> multiplier(parents, scale);
        for (std::size_t a = 0; a < parents; ++a) {
            sign[a] = rng.coin();
            if (generator == Generator::PredictableMultiplier) multiplier[a] = scale * rng.uniform(0.25, 2.0);
        }

        std::vector<double> value(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::size_t a = parent(c);
            if (generator == Generator::Gaussian) {
                value[c] = scale * rng.gaussian();
            } else {
                value[c] = sign[a] ? multiplier[a] : -multiplier[a];
                sign[a] = !sign[a];
            }
        }

        std::vector<double> sum(parents, 0.0);
        std::vector<double> mass(parents, 0.0);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            sum[parent(c)] += masses[c] * value[c];
            mass[parent(c)] += masses[c];
        }
        for (std::size_t c = 0; c < cells.size(); ++c) value[c] -= sum[parent(c)] / mass[parent(c)];

        const auto cell_of = space.cell_of(n);
        std::vector<double> d(space.outcome_count());
        for (std::size_t w = 0; w < d.size(); ++w) d[w] = value[cell_of[w]];
        increments.emplace_back(std::move(d), n);
    }
    return Martingale::from_increments(space, increments);
}

const std::vector<InequalitySpec>& inequality_registry() { return kRegistry; }

std::vector<std::string> suite_ids() {
    std::vector<std::string> ids;
    for (const auto& s : kSuites) ids.emplace_back(s.id);
    return ids;
}

const std::vector<std::string_view>& anchor_manifest() { return kManifest; }

bool InequalityReport::pass() const {
    return std::all_of(records.begin(), records.end(), [](const auto& r) { return r.pass; });
}

InequalityReport run_inequality_suite(const TrialConfig& cfg, const FrozenBounds& bounds) {
    cfg.validate();
    const std::vector<std::string> ids = cfg.suites.empty() ? suite_ids() : cfg.suites;
    for (const auto& id : ids) find_suite(id);

    InequalityReport report;
    report.seed = cfg.seed;
    report.trials = cfg.trials;
    for (const auto& id : ids) {
        const SuiteDef& suite = find_suite(id);
        std::vector<const InequalitySpec*> specs;
        for (const auto& spec : kRegistry) {
            if (spec.suite == suite.id) specs.push_back(&spec);
        }
        const SuiteRun run = run_trials(cfg, suite, specs.size());

        for (std::size_t j = 0; j < specs.size(); ++j) {
            InequalityRecord rec;
            rec.suite = suite.id;
            rec.id = specs[j]->id;
            rec.anchor = specs[j]->anchor;
            for (std::size_t i = 0; i < run.values.size(); ++i) {
                const double v = run.values[i][j];
                if (std::isnan(v)) continue;
                if (rec.count == 0 || v > rec.max_ratio) {
                    rec.max_ratio = v;
                    rec.argmax = run.descriptors[i];
                }
                ++rec.count;
            }
            double margin = kRegressionMargin;
            if (specs[j]->exact_bound > 0.0) {
                rec.frozen_bound = specs[j]->exact_bound;
                rec.has_bound = true;
                margin = 1.0;
            } else if (const auto it = bounds.find(rec.id); it != bounds.end()) {
                rec.frozen_bound = it->second;
                rec.has_bound = true;
            }
            rec.pass = rec.count == 0 || (rec.has_bound && rec.max_ratio <= rec.frozen_bound * margin);
            report.records.push_back(std::move(rec));
        }
    }
    return report;
}

FrozenBounds calibrate_regression_bounds(const TrialConfig& cfg) {
    if (cfg.trials < 100) throw RangeError("calibration needs at least 100 trials");
    TrialConfig all = cfg;
    all.suites.clear();
    const InequalityReport report = run_inequality_suite(all, {});
    FrozenBounds bounds;
    for (const auto& rec : report.records) {
        const auto& spec = *std::find_if(kRegistry.begin(), kRegistry.end(),
                                         [&](const auto& s) { return s.id == rec.id; });
        if (spec.exact_bound > 0.0) {
            bounds[rec.id] = spec.exact_bound;
        } else if (rec.count > 0) {
            bounds[rec.id] = rec.max_ratio * kCalibrationMargin;
        }
    }
    return bounds;
}

std::string serialize_report(const InequalityReport& report) {
    std::string out = "{\"seed\":" + std::to_string(report.seed);
    out += ",\"trials\":" + std::to_string(report.trials);
    out += ",\"pass\":";
    out += report.pass() ? "true" : "false";
    out += ",\"records\":[";
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        const auto& r = report.records[i];
        if (i > 0) out += ',';
        out += "{\"suite\":" + escape(r.suite);
        out += ",\"inequality\":" + escape(r.id);
        out += ",\"anchor\":" + escape(r.anchor);
        out += ",\"count\":" + std::to_string(r.count);
        out += ",\"max_ratio\":" + io::format_number(r.max_ratio);
        out += ",\"argmax\":" + escape(r.argmax);
        out += ",\"frozen_bound\":" + (r.has_bound ? io::format_number(r.frozen_bound) : "null");
        out += ",\"pass\":";
        out += r.pass ? "true" : "false";
        out += '}';
    }
    out += "]}\n";
    return out;
}

std::string report_csv(const InequalityReport& report) {
    std::string out = "suite,inequality,trials,max_ratio,frozen_bound,pass\n";
    auto num = [](double v) {
        if (std::isinf(v)) return std::string("inf");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& r : report.records) {
        out += r.suite + ',' + r.id + ',' + std::to_string(r.count) + ',' + num(r.max_ratio) + ',';
        if (r.has_bound) out += num(r.frozen_bound);
        out += r.pass ? ",true\n" : ",false\n";
    }
    return out;
}

std::string serialize_bounds(const FrozenBounds& bounds, const TrialConfig& cfg) {
    using io::format_number;
    std::string out = "{\"version\":1";
    out += ",\"seed\":" + std::to_string(cfg.seed);
    out += ",\"trials\":" + std::to_string(cfg.trials);
    out += ",\"depth_range\":[" + std::to_string(cfg.depth_range.first) + "," +
           std::to_string(cfg.depth_range.second) + "]";
    out += ",\"bias_range\":[" + format_number(cfg.bias_range.first) + "," +
           format_number(cfg.bias_range.second) + "]";
    out += ",\"exponent_range\":[" + format_number(cfg.exponent_range.first) + "," +
           format_number(cfg.exponent_range.second) + "]";
    out += ",\"margin\":" + format_number(kCalibrationMargin);
    out += ",\"bounds\":{";
    bool first = true;
    for (const auto& [id, value] : bounds) {
        if (!first) out += ',';
        first = false;
        out += escape(id) + ":" + format_number(value);
    }
    out += "}}\n";
    return out;
}

FrozenBounds parse_bounds(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("malformed bounds file: ") + e.what());
    }
    if (!j.is_object() || !j.contains("bounds") || !j.at("bounds").is_object()) {
        throw FormatError("bounds file needs a 'bounds' object");
    }
    FrozenBounds out;
    for (const auto& [id, value] : j.at("bounds").items()) {
        if (value.is_number()) {
            out[id] = value.get<double>();
        } else if (value.is_string() && value.get<std::string>() == "inf") {
            out[id] = kInf;
        } else {
            throw FormatError("bound for '" + id + "' is not a number");
        }
    }
    return out;
}

}  // namespace varhardy
