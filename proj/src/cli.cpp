#include "varhardy/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "varhardy/atomic.hpp"
#include "varhardy/errors.hpp"
#include "varhardy/ineq_lab.hpp"
#include "varhardy/io.hpp"
#include "varhardy/random.hpp"

#ifndef VARHARDY_DEFAULT_BOUNDS
#define VARHARDY_DEFAULT_BOUNDS "data/frozen_bounds.json"
#endif

namespace varhardy::cli {

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

NormSolverConfig solver_config(const Command& cmd) {
    NormSolverConfig cfg;
    if (cmd.tol) {
        cfg.rel_tol = *cmd.tol;
    } else if (const char* env = std::getenv("VARHARDY_TOL"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0') throw UsageError(std::string("VARHARDY_TOL is not a number: ") + env);
        cfg.rel_tol = v;
    }
    try {
        cfg.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
    } else {
        io::write_file(path, text);
    }
}

FiltrationSpace load_space(const Command& cmd) {
    if (cmd.space_path.empty()) throw UsageError("--space is required");
    return io::parse_space(io::read_file(cmd.space_path));
}

Exponent load_exponent(const Command& cmd, const FiltrationSpace& space) {
    if (cmd.exponent_path.empty()) throw UsageError("--exponent is required");
    Exponent p = io::parse_exponent(io::read_file(cmd.exponent_path));
    space.check_size(p.size(), "exponent");
    return p;
}

HardyKind hardy_kind(const std::string& mode) {
    if (mode == "star") return HardyKind::Star;
    if (mode == "S") return HardyKind::S;
    if (mode == "s") return HardyKind::s;
    if (mode == "Q") return HardyKind::Q;
    if (mode == "D") return HardyKind::D;
    throw UsageError("unknown --mode '" + mode + "' (lp, star, S, s, Q, D)");
}

std::string g12(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

int do_gen(const Command& cmd, std::ostream& out) {
    if (cmd.depth < 0 || cmd.depth > kMaxDyadicDepth) {
        throw UsageError("--depth must be in [0, " + std::to_string(kMaxDyadicDepth) + "]");
    }
    const FiltrationSpace space =
        generate_dyadic_space(cmd.depth, cmd.bias, cmd.seed, cmd.randomize_orientation);
    emit(cmd.output_path, io::serialize_space(space), out);
    if (!cmd.exponent_out.empty()) {
        const Exponent p = sample_exponent(space, cmd.p_min, cmd.p_max, derive_seed(cmd.seed, 2, 0));
        io::write_file(cmd.exponent_out, io::serialize_exponent(p));
    }
    if (!cmd.martingale_out.empty()) {
        Generator g;
        try {
            g = generator_from_string(cmd.generator);
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
        const Martingale f = sample_martingale(space, g, cmd.scale, derive_seed(cmd.seed, 3, 0));
        io::write_file(cmd.martingale_out, io::serialize_martingale(f));
    }
    return 0;
}

int do_norm(const Command& cmd, std::ostream& out) {
    const FiltrationSpace space = load_space(cmd);
    const Exponent p = load_exponent(cmd, space);
    const NormSolverConfig cfg = solver_config(cmd);
    double value = 0.0;
    if (cmd.mode == "lp") {
        if (cmd.rv_path.empty()) throw UsageError("--rv is required for --mode lp");
        const RandomVariable u = io::parse_values(io::read_file(cmd.rv_path));
        space.check_size(u.size(), "random variable");
        value = luxemburg_norm(space, u, p, cfg);
    } else {
        const HardyKind kind = hardy_kind(cmd.mode);
        if (cmd.martingale_path.empty()) throw UsageError("--martingale is required for Hardy norms");
        const Martingale f = io::parse_martingale(space, io::read_file(cmd.martingale_path));
        value = hardy_norm(f, p, kind, cfg);
    }
    out << g12(value) << '\n';
    return 0;
}

int do_decompose(const Command& cmd, std::ostream& out) {
    const FiltrationSpace space = load_space(cmd);
    const Exponent p = load_exponent(cmd, space);
    const NormSolverConfig cfg = solver_config(cmd);
    if (cmd.martingale_path.empty()) throw UsageError("--martingale is required");
    const Martingale f = io::parse_martingale(space, io::read_file(cmd.martingale_path));
    const AtomCategory category = atom_category_from_int(cmd.category);
    const AtomicDecomposition dec = decompose(f, p, category, cfg);

    double residual = 0.0;
    for (int n = 0; n <= space.depth(); ++n) {
        const RandomVariable r = reconstruct(dec, space, n);
        for (std::size_t w = 0; w < r.size(); ++w) residual = std::max(residual, std::abs(r[w] - f.at(n)[w]));
    }
    const double tolerance = 1e-8 * (1.0 + f.scale());
    bool ok = residual <= tolerance;

    std::ostringstream summary;
    summary << "terms " << dec.terms.size() << '\n';
    for (const auto& term : dec.terms) {
        const AtomReport rep = validate_atom(space, term.atom, term.tau, p, category, cfg);
        ok = ok && rep.pass();
        summary << "k=" << term.k << " theta=" << g12(term.theta) << " size=" << g12(rep.size)
                << " bound=" << g12(rep.size_bound) << (rep.pass() ? " ok" : " FAIL") << '\n';
    }
    summary << "reconstruction_residual " << g12(residual) << '\n';
    summary << (ok ? "PASS" : "FAIL") << '\n';

    if (cmd.output_path.empty()) {
        out << io::serialize_decomposition(dec) << summary.str();
    } else {
        io::write_file(cmd.output_path, io::serialize_decomposition(dec));
        out << summary.str();
    }
    return ok ? 0 : 1;
}

TrialConfig trial_config(const Command& cmd) {
    TrialConfig cfg;
    cfg.seed = cmd.seed;
    cfg.trials = cmd.trials;
    cfg.suites = cmd.suites;
    cfg.jobs = cmd.jobs;
    if (cmd.exponent_min) cfg.exponent_range.first = *cmd.exponent_min;
    if (cmd.exponent_max) cfg.exponent_range.second = *cmd.exponent_max;
    cfg.solver = solver_config(cmd);
    try {
        cfg.validate();
    } catch (const RangeError& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

int do_verify(const Command& cmd, std::ostream& out) {
    const TrialConfig cfg = trial_config(cmd);
    // report an unknown suite even when the bounds file is missing too
    const auto known = suite_ids();
    for (const auto& id : cfg.suites) {
        if (std::find(known.begin(), known.end(), id) == known.end()) run_inequality_suite(cfg, {});
    }
    const std::string bounds_path = cmd.bounds_path.empty() ? VARHARDY_DEFAULT_BOUNDS : cmd.bounds_path;
    const FrozenBounds bounds = parse_bounds(io::read_file(bounds_path));
    const InequalityReport report = run_inequality_suite(cfg, bounds);

    if (!cmd.output_path.empty()) io::write_file(cmd.output_path, serialize_report(report));
    if (!cmd.csv_path.empty()) io::write_file(cmd.csv_path, report_csv(report));
    for (const auto& r : report.records) {
        out << (r.pass ? "PASS " : "FAIL ") << r.suite << '/' << r.id << " n=" << r.count
            << " max=" << g12(r.max_ratio)
            << " bound=" << (r.has_bound ? g12(r.frozen_bound) : std::string("none")) << '\n';
    }
    return report.pass() ? 0 : 1;
}

int do_calibrate(const Command& cmd, std::ostream& out) {
    const TrialConfig cfg = trial_config(cmd);
    if (cfg.trials < 100) throw UsageError("calibrate needs --trials >= 100");
    const FrozenBounds bounds = calibrate_regression_bounds(cfg);
    const std::string path = cmd.output_path.empty() ? VARHARDY_DEFAULT_BOUNDS : cmd.output_path;
    io::write_file(path, serialize_bounds(bounds, cfg));
    out << "wrote " << bounds.size() << " bounds to " << path << '\n';
    return 0;
}

}  // namespace

Command parse_command(const std::vector<std::string>& args) {
    Command cmd;
    CLI::App app("Variable-exponent martingale Hardy space toolkit", "varhardy");
    app.require_subcommand(1);

    double tol = 0.0;
    auto add_tol = [&](CLI::App* sub) {
        sub->add_option("--tol", tol, "relative tolerance of the norm solver")->check(CLI::PositiveNumber);
    };

    auto* gen = app.add_subcommand("gen", "generate a dyadic space (and optionally an exponent and a martingale)");
    gen->add_option("--depth", cmd.depth, "tree depth")->check(CLI::Range(0, kMaxDyadicDepth));
    gen->add_option("--bias", cmd.bias, "mass fraction of the first child")->check(CLI::Range(0.0, 1.0));
    gen->add_option("--seed", cmd.seed);
    gen->add_flag("--randomize-orientation", cmd.randomize_orientation);
    gen->add_option("-o,--output", cmd.output_path, "space file (stdout if omitted)");
    gen->add_option("--exponent-out", cmd.exponent_out);
    gen->add_option("--p-min", cmd.p_min);
    gen->add_option("--p-max", cmd.p_max);
    gen->add_option("--martingale-out", cmd.martingale_out);
    gen->add_option("--generator", cmd.generator, "rademacher|gaussian|predictable_multiplier");
    gen->add_option("--scale", cmd.scale);

    auto* norm = app.add_subcommand("norm", "print a Luxemburg or Hardy-space norm");
    norm->add_option("--space", cmd.space_path)->required();
    norm->add_option("--exponent", cmd.exponent_path)->required();
    norm->add_option("--rv", cmd.rv_path);
    norm->add_option("--martingale", cmd.martingale_path);
    norm->add_option("--mode", cmd.mode, "lp|star|S|s|Q|D");
    add_tol(norm);

    auto* dec = app.add_subcommand("decompose", "atomic decomposition of a martingale");
    dec->add_option("--space", cmd.space_path)->required();
    dec->add_option("--exponent", cmd.exponent_path)->required();
    dec->add_option("--martingale", cmd.martingale_path)->required();
    dec->add_option("--category", cmd.category, "1 (s), 2 (S / Q) or 3 (maximal / D)")->check(CLI::Range(1, 3));
    dec->add_option("-o,--output", cmd.output_path);
    add_tol(dec);

    std::string suites;
    auto add_run = [&](CLI::App* sub) {
        sub->add_option("--trials", cmd.trials)->check(CLI::PositiveNumber);
        sub->add_option("--seed", cmd.seed);
        sub->add_option("--jobs", cmd.jobs)->check(CLI::PositiveNumber);
        sub->add_option("--exponent-min", cmd.exponent_min);
        sub->add_option("--exponent-max", cmd.exponent_max);
        sub->add_option("-o,--output", cmd.output_path);
        add_tol(sub);
    };
    auto* verify = app.add_subcommand("verify", "run inequality suites against frozen bounds");
    verify->add_option("--suite", suites, "comma-separated suite ids (default: all)");
    verify->add_option("--bounds", cmd.bounds_path);
    verify->add_option("--csv", cmd.csv_path);
    add_run(verify);

    auto* calibrate = app.add_subcommand("calibrate", "measure all suites and freeze regression bounds");
    add_run(calibrate);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        std::ostringstream o;
        std::ostringstream ignored;
        app.exit(e, o, ignored);
        cmd.help = o.str();
        return cmd;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (gen->parsed()) cmd.verb = Verb::Gen;
    if (norm->parsed()) cmd.verb = Verb::Norm;
    if (dec->parsed()) cmd.verb = Verb::Decompose;
    if (verify->parsed()) cmd.verb = Verb::Verify;
    if (calibrate->parsed()) cmd.verb = Verb::Calibrate;

    for (auto* sub : {norm, dec, verify, calibrate}) {
        if (sub->parsed() && sub->count("--tol") > 0) cmd.tol = tol;
    }
    cmd.suites = split_list(suites);
    if (cmd.verb == Verb::Norm && cmd.mode == "lp" && cmd.rv_path.empty()) {
        throw UsageError("norm: --rv is required unless --mode names a Hardy norm");
    }
    if (cmd.verb == Verb::Norm && cmd.mode != "lp") {
        hardy_kind(cmd.mode);
        if (cmd.martingale_path.empty()) throw UsageError("norm: --martingale is required for --mode " + cmd.mode);
    }
    return cmd;
}

int execute(const Command& cmd, std::ostream& out, std::ostream& err) {
    if (cmd.help) {
        out << *cmd.help;
        return 0;
    }
    try {
        switch (cmd.verb) {
            case Verb::Gen: return do_gen(cmd, out);
            case Verb::Norm: return do_norm(cmd, out);
            case Verb::Decompose: return do_decompose(cmd, out);
            case Verb::Verify: return do_verify(cmd, out);
            case Verb::Calibrate: return do_calibrate(cmd, out);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return 2;
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << '\n';
        return 2;
    } catch (const UnknownSuiteError& e) {
        err << "UnknownSuiteError: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Command cmd;
    try {
        cmd = parse_command(args);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }
    return execute(cmd, out, err);
}

}  // namespace varhardy::cli
