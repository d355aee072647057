#include "varhardy/mart_ops.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "varhardy/errors.hpp"

namespace varhardy {

namespace {

constexpr double kMartingaleTolerance = 1e-10;

std::vector<double> copy_values(const RandomVariable& x) {
    return {x.values().begin(), x.values().end()};
}

// max over each P_n cell of h, broadcast back to outcomes.
std::vector<double> cell_sup(const FiltrationSpace& space, const RandomVariable& h, int n) {
    std::vector<double> out(h.size());
    for (const auto& cell : space.cells(n)) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t w : cell) m = std::max(m, h[w]);
        for (std::size_t w : cell) out[w] = m;
    }
    return out;
}

void require_class_p(const Exponent& p) {
    if (!p.in_class_P()) throw ExponentClassError("exponent is not in class P (0 < p- <= p+ < inf)");
}

}  // namespace

Martingale Martingale::from_levels(FiltrationSpace space, std::vector<RandomVariable> levels) {
    const int depth = space.depth();
    if (static_cast<int>(levels.size()) != depth + 1) {
        throw ShapeError("martingale needs " + std::to_string(depth + 1) + " levels, got " +
                         std::to_string(levels.size()));
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        space.check_size(levels[i].size(), "martingale level");
        if (!levels[i].is_finite()) {
            throw MartingaleError(static_cast<int>(i), "non-finite value");
        }
        scale = std::max(scale, levels[i].sup_abs());
    }
    const double tol = kMartingaleTolerance * (1.0 + scale);

    std::vector<RandomVariable> values;
    values.reserve(levels.size() + 1);
    values.push_back(RandomVariable::constant(space.outcome_count(), 0.0, -1));
    for (int n = 0; n <= depth; ++n) {
        RandomVariable fn(copy_values(levels[static_cast<std::size_t>(n)]), n);
        if (!space.is_measurable(fn, n, tol)) {
            throw MartingaleError(n, "f_n is not constant on the cells of P_n");
        }
        if (n >= 1) {
            const RandomVariable drift =
                conditional_expectation(space, subtract(fn, values.back()), n - 1);
            if (drift.sup_abs() > tol) {
                throw MartingaleError(n, "E_{n-1}(f_n - f_{n-1}) != 0 (max " +
                                             std::to_string(drift.sup_abs()) + ")");
            }
        }
        values.push_back(std::move(fn));
    }
    return Martingale(std::move(space), std::move(values));
}

Martingale Martingale::from_increments(FiltrationSpace space,
                                       const std::vector<RandomVariable>& increments) {
    std::vector<RandomVariable> levels;
    levels.reserve(increments.size());
    std::vector<double> running(space.outcome_count(), 0.0);
    for (const auto& d : increments) {
        space.check_size(d.size(), "increment");
        for (std::size_t w = 0; w < running.size(); ++w) running[w] += d[w];
        levels.emplace_back(running);
    }
    return from_levels(std::move(space), std::move(levels));
}

const RandomVariable& Martingale::at(int n) const {
    if (n < -1) throw LevelError("martingale index below -1");
    const auto idx = static_cast<std::size_t>(n + 1);
    return idx < values_.size() ? values_[idx] : values_.back();
}

RandomVariable Martingale::difference(int n) const {
    space_.check_level(n);
    if (n < 0) throw LevelError("d_n f is defined for n >= 0");
    return RandomVariable(copy_values(subtract(at(n), at(n - 1))), n);
}

bool Martingale::is_zero() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](const RandomVariable& x) { return x.is_zero(); });
}

double Martingale::scale() const {
    double m = 0.0;
    for (const auto& x : values_) m = std::max(m, x.sup_abs());
    return m;
}

Martingale martingale_from_terminal(const FiltrationSpace& space, const RandomVariable& x) {
    space.check_size(x.size(), "terminal value");
    if (!x.is_finite()) throw MeasurabilityError("terminal value is not finite");
    const double tol = 1e-12 * (1.0 + x.sup_abs());
    if (!space.is_measurable(x, space.depth(), tol)) {
        throw MeasurabilityError("terminal value is not P_N-measurable");
    }
    std::vector<RandomVariable> levels;
    for (int n = 0; n <= space.depth(); ++n) levels.push_back(conditional_expectation(space, x, n));
    return Martingale::from_levels(space, std::move(levels));
}

SquareFunctions square_functions(const Martingale& f) {
    const FiltrationSpace& space = f.space();
    const std::size_t size = space.outcome_count();
    SquareFunctions out;
    std::vector<double> fmax(size, 0.0);
    std::vector<double> sq(size, 0.0);
    std::vector<double> csq(size, 0.0);
    for (int n = 0; n <= f.depth(); ++n) {
        const RandomVariable d = f.difference(n);
        const RandomVariable d2 = multiply(d, d);
        const RandomVariable cond = conditional_expectation(space, d2, n - 1);
        const RandomVariable& fn = f.at(n);
        for (std::size_t w = 0; w < size; ++w) {
            fmax[w] = std::max(fmax[w], std::abs(fn[w]));
            sq[w] += d2[w];
            csq[w] += cond[w];
        }
        out.maximal.emplace_back(fmax, n);
        std::vector<double> S(size);
        std::vector<double> s(size);
        for (std::size_t w = 0; w < size; ++w) {
            S[w] = std::sqrt(sq[w]);
            s[w] = std::sqrt(csq[w]);
        }
        out.square.emplace_back(std::move(S), n);
        out.conditional_square.emplace_back(std::move(s), n - 1);
    }
    return out;
}

Martingale stop_martingale(const Martingale& f, const StoppingTime& tau) {
    const FiltrationSpace& space = f.space();
    const auto report = validate_stopping_time(space, tau);
    if (!report.pass) {
        throw InvalidStoppingTimeError("{tau <= n} is not P_n-measurable at n = " +
                                       std::to_string(report.first_failure()));
    }
    std::vector<RandomVariable> levels;
    for (int n = 0; n <= f.depth(); ++n) {
        std::vector<double> v(space.outcome_count());
        for (std::size_t w = 0; w < v.size(); ++w) {
            const int m = std::min(tau.values[w], n);
            v[w] = f.at(m)[w];
        }
        levels.emplace_back(std::move(v), n);
    }
    return Martingale::from_levels(space, std::move(levels));
}

const RandomVariable& PredictableControl::at(int n) const {
    if (n < -1) throw LevelError("control index below -1");
    const auto idx = static_cast<std::size_t>(n + 1);
    return idx < lambda.size() ? lambda[idx] : lambda.back();
}

namespace {

std::vector<RandomVariable> control_targets(const Martingale& f, ControlMode mode) {
    std::vector<RandomVariable> g;
    if (mode == ControlMode::Q) {
        g = square_functions(f).square;
    } else {
        for (int n = 0; n <= f.depth(); ++n) g.push_back(abs(f.at(n)));
    }
    return g;
}

}  // namespace

PredictableControl optimal_predictable_control(const Martingale& f, ControlMode mode) {
    const FiltrationSpace& space = f.space();
    const std::size_t size = space.outcome_count();
    const int depth = f.depth();
    const auto g = control_targets(f, mode);

    PredictableControl control;
    control.mode = mode;
    const auto g0 = g.front().values();
    const double start = *std::max_element(g0.begin(), g0.end());
    control.lambda.push_back(RandomVariable::constant(size, start, -1));
    for (int n = 0; n <= depth; ++n) {
        // g_{N+1} = g_N: the martingale is constant after the last level.
        const RandomVariable& next = g[static_cast<std::size_t>(std::min(n + 1, depth))];
        const auto sup = cell_sup(space, next, n);
        const RandomVariable& prev = control.lambda.back();
        std::vector<double> lam(size);
        for (std::size_t w = 0; w < size; ++w) lam[w] = std::max(prev[w], sup[w]);
        control.lambda.emplace_back(std::move(lam), n);
    }
    return control;
}

void check_control(const Martingale& f, const PredictableControl& lambda, double rel_tol) {
    const FiltrationSpace& space = f.space();
    const int depth = f.depth();
    if (static_cast<int>(lambda.lambda.size()) != depth + 2) {
        throw ControlMismatchError("control must carry lambda_{-1} .. lambda_N");
    }
    const auto g = control_targets(f, lambda.mode);
    for (int n = -1; n <= depth; ++n) {
        const RandomVariable& lam = lambda.at(n);
        space.check_size(lam.size(), "control level");
        const double tol = rel_tol * (1.0 + lam.sup_abs());
        if (!space.is_measurable(lam, n, tol)) {
            throw ControlMismatchError("lambda_" + std::to_string(n) + " is not P_n-measurable");
        }
        for (std::size_t w = 0; w < lam.size(); ++w) {
            if (lam[w] < 0.0) throw ControlMismatchError("control is negative");
            if (n >= 0 && lam[w] < lambda.at(n - 1)[w] - tol) {
                throw ControlMismatchError("control decreases at level " + std::to_string(n));
            }
        }
        if (n + 1 <= depth) {
            const RandomVariable& target = g[static_cast<std::size_t>(n + 1)];
            for (std::size_t w = 0; w < lam.size(); ++w) {
                if (target[w] > lam[w] + tol) {
                    throw ControlMismatchError(
                        std::string(lambda.mode == ControlMode::Q ? "S_n(f)" : "|f_n|") +
                        " exceeds lambda_{n-1} at n = " + std::to_string(n + 1));
                }
            }
        }
    }
}

const char* to_string(HardyKind kind) {
    switch (kind) {
        case HardyKind::Star: return "star";
        case HardyKind::S: return "S";
        case HardyKind::s: return "s";
        case HardyKind::Q: return "Q";
        case HardyKind::D: return "D";
    }
    return "?";
}

double HardyNormReport::get(HardyKind kind) const {
    switch (kind) {
        case HardyKind::Star: return h_star;
        case HardyKind::S: return h_S;
        case HardyKind::s: return h_s;
        case HardyKind::Q: return q_norm;
        case HardyKind::D: return d_norm;
    }
    return 0.0;
}

double hardy_norm(const Martingale& f, const Exponent& p, HardyKind which,
                  const NormSolverConfig& cfg) {
    require_class_p(p);
    const FiltrationSpace& space = f.space();
    switch (which) {
        case HardyKind::Star: return luxemburg_norm(space, square_functions(f).f_star(), p, cfg);
        case HardyKind::S: return luxemburg_norm(space, square_functions(f).S(), p, cfg);
        case HardyKind::s: return luxemburg_norm(space, square_functions(f).s(), p, cfg);
        case HardyKind::Q:
            return luxemburg_norm(space, optimal_predictable_control(f, ControlMode::Q).terminal(),
                                  p, cfg);
        case HardyKind::D:
            return luxemburg_norm(space, optimal_predictable_control(f, ControlMode::D).terminal(),
                                  p, cfg);
    }
    return 0.0;
}

HardyNormReport hardy_norms(const Martingale& f, const Exponent& p, const NormSolverConfig& cfg) {
    require_class_p(p);
    const FiltrationSpace& space = f.space();
    const auto sf = square_functions(f);
    HardyNormReport r;
    r.h_star = luxemburg_norm(space, sf.f_star(), p, cfg);
    r.h_S = luxemburg_norm(space, sf.S(), p, cfg);
    r.h_s = luxemburg_norm(space, sf.s(), p, cfg);
    r.q_norm =
        luxemburg_norm(space, optimal_predictable_control(f, ControlMode::Q).terminal(), p, cfg);
    r.d_norm =
        luxemburg_norm(space, optimal_predictable_control(f, ControlMode::D).terminal(), p, cfg);
    return r;
}

RegularityReport regularity_constant(const Martingale& f, double regular_cap) {
    const FiltrationSpace& space = f.space();
    RegularityReport report;
    for (int n = 0; n <= f.depth(); ++n) {
        const RandomVariable d = f.difference(n);
        const RandomVariable d2 = multiply(d, d);
        const RandomVariable cond = conditional_expectation(space, d2, n - 1);
        for (std::size_t w = 0; w < d2.size(); ++w) {
            if (cond[w] > 0.0) report.R_mart = std::max(report.R_mart, d2[w] / cond[w]);
        }
        const auto masses = space.cell_masses(n);
        const auto parents = space.parent_of(n);
        const auto parent_masses = space.cell_masses(n - 1);
        for (std::size_t c = 0; c < masses.size(); ++c) {
            report.R_filt = std::max(report.R_filt, parent_masses[parents[c]] / masses[c]);
        }
    }
    report.is_regular = report.R_filt <= regular_cap;
    return report;
}

double doob_weak_constant(const Martingale& f, const Exponent& p, const NormSolverConfig& cfg) {
    require_class_p(p);
    if (f.is_zero()) throw ZeroMartingaleError("Doob weak-type ratio of the zero martingale");
    const FiltrationSpace& space = f.space();
    const RandomVariable fstar = square_functions(f).f_star();
    std::set<double> jumps;
    for (double v : fstar.values()) {
        if (v > 0.0) jumps.insert(v);
    }
    // As lambda rises to a jump value v, {f* > lambda} = {f* >= v}.
    double numerator = 0.0;
    for (double v : jumps) {
        std::vector<double> chi(fstar.size());
        for (std::size_t w = 0; w < chi.size(); ++w) chi[w] = fstar[w] >= v ? 1.0 : 0.0;
        numerator = std::max(numerator, v * luxemburg_norm(space, RandomVariable(chi), p, cfg));
    }
    double denominator = 0.0;
    for (int n = 0; n <= f.depth(); ++n) {
        denominator = std::max(denominator, luxemburg_norm(space, f.at(n), p, cfg));
    }
    return numerator / denominator;
}

ChevalierTransform chevalier_transform(const Martingale& f) {
    const FiltrationSpace& space = f.space();
    const std::size_t size = space.outcome_count();
    const auto sf = square_functions(f);
    std::vector<RandomVariable> increments;
    for (int n = 0; n <= f.depth(); ++n) {
        const RandomVariable d = f.difference(n);
        const RandomVariable& prev = f.at(n - 1);
        std::vector<double> dg(size);
        for (std::size_t w = 0; w < size; ++w) dg[w] = 2.0 * prev[w] * d[w];
        increments.emplace_back(std::move(dg), n);
    }
    ChevalierTransform out{Martingale::from_increments(space, increments), 0.0, 0.0};
    for (int n = 0; n <= f.depth(); ++n) {
        const RandomVariable& fn = f.at(n);
        const RandomVariable& gn = out.g.at(n);
        const RandomVariable& Sn = sf.square[static_cast<std::size_t>(n)];
        const RandomVariable dg = out.g.difference(n);
        const RandomVariable d = f.difference(n);
        const RandomVariable& prev = f.at(n - 1);
        for (std::size_t w = 0; w < size; ++w) {
            out.identity_residual =
                std::max(out.identity_residual, std::abs(fn[w] * fn[w] - gn[w] - Sn[w] * Sn[w]));
            out.increment_residual =
                std::max(out.increment_residual, std::abs(dg[w] - 2.0 * prev[w] * d[w]));
        }
    }
    return out;
}

NormalizedTransform control_normalized_transform(const Martingale& f,
                                                 const PredictableControl& lambda) {
    if (lambda.mode != ControlMode::D) {
        throw ControlMismatchError("control-normalized transform needs a D-control");
    }
    check_control(f, lambda, 1e-10);
    const FiltrationSpace& space = f.space();
    const std::size_t size = space.outcome_count();
    std::vector<RandomVariable> increments;
    for (int n = 0; n <= f.depth(); ++n) {
        const RandomVariable d = f.difference(n);
        const RandomVariable& lam = lambda.at(n - 1);
        std::vector<double> dg(size);
        for (std::size_t w = 0; w < size; ++w) {
            dg[w] = lam[w] > 0.0 ? d[w] / std::sqrt(lam[w]) : 0.0;
        }
        increments.emplace_back(std::move(dg), n);
    }
    NormalizedTransform out{Martingale::from_increments(space, increments), 0.0, 0.0, 0.0};

    const auto sf = square_functions(f);
    const auto sg = square_functions(out.g);
    auto ratio = [](double num, double den) {
        if (den > 0.0) return num / den;
        return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    };
    for (int n = 0; n <= f.depth(); ++n) {
        const auto idx = static_cast<std::size_t>(n);
        const RandomVariable& lam = lambda.at(n - 1);
        const RandomVariable& gn = out.g.at(n);
        for (std::size_t w = 0; w < size; ++w) {
            out.bound_ratio =
                std::max(out.bound_ratio, ratio(std::abs(gn[w]), 2.0 * std::sqrt(lam[w])));
            const double s_f = sf.conditional_square[idx][w];
            const double s_g = sg.conditional_square[idx][w];
            const double S_f = sf.square[idx][w];
            const double S_g = sg.square[idx][w];
            out.transfer_s_ratio = std::max(out.transfer_s_ratio, ratio(s_f * s_f, lam[w] * s_g * s_g));
            out.transfer_S_ratio = std::max(out.transfer_S_ratio, ratio(S_f * S_f, lam[w] * S_g * S_g));
        }
    }
    return out;
}

RandomVariable predictable_projection_sup(const Martingale& f) {
    const FiltrationSpace& space = f.space();
    const auto sf = square_functions(f);
    std::vector<double> out(space.outcome_count(), 0.0);
    for (int n = 0; n <= f.depth(); ++n) {
        const RandomVariable proj =
            conditional_expectation(space, sf.square[static_cast<std::size_t>(n)], n - 1);
        for (std::size_t w = 0; w < out.size(); ++w) out[w] = std::max(out[w], proj[w]);
    }
    return RandomVariable(std::move(out));
}

}  // namespace varhardy
