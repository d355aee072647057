#include "varhardy/atomic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "varhardy/errors.hpp"

namespace varhardy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// T_{-1}, T_0, ..., T_N for the category.
std::vector<RandomVariable> threshold_process(const Martingale& f, AtomCategory category) {
    std::vector<RandomVariable> t;
    if (category == AtomCategory::First) {
        const auto sf = square_functions(f);
        const auto& s = sf.conditional_square;  // s_0 .. s_N
        for (int n = -1; n <= f.depth(); ++n) {
            t.push_back(s[static_cast<std::size_t>(std::min(n + 1, f.depth()))]);
        }
    } else {
        const auto mode = category == AtomCategory::Second ? ControlMode::Q : ControlMode::D;
        t = optimal_predictable_control(f, mode).lambda;
    }
    return t;
}

StoppingTime first_exceedance(const std::vector<RandomVariable>& t, double level) {
    const std::size_t size = t.front().size();
    StoppingTime tau = StoppingTime::constant(size, StoppingTime::kNever);
    for (std::size_t w = 0; w < size; ++w) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i][w] > level) {
                tau.values[w] = static_cast<int>(i) - 1;
                break;
            }
        }
    }
    return tau;
}

std::vector<double> stopped_terminal(const Martingale& f, const StoppingTime& tau) {
    std::vector<double> out(f.space().outcome_count());
    for (std::size_t w = 0; w < out.size(); ++w) {
        out[w] = f.at(std::min(tau.values[w], f.depth()))[w];
    }
    return out;
}

RandomVariable size_function(const Martingale& a, AtomCategory category) {
    const auto sf = square_functions(a);
    switch (category) {
        case AtomCategory::First: return sf.s();
        case AtomCategory::Second: return sf.S();
        case AtomCategory::Third: return sf.f_star();
    }
    return sf.s();
}

}  // namespace

AtomCategory atom_category_from_int(int category) {
    if (category < 1 || category > 3) {
        throw DomainError("atom category must be 1, 2 or 3, got " + std::to_string(category));
    }
    return static_cast<AtomCategory>(category);
}

HardyKind category_norm_kind(AtomCategory category) {
    switch (category) {
        case AtomCategory::First: return HardyKind::s;
        case AtomCategory::Second: return HardyKind::Q;
        case AtomCategory::Third: return HardyKind::D;
    }
    return HardyKind::s;
}

AtomicDecomposition decompose(const Martingale& f, const Exponent& p, AtomCategory category,
                              const NormSolverConfig& cfg) {
    if (!p.in_class_P()) throw ExponentClassError("decomposition needs p in class P");
    const FiltrationSpace& space = f.space();
    const auto t = threshold_process(f, category);

    AtomicDecomposition dec;
    dec.category = category;
    dec.threshold = RandomVariable(
        std::vector<double>(t.back().values().begin(), t.back().values().end()));

    double lo = kInf;
    double hi = 0.0;
    for (const auto& tn : t) {
        for (double v : tn.values()) {
            if (v > 0.0) lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi == 0.0) return dec;

    // Below k_min every tau_k equals the first time T > 0; above k_max, A_k is empty.
    dec.k_min = static_cast<int>(std::floor(std::log2(lo))) - 1;
    dec.k_max = static_cast<int>(std::ceil(std::log2(hi)));

    StoppingTime lower = first_exceedance(t, std::ldexp(1.0, dec.k_min));
    std::vector<double> lower_terminal = stopped_terminal(f, lower);
    for (int k = dec.k_min; k <= dec.k_max; ++k) {
        StoppingTime upper = first_exceedance(t, std::ldexp(1.0, k + 1));
        std::vector<double> upper_terminal = stopped_terminal(f, upper);

        std::vector<std::size_t> event;
        for (std::size_t w = 0; w < lower.values.size(); ++w) {
            if (lower.values[w] != StoppingTime::kNever) event.push_back(w);
        }
        std::vector<double> diff(upper_terminal.size());
        bool nonzero = false;
        for (std::size_t w = 0; w < diff.size(); ++w) {
            diff[w] = upper_terminal[w] - lower_terminal[w];
            nonzero = nonzero || diff[w] != 0.0;
        }
        if (!event.empty() && nonzero) {
            const double theta =
                3.0 * std::ldexp(1.0, k) * luxemburg_norm(space, indicator(space, event), p, cfg);
            for (double& v : diff) v /= theta;
            dec.terms.push_back(AtomicTerm{k, lower, theta, RandomVariable(std::move(diff))});
        }
        lower = std::move(upper);
        lower_terminal = std::move(upper_terminal);
    }
    return dec;
}

AtomReport validate_atom(const FiltrationSpace& space, const RandomVariable& atom,
                         const StoppingTime& tau, const Exponent& p, AtomCategory category,
                         const NormSolverConfig& cfg) {
    AtomReport report;
    report.tau_valid = validate_stopping_time(space, tau).pass;
    const Martingale a = martingale_from_terminal(space, atom);

    const double scale = std::max(1.0, atom.sup_abs());
    for (int n = 0; n <= space.depth(); ++n) {
        const RandomVariable& an = a.at(n);
        for (std::size_t w = 0; w < an.size(); ++w) {
            if (n <= tau.values[w]) {
                report.vanishing_residual =
                    std::max(report.vanishing_residual, std::abs(an[w]) / scale);
            }
        }
    }
    report.vanishes_before_tau = report.vanishing_residual <= 1e-9;

    report.size = size_function(a, category).sup_abs();
    std::vector<std::size_t> event;
    for (std::size_t w = 0; w < tau.values.size(); ++w) {
        if (tau.values[w] != StoppingTime::kNever) event.push_back(w);
    }
    if (event.empty()) {
        report.size_bound = kInf;
    } else {
        report.size_bound = 1.0 / luxemburg_norm(space, indicator(space, event), p, cfg);
    }
    report.size_ok = report.size <= report.size_bound * (1.0 + 1e-9) + 1e-300;

    if (category == AtomCategory::First) {
        report.hs_norm = hardy_norm(a, p, HardyKind::s, cfg);
        report.hs_ok = report.hs_norm <= 1.0 + 1e-9;
    }
    return report;
}

RandomVariable reconstruct(const AtomicDecomposition& dec, const FiltrationSpace& space, int n) {
    space.check_level(n);
    std::vector<double> out(space.outcome_count(), 0.0);
    for (const auto& term : dec.terms) {
        const RandomVariable en = conditional_expectation(space, term.atom, n);
        for (std::size_t w = 0; w < out.size(); ++w) out[w] += term.theta * en[w];
    }
    return RandomVariable(std::move(out), n);
}

CoefficientBounds coefficient_bounds(const AtomicDecomposition& dec, const Martingale& f,
                                     const Exponent& p, const NormSolverConfig& cfg) {
    if (dec.empty()) throw EmptyDecompositionError("coefficient bounds of an empty decomposition");
    const double norm = hardy_norm(f, p, category_norm_kind(dec.category), cfg);
    double sum_plus = 0.0;
    double sum_minus = 0.0;
    for (const auto& term : dec.terms) {
        sum_plus += std::pow(term.theta, p.p_plus());
        sum_minus += std::pow(term.theta, p.p_minus());
    }
    CoefficientBounds out;
    out.lower_ratio = std::pow(sum_plus, 1.0 / p.p_plus()) / norm;
    out.upper_ratio = norm / std::pow(sum_minus, 1.0 / p.p_minus());
    return out;
}

std::vector<TailWindow> tail_convergence_profile(const AtomicDecomposition& dec,
                                                 const Martingale& f, const Exponent& p,
                                                 const NormSolverConfig& cfg) {
    if (dec.empty()) throw EmptyDecompositionError("tail profile of an empty decomposition");
    const FiltrationSpace& space = f.space();
    const HardyKind kind = category_norm_kind(dec.category);
    const RandomVariable& terminal = f.terminal();

    std::vector<TailWindow> profile;
    profile.push_back(TailWindow{dec.k_max + 1, dec.k_max, hardy_norm(f, p, kind, cfg)});
    for (int j = dec.k_max; j >= dec.k_min; --j) {
        std::vector<double> residual(terminal.values().begin(), terminal.values().end());
        for (int m = j; m <= dec.k_max; ++m) {
            for (const auto& term : dec.terms) {
                if (term.k != m) continue;
                for (std::size_t w = 0; w < residual.size(); ++w) {
                    residual[w] -= term.theta * term.atom[w];
                }
            }
            const Martingale r = martingale_from_terminal(space, RandomVariable(residual));
            profile.push_back(TailWindow{j, m, hardy_norm(r, p, kind, cfg)});
        }
    }
    return profile;
}

double tail_profile_max_increase(const std::vector<TailWindow>& profile) {
    if (profile.empty()) return 0.0;
    std::map<std::pair<int, int>, double> by_window;
    double reference = 0.0;
    const TailWindow* empty = nullptr;
    for (const auto& w : profile) {
        if (w.empty()) {
            empty = &w;
        } else {
            by_window[{w.j, w.m}] = w.residual;
        }
        reference = std::max(reference, w.residual);
    }
    if (reference == 0.0) return 0.0;
    double worst = -kInf;
    for (const auto& [key, residual] : by_window) {
        const auto [j, m] = key;
        if (j == m && empty != nullptr) {
            worst = std::max(worst, (residual - empty->residual) / reference);
        }
        for (const auto& wider : {std::pair{j - 1, m}, std::pair{j, m + 1}}) {
            const auto it = by_window.find(wider);
            if (it != by_window.end()) worst = std::max(worst, (it->second - residual) / reference);
        }
    }
    return worst == -kInf ? 0.0 : worst;
}

RandomVariable gauge_function(const AtomicDecomposition& dec) {
    const RandomVariable& t = dec.threshold;
    std::vector<double> g(t.size(), 0.0);
    if (dec.k_min > dec.k_max) return RandomVariable(std::move(g));
    for (std::size_t w = 0; w < g.size(); ++w) {
        if (!(t[w] > 0.0)) continue;
        // sum_{k < k_min} 3 * 2^k = 3 * 2^{k_min}; A_k = {T > 0} there.
        double acc = 3.0 * std::ldexp(1.0, dec.k_min);
        for (int k = dec.k_min; k <= dec.k_max; ++k) {
            if (t[w] > std::ldexp(1.0, k)) acc += 3.0 * std::ldexp(1.0, k);
        }
        g[w] = acc;
    }
    return RandomVariable(std::move(g));
}

}  // namespace varhardy
