#include "varhardy/varlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "varhardy/errors.hpp"

namespace varhardy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double reciprocal(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

std::vector<bool> mask_of(const FiltrationSpace& space, std::span<const std::size_t> event) {
    std::vector<bool> mask(space.outcome_count(), false);
    for (std::size_t w : event) {
        if (w >= mask.size()) {
            throw UnknownOutcomeError("outcome " + std::to_string(w) + " is not in the space");
        }
        mask[w] = true;
    }
    return mask;
}

// Modular of u / gamma, skipping zero entries (0^p = 0).
double scaled_modular(std::span<const double> weights, std::span<const double> u,
                      const Exponent& p, double gamma) {
    double finite_part = 0.0;
    double sup_part = 0.0;
    for (std::size_t w = 0; w < u.size(); ++w) {
        const double a = std::abs(u[w]);
        if (a == 0.0) continue;
        const double x = a / gamma;
        const double pw = p[w];
        if (std::isinf(pw)) {
            sup_part = std::max(sup_part, x);
        } else {
            finite_part += weights[w] * std::pow(x, pw);
        }
    }
    return finite_part + sup_part;
}

}  // namespace

Exponent::Exponent(std::vector<double> values) : Exponent(RandomVariable(std::move(values))) {}

Exponent::Exponent(RandomVariable values) : p_(std::move(values)) {
    if (p_.size() == 0) throw DomainError("exponent has no values");
    p_minus_ = kInf;
    p_plus_ = -kInf;
    bool all_finite = true;
    for (double v : p_.values()) {
        if (!(v > 0.0)) throw DomainError("exponent values must be positive");
        p_minus_ = std::min(p_minus_, v);
        if (std::isinf(v)) {
            all_finite = false;
        } else {
            p_plus_ = std::max(p_plus_, v);
        }
    }
    if (p_plus_ < 0.0) p_plus_ = kInf;
    in_class_P_ = all_finite && p_minus_ > 0.0;
}

bool Exponent::is_constant() const noexcept {
    const auto v = p_.values();
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

Exponent Exponent::scaled(double s) const {
    if (!(s > 0.0)) throw DomainError("exponent scale must be positive");
    std::vector<double> out(p_.values().begin(), p_.values().end());
    for (double& v : out) v *= s;
    return Exponent(RandomVariable(std::move(out), p_.level()));
}

void NormSolverConfig::validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-6)) throw DomainError("rel_tol must lie in (0, 1e-6]");
    if (max_iter < 16) throw DomainError("max_iter must be at least 16");
    if (!(bracket_growth > 1.0)) throw DomainError("bracket_growth must exceed 1");
}

double modular(const FiltrationSpace& space, const RandomVariable& u, const Exponent& p) {
    space.check_size(u.size(), "random variable");
    space.check_size(p.size(), "exponent");
    if (!u.is_finite()) throw NonFiniteError("modular of a non-finite variable");
    return scaled_modular(space.weights(), u.values(), p, 1.0);
}

double luxemburg_norm(const FiltrationSpace& space, const RandomVariable& u, const Exponent& p,
                      const NormSolverConfig& cfg) {
    cfg.validate();
    space.check_size(u.size(), "random variable");
    space.check_size(p.size(), "exponent");
    if (!u.is_finite()) throw NonFiniteError("norm of a non-finite variable");
    if (u.is_zero()) return 0.0;

    const auto weights = space.weights();
    const auto values = u.values();
    int evaluations = 0;
    auto rho = [&](double gamma) {
        if (++evaluations > cfg.max_iter) {
            throw ConvergenceError("Luxemburg norm did not converge within " +
                                   std::to_string(cfg.max_iter) + " modular evaluations");
        }
        return scaled_modular(weights, values, p, gamma);
    };

    // Invariant: rho(u / lo) > 1 >= rho(u / hi). The step factor is squared
    // after each failed probe so extreme magnitudes are reached quickly.
    double lo = 1.0;
    double hi = 1.0;
    double factor = cfg.bracket_growth;
    if (rho(1.0) > 1.0) {
        for (;;) {
            hi = lo * factor;
            if (rho(hi) <= 1.0) break;
            lo = hi;
            factor *= factor;
        }
    } else {
        for (;;) {
            lo = hi / factor;
            if (rho(lo) > 1.0) break;
            hi = lo;
            factor *= factor;
        }
    }

    while (hi - lo > cfg.rel_tol * hi) {
        // Geometric midpoint while the bracket spans orders of magnitude.
        const double mid = (hi > 4.0 * lo) ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (rho(mid) > 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Exponent conjugate_exponent(const Exponent& p) {
    std::vector<double> out(p.size());
    for (std::size_t w = 0; w < p.size(); ++w) {
        const double v = p[w];
        if (v < 1.0) throw DomainError("conjugate exponent needs p >= 1");
        if (v == 1.0) {
            out[w] = kInf;
        } else if (std::isinf(v)) {
            out[w] = 1.0;
        } else {
            out[w] = v / (v - 1.0);
        }
    }
    return Exponent(RandomVariable(std::move(out), p.values().level()));
}

Exponent harmonic_sum(const Exponent& p, const Exponent& q) {
    if (p.size() != q.size()) throw ShapeError("exponent sizes differ");
    std::vector<double> out(p.size());
    for (std::size_t w = 0; w < p.size(); ++w) {
        const double inv = reciprocal(p[w]) + reciprocal(q[w]);
        out[w] = inv == 0.0 ? kInf : 1.0 / inv;
    }
    return Exponent(std::move(out));
}

double harmonic_mean(const FiltrationSpace& space, const Exponent& p,
                     std::span<const std::size_t> event) {
    space.check_size(p.size(), "exponent");
    const auto mask = mask_of(space, event);
    const auto weights = space.weights();
    double mass = 0.0;
    double inverse = 0.0;
    for (std::size_t w = 0; w < mask.size(); ++w) {
        if (!mask[w]) continue;
        mass += weights[w];
        inverse += weights[w] * reciprocal(p[w]);
    }
    if (mass == 0.0) throw EmptyEventError("harmonic mean over an empty event");
    return inverse == 0.0 ? kInf : mass / inverse;
}

RandomVariable averaging_operator(const FiltrationSpace& space, const RandomVariable& u,
                                  std::span<const std::size_t> event) {
    space.check_size(u.size(), "random variable");
    if (!u.is_finite()) throw NonFiniteError("averaging a non-finite variable");
    const auto mask = mask_of(space, event);
    const auto weights = space.weights();
    double mass = 0.0;
    double acc = 0.0;
    for (std::size_t w = 0; w < mask.size(); ++w) {
        if (!mask[w]) continue;
        mass += weights[w];
        acc += weights[w] * u[w];
    }
    if (mass == 0.0) throw EmptyEventError("averaging over an empty event");
    const double mean = acc / mass;
    std::vector<double> out(mask.size(), 0.0);
    for (std::size_t w = 0; w < mask.size(); ++w) {
        if (mask[w]) out[w] = mean;
    }
    return RandomVariable(std::move(out));
}

double indicator_norm_ratio(const FiltrationSpace& space, const Exponent& p,
                            std::span<const std::size_t> event, const NormSolverConfig& cfg) {
    if (!(p.p_minus() > 0.0)) throw DomainError("indicator estimate needs p- > 0");
    const double mass = event_measure(space, event);
    if (mass == 0.0) throw EmptyEventError("indicator of an empty event");
    const double pa = harmonic_mean(space, p, event);
    const double norm = luxemburg_norm(space, indicator(space, event), p, cfg);
    return norm / std::pow(mass, reciprocal(pa));
}

double holder_defect(const FiltrationSpace& space, const RandomVariable& u, const RandomVariable& v,
                     const Exponent& p, const Exponent& q, const Exponent& r,
                     const NormSolverConfig& cfg) {
    space.check_size(p.size(), "exponent p");
    space.check_size(q.size(), "exponent q");
    space.check_size(r.size(), "exponent r");
    for (std::size_t w = 0; w < p.size(); ++w) {
        const double gap = reciprocal(r[w]) - reciprocal(p[w]) - reciprocal(q[w]);
        if (std::abs(gap) > 1e-10) {
            throw ExponentMismatchError("1/r != 1/p + 1/q at outcome " + std::to_string(w));
        }
    }
    const double nu = luxemburg_norm(space, u, p, cfg);
    const double nv = luxemburg_norm(space, v, q, cfg);
    if (nu == 0.0 || nv == 0.0) throw DomainError("Hoelder ratio needs nonzero factors");
    return luxemburg_norm(space, multiply(u, v), r, cfg) / (nu * nv);
}

double power_identity_defect(const FiltrationSpace& space, const RandomVariable& u,
                             const Exponent& p, double s, const NormSolverConfig& cfg) {
    if (!(s > 0.0)) throw DomainError("power must be positive");
    const double lhs = luxemburg_norm(space, pow_abs(u, s), p, cfg);
    if (lhs == 0.0) throw DomainError("power identity needs u != 0");
    const double rhs = std::pow(luxemburg_norm(space, u, p.scaled(s), cfg), s);
    return std::abs(lhs - rhs) / lhs;
}

QuasiNormProfile quasinorm_profile(const FiltrationSpace& space, const Exponent& p,
                                   const PairSampler& sampler, std::size_t trials,
                                   const NormSolverConfig& cfg) {
    if (trials == 0) throw DomainError("quasinorm profile needs at least one trial");
    QuasiNormProfile profile;
    profile.eta = std::min(1.0, p.p_minus());
    for (std::size_t t = 0; t < trials; ++t) {
        const auto [u, v] = sampler(t);
        const double nu = luxemburg_norm(space, u, p, cfg);
        const double nv = luxemburg_norm(space, v, p, cfg);
        if (nu + nv == 0.0) continue;
        const double nuv = luxemburg_norm(space, add(u, v), p, cfg);
        ++profile.trials;
        profile.K = std::max(profile.K, nuv / (nu + nv));
        const double lhs = std::pow(nuv, profile.eta);
        const double rhs = std::pow(nu, profile.eta) + std::pow(nv, profile.eta);
        profile.max_eta_ratio = std::max(profile.max_eta_ratio, lhs / rhs);
        if (lhs > rhs + 1e-9 * std::max(1.0, rhs)) ++profile.violations;
    }
    return profile;
}

namespace {

template <typename F>
RandomVariable map(const RandomVariable& u, F f) {
    std::vector<double> out(u.size());
    for (std::size_t w = 0; w < u.size(); ++w) out[w] = f(u[w]);
    return RandomVariable(std::move(out), u.level());
}

template <typename F>
RandomVariable zip(const RandomVariable& u, const RandomVariable& v, F f) {
    if (u.size() != v.size()) throw ShapeError("random variable sizes differ");
    std::vector<double> out(u.size());
    for (std::size_t w = 0; w < u.size(); ++w) out[w] = f(u[w], v[w]);
    return RandomVariable(std::move(out), std::max(u.level(), v.level()));
}

}  // namespace

RandomVariable abs(const RandomVariable& u) {
    return map(u, [](double x) { return std::abs(x); });
}

RandomVariable pow_abs(const RandomVariable& u, double s) {
    return map(u, [s](double x) { return x == 0.0 ? 0.0 : std::pow(std::abs(x), s); });
}

RandomVariable scale(const RandomVariable& u, double alpha) {
    return map(u, [alpha](double x) { return alpha * x; });
}

RandomVariable add(const RandomVariable& u, const RandomVariable& v) {
    return zip(u, v, [](double a, double b) { return a + b; });
}

RandomVariable subtract(const RandomVariable& u, const RandomVariable& v) {
    return zip(u, v, [](double a, double b) { return a - b; });
}

RandomVariable multiply(const RandomVariable& u, const RandomVariable& v) {
    return zip(u, v, [](double a, double b) { return a * b; });
}

}  // namespace varhardy
