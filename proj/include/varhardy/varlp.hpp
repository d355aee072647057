#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "varhardy/prob_core.hpp"

namespace varhardy {

/// Variable exponent p(.) with values in (0, +inf].
class Exponent {
public:
    Exponent() = default;
    explicit Exponent(std::vector<double> values);
    explicit Exponent(RandomVariable values);

    static Exponent constant(std::size_t size, double value) {
        return Exponent(std::vector<double>(size, value));
    }

    [[nodiscard]] const RandomVariable& values() const noexcept { return p_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return p_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return p_.size(); }

    /// ess inf p.
    [[nodiscard]] double p_minus() const noexcept { return p_minus_; }
    /// ess sup of p over {p < inf}; +inf when p is infinite everywhere.
    [[nodiscard]] double p_plus() const noexcept { return p_plus_; }
    /// 0 < p- <= p+ < inf and p finite everywhere.
    [[nodiscard]] bool in_class_P() const noexcept { return in_class_P_; }
    [[nodiscard]] bool is_constant() const noexcept;

    /// Pointwise s * p.
    [[nodiscard]] Exponent scaled(double s) const;

private:
    RandomVariable p_;
    double p_minus_ = 0.0;
    double p_plus_ = 0.0;
    bool in_class_P_ = false;
};

struct NormSolverConfig {
    double rel_tol = 1e-12;
    int max_iter = 200;
    double bracket_growth = 2.0;

    /// Throws DomainError when the invariants rel_tol in (0, 1e-6],
    /// max_iter >= 16 and bracket_growth > 1 do not hold.
    void validate() const;
};

/// rho(u) = E(|u|^p ; p < inf) + sup{|u(w)| : p(w) = inf}.
double modular(const FiltrationSpace& space, const RandomVariable& u, const Exponent& p);

/// Luxemburg quasi-norm inf{gamma > 0 : rho(u / gamma) <= 1}.
///
/// gamma -> rho(u / gamma) is continuous and non-increasing, so the root
/// is bracketed by repeated growth from gamma = 1 and then bisected to
/// cfg.rel_tol. Throws ConvergenceError when cfg.max_iter steps do not
/// suffice.
double luxemburg_norm(const FiltrationSpace& space, const RandomVariable& u, const Exponent& p,
                      const NormSolverConfig& cfg = {});

/// p' = p / (p - 1), with 1 <-> inf.
Exponent conjugate_exponent(const Exponent& p);

/// p_A defined by 1/p_A = (1/|A|) * integral over A of 1/p.
double harmonic_mean(const FiltrationSpace& space, const Exponent& p,
                     std::span<const std::size_t> event);

/// T_A u = (mean of u over A) * chi_A.
RandomVariable averaging_operator(const FiltrationSpace& space, const RandomVariable& u,
                                  std::span<const std::size_t> event);

/// ||chi_A|| / |A|^(1/p_A).
double indicator_norm_ratio(const FiltrationSpace& space, const Exponent& p,
                            std::span<const std::size_t> event, const NormSolverConfig& cfg = {});

/// ||u v||_r / (||u||_p ||v||_q); requires 1/r = 1/p + 1/q pointwise.
double holder_defect(const FiltrationSpace& space, const RandomVariable& u, const RandomVariable& v,
                     const Exponent& p, const Exponent& q, const Exponent& r,
                     const NormSolverConfig& cfg = {});

/// Relative gap between || |u|^s ||_p and ||u||_{sp}^s.
double power_identity_defect(const FiltrationSpace& space, const RandomVariable& u,
                             const Exponent& p, double s, const NormSolverConfig& cfg = {});

/// Exponent r with 1/r = 1/p + 1/q.
Exponent harmonic_sum(const Exponent& p, const Exponent& q);

struct QuasiNormProfile {
    double K = 1.0;
    double eta = 1.0;
    int violations = 0;
    int trials = 0;
    /// Largest ||u+v||^eta / (||u||^eta + ||v||^eta) seen.
    double max_eta_ratio = 0.0;
};

/// Draws the (u, v) pair for a given trial index.
using PairSampler = std::function<std::pair<RandomVariable, RandomVariable>(std::size_t trial)>;

/// Empirical quasi-triangle constant K and working exponent eta = min(1, p-).
QuasiNormProfile quasinorm_profile(const FiltrationSpace& space, const Exponent& p,
                                   const PairSampler& sampler, std::size_t trials,
                                   const NormSolverConfig& cfg = {});

// Pointwise helpers shared by the other modules.
RandomVariable abs(const RandomVariable& u);
RandomVariable pow_abs(const RandomVariable& u, double s);
RandomVariable scale(const RandomVariable& u, double alpha);
RandomVariable add(const RandomVariable& u, const RandomVariable& v);
RandomVariable subtract(const RandomVariable& u, const RandomVariable& v);
RandomVariable multiply(const RandomVariable& u, const RandomVariable& v);

}  // namespace varhardy
