#pragma once

#include <utility>
#include <vector>

#include "varhardy/mart_ops.hpp"

namespace varhardy {

/// 1: conditional square function s, 2: square function S (Q-control),
/// 3: maximal function (D-control).
enum class AtomCategory { First = 1, Second = 2, Third = 3 };

AtomCategory atom_category_from_int(int category);

/// Hardy-space norm matching a category's admissibility: H^s, Q or D.
HardyKind category_norm_kind(AtomCategory category);

struct AtomicTerm {
    int k = 0;
    StoppingTime tau;       // tau_k
    double theta = 0.0;     // 3 * 2^k * ||chi_{tau_k < inf}||
    RandomVariable atom;    // terminal value of a^k
};

struct AtomicDecomposition {
    AtomCategory category = AtomCategory::First;
    std::vector<AtomicTerm> terms;  // ascending in k
    /// Scanned index window; terms outside it vanish identically.
    int k_min = 0;
    int k_max = -1;
    /// The threshold variable whose dyadic level sets are A_k: s(f) or lambda_infinity.
    RandomVariable threshold;

    [[nodiscard]] bool empty() const noexcept { return terms.empty(); }
};

/// Stopping-time atomic decomposition, tau_k = inf{n >= -1 : T_n > 2^k},
/// with T_n = s_{n+1}(f) (first category) or the optimal predictable
/// control lambda_n of S_n(f) / |f_n| (second / third).
///
/// tau_k = -1 happens only where T_{-1} > 2^k, which requires f_0 != 0.
AtomicDecomposition decompose(const Martingale& f, const Exponent& p, AtomCategory category,
                              const NormSolverConfig& cfg = {});

struct AtomReport {
    /// max |E_n a| over {n <= tau}, relative to max(1, sup|a|).
    double vanishing_residual = 0.0;
    bool vanishes_before_tau = true;
    /// ||G(a)||_inf and the admissible size ||chi_{tau < inf}||^{-1} (inf if tau == inf).
    double size = 0.0;
    double size_bound = 0.0;
    bool size_ok = true;
    /// ||a||_{H^s}; only evaluated for first-category atoms.
    double hs_norm = 0.0;
    bool hs_ok = true;
    bool tau_valid = true;

    [[nodiscard]] bool pass() const noexcept {
        return tau_valid && vanishes_before_tau && size_ok && hs_ok;
    }
};

AtomReport validate_atom(const FiltrationSpace& space, const RandomVariable& atom,
                         const StoppingTime& tau, const Exponent& p, AtomCategory category,
                         const NormSolverConfig& cfg = {});

/// sum_k theta_k E_n a^k.
RandomVariable reconstruct(const AtomicDecomposition& dec, const FiltrationSpace& space, int n);

struct CoefficientBounds {
    double lower_ratio = 0.0;  // (sum theta^{p+})^{1/p+} / ||f||
    double upper_ratio = 0.0;  // ||f|| / (sum theta^{p-})^{1/p-}
};

CoefficientBounds coefficient_bounds(const AtomicDecomposition& dec, const Martingale& f,
                                     const Exponent& p, const NormSolverConfig& cfg = {});

struct TailWindow {
    int j = 0;
    int m = -1;  // m < j denotes the empty window
    double residual = 0.0;

    [[nodiscard]] bool empty() const noexcept { return m < j; }
};

/// Category norm of f - sum_{k=j}^{m} theta_k a^k for every window inside
/// [k_min, k_max] plus the empty window (listed first). Windows are
/// ordered by (j descending, m ascending) within the list.
std::vector<TailWindow> tail_convergence_profile(const AtomicDecomposition& dec,
                                                 const Martingale& f, const Exponent& p,
                                                 const NormSolverConfig& cfg = {});

/// Largest relative increase of the residual when a window is widened by
/// one index on either side (<= 0 means the profile is nonincreasing).
double tail_profile_max_increase(const std::vector<TailWindow>& profile);

/// g = sum_k 3 * 2^k chi_{A_k}, including the geometric tail below k_min.
RandomVariable gauge_function(const AtomicDecomposition& dec);

}  // namespace varhardy
