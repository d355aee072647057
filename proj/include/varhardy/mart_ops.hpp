#pragma once

#include <vector>

#include "varhardy/prob_core.hpp"
#include "varhardy/varlp.hpp"

namespace varhardy {

/// Adapted sequence f_0, ..., f_N on a FiltrationSpace with vanishing
/// conditional increments. f_{-1} = 0 by convention.
class Martingale {
public:
    /// Validates adaptedness and the martingale property; throws
    /// MartingaleError naming the first offending level.
    static Martingale from_levels(FiltrationSpace space, std::vector<RandomVariable> levels);
    /// f_n = d_0 + ... + d_n; same validation as from_levels.
    static Martingale from_increments(FiltrationSpace space,
                                      const std::vector<RandomVariable>& increments);

    [[nodiscard]] const FiltrationSpace& space() const noexcept { return space_; }
    [[nodiscard]] int depth() const noexcept { return space_.depth(); }

    /// f_n for n in [-1, N]; f_n = f_N for n > N.
    [[nodiscard]] const RandomVariable& at(int n) const;
    [[nodiscard]] const RandomVariable& terminal() const { return values_.back(); }
    /// d_n f = f_n - f_{n-1} for n in [0, N].
    [[nodiscard]] RandomVariable difference(int n) const;

    [[nodiscard]] bool is_zero() const;
    /// max over n and outcomes of |f_n|.
    [[nodiscard]] double scale() const;

private:
    Martingale(FiltrationSpace space, std::vector<RandomVariable> values)
        : space_(std::move(space)), values_(std::move(values)) {}

    FiltrationSpace space_;
    std::vector<RandomVariable> values_;  // values_[n + 1] = f_n, values_[0] = 0
};

/// f_n = E_n X.
Martingale martingale_from_terminal(const FiltrationSpace& space, const RandomVariable& x);

/// Running maximal, square and conditional square functions, all indexed
/// by n = 0..N. Increments are counted from d_0 f = f_0, so s_{n+1} is
/// P_n-measurable.
struct SquareFunctions {
    std::vector<RandomVariable> maximal;             // f*_n
    std::vector<RandomVariable> square;              // S_n(f)
    std::vector<RandomVariable> conditional_square;  // s_n(f)

    [[nodiscard]] const RandomVariable& f_star() const { return maximal.back(); }
    [[nodiscard]] const RandomVariable& S() const { return square.back(); }
    [[nodiscard]] const RandomVariable& s() const { return conditional_square.back(); }
};

SquareFunctions square_functions(const Martingale& f);

/// (f^tau)_n = f_{min(tau, n)}.
Martingale stop_martingale(const Martingale& f, const StoppingTime& tau);

enum class ControlMode { Q, D };

/// lambda_{-1}, lambda_0, ..., lambda_N; lambda_n is P_n-measurable.
struct PredictableControl {
    ControlMode mode = ControlMode::Q;
    std::vector<RandomVariable> lambda;

    [[nodiscard]] const RandomVariable& at(int n) const;
    [[nodiscard]] const RandomVariable& terminal() const { return lambda.back(); }
};

/// Pointwise-minimal control: lambda_{-1} = max g_0 and
/// lambda_n = max(lambda_{n-1}, cellwise max over P_n of g_{n+1}), with
/// g_n = S_n(f) (mode Q) or |f_n| (mode D).
PredictableControl optimal_predictable_control(const Martingale& f, ControlMode mode);

/// Checks nonnegativity, monotonicity, measurability and the domination
/// condition of the control's mode. Throws ControlMismatchError.
void check_control(const Martingale& f, const PredictableControl& lambda, double rel_tol = 1e-12);

enum class HardyKind { Star, S, s, Q, D };

const char* to_string(HardyKind kind);

struct HardyNormReport {
    double h_star = 0.0;
    double h_S = 0.0;
    double h_s = 0.0;
    double q_norm = 0.0;
    double d_norm = 0.0;

    [[nodiscard]] double get(HardyKind kind) const;
};

/// Requires p in class P (ExponentClassError otherwise).
double hardy_norm(const Martingale& f, const Exponent& p, HardyKind which,
                  const NormSolverConfig& cfg = {});
HardyNormReport hardy_norms(const Martingale& f, const Exponent& p, const NormSolverConfig& cfg = {});

struct RegularityReport {
    double R_mart = 0.0;
    double R_filt = 1.0;
    bool is_regular = true;
};

RegularityReport regularity_constant(const Martingale& f, double regular_cap = 64.0);

/// sup over jump levels of ||lambda chi_{f* > lambda}|| divided by max_n ||f_n||.
double doob_weak_constant(const Martingale& f, const Exponent& p, const NormSolverConfig& cfg = {});

struct ChevalierTransform {
    Martingale g;
    /// max |f_n^2 - g_n - S_n^2(f)| over n and outcomes.
    double identity_residual = 0.0;
    /// max |(g_n - g_{n-1}) - 2 f_{n-1} d_n f|.
    double increment_residual = 0.0;
};

/// g_n = f_n^2 - S_n^2(f), assembled from the increments 2 f_{n-1} d_n f.
ChevalierTransform chevalier_transform(const Martingale& f);

struct NormalizedTransform {
    Martingale g;
    /// max of |g_n| / (2 sqrt(lambda_{n-1})); <= 1 expected.
    double bound_ratio = 0.0;
    /// max of s_n^2(f) / (lambda_{n-1} s_n^2(g)) and the same for S.
    double transfer_s_ratio = 0.0;
    double transfer_S_ratio = 0.0;
};

/// d_n g = d_n f / sqrt(lambda_{n-1}) for n = 0..N, with d_n g = 0 where
/// lambda_{n-1} = 0. Throws ControlMismatchError unless lambda is a valid
/// D-control of f.
NormalizedTransform control_normalized_transform(const Martingale& f,
                                                 const PredictableControl& lambda);

/// Pointwise max over n = 0..N of E_{n-1} S_n(f).
RandomVariable predictable_projection_sup(const Martingale& f);

}  // namespace varhardy
