#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "varhardy/mart_ops.hpp"
#include "varhardy/prob_core.hpp"
#include "varhardy/varlp.hpp"

namespace varhardy {

struct TrialConfig {
    std::uint64_t seed = 1;
    int trials = 200;
    std::pair<int, int> depth_range{1, 8};
    std::pair<double, double> bias_range{0.25, 0.75};
    /// Bounds for p- and p+ of the sampled exponents.
    std::pair<double, double> exponent_range{0.3, 4.0};
    /// Suite ids to run; empty means every registered suite.
    std::vector<std::string> suites;
    /// Worker threads; results do not depend on it.
    int jobs = 1;
    NormSolverConfig solver;

    /// Throws RangeError for trials < 1, a bad depth/bias range, or an
    /// exponent range outside (0, 64].
    void validate() const;
};

/// Uniform draws in [p_min, p_max], one per cell of the finest level.
/// Throws RangeError unless 0 < p_min <= p_max < inf.
Exponent sample_exponent(const FiltrationSpace& space, double p_min, double p_max,
                         std::uint64_t seed);

enum class Generator { Rademacher, Gaussian, PredictableMultiplier };

Generator generator_from_string(std::string_view name);
const char* to_string(Generator g);

/// Increments are drawn per cell and then centred with the cell masses
/// inside each parent cell, so E_{n-1} d_n = 0 holds up to rounding.
Martingale sample_martingale(const FiltrationSpace& space, Generator generator, double scale,
                             std::uint64_t seed);

struct InequalitySpec {
    std::string_view suite;
    std::string_view id;
    std::string_view anchor;
    /// Positive for identities and classical sharp bounds, which are checked
    /// against this value with no margin; 0 when the bound is calibrated.
    double exact_bound = 0.0;
};

/// Every registered inequality in run order.
const std::vector<InequalitySpec>& inequality_registry();
/// Distinct suite ids in registry order.
std::vector<std::string> suite_ids();
/// Theorem anchors the registry has to cover.
const std::vector<std::string_view>& anchor_manifest();

/// Frozen bound per inequality id.
using FrozenBounds = std::map<std::string, double>;

struct InequalityRecord {
    std::string suite;
    std::string id;
    std::string anchor;
    std::size_t count = 0;
    double max_ratio = 0.0;
    std::string argmax;
    double frozen_bound = 0.0;
    bool has_bound = false;
    bool pass = false;
};

struct InequalityReport {
    std::uint64_t seed = 0;
    int trials = 0;
    std::vector<InequalityRecord> records;

    [[nodiscard]] bool pass() const;
};

inline constexpr double kRegressionMargin = 1.05;
inline constexpr double kCalibrationMargin = 1.25;

/// Runs the configured suites. A calibrated record passes when
/// max_ratio <= frozen_bound * kRegressionMargin; exact-bound records
/// pass when max_ratio <= bound. Throws UnknownSuiteError.
InequalityReport run_inequality_suite(const TrialConfig& cfg, const FrozenBounds& bounds);

/// Every suite on the calibration corpus; calibrated ids get
/// max_ratio * kCalibrationMargin. Needs cfg.trials >= 100.
FrozenBounds calibrate_regression_bounds(const TrialConfig& cfg);

std::string serialize_report(const InequalityReport& report);
std::string report_csv(const InequalityReport& report);

std::string serialize_bounds(const FrozenBounds& bounds, const TrialConfig& cfg);
FrozenBounds parse_bounds(std::string_view text);

}  // namespace varhardy
