#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace varhardy {

/// Sentinel level for a random variable that is only known to be
/// measurable with respect to the finest partition.
inline constexpr int kTerminalLevel = std::numeric_limits<int>::max();

/// Extended-real value per outcome together with its declared
/// measurability level (-1 .. N, or kTerminalLevel).
class RandomVariable {
public:
    RandomVariable() = default;
    explicit RandomVariable(std::vector<double> values, int level = kTerminalLevel)
        : values_(std::move(values)), level_(level) {}

    static RandomVariable constant(std::size_t size, double value, int level = -1) {
        return RandomVariable(std::vector<double>(size, value), level);
    }

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] int level() const noexcept { return level_; }

    [[nodiscard]] bool is_zero() const noexcept;
    [[nodiscard]] bool is_finite() const noexcept;
    [[nodiscard]] double sup_abs() const noexcept;

    friend bool operator==(const RandomVariable&, const RandomVariable&) = default;

private:
    std::vector<double> values_;
    int level_ = kTerminalLevel;
};

/// Outcome-indexed stopping time. Values are -1 (stopped before time 0,
/// i.e. f^tau = f_{-1} = 0), 0..N, or kNever (+infinity).
struct StoppingTime {
    static constexpr int kNever = std::numeric_limits<int>::max();
    static constexpr int kBeforeStart = -1;

    std::vector<int> values;

    static StoppingTime constant(std::size_t size, int value) {
        return StoppingTime{std::vector<int>(size, value)};
    }

    friend bool operator==(const StoppingTime&, const StoppingTime&) = default;
};

/// A finite probability space with a refining chain of partitions
/// P_0, ..., P_N. Level -1 is the implicit trivial partition {Omega}.
///
/// Immutable; copies share the underlying storage, so passing by value
/// is cheap and safe across threads.
class FiltrationSpace {
public:
    using Cell = std::vector<std::size_t>;
    using Partition = std::vector<Cell>;

    /// Validates every invariant eagerly. Cells are stored in canonical
    /// order (indices ascending within a cell, cells by smallest index).
    static FiltrationSpace build(std::vector<double> weights, std::vector<Partition> levels);

    [[nodiscard]] std::size_t outcome_count() const noexcept;
    /// N, the index of the finest level.
    [[nodiscard]] int depth() const noexcept;
    [[nodiscard]] std::span<const double> weights() const noexcept;

    /// Partition at level n in [-1, N].
    [[nodiscard]] const Partition& cells(int n) const;
    /// Cell id (index into cells(n)) of every outcome.
    [[nodiscard]] std::span<const std::size_t> cell_of(int n) const;
    [[nodiscard]] std::span<const double> cell_masses(int n) const;
    /// For n in [0, N], the id of the level n-1 cell containing each level n cell.
    [[nodiscard]] std::span<const std::size_t> parent_of(int n) const;

    [[nodiscard]] bool is_measurable(const RandomVariable& x, int n, double tol = 0.0) const;
    /// Smallest n in [-1, N] at which x is constant on cells, or
    /// kTerminalLevel when x is not even P_N-measurable.
    [[nodiscard]] int measurability_level(const RandomVariable& x, double tol = 0.0) const;

    void check_level(int n) const;
    void check_size(std::size_t size, const char* what) const;

    friend bool operator==(const FiltrationSpace& a, const FiltrationSpace& b);

private:
    struct Level {
        Partition cells;
        std::vector<std::size_t> cell_of;
        std::vector<double> masses;
        std::vector<std::size_t> parent;
    };
    struct Data {
        std::vector<double> weights;
        std::vector<Level> levels;  // levels[0] is the trivial level -1
    };

    explicit FiltrationSpace(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
    [[nodiscard]] const Level& level(int n) const;

    std::shared_ptr<const Data> data_;
};

FiltrationSpace build_space(std::vector<double> weights,
                            std::vector<FiltrationSpace::Partition> levels);

/// E_n X: the mu-weighted average of X over each cell of P_n.
RandomVariable conditional_expectation(const FiltrationSpace& space, const RandomVariable& x,
                                       int n);

/// mu(A) for an outcome subset. Duplicate indices count once.
double event_measure(const FiltrationSpace& space, std::span<const std::size_t> event);

/// Indicator chi_A as a random variable.
RandomVariable indicator(const FiltrationSpace& space, std::span<const std::size_t> event);

/// Expectation E X.
double expectation(const FiltrationSpace& space, const RandomVariable& x);

struct StoppingTimeReport {
    /// measurable[n + 1] says whether {tau <= n} is a union of P_n cells.
    std::vector<bool> measurable;
    bool values_in_range = true;
    bool pass = false;

    /// First level that failed, or nullopt-like kNever when all passed.
    [[nodiscard]] int first_failure() const;
};

StoppingTimeReport validate_stopping_time(const FiltrationSpace& space, const StoppingTime& tau);

inline constexpr int kMaxDyadicDepth = 14;

/// Binary-tree filtration of the given depth. Every cell splits into two
/// children carrying the fractions (split_bias, 1 - split_bias) of its
/// mass; the first child gets split_bias unless randomize_orientation is
/// set, in which case the seed decides per cell.
FiltrationSpace generate_dyadic_space(int depth, double split_bias, std::uint64_t seed,
                                      bool randomize_orientation = false,
                                      int max_depth = kMaxDyadicDepth);

}  // namespace varhardy
