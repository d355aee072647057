#include "varhardy/prob_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "varhardy/errors.hpp"
#include "varhardy/random.hpp"

namespace varhardy {

bool RandomVariable::is_zero() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

bool RandomVariable::is_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double RandomVariable::sup_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

namespace {

constexpr double kWeightSumTolerance = 1e-12;

void canonicalize(FiltrationSpace::Partition& partition) {
    for (auto& cell : partition) std::sort(cell.begin(), cell.end());
    std::sort(partition.begin(), partition.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

}  // namespace

FiltrationSpace FiltrationSpace::build(std::vector<double> weights, std::vector<Partition> levels) {
    const std::size_t n = weights.size();
    if (n == 0) throw WeightError("outcome set is empty");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
            throw WeightError("weight of outcome " + std::to_string(i) + " is not positive");
        }
        total += weights[i];
    }
    if (std::abs(total - 1.0) > kWeightSumTolerance) {
        throw WeightError("weights sum to " + std::to_string(total) + ", expected 1");
    }
    if (levels.empty()) throw CoverError("filtration needs at least one level");

    auto data = std::make_shared<Data>();
    data->weights = std::move(weights);
    data->levels.reserve(levels.size() + 1);

    Partition trivial{Cell(n)};
    std::iota(trivial.front().begin(), trivial.front().end(), std::size_t{0});
    levels.insert(levels.begin(), std::move(trivial));

    for (std::size_t li = 0; li < levels.size(); ++li) {
        Partition& partition = levels[li];
        const int level_no = static_cast<int>(li) - 1;
        Level level;
        level.cell_of.assign(n, n);
        for (std::size_t c = 0; c < partition.size(); ++c) {
            if (partition[c].empty()) {
                throw CoverError("level " + std::to_string(level_no) + " has an empty cell");
            }
        }
        canonicalize(partition);
        for (std::size_t c = 0; c < partition.size(); ++c) {
            double mass = 0.0;
            for (std::size_t w : partition[c]) {
                if (w >= n) {
                    throw CoverError("level " + std::to_string(level_no) + " references outcome " +
                                     std::to_string(w) + " outside the outcome set");
                }
                if (level.cell_of[w] != n) {
                    throw CoverError("outcome " + std::to_string(w) + " appears twice at level " +
                                     std::to_string(level_no));
                }
                level.cell_of[w] = c;
                mass += data->weights[w];
            }
            level.masses.push_back(mass);
        }
        for (std::size_t w = 0; w < n; ++w) {
            if (level.cell_of[w] == n) {
                throw CoverError("outcome " + std::to_string(w) + " is missing at level " +
                                 std::to_string(level_no));
            }
        }
        if (li > 0) {
            const Level& coarse = data->levels[li - 1];
            level.parent.resize(partition.size());
            for (std::size_t c = 0; c < partition.size(); ++c) {
                const std::size_t parent = coarse.cell_of[partition[c].front()];
                for (std::size_t w : partition[c]) {
                    if (coarse.cell_of[w] != parent) {
                        throw RefinementError("cell " + std::to_string(c) + " of level " +
                                              std::to_string(level_no) +
                                              " straddles two cells of level " +
                                              std::to_string(level_no - 1));
                    }
                }
                level.parent[c] = parent;
            }
        }
        level.cells = std::move(partition);
        data->levels.push_back(std::move(level));
    }
    return FiltrationSpace(std::move(data));
}

FiltrationSpace build_space(std::vector<double> weights,
                            std::vector<FiltrationSpace::Partition> levels) {
    return FiltrationSpace::build(std::move(weights), std::move(levels));
}

std::size_t FiltrationSpace::outcome_count() const noexcept { return data_->weights.size(); }

int FiltrationSpace::depth() const noexcept { return static_cast<int>(data_->levels.size()) - 2; }

std::span<const double> FiltrationSpace::weights() const noexcept { return data_->weights; }

void FiltrationSpace::check_level(int n) const {
    if (n < -1 || n > depth()) {
        throw LevelError("level " + std::to_string(n) + " outside [-1, " + std::to_string(depth()) +
                         "]");
    }
}

void FiltrationSpace::check_size(std::size_t size, const char* what) const {
    if (size != outcome_count()) {
        throw ShapeError(std::string(what) + " has " + std::to_string(size) +
                         " values, space has " + std::to_string(outcome_count()) + " outcomes");
    }
}

const FiltrationSpace::Level& FiltrationSpace::level(int n) const {
    check_level(n);
    return data_->levels[static_cast<std::size_t>(n + 1)];
}

const FiltrationSpace::Partition& FiltrationSpace::cells(int n) const { return level(n).cells; }

std::span<const std::size_t> FiltrationSpace::cell_of(int n) const { return level(n).cell_of; }

std::span<const double> FiltrationSpace::cell_masses(int n) const { return level(n).masses; }

std::span<const std::size_t> FiltrationSpace::parent_of(int n) const {
    if (n < 0) throw LevelError("level -1 has no parent level");
    return level(n).parent;
}

bool FiltrationSpace::is_measurable(const RandomVariable& x, int n, double tol) const {
    check_size(x.size(), "random variable");
    for (const Cell& cell : cells(n)) {
        const double first = x[cell.front()];
        for (std::size_t w : cell) {
            const double v = x[w];
            if (v == first) continue;
            if (!(std::abs(v - first) <= tol)) return false;
        }
    }
    return true;
}

int FiltrationSpace::measurability_level(const RandomVariable& x, double tol) const {
    for (int n = -1; n <= depth(); ++n) {
        if (is_measurable(x, n, tol)) return n;
    }
    return kTerminalLevel;
}

bool operator==(const FiltrationSpace& a, const FiltrationSpace& b) {
    if (a.data_ == b.data_) return true;
    if (a.data_->weights != b.data_->weights) return false;
    if (a.data_->levels.size() != b.data_->levels.size()) return false;
    for (std::size_t i = 0; i < a.data_->levels.size(); ++i) {
        if (a.data_->levels[i].cells != b.data_->levels[i].cells) return false;
    }
    return true;
}

RandomVariable conditional_expectation(const FiltrationSpace& space, const RandomVariable& x,
                                       int n) {
    space.check_level(n);
    space.check_size(x.size(), "random variable");
    if (!x.is_finite()) throw NonFiniteError("conditional expectation of a non-finite variable");
    const auto weights = space.weights();
    const auto& cells = space.cells(n);
    const auto masses = space.cell_masses(n);
    std::vector<double> out(x.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        double acc = 0.0;
        for (std::size_t w : cells[c]) acc += weights[w] * x[w];
        const double mean = acc / masses[c];
        for (std::size_t w : cells[c]) out[w] = mean;
    }
    return RandomVariable(std::move(out), n);
}

double expectation(const FiltrationSpace& space, const RandomVariable& x) {
    space.check_size(x.size(), "random variable");
    const auto weights = space.weights();
    double acc = 0.0;
    for (std::size_t w = 0; w < x.size(); ++w) acc += weights[w] * x[w];
    return acc;
}

namespace {

std::vector<bool> event_mask(const FiltrationSpace& space, std::span<const std::size_t> event) {
    std::vector<bool> mask(space.outcome_count(), false);
    for (std::size_t w : event) {
        if (w >= space.outcome_count()) {
            throw UnknownOutcomeError("outcome " + std::to_string(w) + " is not in the space");
        }
        mask[w] = true;
    }
    return mask;
}

}  // namespace

double event_measure(const FiltrationSpace& space, std::span<const std::size_t> event) {
    const auto mask = event_mask(space, event);
    const auto weights = space.weights();
    double acc = 0.0;
    for (std::size_t w = 0; w < mask.size(); ++w) {
        if (mask[w]) acc += weights[w];
    }
    return acc;
}

RandomVariable indicator(const FiltrationSpace& space, std::span<const std::size_t> event) {
    const auto mask = event_mask(space, event);
    std::vector<double> values(mask.size());
    for (std::size_t w = 0; w < mask.size(); ++w) values[w] = mask[w] ? 1.0 : 0.0;
    return RandomVariable(std::move(values));
}

int StoppingTimeReport::first_failure() const {
    for (std::size_t i = 0; i < measurable.size(); ++i) {
        if (!measurable[i]) return static_cast<int>(i) - 1;
    }
    return StoppingTime::kNever;
}

StoppingTimeReport validate_stopping_time(const FiltrationSpace& space, const StoppingTime& tau) {
    StoppingTimeReport report;
    const int depth = space.depth();
    if (tau.values.size() != space.outcome_count()) {
        report.values_in_range = false;
        report.measurable.assign(static_cast<std::size_t>(depth + 2), false);
        return report;
    }
    for (int v : tau.values) {
        if (v != StoppingTime::kNever && (v < -1 || v > depth)) report.values_in_range = false;
    }
    report.measurable.reserve(static_cast<std::size_t>(depth + 2));
    for (int n = -1; n <= depth; ++n) {
        bool ok = true;
        for (const auto& cell : space.cells(n)) {
            const bool first = tau.values[cell.front()] <= n;
            for (std::size_t w : cell) {
                if ((tau.values[w] <= n) != first) {
                    ok = false;
                    break;
                }
            }
            if (!ok) break;
        }
        report.measurable.push_back(ok);
    }
    report.pass = report.values_in_range &&
                  std::all_of(report.measurable.begin(), report.measurable.end(),
                              [](bool b) { return b; });
    return report;
}

FiltrationSpace generate_dyadic_space(int depth, double split_bias, std::uint64_t seed,
                                      bool randomize_orientation, int max_depth) {
    if (depth < 0 || depth > max_depth) {
        throw DepthError("dyadic depth " + std::to_string(depth) + " outside [0, " +
                         std::to_string(max_depth) + "]");
    }
    if (!(split_bias > 0.0 && split_bias < 1.0)) {
        throw DomainError("split bias must lie in (0, 1)");
    }
    Rng rng(seed);
    const std::size_t leaves = std::size_t{1} << depth;
    std::vector<double> mass{1.0};
    for (int level = 0; level < depth; ++level) {
        std::vector<double> next;
        next.reserve(mass.size() * 2);
        for (double m : mass) {
            const bool flip = randomize_orientation && rng.coin();
            const double first = flip ? 1.0 - split_bias : split_bias;
            next.push_back(m * first);
            next.push_back(m * (1.0 - first));
        }
        mass = std::move(next);
    }
    std::vector<FiltrationSpace::Partition> levels;
    for (int level = 0; level <= depth; ++level) {
        const std::size_t width = std::size_t{1} << (depth - level);
        FiltrationSpace::Partition partition(leaves / width);
        for (std::size_t c = 0; c < partition.size(); ++c) {
            partition[c].resize(width);
            std::iota(partition[c].begin(), partition[c].end(), c * width);
        }
        levels.push_back(std::move(partition));
    }
    // Renormalise the last ulp drift of the products so the sum check is exact.
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    for (double& m : mass) m /= total;
    return FiltrationSpace::build(std::move(mass), std::move(levels));
}

}  // namespace varhardy
