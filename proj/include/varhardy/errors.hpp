#pragma once

#include <stdexcept>
#include <string>

namespace varhardy {

/// Root of every error thrown by the library. Catch this to handle any
/// library failure; catch a concrete subclass to react to one condition.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define VARHARDY_DEFINE_ERROR(Name)            \
    class Name : public Error {                \
    public:                                    \
        using Error::Error;                    \
    }

// prob_core
VARHARDY_DEFINE_ERROR(WeightError);
VARHARDY_DEFINE_ERROR(RefinementError);
VARHARDY_DEFINE_ERROR(CoverError);
VARHARDY_DEFINE_ERROR(LevelError);
VARHARDY_DEFINE_ERROR(NonFiniteError);
VARHARDY_DEFINE_ERROR(UnknownOutcomeError);
VARHARDY_DEFINE_ERROR(DepthError);
VARHARDY_DEFINE_ERROR(ShapeError);

// varlp
VARHARDY_DEFINE_ERROR(ConvergenceError);
VARHARDY_DEFINE_ERROR(DomainError);
VARHARDY_DEFINE_ERROR(EmptyEventError);
VARHARDY_DEFINE_ERROR(ExponentMismatchError);

// mart_ops
VARHARDY_DEFINE_ERROR(MeasurabilityError);
VARHARDY_DEFINE_ERROR(InvalidStoppingTimeError);
VARHARDY_DEFINE_ERROR(ZeroMartingaleError);
VARHARDY_DEFINE_ERROR(ControlMismatchError);

// atomic
VARHARDY_DEFINE_ERROR(ExponentClassError);
VARHARDY_DEFINE_ERROR(EmptyDecompositionError);

// ineq_lab
VARHARDY_DEFINE_ERROR(RangeError);
VARHARDY_DEFINE_ERROR(UnknownSuiteError);
/// A library error raised inside a trial, prefixed with suite, trial and seed.
VARHARDY_DEFINE_ERROR(TrialError);

// cli / io
VARHARDY_DEFINE_ERROR(UsageError);
VARHARDY_DEFINE_ERROR(IoError);
VARHARDY_DEFINE_ERROR(FormatError);

#undef VARHARDY_DEFINE_ERROR

/// Raised when a sequence of level values violates adaptedness or the
/// martingale property. `level()` is the first offending index.
class MartingaleError : public Error {
public:
    MartingaleError(int level, const std::string& what)
        : Error("level " + std::to_string(level) + ": " + what), level_(level) {}

    [[nodiscard]] int level() const noexcept { return level_; }

private:
    int level_;
};

}  // namespace varhardy
