#pragma once

#include <stdexcept>
#include <string>

namespace fracrd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the documented parameter domain.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Malformed or non-finite input data, or shapes that do not match.
class DataError : public Error {
public:
    using Error::Error;
};

/// An object is not in a state that supports the requested operation.
class StateError : public Error {
public:
    using Error::Error;
};

/// A geometric precondition (ball inside grid, value below a singularity) fails.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Requested parameters fall outside the regime where a formula is defined.
class RegimeError : public Error {
public:
    using Error::Error;
};

/// Iterative numerics (eigen solvers, decompositions) failed to converge.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double residual = 0.0)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A series could not reach the requested tolerance within its term budget.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double partial_sum, double bound)
        : Error(what), partial_sum_(partial_sum), bound_(bound) {}
    double partial_sum() const noexcept { return partial_sum_; }
    double bound() const noexcept { return bound_; }

private:
    double partial_sum_;
    double bound_;
};

/// The scalar implicit solve found no root. `blowup_signal()` is set when the
/// failure is the growth kind (no real fixed point) rather than a bad bracket.
class NonlinearSolveError : public Error {
public:
    NonlinearSolveError(const std::string& what, double last_iterate, int iterations,
                        bool blowup_signal)
        : Error(what),
          last_iterate_(last_iterate),
          iterations_(iterations),
          blowup_signal_(blowup_signal) {}
    double last_iterate() const noexcept { return last_iterate_; }
    int iterations() const noexcept { return iterations_; }
    bool blowup_signal() const noexcept { return blowup_signal_; }

private:
    double last_iterate_;
    int iterations_;
    bool blowup_signal_;
};

/// The explicit step would violate the stability monitor.
class StabilityError : public Error {
public:
    StabilityError(const std::string& what, double advisory_dt)
        : Error(what), advisory_dt_(advisory_dt) {}
    double advisory_dt() const noexcept { return advisory_dt_; }

private:
    double advisory_dt_;
};

/// Configuration text could not be turned into a valid run description.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace fracrd
