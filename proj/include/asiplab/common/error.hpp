#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace asiplab {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied something outside an operation's domain.
class InputError : public Error {
public:
    using Error::Error;
};

/// Transition structure is not topologically mixing, so the leading
/// eigenvalue of the transfer operator is not simple/isolated.
class SpectralDegeneracy : public InputError {
public:
    using InputError::InputError;
};

/// A statistical hypothesis required by a check does not hold for the input.
class HypothesisError : public InputError {
public:
    using InputError::InputError;
};

/// Twisted eigenvalue left the perturbative regime (gap closed).
class RegimeExceeded : public Error {
public:
    using Error::Error;
};

/// A truncated series did not reach the requested tolerance.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, std::int64_t required)
        : Error(what), required_terms_(required) {}
    std::int64_t required_terms() const noexcept { return required_terms_; }

private:
    std::int64_t required_terms_;
};

/// Induced LSV orbit did not return to the base within the iteration cap.
class CappedReturn : public Error {
public:
    CappedReturn(const std::string& what, std::uint64_t cap) : Error(what), cap_(cap) {}
    std::uint64_t cap() const noexcept { return cap_; }

private:
    std::uint64_t cap_;
};

/// A billiard ray found no scatterer within the search cutoff.
class HorizonViolation : public Error {
public:
    HorizonViolation(const std::string& what, double cutoff) : Error(what), cutoff_(cutoff) {}
    double cutoff() const noexcept { return cutoff_; }

private:
    double cutoff_;
};

/// Conditioning depth exceeds the available symbolic lookahead.
class WindowError : public InputError {
public:
    using InputError::InputError;
};

/// A per-step atom enumeration would exceed its budget.
class CoarseningError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A regression could not be carried out (too few usable points).
class FitError : public Error {
public:
    using Error::Error;
};

/// A single trajectory of an ensemble failed; carries where it happened.
class TrajectoryError : public Error {
public:
    TrajectoryError(const std::string& what, std::uint64_t index, std::uint64_t step)
        : Error(what), index_(index), step_(step) {}
    std::uint64_t index() const noexcept { return index_; }
    std::uint64_t step() const noexcept { return step_; }

private:
    std::uint64_t index_;
    std::uint64_t step_;
};

}  // namespace asiplab
