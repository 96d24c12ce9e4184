#pragma once

#include <stdexcept>
#include <string>

namespace mgt {

/// Invalid argument to a library operation (nonpositive rate, delta >= alpha, ...).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Request outside the computed range (e.g. a time beyond the end of a trajectory).
struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// A numerical procedure failed to converge or produced non-finite values.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An operation was invoked outside the parameter regime where it is defined.
struct RegimeError : std::logic_error {
    using std::logic_error::logic_error;
};

/// A decay fit could not be performed (nonpositive data on the fit window).
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Experiment configuration failed validation.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace mgt
