#pragma once

#include <stdexcept>
#include <string>

namespace covertime {

/// Base class for all covertime errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonpositiveConductance : Error {
    using Error::Error;
};

struct DisconnectedGraph : Error {
    using Error::Error;
};

struct UnknownBaseVertex : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct SolverFailure : Error {
    using Error::Error;
};

struct BudgetExceeded : Error {
    using Error::Error;
};

struct RejectionBudgetExceeded : Error {
    using Error::Error;
};

struct SampleTooSmall : Error {
    using Error::Error;
};

}  // namespace covertime
