#pragma once

#include <stdexcept>
#include <string>

namespace spinsense {

/// Eigensolver failures and other numerical breakdowns.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when every grid point assigns zero probability to the data.
class DegeneratePosteriorError : public NumericalError {
public:
    explicit DegeneratePosteriorError(const std::string& what) : NumericalError(what) {}
};

} // namespace spinsense
