#ifndef VERTSIM_ERRORS_HPP
#define VERTSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vertsim {

// Error taxonomy maps onto CLI exit codes: ConfigError -> 2, DataError and
// other exceptions -> 3. A failed validation is a reported outcome, not an
// exception, and exits with 4.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when a fit is requested on fewer samples than the estimator supports.
class InsufficientDataError : public DataError {
public:
    using DataError::DataError;
};

} // namespace vertsim

#endif
