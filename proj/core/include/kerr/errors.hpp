#ifndef KERR_ERRORS_HPP
#define KERR_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace kerr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Fixed-point iteration stopped contracting; carries the successive
 *  difference ratios observed so far. */
struct NonContractionError : Error {
    NonContractionError(std::string msg, std::vector<double> ratios_)
        : Error(std::move(msg)), ratios(std::move(ratios_)) {}
    std::vector<double> ratios;
};

/** Nodewise constitutive Newton solve diverged. */
struct NewtonDivergenceError : Error {
    using Error::Error;
};

/** Time step violates the stability limit of the requested solver. */
struct CflError : Error {
    using Error::Error;
};

/** Configuration file problem; message carries file/line context. */
struct ConfigError : Error {
    using Error::Error;
};

} // namespace kerr

#endif
