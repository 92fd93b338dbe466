#pragma once

#include <stdexcept>
#include <string>

namespace gme {

// Bad model/state/config data supplied by the caller.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Eigensolver failures, non-finite intermediates and the like.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dyson series produced non-finite values; carries the offending order.
struct DivergenceError : std::runtime_error {
    int order;
    DivergenceError(const std::string& what, int order_)
        : std::runtime_error(what), order(order_) {}
};

// Covariance left the physical spectral range during integration.
struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gme
