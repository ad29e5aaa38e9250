#pragma once

#include <stdexcept>

namespace grushin {

// Input lies outside a quantity's mathematical domain (outside the embedding
// validity interval, x <= 0, a metric parameter out of range, ...).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An algorithm failed to meet its accuracy contract (quadrature
// non-convergence, stalled iteration, linear-solve breakdown, ...).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace grushin
