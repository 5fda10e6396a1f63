#pragma once

#include <stdexcept>
#include <string>

namespace unilab {

// Base class for every error the library throws.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape or size mismatch between operands.
struct dimension_error : error {
    using error::error;
};

// Input violates a numeric contract (non-unitary, non-Hermitian,
// not a probability distribution, ...).
struct validation_error : error {
    using error::error;
};

// Time or index outside the supported range.
struct range_error : error {
    using error::error;
};

// Conditioning on an event of zero probability.
struct zero_support_error : error {
    using error::error;
};

// Malformed input document.
struct parse_error : error {
    using error::error;
};

} // namespace unilab
