#pragma once

#include <stdexcept>
#include <string>

namespace krsim {

// Operation invoked on a state in the wrong (momentum vs phase) representation.
struct RepresentationError : std::logic_error {
    using std::logic_error::logic_error;
};

// Projected branch weight below the renormalization threshold.
struct DegenerateBranchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Request exceeds a backend's size limit (e.g. density-matrix oracle scale).
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid run configuration (bad key, bad value, inconsistent combination).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable, corrupted or mismatched checkpoint file.
struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace krsim
