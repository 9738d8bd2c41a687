#pragma once

#include <stdexcept>
#include <string>

namespace seqgap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Instance file / schema violations. Message carries "file:line:" where known.
struct InstanceError : Error {
    using Error::Error;
};

// LP kernel failures (infeasible recourse, stalled pivots, residual check failures).
struct SolveError : Error {
    using Error::Error;
};

// Bad run parameters (stopping-rule constants, schedule parameters, CLI config).
struct ConfigError : Error {
    using Error::Error;
};

// h' calibration cannot proceed (zero average sample variance).
struct CalibrationError : Error {
    using Error::Error;
};

}  // namespace seqgap
