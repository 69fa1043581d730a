#pragma once

#include <stdexcept>

namespace memesent {

/// Bad input or configuration supplied by the caller. The CLI maps these to
/// exit code 2; every other exception is a runtime failure (exit code 1).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace memesent
