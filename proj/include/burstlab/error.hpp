#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace burstlab {

/// Precondition or configuration violation. The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A simulation produced a non-finite or out-of-domain state.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::uint64_t step)
        : std::runtime_error(what + " (internal step " + std::to_string(step) + ")"), step_(step) {}

    std::uint64_t step() const noexcept { return step_; }

private:
    std::uint64_t step_;
};

/// File could not be read, parsed or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ValidationError(message);
}

}  // namespace detail
}  // namespace burstlab
