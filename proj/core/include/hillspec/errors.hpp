#pragma once

#include <stdexcept>
#include <string>

namespace hillspec {

// Bad user input: malformed spec files, out-of-range parameters, schema
// violations. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// The ODE solver could not reach the requested endpoint. last_x is the
// rightmost abscissa that was still integrated successfully.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double last_x)
        : std::runtime_error(what), last_x_(last_x) {}
    double last_x() const noexcept { return last_x_; }

private:
    double last_x_;
};

// An iterative procedure (Picard sweep, Newton polish, contour refinement)
// failed to converge within its budget. Maps to exit code 3.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hillspec
