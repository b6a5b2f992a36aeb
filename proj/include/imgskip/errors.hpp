#pragma once

#include <stdexcept>
#include <string>

namespace imgskip {

// Array shapes or grid descriptors that do not line up.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Out-of-range algorithm or model parameter (step sizes, probabilities, weights).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of a function, e.g. a dual point outside its ball.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DivideByZeroError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A solver produced a non-finite iterate.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& algorithm, long iteration)
        : std::runtime_error(algorithm + ": non-finite iterate at iteration " +
                             std::to_string(iteration)),
          iteration_(iteration) {}

    long iteration() const noexcept { return iteration_; }

private:
    long iteration_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A reference solution failed its self-consistency check.
class ReferenceRejected : public std::runtime_error {
public:
    ReferenceRejected(double half_vs_full, double threshold)
        : std::runtime_error("reference rejected: half- vs full-budget rel_error " +
                             std::to_string(half_vs_full) + " exceeds " +
                             std::to_string(threshold)),
          half_vs_full_(half_vs_full), threshold_(threshold) {}

    double half_vs_full() const noexcept { return half_vs_full_; }
    double threshold() const noexcept { return threshold_; }

private:
    double half_vs_full_;
    double threshold_;
};

} // namespace imgskip
