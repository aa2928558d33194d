#pragma once

#include <stdexcept>
#include <string>

namespace hdfl {

/// Invalid inputs: dimension mismatches, degenerate labels, malformed
/// files or configs. Maps to CLI exit code 3.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Degenerate numeric states: zero weight vector, vanishing gradient,
/// undefined estimator values. Maps to CLI exit code 4.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hdfl
