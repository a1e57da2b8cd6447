#pragma once

#include <stdexcept>
#include <string>

namespace polyberg {

/// Argument outside the documented domain of an operation.
class invalid_argument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A sampled or accumulated value became non-finite.
class numeric_overflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation point too close to a pole of a meromorphic factor.
class pole_proximity : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A quadrature-based result cannot meet its accuracy contract.
class accuracy_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw invalid_argument(what);
}

} // namespace detail
} // namespace polyberg
