// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace uavss
{

/// A parameter violates one of its domain invariants. `field()` names it.
class InvalidParameter : public std::invalid_argument
{
  public:
    InvalidParameter(std::string field, std::string const& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field))
    {
    }

    std::string const& field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// Geometry with no defined value (zero distance, coincident points).
class GeometryError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// The requested transform or tail integral does not converge.
class DivergenceError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// Numerical integration failed to meet its tolerance.
class ConvergenceError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace uavss
