#pragma once

#include <stdexcept>
#include <string>

namespace celldeploy {

/// Invalid or inconsistent input: scenario files, densities, configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A link whose geometry is undefined (user coincident with the antenna).
class DegenerateGeometry : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// NaN/Inf appeared in a gradient or objective during optimization.
class NonFiniteGradient : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace celldeploy
