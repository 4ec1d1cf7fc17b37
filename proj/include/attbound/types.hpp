#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace attbound {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Direction geometry too close to singular for a well-posed solve.
class DegenerateGeometryError : public Error {
public:
    explicit DegenerateGeometryError(const std::string& what) : Error(what) {}
};

/// Implicit integrator step failed (non-convergence or step too large).
class IntegratorError : public Error {
public:
    explicit IntegratorError(const std::string& what) : Error(what) {}
};

/// Predicted and measured ellipsoids admit no common bounding ellipsoid:
/// the supplied bounds are inconsistent or the filter has diverged.
class EmptyIntersectionError : public Error {
public:
    explicit EmptyIntersectionError(const std::string& what) : Error(what) {}
};

/// Scenario file failed to parse or violated a field invariant.
class ScenarioError : public Error {
public:
    explicit ScenarioError(const std::string& what) : Error(what) {}
};

}  // namespace attbound
