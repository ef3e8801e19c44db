#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace curlcurl
{

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Vector-valued function of a physical point.
using VectorFunction = std::function<Vec3(const Vec3&)>;

/// Base class of all errors raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Invalid mesh topology or geometry.
class MeshError : public Error
{
public:
  using Error::Error;
};

/// Malformed mesh file; carries the offending line number (1-based).
class MeshFormatError : public MeshError
{
public:
  MeshFormatError(int line, const std::string& what)
      : MeshError("line " + std::to_string(line) + ": " + what), line_(line)
  {
  }
  int line() const noexcept { return line_; }

private:
  int line_;
};

/// Invalid user configuration (degrees, parameters, ...).
class ConfigError : public Error
{
public:
  using Error::Error;
};

/// Linear solver breakdown or singular system.
class SolverError : public Error
{
public:
  using Error::Error;
};

} // namespace curlcurl
