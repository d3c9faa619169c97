#pragma once

#include <stdexcept>
#include <string>

namespace frontmesh {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent user configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File could not be read, parsed or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input mesh violates a structural requirement (non-manifold edge,
/// degenerate triangle, bad index).
class MeshError : public Error {
 public:
  using Error::Error;
};

/// An algorithm stage failed to produce a valid result.
class AlgorithmError : public Error {
 public:
  using Error::Error;
};

}  // namespace frontmesh
