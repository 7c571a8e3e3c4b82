#pragma once

#include <stdexcept>
#include <string>

namespace toolmorph {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Geometry
struct PointOutsideCage : Error {
  explicit PointOutsideCage(std::string msg, int vertex_index = -1)
      : Error(std::move(msg)), vertex_index(vertex_index) {}
  int vertex_index;  // offending boundary vertex, -1 if not applicable
};

struct DegenerateCage : Error {
  using Error::Error;
};

struct ParamsOutOfBounds : Error {
  using Error::Error;
};

// Differentiable simulation
struct DimensionMismatch : Error {
  using Error::Error;
};

struct NumericalBlowup : Error {
  explicit NumericalBlowup(std::string msg, int step_index = -1)
      : Error(std::move(msg)), step_index(step_index) {}
  int step_index;
};

// Trajectories and losses
struct MissingChannel : Error {
  using Error::Error;
};

struct HorizonMismatch : Error {
  using Error::Error;
};

// Optimizer
struct EmptyCandidate : Error {
  using Error::Error;
};

// Harness
struct ConfigError : Error {
  explicit ConfigError(std::string field_path, std::string msg)
      : Error(field_path + ": " + msg), field(std::move(field_path)) {}
  std::string field;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace toolmorph
