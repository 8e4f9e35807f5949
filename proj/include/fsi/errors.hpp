#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace fsi {

/// Invalid user input: bad counts, missing or out-of-range config keys.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The interface height fell to or below the positivity floor.
class GeometryError : public std::runtime_error {
public:
  GeometryError(const std::string& what, int node, double value)
      : std::runtime_error(what), node_(node), value_(value) {}

  int node() const { return node_; }
  double value() const { return value_; }

private:
  int node_;
  double value_;
};

/// Linear solve failed (singular matrix, residual above tolerance).
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& what, std::optional<int> dof = std::nullopt)
      : std::runtime_error(what), dof_(dof) {}

  std::optional<int> dof() const { return dof_; }

private:
  std::optional<int> dof_;
};

}  // namespace fsi
