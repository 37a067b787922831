#pragma once

#include <Eigen/Core>

#include <compare>
#include <stdexcept>
#include <string>

namespace gdm {

using Point = Eigen::Vector2d;

struct Pose {
  Point position = Point::Zero();
  double heading = 0.0;  // rad
};

/// Integer lattice coordinates (column, row).
struct Cell {
  int ix = 0;
  int iy = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

class BoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative solve failed to reach tolerance; carries the final residual.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyBatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No feasible trajectory exists; callers switch to fallback goals.
class NoTrajectoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace gdm
