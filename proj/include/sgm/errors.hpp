#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgm {

/// Picard iteration failed even after the allowed number of step halvings.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// A cylinder window holds too few stored frames for the time quadrature.
class TooFewFrames : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sampled-field cylinder spans too few grid nodes in some direction.
class UnderResolved : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A region (cylinder, test-function support) leaves the available domain.
class OutsideDomain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed files, configs or command arguments.
class BadInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sgm
