#pragma once

#include <stdexcept>
#include <string>

namespace fiberspin {

// Argument outside the supported range of a special function or solver.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested (l, m) is not guided by the fiber.
class UnguidedModeError : public std::runtime_error {
 public:
  UnguidedModeError(int l, int m)
      : std::runtime_error("LP(" + std::to_string(l) + "," + std::to_string(m) +
                           ") is not guided by this fiber"),
        l_(l),
        m_(m) {}
  int l() const noexcept { return l_; }
  int m() const noexcept { return m_; }

 private:
  int l_;
  int m_;
};

class LabelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class GridMismatchError : public std::invalid_argument {
 public:
  GridMismatchError() : std::invalid_argument("fields are sampled on different grids") {}
};

class ZeroFieldError : public std::runtime_error {
 public:
  ZeroFieldError() : std::runtime_error("field has zero power") {}
};

// Spectrum has weight in the top azimuthal band; the grid is too coarse.
class AliasingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfSubspaceError : public std::runtime_error {
 public:
  explicit OutOfSubspaceError(double residual)
      : std::runtime_error("field leaves the (l, m) spin-orbit subspace, residual power " +
                           std::to_string(residual)),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Psi+/- at l = 1 would be built from TE/TM, which are not strictly degenerate.
class UnstablePairError : public std::invalid_argument {
 public:
  UnstablePairError()
      : std::invalid_argument(
            "Psi+/Psi- at l = 1 require TM +/- iTE, which are not strictly degenerate; "
            "the resulting OAM modes are unstable") {}
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace fiberspin
