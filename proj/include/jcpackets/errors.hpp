#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace jcp {

// Configuration / input validation problems. CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The truncated Fock basis can no longer hold the state. Carries the first
// time at which the tail occupation exceeded the threshold.
class UnderTruncationError : public std::runtime_error {
 public:
  UnderTruncationError(double t, double tail)
      : std::runtime_error("state under-truncated at t = " + std::to_string(t) +
                           ", tail occupation " + std::to_string(tail)),
        time(t),
        tail_occupation(tail) {}
  double time;
  double tail_occupation;
};

class NormDriftError : public std::runtime_error {
 public:
  NormDriftError(double t, double drift)
      : std::runtime_error("norm drift " + std::to_string(drift) +
                           " beyond tolerance at t = " + std::to_string(t)),
        time(t),
        drift(drift) {}
  double time;
  double drift;
};

// Eigenpair evaluation at (or numerically on top of) the eigenfrequency
// crossing z = f/g, where the adiabatic description is not defined.
class DegeneratePointError : public std::domain_error {
 public:
  DegeneratePointError(std::complex<double> z, double f)
      : std::domain_error("degenerate point: z too close to f/g (f = " +
                          std::to_string(f) + ")"),
        z(z),
        f(f) {}
  std::complex<double> z;
  double f;
};

// Protocol synthesis failures. CLI maps these to exit code 4.
class NotAttainedError : public std::runtime_error {
 public:
  explicit NotAttainedError(const std::string& what) : std::runtime_error(what) {}
};

class GuardBandError : public std::runtime_error {
 public:
  explicit GuardBandError(const std::string& what) : std::runtime_error(what) {}
};

class InfeasibleGeometryError : public std::runtime_error {
 public:
  explicit InfeasibleGeometryError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace jcp
