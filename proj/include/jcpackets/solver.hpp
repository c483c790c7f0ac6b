#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jcpackets/model.hpp"

namespace jcp {

struct EvolveOptions {
  double dt = 0.0;                 // 0 -> 0.05 / omega_max
  double sample_interval = 0.02;   // observable sampling, units of 1/g
  double snapshot_interval = 0.1;  // full-state snapshots, 0 disables
  std::vector<double> snapshot_times;  // extra requested snapshot times
  double tail_threshold = 1e-10;
  double norm_tolerance = 1e-6;
};

struct ObservableSample {
  double t;
  double norm2;
  double energy;  // <H> with the drive level active at t
  double mean_n;
  double lds_inversion;
};

struct Trajectory {
  std::vector<ObservableSample> samples;
  std::vector<FockState> snapshots;  // time field carries the snapshot time
  std::vector<double> step_times;    // switch times after grid snapping
  double dt = 0.0;
  std::vector<std::string> warnings;

  std::vector<double> times() const;
  std::vector<double> mean_n_series() const;
};

// Largest angular frequency scale of the truncated problem; sets the default
// RK4 step via dt = 0.05 / omega_max.
double omega_max_estimate(const SystemParams& params, double f_max, int n_max);
double default_dt(const SystemParams& params, double f_max, int n_max);

// Fixed-step RK4 integration of i d/dt psi = H(f(t)) psi. Switch times are
// snapped to the step grid; the new level applies from the snapped time
// onward. Throws UnderTruncationError / NormDriftError on numerical failure.
Trajectory evolve(const FockState& initial, const SystemParams& params,
                  const DriveProtocol& protocol, double t_end,
                  const EvolveOptions& options = {});

// P_n = |<G,n|psi>|^2 + |<X,n|psi>|^2
std::vector<double> photon_distribution(const FockState& state);
double mean_photon_number(const FockState& state);

// Global LDS inversion: sum_n (|<Phi+,n|psi>|^2 - |<Phi-,n|psi>|^2).
double lds_inversion(const FockState& state);

// Photon-number-resolved LDS measure; entries with P_n <= floor come out as
// quiet NaN.
std::vector<double> lds_measure(const FockState& state, double floor = 1e-12);

double expectation_H(const FockState& state, const SystemParams& params,
                     double f);

}  // namespace jcp
