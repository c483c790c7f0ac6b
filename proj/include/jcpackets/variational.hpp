#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "jcpackets/model.hpp"

namespace jcp {

// Eigenbranch of the coherent-state-reduced TLS Hamiltonian H_TLS(z).
// Branch one carries eigenfrequency -|gz - f|, branch two +|gz - f|.
enum class Branch { one = 1, two = 2 };

inline int branch_index(Branch b) { return b == Branch::one ? 1 : 2; }
// -1 for branch one, +1 for branch two; the sign that turns the shared
// formulas "minus-plus" into code.
inline double branch_sign(Branch b) { return b == Branch::one ? -1.0 : 1.0; }
Branch branch_from_index(int j);
Branch other_branch(Branch b);

struct TlsEigenpair {
  double omega;  // eigenfrequency
  cplx phi_g;    // ground amplitude (fixed real positive, 1/sqrt(2))
  cplx phi_x;    // excited amplitude
};

struct VariationalOptions {
  // Modulus floor for (z - f/g)/|z - f/g|, as a fraction of max(f, g).
  double singular_floor = 1e-9;
  // First contact with |z - f/g| < warn_radius flags NearDegeneracy.
  double warn_radius = 0.5;
  double dt = 0.0;  // 0 -> 1e-3 of the estimated oscillation period
};

struct BranchTrajectory {
  Branch branch = Branch::one;
  double f = 0.0;
  std::vector<double> times;
  std::vector<cplx> z;
  std::vector<double> phase;  // accumulated adiabatic phase, int omega dt
  std::optional<double> near_degeneracy_time;
  double max_energy_residual = 0.0;  // max |E(t) - E(0)| of delta|z|^2 -+ |gz-f|
  double dt = 0.0;

  double duration() const { return times.empty() ? 0.0 : times.back() - times.front(); }
};

// Instantaneous eigenpair of H_TLS(z) for the given drive level. The global
// phase is fixed by phi_g real positive. Throws DegeneratePointError within
// the singular floor of z = f/g.
TlsEigenpair tls_eigenpair(cplx z, double f, const SystemParams& params,
                           Branch branch, const VariationalOptions& options = {});

// Signed LDS overlap lambda_{1/2}(z) = -+ (Re z - f/g)/|z - f/g|, in [-1,1].
double lambda_of_z(cplx z, double f, const SystemParams& params, Branch branch,
                   const VariationalOptions& options = {});

// RK4 integration of the adiabatic packet equation of motion
//   i dz/dt = delta z -+ (g/2) (z - f/g)/|z - f/g|.
BranchTrajectory evolve_branch(cplx z0, Branch branch, double f,
                               const SystemParams& params, double t_end,
                               const VariationalOptions& options = {});

// Continue an existing trajectory in place for `duration` under drive f.
void extend_branch(BranchTrajectory& traj, double f, const SystemParams& params,
                   double duration, const VariationalOptions& options = {});

// Real turning point of the canonical trajectory started at z(0) = 0.
// delta = 0 degenerates to the common value 2f/g.
double turning_point(Branch branch, double f, const SystemParams& params);

struct OscillationFrequency {
  double omega = 0.0;
  bool valid = false;  // closed form trusted only for f*delta >= g^2
};

// Packet oscillation frequency Omega_{1/2} = delta / sqrt(1 ± g^2/(2 f delta)).
OscillationFrequency oscillation_frequency(Branch branch, double f,
                                           const SystemParams& params);

// Closed-form canonical trajectories used as integration oracles.
cplx closed_form_resonant(double t, double f, const SystemParams& params,
                          Branch branch);
cplx closed_form_large_detuning(double t, double f, const SystemParams& params,
                                Branch branch);

// Packet-splitting overlap S(f0, f1) = |<phi_2(f0), phi_1(f1)>|^2 at z.
double overlap_S(double f0, double f1, cplx z, const SystemParams& params,
                 const VariationalOptions& options = {});

// Truncation suggestion for constant drive, from the canonical turning
// points plus a Poissonian-width margin.
int suggested_n_max(const SystemParams& params, double f);

}  // namespace jcp
