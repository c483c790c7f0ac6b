#include "jcpackets/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jcp {

namespace {

double singular_floor_abs(double f, const SystemParams& params,
                          const VariationalOptions& options) {
  return options.singular_floor * std::max(f, params.g);
}

// Unit vector of gz - f with a hard degeneracy check.
cplx drive_direction(cplx z, double f, const SystemParams& params,
                     const VariationalOptions& options) {
  const cplx w = params.g * z - f;
  const double aw = std::abs(w);
  if (aw <= singular_floor_abs(f, params, options)) {
    throw DegeneratePointError(z, f);
  }
  return w / aw;
}

}  // namespace

Branch branch_from_index(int j) {
  if (j == 1) return Branch::one;
  if (j == 2) return Branch::two;
  throw std::invalid_argument("branch index must be 1 or 2");
}

Branch other_branch(Branch b) {
  return b == Branch::one ? Branch::two : Branch::one;
}

TlsEigenpair tls_eigenpair(cplx z, double f, const SystemParams& params,
                           Branch branch, const VariationalOptions& options) {
  const cplx w = params.g * z - f;
  const double aw = std::abs(w);
  if (aw <= singular_floor_abs(f, params, options)) {
    throw DegeneratePointError(z, f);
  }
  const double s = branch_sign(branch);
  TlsEigenpair e;
  e.omega = s * aw;
  e.phi_g = 1.0 / std::sqrt(2.0);
  e.phi_x = s * (w / aw) / std::sqrt(2.0);
  return e;
}

double lambda_of_z(cplx z, double f, const SystemParams& params, Branch branch,
                   const VariationalOptions& options) {
  const double dx = z.real() - f / params.g;
  const double dy = z.imag();
  const double r = std::hypot(dx, dy);
  if (r * params.g <= singular_floor_abs(f, params, options)) {
    throw DegeneratePointError(z, f);
  }
  return branch_sign(branch) * dx / r;
}

namespace {

double default_branch_dt(Branch branch, double f, const SystemParams& params) {
  // 1e-3 of the shorter of the resonant period and the class-D period.
  const double g = params.g;
  double period = 4.0 * M_PI * std::max(f, 0.25 * g) / (g * g);
  const auto om = oscillation_frequency(branch, f, params);
  if (std::isfinite(om.omega) && om.omega > 0.0) {
    period = std::min(period, 2.0 * M_PI / om.omega);
  }
  return 1e-3 * period;
}

struct BranchRhs {
  double delta;
  double g;
  double c;     // f/g
  double s;     // branch sign
  double floor; // modulus floor in z units

  cplx operator()(cplx z) const {
    const cplx d = z - c;
    const double ad = std::max(std::abs(d), floor);
    const cplx rhs = delta * z + s * (0.5 * g) * (d / ad);
    return cplx(rhs.imag(), -rhs.real());  // -i * rhs
  }
};

}  // namespace

BranchTrajectory evolve_branch(cplx z0, Branch branch, double f,
                               const SystemParams& params, double t_end,
                               const VariationalOptions& options) {
  BranchTrajectory traj;
  traj.branch = branch;
  traj.f = f;
  traj.times.push_back(0.0);
  traj.z.push_back(z0);
  traj.phase.push_back(0.0);
  traj.dt = options.dt > 0.0 ? options.dt : default_branch_dt(branch, f, params);
  extend_branch(traj, f, params, t_end, options);
  return traj;
}

void extend_branch(BranchTrajectory& traj, double f, const SystemParams& params,
                   double duration, const VariationalOptions& options) {
  if (duration <= 0.0) return;
  if (traj.times.empty()) throw std::invalid_argument("empty trajectory");
  traj.f = f;

  const double dt_req = options.dt > 0.0
      ? options.dt
      : (traj.dt > 0.0 ? traj.dt : default_branch_dt(traj.branch, f, params));
  const long n = std::max<long>(1, static_cast<long>(std::ceil(duration / dt_req - 1e-12)));
  const double dt = duration / static_cast<double>(n);

  const double s = branch_sign(traj.branch);
  const double c = f / params.g;
  BranchRhs rhs{params.delta, params.g, c, s,
                singular_floor_abs(f, params, options) / params.g};

  const double t0 = traj.times.back();
  cplx z = traj.z.back();
  double phase = traj.phase.empty() ? 0.0 : traj.phase.back();

  const double e0 = params.delta * std::norm(z) + s * std::abs(params.g * z - f);

  traj.times.reserve(traj.times.size() + n);
  traj.z.reserve(traj.z.size() + n);
  traj.phase.reserve(traj.phase.size() + n);

  for (long i = 1; i <= n; ++i) {
    const double om_a = s * std::abs(params.g * z - f);
    const cplx k1 = rhs(z);
    const cplx k2 = rhs(z + 0.5 * dt * k1);
    const cplx k3 = rhs(z + 0.5 * dt * k2);
    const cplx k4 = rhs(z + dt * k3);
    z += (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);

    const double t = t0 + i * dt;
    traj.times.push_back(t);
    traj.z.push_back(z);
    // Trapezoid accumulation of the adiabatic phase int omega dt.
    const double om_b = s * std::abs(params.g * z - f);
    phase += 0.5 * (om_a + om_b) * dt;
    traj.phase.push_back(phase);

    const double dist = std::abs(z - c);
    if (!traj.near_degeneracy_time && dist < options.warn_radius) {
      traj.near_degeneracy_time = t;
    }
    const double e = params.delta * std::norm(z) + s * std::abs(params.g * z - f);
    traj.max_energy_residual = std::max(traj.max_energy_residual, std::abs(e - e0));
  }
}

double turning_point(Branch branch, double f, const SystemParams& params) {
  const double g = params.g;
  const double delta = params.delta;
  if (delta == 0.0) return 2.0 * f / g;
  if (branch == Branch::one) {
    if (delta <= g * g / (8.0 * f)) {
      return (g / (2.0 * delta)) * (1.0 - std::sqrt(1.0 - 8.0 * f * delta / (g * g)));
    }
    return -g / delta;
  }
  if (delta <= g * g / f) {
    return (g / (2.0 * delta)) * (std::sqrt(1.0 + 8.0 * f * delta / (g * g)) - 1.0);
  }
  return g / delta;
}

OscillationFrequency oscillation_frequency(Branch branch, double f,
                                           const SystemParams& params) {
  OscillationFrequency out;
  const double g2 = params.g * params.g;
  if (params.delta <= 0.0 || f <= 0.0) {
    out.omega = 0.0;
    out.valid = false;
    return out;
  }
  const double arg = 1.0 - branch_sign(branch) * g2 / (2.0 * f * params.delta);
  if (arg <= 0.0) {
    out.omega = std::numeric_limits<double>::quiet_NaN();
    out.valid = false;
    return out;
  }
  out.omega = params.delta / std::sqrt(arg);
  out.valid = f * params.delta >= g2;
  return out;
}

cplx closed_form_resonant(double t, double f, const SystemParams& params,
                          Branch branch) {
  const double g = params.g;
  const double ph = -branch_sign(branch) * g * g * t / (2.0 * f);
  return (f / g) * (1.0 - std::exp(cplx(0.0, ph)));
}

cplx closed_form_large_detuning(double t, double f, const SystemParams& params,
                                Branch branch) {
  const double a = branch_sign(branch) * params.g / (2.0 * params.delta);
  return a * (1.0 - std::exp(cplx(0.0, -params.delta * t)));
}

double overlap_S(double f0, double f1, cplx z, const SystemParams& params,
                 const VariationalOptions& options) {
  const cplx u0 = drive_direction(z, f0, params, options);
  const cplx u1 = drive_direction(z, f1, params, options);
  return 0.25 * std::norm(1.0 - std::conj(u0) * u1);
}

int suggested_n_max(const SystemParams& params, double f) {
  const double z1 = std::abs(turning_point(Branch::one, f, params));
  const double z2 = std::abs(turning_point(Branch::two, f, params));
  const double nbar = std::ceil(std::max(z1, z2) * std::max(z1, z2));
  return static_cast<int>(std::ceil(nbar + 8.0 * std::sqrt(nbar) + 20.0));
}

}  // namespace jcp
