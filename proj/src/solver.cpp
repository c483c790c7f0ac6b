#include "jcpackets/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "jcpackets/errors.hpp"

namespace jcp {

namespace {

double dot_real(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  }
  return s;
}

std::string format_snap_warning(double tau, double snapped) {
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "step time %.17g adjusted to grid point %.17g", tau, snapped);
  return buf;
}

}  // namespace

std::vector<double> Trajectory::times() const {
  std::vector<double> t(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) t[i] = samples[i].t;
  return t;
}

std::vector<double> Trajectory::mean_n_series() const {
  std::vector<double> v(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) v[i] = samples[i].mean_n;
  return v;
}

double omega_max_estimate(const SystemParams& params, double f_max, int n_max) {
  return 2.0 * f_max + params.delta * n_max +
         2.0 * params.g * std::sqrt(static_cast<double>(n_max));
}

double default_dt(const SystemParams& params, double f_max, int n_max) {
  return 0.05 / omega_max_estimate(params, f_max, n_max);
}

std::vector<double> photon_distribution(const FockState& state) {
  std::vector<double> p(static_cast<std::size_t>(state.n_max()) + 1);
  for (int n = 0; n <= state.n_max(); ++n) {
    p[static_cast<std::size_t>(n)] = std::norm(state.amp_g(n)) + std::norm(state.amp_x(n));
  }
  return p;
}

double mean_photon_number(const FockState& state) {
  double s = 0.0;
  for (int n = 1; n <= state.n_max(); ++n) {
    s += n * (std::norm(state.amp_g(n)) + std::norm(state.amp_x(n)));
  }
  return s;
}

double lds_inversion(const FockState& state) {
  // |<Phi+,n|psi>|^2 - |<Phi-,n|psi>|^2 = 2 Re(<G,n|psi> conj(<X,n|psi>))
  double s = 0.0;
  for (int n = 0; n <= state.n_max(); ++n) {
    const cplx gg = state.amp_g(n);
    const cplx xx = state.amp_x(n);
    s += 2.0 * (gg.real() * xx.real() + gg.imag() * xx.imag());
  }
  return s;
}

std::vector<double> lds_measure(const FockState& state, double floor) {
  std::vector<double> l(static_cast<std::size_t>(state.n_max()) + 1);
  for (int n = 0; n <= state.n_max(); ++n) {
    const cplx gg = state.amp_g(n);
    const cplx xx = state.amp_x(n);
    const double pn = std::norm(gg) + std::norm(xx);
    if (pn > floor) {
      const double num = 2.0 * (gg.real() * xx.real() + gg.imag() * xx.imag());
      l[static_cast<std::size_t>(n)] = num / pn;
    } else {
      l[static_cast<std::size_t>(n)] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return l;
}

double expectation_H(const FockState& state, const SystemParams& params, double f) {
  FockState h = apply_hamiltonian(state, params, f);
  return dot_real(state.data(), h.data());
}

namespace {

struct Rk4Workspace {
  std::vector<cplx> k1, k2, k3, k4, tmp;
  explicit Rk4Workspace(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
};

void rk4_step(std::vector<cplx>& psi, double dt, int n_max, double g,
              double delta, double f, const double* sq, Rk4Workspace& w) {
  const std::size_t n = psi.size();
  apply_minus_i_hamiltonian_raw(psi.data(), w.k1.data(), n_max, g, delta, f, sq);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = psi[i] + (0.5 * dt) * w.k1[i];
  apply_minus_i_hamiltonian_raw(w.tmp.data(), w.k2.data(), n_max, g, delta, f, sq);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = psi[i] + (0.5 * dt) * w.k2[i];
  apply_minus_i_hamiltonian_raw(w.tmp.data(), w.k3.data(), n_max, g, delta, f, sq);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = psi[i] + dt * w.k3[i];
  apply_minus_i_hamiltonian_raw(w.tmp.data(), w.k4.data(), n_max, g, delta, f, sq);
  const double c = dt / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    psi[i] += c * (w.k1[i] + 2.0 * (w.k2[i] + w.k3[i]) + w.k4[i]);
  }
}

}  // namespace

Trajectory evolve(const FockState& initial, const SystemParams& params,
                  const DriveProtocol& protocol, double t_end,
                  const EvolveOptions& options) {
  if (t_end < 0.0 || !std::isfinite(t_end)) {
    throw std::invalid_argument("t_end must be non-negative and finite");
  }
  const int n_max = initial.n_max();
  const double f_max = protocol.max_level();

  double dt_req = options.dt > 0.0 ? options.dt : default_dt(params, f_max, n_max);
  Trajectory traj;

  // Even a zero-duration run reports the initial observables.
  const long n_steps = t_end > 0.0
      ? std::max<long>(1, static_cast<long>(std::ceil(t_end / dt_req - 1e-12)))
      : 0;
  const double dt = n_steps > 0 ? t_end / static_cast<double>(n_steps) : dt_req;
  traj.dt = dt;

  // Snap switch times onto the step grid; switches past t_end never fire.
  std::vector<long> switch_step(protocol.size(), 0);
  for (std::size_t j = 1; j < protocol.size(); ++j) {
    const double tau = protocol.steps()[j].tau;
    long idx = static_cast<long>(std::llround(tau / dt));
    if (tau > t_end || idx > n_steps) {
      switch_step[j] = n_steps + 1;
      continue;
    }
    idx = std::clamp<long>(idx, 0, n_steps);
    switch_step[j] = idx;
    const double snapped = idx * dt;
    traj.step_times.push_back(snapped);
    if (std::abs(snapped - tau) > 0.5 * dt + 1e-15) {
      traj.warnings.push_back(format_snap_warning(tau, snapped));
    }
    if (j > 1 && switch_step[j] <= switch_step[j - 1]) {
      traj.warnings.push_back("adjacent step times snapped to the same grid point");
    }
  }

  const long sample_every = std::max<long>(
      1, static_cast<long>(std::llround(options.sample_interval / dt)));
  const long snapshot_every = options.snapshot_interval > 0.0
      ? std::max<long>(1, static_cast<long>(std::llround(options.snapshot_interval / dt)))
      : 0;

  std::vector<long> requested_snaps;
  for (double t : options.snapshot_times) {
    long idx = static_cast<long>(std::llround(t / dt));
    if (idx >= 0 && idx <= n_steps) requested_snaps.push_back(idx);
  }
  std::sort(requested_snaps.begin(), requested_snaps.end());
  requested_snaps.erase(std::unique(requested_snaps.begin(), requested_snaps.end()),
                        requested_snaps.end());

  FockState state = initial;
  const auto sq = make_sqrt_table(n_max);
  Rk4Workspace work(state.data().size());

  std::size_t proto_idx = 0;
  std::size_t next_req_snap = 0;

  auto sample_and_check = [&](long step, double f_now) {
    const double t = step * dt;
    ObservableSample s;
    s.t = t;
    s.norm2 = state.norm2();
    apply_hamiltonian_raw(state.data().data(), work.tmp.data(), n_max, params.g,
                          params.delta, f_now, sq.data());
    s.energy = dot_real(state.data(), work.tmp);
    s.mean_n = mean_photon_number(state);
    s.lds_inversion = lds_inversion(state);
    traj.samples.push_back(s);

    const double drift = std::abs(1.0 - s.norm2);
    if (drift > options.norm_tolerance) throw NormDriftError(t, drift);
    const double tail = state.tail_occupation();
    if (tail > options.tail_threshold) throw UnderTruncationError(t, tail);
  };

  auto maybe_snapshot = [&](long step) {
    bool want = snapshot_every > 0 && step % snapshot_every == 0;
    if (next_req_snap < requested_snaps.size() && requested_snaps[next_req_snap] == step) {
      want = true;
      while (next_req_snap < requested_snaps.size() &&
             requested_snaps[next_req_snap] == step) {
        ++next_req_snap;
      }
    }
    if (want) {
      state.time = step * dt;
      traj.snapshots.push_back(state);
    }
  };

  while (proto_idx + 1 < protocol.size() && switch_step[proto_idx + 1] <= 0) {
    ++proto_idx;
  }
  double f_now = protocol.steps()[proto_idx].f;
  sample_and_check(0, f_now);
  maybe_snapshot(0);

  for (long step = 0; step < n_steps; ++step) {
    while (proto_idx + 1 < protocol.size() && switch_step[proto_idx + 1] <= step) {
      ++proto_idx;
    }
    f_now = protocol.steps()[proto_idx].f;
    rk4_step(state.data(), dt, n_max, params.g, params.delta, f_now, sq.data(), work);

    const long done = step + 1;
    // Samples stay on the uniform sample grid so downstream spectra see
    // equidistant points; the run may end up to one sample interval early.
    if (done % sample_every == 0) {
      while (proto_idx + 1 < protocol.size() && switch_step[proto_idx + 1] <= done) {
        ++proto_idx;  // sample uses the level active from this instant on
      }
      sample_and_check(done, protocol.steps()[proto_idx].f);
    }
    maybe_snapshot(done);
  }

  return traj;
}

}  // namespace jcp
