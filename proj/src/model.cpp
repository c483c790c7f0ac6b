#include "jcpackets/model.hpp"

#include <algorithm>
#include <cmath>

namespace jcp {

SystemParams::SystemParams(double g_, double delta_) : g(g_), delta(delta_) {
  if (!(g > 0.0) || !std::isfinite(g)) {
    throw std::invalid_argument("coupling g must be positive and finite");
  }
  if (!std::isfinite(delta)) {
    throw std::invalid_argument("detuning must be finite");
  }
  if (delta < 0.0) {
    throw std::invalid_argument("negative detuning is not supported");
  }
}

DriveProtocol::DriveProtocol(std::vector<DriveStep> steps) : steps_(std::move(steps)) {
  if (steps_.empty()) {
    throw std::invalid_argument("protocol needs at least one level");
  }
  if (steps_.front().tau != 0.0) {
    throw std::invalid_argument("first protocol level must start at tau = 0");
  }
  for (std::size_t j = 0; j < steps_.size(); ++j) {
    if (!std::isfinite(steps_[j].tau) || !std::isfinite(steps_[j].f)) {
      throw std::invalid_argument("protocol entries must be finite");
    }
    if (steps_[j].f < 0.0) {
      throw std::invalid_argument("driving strength must be non-negative");
    }
    if (j > 0 && !(steps_[j].tau > steps_[j - 1].tau)) {
      throw std::invalid_argument("step times must be strictly increasing");
    }
  }
}

double DriveProtocol::at(double t) const {
  // Right-open intervals: the level at a switch time is the new one.
  std::size_t j = 0;
  while (j + 1 < steps_.size() && t >= steps_[j + 1].tau) ++j;
  return steps_[j].f;
}

double DriveProtocol::max_level() const {
  double m = 0.0;
  for (const auto& s : steps_) m = std::max(m, s.f);
  return m;
}

FockState::FockState(int n_max) : n_max_(n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  amps_.assign(2 * static_cast<std::size_t>(n_max) + 2, cplx(0.0, 0.0));
}

double FockState::norm2() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

double FockState::tail_occupation(int last) const {
  double s = 0.0;
  const int lo = std::max(0, n_max_ - last + 1);
  for (int n = lo; n <= n_max_; ++n) {
    s += std::norm(amp_g(n)) + std::norm(amp_x(n));
  }
  return s;
}

void FockState::normalize() {
  const double nrm = std::sqrt(norm2());
  if (nrm == 0.0) return;
  for (auto& a : amps_) a /= nrm;
}

InitialState initial_state_from_name(const std::string& name) {
  if (name == "ground") return InitialState::ground;
  if (name == "lds_plus") return InitialState::lds_plus;
  if (name == "lds_minus") return InitialState::lds_minus;
  throw ConfigError("unknown initial state '" + name +
                    "' (expected ground|lds_plus|lds_minus)");
}

std::string to_string(InitialState kind) {
  switch (kind) {
    case InitialState::ground: return "ground";
    case InitialState::lds_plus: return "lds_plus";
    case InitialState::lds_minus: return "lds_minus";
  }
  return "?";
}

FockState make_initial_state(InitialState kind, int n_max) {
  FockState s(n_max);
  const double r = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case InitialState::ground:
      s.amp_g(0) = 1.0;
      break;
    case InitialState::lds_plus:
      s.amp_g(0) = r;
      s.amp_x(0) = r;
      break;
    case InitialState::lds_minus:
      s.amp_g(0) = r;
      s.amp_x(0) = -r;
      break;
  }
  return s;
}

FockState make_product_state(cplx alpha, cplx beta, cplx z, int n_max) {
  FockState s(n_max);
  // Coherent amplitudes by upward recurrence, exp(-|z|^2/2) z^n / sqrt(n!).
  cplx c = std::exp(-0.5 * std::norm(z));
  for (int n = 0; n <= n_max; ++n) {
    s.amp_g(n) = alpha * c;
    s.amp_x(n) = beta * c;
    c *= z / std::sqrt(static_cast<double>(n + 1));
  }
  s.normalize();
  return s;
}

std::vector<double> make_sqrt_table(int n_max) {
  std::vector<double> t(static_cast<std::size_t>(n_max) + 2);
  for (std::size_t n = 0; n < t.size(); ++n) t[n] = std::sqrt(static_cast<double>(n));
  return t;
}

void apply_hamiltonian_raw(const cplx* in, cplx* out, int n_max, double g,
                           double delta, double f, const double* sqrt_table) {
  for (int n = 0; n <= n_max; ++n) {
    const std::size_t ig = 2 * static_cast<std::size_t>(n);
    const std::size_t ix = ig + 1;
    cplx hg = delta * n * in[ig] - f * in[ix];
    cplx hx = delta * n * in[ix] - f * in[ig];
    if (n > 0) hg += g * sqrt_table[n] * in[ix - 2];      // <G,n|H|X,n-1>
    if (n < n_max) hx += g * sqrt_table[n + 1] * in[ig + 2];  // <X,n|H|G,n+1>
    out[ig] = hg;
    out[ix] = hx;
  }
}

void apply_minus_i_hamiltonian_raw(const cplx* in, cplx* out, int n_max,
                                   double g, double delta, double f,
                                   const double* sqrt_table) {
  for (int n = 0; n <= n_max; ++n) {
    const std::size_t ig = 2 * static_cast<std::size_t>(n);
    const std::size_t ix = ig + 1;
    cplx hg = delta * n * in[ig] - f * in[ix];
    cplx hx = delta * n * in[ix] - f * in[ig];
    if (n > 0) hg += g * sqrt_table[n] * in[ix - 2];
    if (n < n_max) hx += g * sqrt_table[n + 1] * in[ig + 2];
    out[ig] = cplx(hg.imag(), -hg.real());
    out[ix] = cplx(hx.imag(), -hx.real());
  }
}

FockState apply_hamiltonian(const FockState& state, const SystemParams& params,
                            double f) {
  if (f < 0.0) throw std::invalid_argument("driving strength must be non-negative");
  FockState out(state.n_max());
  out.time = state.time;
  const auto sq = make_sqrt_table(state.n_max());
  apply_hamiltonian_raw(state.data().data(), out.data().data(), state.n_max(),
                        params.g, params.delta, f, sq.data());
  return out;
}

double LdsAmplitudes::norm2() const {
  double s = 0.0;
  for (const auto& a : plus) s += std::norm(a);
  for (const auto& a : minus) s += std::norm(a);
  return s;
}

LdsAmplitudes to_lds(const FockState& state) {
  const int nm = state.n_max();
  LdsAmplitudes lds;
  lds.plus.resize(static_cast<std::size_t>(nm) + 1);
  lds.minus.resize(static_cast<std::size_t>(nm) + 1);
  const double r = 1.0 / std::sqrt(2.0);
  for (int n = 0; n <= nm; ++n) {
    lds.plus[static_cast<std::size_t>(n)] = r * (state.amp_g(n) + state.amp_x(n));
    lds.minus[static_cast<std::size_t>(n)] = r * (state.amp_g(n) - state.amp_x(n));
  }
  return lds;
}

FockState from_lds(const LdsAmplitudes& lds, double time) {
  if (lds.plus.size() != lds.minus.size() || lds.plus.empty()) {
    throw std::invalid_argument("inconsistent LDS ladders");
  }
  FockState s(static_cast<int>(lds.plus.size()) - 1);
  s.time = time;
  const double r = 1.0 / std::sqrt(2.0);
  for (std::size_t n = 0; n < lds.plus.size(); ++n) {
    s.amp_g(static_cast<int>(n)) = r * (lds.plus[n] + lds.minus[n]);
    s.amp_x(static_cast<int>(n)) = r * (lds.plus[n] - lds.minus[n]);
  }
  return s;
}

}  // namespace jcp
