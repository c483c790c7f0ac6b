#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "jcpackets/errors.hpp"

namespace jcp {

using cplx = std::complex<double>;

// Physical parameters of the driven TLS-cavity system in the rotating frame.
// hbar = 1 throughout; g sets the global scale (times are reported as g*t,
// frequencies in units of g).
struct SystemParams {
  double g = 1.0;      // TLS-cavity coupling strength
  double delta = 0.0;  // cavity-laser detuning, delta = omega_C - omega_L

  static constexpr double hbar = 1.0;

  SystemParams() = default;
  SystemParams(double g_, double delta_);
};

struct DriveStep {
  double tau;  // switch time (units of 1/g)
  double f;    // driving strength from tau onward (units of g)

  friend bool operator==(const DriveStep&, const DriveStep&) = default;
};

// Piecewise-constant driving strength f(t). Steps are right-open: f(t)
// returns f_j for tau_j <= t < tau_{j+1}, so the value at a switch time is
// the new level. The first step must start at tau = 0.
class DriveProtocol {
 public:
  explicit DriveProtocol(std::vector<DriveStep> steps);
  static DriveProtocol constant(double f) { return DriveProtocol({{0.0, f}}); }

  double at(double t) const;
  const std::vector<DriveStep>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  double max_level() const;

  friend bool operator==(const DriveProtocol&, const DriveProtocol&) = default;

 private:
  std::vector<DriveStep> steps_;
};

// State vector over the bare product basis |G,n>, |X,n>, n = 0..n_max.
// Amplitudes are stored interleaved: data()[2n] = <G,n|psi>,
// data()[2n+1] = <X,n|psi>.
class FockState {
 public:
  explicit FockState(int n_max);

  int n_max() const { return n_max_; }
  double time = 0.0;

  cplx& amp_g(int n) { return amps_[2 * static_cast<std::size_t>(n)]; }
  cplx& amp_x(int n) { return amps_[2 * static_cast<std::size_t>(n) + 1]; }
  const cplx& amp_g(int n) const { return amps_[2 * static_cast<std::size_t>(n)]; }
  const cplx& amp_x(int n) const { return amps_[2 * static_cast<std::size_t>(n) + 1]; }

  std::vector<cplx>& data() { return amps_; }
  const std::vector<cplx>& data() const { return amps_; }

  double norm2() const;
  // Occupation of the top `last` photon numbers; the under-truncation probe.
  double tail_occupation(int last = 5) const;
  void normalize();

 private:
  int n_max_;
  std::vector<cplx> amps_;
};

enum class InitialState { ground, lds_plus, lds_minus };

InitialState initial_state_from_name(const std::string& name);
std::string to_string(InitialState kind);

// |G,0>, |Phi+,0> or |Phi-,0>.
FockState make_initial_state(InitialState kind, int n_max);

// (alpha |G> + beta |X>) (x) |z coherent>, normalized. The coherent tail
// beyond n_max is truncated and the state renormalized.
FockState make_product_state(cplx alpha, cplx beta, cplx z, int n_max);

// H psi in the truncated bare basis:
//   (H psi)_{G,n} = delta*n psi_{G,n} + g*sqrt(n) psi_{X,n-1} - f psi_{G<->X}
//   (H psi)_{X,n} = delta*n psi_{X,n} + g*sqrt(n+1) psi_{G,n+1} - f psi_{G,n}
// Couplings beyond the truncation edge drop out.
FockState apply_hamiltonian(const FockState& state, const SystemParams& params,
                            double f);

// Low-level kernels used by the RK4 loop; `out` must hold 2*(n_max+1)
// entries and sqrt_table[n] = sqrt(n) for n = 0..n_max+1.
void apply_hamiltonian_raw(const cplx* in, cplx* out, int n_max, double g,
                           double delta, double f, const double* sqrt_table);
void apply_minus_i_hamiltonian_raw(const cplx* in, cplx* out, int n_max,
                                   double g, double delta, double f,
                                   const double* sqrt_table);

// Amplitudes over the laser-dressed states Phi± = (|G> ± |X>)/sqrt(2).
struct LdsAmplitudes {
  std::vector<cplx> plus;
  std::vector<cplx> minus;
  double norm2() const;
};

LdsAmplitudes to_lds(const FockState& state);
FockState from_lds(const LdsAmplitudes& lds, double time = 0.0);

std::vector<double> make_sqrt_table(int n_max);

}  // namespace jcp
