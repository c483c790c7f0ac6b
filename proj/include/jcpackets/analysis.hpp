#pragma once

#include <optional>
#include <span>
#include <vector>

#include "jcpackets/model.hpp"

namespace jcp {

struct GridSpec {
  double re_min = -10.0;
  double re_max = 10.0;
  int n_re = 101;
  double im_min = -10.0;
  double im_max = 10.0;
  int n_im = 101;

  static GridSpec square(double half_width, int n);
};

struct WignerGrid {
  std::vector<double> re_axis;
  std::vector<double> im_axis;
  std::vector<double> values;  // values[i_im * n_re + i_re]
  double time = 0.0;
  double integral = 0.0;  // grid-summed integral of W
  bool truncation_warning = false;

  double at(int i_re, int i_im) const {
    return values[static_cast<std::size_t>(i_im) * re_axis.size() + i_re];
  }
};

// Displaced-parity evaluation of the photonic Wigner function in the
// truncated Fock basis: W(a) = (2/pi) Tr[rho_phot D(2a) (-1)^n]. The TLS is
// traced out by summing the two amplitude ladders. O(n_max^2) per point;
// the conjugate off-diagonal pairs are combined, so the result is real by
// construction.
class WignerEvaluator {
 public:
  explicit WignerEvaluator(const FockState& state);

  double operator()(cplx alpha) const;

  int n_max() const { return n_max_; }

 private:
  int n_max_;
  std::vector<cplx> cg_, cx_;  // bare amplitude ladders
};

WignerGrid wigner(const FockState& state, const GridSpec& spec,
                  double norm_tolerance = 1e-2);

struct TrackOptions {
  double search_radius = 2.0;  // max distance from the seed before LostTrack
  double lattice = 0.1;        // hill-climb lattice spacing
  int max_iterations = 400;
};

struct TrackPoint {
  double t;
  cplx z;
  double w_abs;
};

struct PacketTrack {
  std::vector<TrackPoint> points;
  std::optional<double> lost_at;
};

// Follows local maxima of |W| across snapshots, one track per seed. Seeds
// continue from the previous maximum unless per-snapshot hints are given
// (hints[i][k] = start position for track k at snapshot i).
std::vector<PacketTrack> wigner_max_track(
    std::span<const FockState> snapshots, const std::vector<cplx>& seeds,
    const TrackOptions& options = {},
    const std::vector<std::vector<cplx>>* seed_hints = nullptr);

struct Packet {
  double center = 0.0;  // mass-weighted mean photon number
  double mass = 0.0;
  int lo = 0;  // watershed segment, inclusive
  int hi = 0;
  double height = 0.0;  // smoothed peak value
};

struct DetectOptions {
  int smooth_width = 3;
  double prominence = 0.005;
  int min_separation = 4;
};

// Local-maximum packet finder on a photon number distribution.
std::vector<Packet> detect_packets(std::span<const double> pn,
                                   const DetectOptions& options = {});

struct Spectrum {
  std::vector<double> freqs;  // angular frequency, units of g
  std::vector<double> magnitudes;
  double window_length = 0.0;  // total covered time g*T

  double bin() const;
};

enum class SpectrumWindow { rectangular, hann };

// One-sided magnitude DFT of a uniformly sampled series, mean removed.
Spectrum spectrum(std::span<const double> series, std::span<const double> times,
                  SpectrumWindow window = SpectrumWindow::rectangular);

struct PeakMatch {
  double expected_omega = 0.0;
  bool matched = false;
  double peak_omega = 0.0;
  double magnitude = 0.0;
  int offset_bins = 0;
};

struct PeakReportOptions {
  double prominence_fraction = 0.05;  // of the largest magnitude
  int max_offset_bins = 3;
};

struct PeakReport {
  std::vector<PeakMatch> matches;
  std::vector<std::size_t> peaks;  // indices of all accepted spectral peaks
  // magnitude(first expected) / magnitude(second expected), NaN if unmatched.
  double magnitude_ratio = 0.0;
};

PeakReport peak_report(const Spectrum& spec, const std::vector<double>& expected,
                       const PeakReportOptions& options = {});

}  // namespace jcp
