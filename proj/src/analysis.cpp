#include "jcpackets/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "jcpackets/errors.hpp"

namespace jcp {

GridSpec GridSpec::square(double half_width, int n) {
  GridSpec s;
  s.re_min = -half_width;
  s.re_max = half_width;
  s.im_min = -half_width;
  s.im_max = half_width;
  s.n_re = n;
  s.n_im = n;
  return s;
}

WignerEvaluator::WignerEvaluator(const FockState& state) : n_max_(state.n_max()) {
  cg_.resize(static_cast<std::size_t>(n_max_) + 1);
  cx_.resize(static_cast<std::size_t>(n_max_) + 1);
  for (int n = 0; n <= n_max_; ++n) {
    cg_[static_cast<std::size_t>(n)] = state.amp_g(n);
    cx_[static_cast<std::size_t>(n)] = state.amp_x(n);
  }
}

// W(a) = (2/pi) Tr[rho_phot D(2a) (-1)^n] evaluated through the scaled
// Laguerre functions T_n^k = exp(-x/2) x^{k/2} sqrt(n!/(n+k)!) L_n^k(x),
// which are the moduli of displacement matrix elements and stay in [-1,1].
// The n-recurrence runs with a power-of-two scale exponent so that starting
// values below the double range still seed it correctly.
double WignerEvaluator::operator()(cplx alpha) const {
  const int nm = n_max_;
  const cplx beta = 2.0 * alpha;
  const double x = std::norm(beta);

  if (x == 0.0) {
    double s = 0.0;
    for (int n = 0; n <= nm; ++n) {
      const double pn = std::norm(cg_[n]) + std::norm(cx_[n]);
      s += (n % 2 == 0 ? pn : -pn);
    }
    return (2.0 / M_PI) * s;
  }

  const cplx p = beta / std::abs(beta);
  const double lnx = std::log(x);

  double total = 0.0;
  cplx pk = 1.0;  // p^k
  for (int k = 0; k <= nm; ++k, pk *= p) {
    // T_0^k with scale bookkeeping: value = t * 2^e.
    const double ln_t0 = -0.5 * x + 0.5 * k * lnx - 0.5 * std::lgamma(k + 1.0);
    int e = 0;
    if (ln_t0 < -600.0) {
      // keep the recurrence seed representable; ldexp restores the scale
      e = static_cast<int>(std::floor((ln_t0 + 600.0) / M_LN2));
    }
    double t_prev = 0.0;
    double t_cur = std::exp(ln_t0 - e * M_LN2);
    if (!std::isfinite(t_cur)) continue;

    for (int i = 0; i + k <= nm; ++i) {
      const double t_full = std::ldexp(t_cur, e);
      if (t_full != 0.0) {
        if (k == 0) {
          const double pn = std::norm(cg_[i]) + std::norm(cx_[i]);
          total += t_full * (i % 2 == 0 ? pn : -pn);
        } else {
          // Paired upper/lower diagonal terms combine to a real number:
          // (-1)^i * 2 Re(p^k conj(d)), d = conj(c_i) c_{i+k}.
          const cplx d = std::conj(cg_[i]) * cg_[i + k] +
                         std::conj(cx_[i]) * cx_[i + k];
          const double re = pk.real() * d.real() + pk.imag() * d.imag();
          total += t_full * 2.0 * (i % 2 == 0 ? re : -re);
        }
      }
      // Advance T_{i}^k -> T_{i+1}^k.
      const double a = (2.0 * i + k + 1.0 - x) *
                       std::sqrt((i + 1.0) / (i + k + 1.0));
      const double b = std::sqrt(static_cast<double>(i) * (i + 1.0)) *
                       std::sqrt((i + k) / (i + k + 1.0));
      const double t_next = (a * t_cur - b * t_prev) / (i + 1.0);
      t_prev = t_cur;
      t_cur = t_next;
      const double mag = std::max(std::abs(t_cur), std::abs(t_prev));
      if (mag > 0x1p+512) {
        t_cur = std::ldexp(t_cur, -512);
        t_prev = std::ldexp(t_prev, -512);
        e += 512;
      } else if (e < 0 && mag < 0x1p-512 && mag > 0.0) {
        t_cur = std::ldexp(t_cur, 512);
        t_prev = std::ldexp(t_prev, 512);
        e -= 512;
      }
    }
  }
  return (2.0 / M_PI) * total;
}

WignerGrid wigner(const FockState& state, const GridSpec& spec,
                  double norm_tolerance) {
  if (spec.n_re < 2 || spec.n_im < 2) {
    throw std::invalid_argument("Wigner grid needs at least 2x2 points");
  }
  WignerGrid grid;
  grid.time = state.time;
  grid.re_axis.resize(static_cast<std::size_t>(spec.n_re));
  grid.im_axis.resize(static_cast<std::size_t>(spec.n_im));
  const double dre = (spec.re_max - spec.re_min) / (spec.n_re - 1);
  const double dim = (spec.im_max - spec.im_min) / (spec.n_im - 1);
  for (int i = 0; i < spec.n_re; ++i) grid.re_axis[i] = spec.re_min + i * dre;
  for (int i = 0; i < spec.n_im; ++i) grid.im_axis[i] = spec.im_min + i * dim;

  WignerEvaluator eval(state);
  grid.values.resize(grid.re_axis.size() * grid.im_axis.size());
  double sum = 0.0;
  for (int j = 0; j < spec.n_im; ++j) {
    for (int i = 0; i < spec.n_re; ++i) {
      const double w = eval(cplx(grid.re_axis[i], grid.im_axis[j]));
      grid.values[static_cast<std::size_t>(j) * grid.re_axis.size() + i] = w;
      sum += w;
    }
  }
  grid.integral = sum * dre * dim;
  grid.truncation_warning = std::abs(grid.integral - 1.0) > norm_tolerance;
  return grid;
}

namespace {

// Greedy lattice ascent of |W| with parabolic sub-lattice refinement.
struct ClimbResult {
  cplx z;
  double w_abs;
  bool ok;
};

ClimbResult climb(const WignerEvaluator& eval, cplx start,
                  const TrackOptions& opt) {
  const double h = opt.lattice;
  auto value = [&](int i, int j) {
    return std::abs(eval(start + cplx(i * h, j * h)));
  };
  std::map<std::pair<int, int>, double> cache;
  auto get = [&](int i, int j) {
    auto key = std::make_pair(i, j);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double v = value(i, j);
    cache.emplace(key, v);
    return v;
  };

  int ci = 0, cj = 0;
  double cv = get(0, 0);
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    int bi = ci, bj = cj;
    double bv = cv;
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const double v = get(ci + di, cj + dj);
        if (v > bv) {
          bv = v;
          bi = ci + di;
          bj = cj + dj;
        }
      }
    }
    if (bi == ci && bj == cj) {
      // Parabolic refinement along each axis.
      const double wl = get(ci - 1, cj), wr = get(ci + 1, cj);
      const double wd = get(ci, cj - 1), wu = get(ci, cj + 1);
      double dx = 0.0, dy = 0.0;
      const double denx = wl - 2.0 * cv + wr;
      const double deny = wd - 2.0 * cv + wu;
      if (denx < 0.0) dx = std::clamp(0.5 * (wl - wr) / denx, -0.5, 0.5);
      if (deny < 0.0) dy = std::clamp(0.5 * (wd - wu) / deny, -0.5, 0.5);
      return {start + cplx((ci + dx) * h, (cj + dy) * h), cv, true};
    }
    ci = bi;
    cj = bj;
    cv = bv;
    if (std::hypot(ci * h, cj * h) > opt.search_radius) {
      return {start + cplx(ci * h, cj * h), cv, false};
    }
  }
  return {start + cplx(ci * h, cj * h), cv, false};
}

}  // namespace

std::vector<PacketTrack> wigner_max_track(
    std::span<const FockState> snapshots, const std::vector<cplx>& seeds,
    const TrackOptions& options, const std::vector<std::vector<cplx>>* seed_hints) {
  if (seed_hints && seed_hints->size() != snapshots.size()) {
    throw std::invalid_argument("seed_hints must match the snapshot count");
  }
  std::vector<PacketTrack> tracks(seeds.size());
  std::vector<cplx> current = seeds;
  std::vector<bool> alive(seeds.size(), true);

  for (std::size_t si = 0; si < snapshots.size(); ++si) {
    const WignerEvaluator eval(snapshots[si]);
    const double t = snapshots[si].time;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      if (!alive[k]) continue;
      const cplx start = seed_hints ? (*seed_hints)[si][k] : current[k];
      const ClimbResult r = climb(eval, start, options);
      if (!r.ok) {
        alive[k] = false;
        tracks[k].lost_at = t;
        continue;
      }
      tracks[k].points.push_back({t, r.z, r.w_abs});
      current[k] = r.z;
    }
  }
  return tracks;
}

namespace {

std::vector<double> moving_average(std::span<const double> v, int width) {
  if (width < 1) width = 1;
  if (width % 2 == 0) ++width;
  const int h = width / 2;
  const int n = static_cast<int>(v.size());
  std::vector<double> out(v.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - h);
    const int hi = std::min(n - 1, i + h);
    double s = 0.0;
    for (int j = lo; j <= hi; ++j) s += v[j];
    out[i] = s / (hi - lo + 1);
  }
  return out;
}

// Indices of local maxima with at least the requested prominence.
std::vector<int> prominent_maxima(const std::vector<double>& v, double prominence) {
  const int n = static_cast<int>(v.size());
  std::vector<int> peaks;
  for (int i = 0; i < n; ++i) {
    const double left = i > 0 ? v[i - 1] : -std::numeric_limits<double>::infinity();
    const double right = i + 1 < n ? v[i + 1] : -std::numeric_limits<double>::infinity();
    if (!(v[i] > left && v[i] >= right)) continue;

    double base_l = v[i];
    for (int j = i - 1; j >= 0; --j) {
      if (v[j] > v[i]) break;
      base_l = std::min(base_l, v[j]);
    }
    double base_r = v[i];
    for (int j = i + 1; j < n; ++j) {
      if (v[j] > v[i]) break;
      base_r = std::min(base_r, v[j]);
    }
    if (v[i] - std::max(base_l, base_r) >= prominence) peaks.push_back(i);
  }
  return peaks;
}

}  // namespace

std::vector<Packet> detect_packets(std::span<const double> pn,
                                   const DetectOptions& options) {
  if (pn.empty()) return {};
  const std::vector<double> sm = moving_average(pn, options.smooth_width);

  std::vector<int> peaks = prominent_maxima(sm, options.prominence);

  // Enforce the minimum separation, keeping the taller peak of a close pair.
  std::vector<int> by_height = peaks;
  std::sort(by_height.begin(), by_height.end(),
            [&](int a, int b) { return sm[a] > sm[b] || (sm[a] == sm[b] && a < b); });
  std::vector<int> kept;
  for (int cand : by_height) {
    bool ok = true;
    for (int k : kept) {
      if (std::abs(cand - k) < options.min_separation) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(cand);
  }
  std::sort(kept.begin(), kept.end());
  if (kept.empty()) return {};

  // Watershed boundaries at the smoothed minima between adjacent peaks.
  const int n = static_cast<int>(pn.size());
  std::vector<int> bounds;
  bounds.push_back(0);
  for (std::size_t k = 0; k + 1 < kept.size(); ++k) {
    int arg = kept[k];
    double best = std::numeric_limits<double>::infinity();
    for (int j = kept[k]; j <= kept[k + 1]; ++j) {
      if (sm[j] < best) {
        best = sm[j];
        arg = j;
      }
    }
    bounds.push_back(arg);
  }
  bounds.push_back(n);

  std::vector<Packet> out;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    Packet p;
    p.lo = bounds[k];
    p.hi = bounds[k + 1] - 1;
    p.height = sm[kept[k]];
    double mass = 0.0, first = 0.0;
    for (int j = p.lo; j <= p.hi; ++j) {
      mass += pn[j];
      first += j * pn[j];
    }
    p.mass = mass;
    p.center = mass > 0.0 ? first / mass : 0.5 * (p.lo + p.hi);
    out.push_back(p);
  }
  return out;
}

double Spectrum::bin() const {
  return window_length > 0.0 ? 2.0 * M_PI / window_length : 0.0;
}

Spectrum spectrum(std::span<const double> series, std::span<const double> times,
                  SpectrumWindow window) {
  if (series.size() != times.size() || series.size() < 4) {
    throw std::invalid_argument("spectrum needs matching series/times, length >= 4");
  }
  const std::size_t m = series.size();
  const double dt = (times.back() - times.front()) / static_cast<double>(m - 1);
  if (!(dt > 0.0)) throw std::invalid_argument("times must be increasing");
  for (std::size_t i = 1; i < m; ++i) {
    if (std::abs(times[i] - times[i - 1] - dt) > 1e-6 * dt) {
      throw std::invalid_argument("spectrum requires uniform sampling");
    }
  }

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(m);

  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    y[i] = series[i] - mean;
    if (window == SpectrumWindow::hann) {
      y[i] *= 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (m - 1)));
    }
  }

  // Exact twiddle table keeps Parseval good to ~1e-12.
  std::vector<cplx> tab(m);
  for (std::size_t r = 0; r < m; ++r) {
    tab[r] = std::polar(1.0, -2.0 * M_PI * static_cast<double>(r) / static_cast<double>(m));
  }

  Spectrum spec;
  spec.window_length = dt * static_cast<double>(m);
  const std::size_t n_bins = m / 2 + 1;
  spec.freqs.resize(n_bins);
  spec.magnitudes.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    cplx acc = 0.0;
    std::size_t r = 0;
    for (std::size_t j = 0; j < m; ++j) {
      acc += y[j] * tab[r];
      r += k;
      if (r >= m) r -= m;
    }
    spec.freqs[k] = 2.0 * M_PI * static_cast<double>(k) / spec.window_length;
    spec.magnitudes[k] = std::abs(acc);
  }
  return spec;
}

PeakReport peak_report(const Spectrum& spec, const std::vector<double>& expected,
                       const PeakReportOptions& options) {
  PeakReport report;
  if (spec.magnitudes.empty()) return report;
  const double top = *std::max_element(spec.magnitudes.begin(), spec.magnitudes.end());
  const std::vector<int> peaks =
      prominent_maxima(spec.magnitudes, options.prominence_fraction * top);
  for (int p : peaks) report.peaks.push_back(static_cast<std::size_t>(p));

  const double bin = spec.bin();
  for (double omega : expected) {
    PeakMatch match;
    match.expected_omega = omega;
    double best = std::numeric_limits<double>::infinity();
    for (int p : peaks) {
      const double d = std::abs(spec.freqs[p] - omega);
      if (d < best) {
        best = d;
        match.peak_omega = spec.freqs[p];
        match.magnitude = spec.magnitudes[p];
      }
    }
    if (std::isfinite(best) && bin > 0.0) {
      match.offset_bins = static_cast<int>(std::lround((match.peak_omega - omega) / bin));
      match.matched = best <= options.max_offset_bins * bin + 1e-12;
    }
    report.matches.push_back(match);
  }
  report.magnitude_ratio = std::numeric_limits<double>::quiet_NaN();
  if (report.matches.size() >= 2 && report.matches[0].matched &&
      report.matches[1].matched && report.matches[1].magnitude > 0.0) {
    report.magnitude_ratio = report.matches[0].magnitude / report.matches[1].magnitude;
  }
  return report;
}

}  // namespace jcp
