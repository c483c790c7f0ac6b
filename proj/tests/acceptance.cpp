// Acceptance suite: runs the eight release criteria end to end and prints
// one PASS/FAIL line per criterion. Exit code = number of failures.
//
//   acceptance [--criterion K]...   restricts to the listed criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "jcpackets/analysis.hpp"
#include "jcpackets/classify.hpp"
#include "jcpackets/model.hpp"
#include "jcpackets/protocol.hpp"
#include "jcpackets/solver.hpp"
#include "jcpackets/variational.hpp"
#include "support/properties.hpp"

using namespace jcp;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

// ---- shared long run: constant f = 15 g, delta = 0.1 g, |G,0>, gT = 1000 --

struct LongRun {
  Trajectory trajectory;
  double norm_drift = 0.0;
  double energy_drift = 0.0;  // relative to max(|E0|, f)
};

std::optional<LongRun> g_const_run;

const LongRun& const_long_run() {
  if (!g_const_run) {
    const SystemParams params(1.0, 0.1);
    const FockState init = make_initial_state(InitialState::ground, 300);
    EvolveOptions opts;
    opts.sample_interval = 0.1;
    opts.snapshot_interval = 0.0;
    // The tail guard is opened up for this run: a ~1e-9 component reaches
    // the truncation edge, which reflects harmlessly (H stays Hermitian)
    // and does not touch norm or energy conservation.
    opts.tail_threshold = 1e-6;
    opts.norm_tolerance = 1e-6;
    LongRun run;
    run.trajectory = evolve(init, params, DriveProtocol::constant(15.0), 1000.0, opts);
    const double e0 = run.trajectory.samples.front().energy;
    for (const auto& s : run.trajectory.samples) {
      run.norm_drift = std::max(run.norm_drift, std::abs(1.0 - s.norm2));
      run.energy_drift = std::max(run.energy_drift, std::abs(s.energy - e0));
    }
    run.energy_drift /= std::max(std::abs(e0), 15.0);
    g_const_run = std::move(run);
  }
  return *g_const_run;
}

// ---------------------------------------------------------------- 1 -------

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const LongRun& run = const_long_run();
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0).count();
  const bool pass = run.norm_drift <= 1e-8 && run.energy_drift <= 1e-6;
  report(1, pass,
         fmt("conservation over gT=1000 (f=15g, delta=0.1g, N=300): "
             "norm drift %.2e (<=1e-8), energy drift %.2e rel (<=1e-6), %.0f s",
             run.norm_drift, run.energy_drift, wall));
}

// ---------------------------------------------------------------- 2 -------

void criterion_2() {
  bool pass = true;
  std::string detail;

  {  // resonant closed form, two full cycles
    const SystemParams p0(1.0, 0.0);
    const double f = 5.0;
    const BranchTrajectory traj =
        evolve_branch(0.0, Branch::one, f, p0, 2.0 * 4.0 * M_PI * f);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.z.size(); ++i) {
      worst = std::max(worst, std::abs(traj.z[i] - closed_form_resonant(
                                            traj.times[i], f, p0, Branch::one)));
    }
    pass = pass && worst <= 1e-6 * f;
    detail += fmt("resonant dev %.1e (<=%.0e); ", worst, 1e-6 * f);
  }

  {  // harmonic large-detuning form, one period inside f*delta >= 10 g^2
    const SystemParams pl(1.0, 1.0);
    const double f = 100.0;
    const BranchTrajectory traj =
        evolve_branch(0.0, Branch::two, f, pl, 2.0 * M_PI / pl.delta);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.z.size(); ++i) {
      worst = std::max(worst,
                       std::abs(traj.z[i] - closed_form_large_detuning(
                                    traj.times[i], f, pl, Branch::two)));
    }
    pass = pass && worst <= 1e-2 * (1.0 / pl.delta);
    detail += fmt("harmonic dev %.1e (<=%.0e); ", worst, 1e-2 / pl.delta);
  }

  {  // turning points across a 5x5 grid that stays clear of class C
    const double f_values[5] = {4.0, 6.0, 9.0, 13.0, 18.0};
    double worst = 0.0;
    int points = 0;
    for (double f : f_values) {
      const double deltas[5] = {0.3 / (f + 1.5), 0.55 / (f + 1.5), 0.8 / (f + 1.5),
                                1.3 / (f - 1.5), 1.8 / (f - 1.5)};
      for (double delta : deltas) {
        const SystemParams p(1.0, delta);
        if (classify(f, delta, p).label == Regime::C) continue;
        for (Branch b : {Branch::one, Branch::two}) {
          const double zt = std::abs(turning_point(b, f, p));
          const BranchTrajectory traj =
              evolve_branch(0.0, b, f, p, 3.0 * 4.0 * M_PI * f);
          double m = 0.0;
          for (const cplx& z : traj.z) m = std::max(m, std::abs(z));
          worst = std::max(worst, std::abs(m - zt) / zt);
          ++points;
        }
      }
    }
    pass = pass && worst <= 1e-3 && points >= 50;
    detail += fmt("turning points: %d checks, worst rel %.1e (<=1e-3)", points, worst);
  }

  report(2, pass, "closed-form oracles: " + detail);
}

// ---------------------------------------------------------------- 3 -------

double first_cycle_time(const BranchTrajectory& traj) {
  const double out = 1.0;
  std::size_t i = 0;
  while (i < traj.z.size() && std::abs(traj.z[i]) < out) ++i;
  for (; i + 1 < traj.z.size(); ++i) {
    if (std::abs(traj.z[i]) < out && std::abs(traj.z[i + 1]) > std::abs(traj.z[i])) {
      return traj.times[i];
    }
  }
  return traj.times.back();
}

void criterion_3() {
  struct Case {
    double delta;
    Branch branch;
    int n_max;
  };
  const Case cases[] = {{0.0, Branch::one, 450},   {0.0, Branch::two, 450},
                        {0.055, Branch::one, 520}, {0.055, Branch::two, 520},
                        {0.25, Branch::one, 170},  {0.25, Branch::two, 170}};
  const double f = 7.0;
  bool pass = true;
  std::string detail = "Wigner-max track vs variational (f=7g): ";

  for (const Case& c : cases) {
    const SystemParams params(1.0, c.delta);
    const BranchTrajectory vtraj = evolve_branch(0.0, c.branch, f, params, 250.0);
    const double t_cycle = first_cycle_time(vtraj);

    const FockState init = make_initial_state(
        c.branch == Branch::one ? InitialState::lds_plus : InitialState::lds_minus,
        c.n_max);
    EvolveOptions eo;
    eo.snapshot_interval = 0.0;
    eo.tail_threshold = 1e-7;
    const int n_track = 41;
    for (int i = 0; i < n_track; ++i) {
      eo.snapshot_times.push_back(t_cycle * i / (n_track - 1));
    }
    const Trajectory traj =
        evolve(init, params, DriveProtocol::constant(f), t_cycle, eo);

    std::vector<std::vector<cplx>> hints;
    for (const auto& s : traj.snapshots) {
      const std::size_t j = std::min<std::size_t>(
          static_cast<std::size_t>(s.time / vtraj.dt + 0.5), vtraj.z.size() - 1);
      hints.push_back({vtraj.z[j]});
    }
    const auto tracks = wigner_max_track(traj.snapshots, {0.0}, {}, &hints);

    double worst = 0.0;
    for (std::size_t i = 0; i < tracks[0].points.size(); ++i) {
      worst = std::max(worst, std::abs(tracks[0].points[i].z - hints[i][0]));
    }
    const std::size_t end_i = std::min<std::size_t>(
        static_cast<std::size_t>(t_cycle / vtraj.dt), vtraj.z.size() - 1);
    const std::size_t stride = std::max<std::size_t>(1, end_i / 200);
    double diam = 0.0;
    for (std::size_t i = 0; i <= end_i; i += stride) {
      for (std::size_t j = i; j <= end_i; j += stride) {
        diam = std::max(diam, std::abs(vtraj.z[i] - vtraj.z[j]));
      }
    }
    const bool ok = !tracks[0].lost_at && tracks[0].points.size() == n_track &&
                    worst < 0.05 * diam;
    pass = pass && ok;
    detail += fmt("[d=%.3f b%d: %.1f%%] ", c.delta, branch_index(c.branch),
                  100.0 * worst / diam);
  }
  report(3, pass, detail + "(each < 5% of the trajectory diameter)");
}

// ---------------------------------------------------------------- 4 -------

void criterion_4() {
  const SystemParams unit(1.0, 0.0);
  const bool labels = classify(5.0, 0.007, unit).label == Regime::A &&
                      classify(5.0, 0.1, unit).label == Regime::B &&
                      classify(5.0, 0.2, unit).label == Regime::C &&
                      classify(15.0, 0.1, unit).label == Regime::D;
  const auto m1 = min_lambda1(5.0, 1.0 / 15.0, unit);
  const double err = std::abs(m1.value - 0.5);
  const bool boundary = m1.in_domain && err <= 1e-12;
  report(4, labels && boundary,
         fmt("class labels %s; min lambda1 at f*delta=g^2/3: |%.17g - 1/2| = %.1e "
             "(<=1e-12)",
             labels ? "A/B/C/D reproduced" : "MISMATCH", m1.value, err));
}

// ---------------------------------------------------------------- 5 -------

void criterion_5() {
  const SystemParams params(1.0, 0.1);
  const double om1 = oscillation_frequency(Branch::one, 15.0, params).omega;
  const double om2 = oscillation_frequency(Branch::two, 15.0, params).omega;

  const LongRun& run = const_long_run();
  const Spectrum spec =
      spectrum(run.trajectory.mean_n_series(), run.trajectory.times());
  const PeakReport rep = peak_report(spec, {om1, om2});
  const double bin = spec.bin();
  bool peaks_ok = rep.matches.size() == 2;
  std::string detail = fmt("bin=%.2e; ", bin);
  for (const auto& m : rep.matches) {
    const double off = std::abs(m.peak_omega - m.expected_omega);
    peaks_ok = peaks_ok && m.matched && off <= bin + 1e-12;
    detail += fmt("peak at %.5f vs %.5f (%.2f bins); ", m.peak_omega,
                  m.expected_omega, off / bin);
  }

  // Half-period residuals against pi/Omega shrink at least as fast as the
  // delta^-2 envelope fitted on the widest-residual point.
  bool residual_ok = true;
  const double deltas[3] = {0.2, 0.4, 0.8};
  for (Branch b : {Branch::one, Branch::two}) {
    double resid[3];
    double t_half_0 = 0.0;
    for (int i = 0; i < 3; ++i) {
      const SystemParams pd(1.0, deltas[i]);
      VariationalOptions vo;
      vo.dt = 1e-4 * 2.0 * M_PI / deltas[i];
      const BranchTrajectory traj =
          evolve_branch(0.0, b, 15.0, pd, 2.4 * M_PI / deltas[i], vo);
      double t_half = -1.0;
      for (std::size_t k = 2; k < traj.z.size(); ++k) {
        const double ya = traj.z[k - 1].imag();
        const double yb = traj.z[k].imag();
        if (ya * yb <= 0.0 && ya != yb && std::abs(traj.z[k]) > 0.5) {
          t_half = traj.times[k - 1] +
                   (traj.times[k] - traj.times[k - 1]) * ya / (ya - yb);
          break;
        }
      }
      const double omega = oscillation_frequency(b, 15.0, pd).omega;
      resid[i] = std::abs(t_half - M_PI / omega);
      if (i == 0) t_half_0 = t_half;
    }
    const double envelope = resid[0] * deltas[0] * deltas[0];
    bool ok = resid[0] <= 0.01 * t_half_0;
    for (int i = 1; i < 3; ++i) {
      ok = ok && resid[i] <= 1.2 * envelope / (deltas[i] * deltas[i]) + 1e-9;
    }
    if (resid[0] > 1e-6 * t_half_0) {
      const double slope = std::log(resid[0] / std::max(resid[2], 1e-300)) /
                           std::log(deltas[2] / deltas[0]);
      ok = ok && slope >= 1.7;
      detail += fmt("b%d residuals %.1e/%.1e/%.1e slope %.1f; ", branch_index(b),
                    resid[0], resid[1], resid[2], slope);
    }
    residual_ok = residual_ok && ok;
  }

  report(5, peaks_ok && residual_ok, "frequency check: " + detail);
}

// ---------------------------------------------------------------- 6 -------

void criterion_6() {
  const SystemParams params(1.0, 0.1);
  bool pass = true;
  std::string detail;

  auto count_packets = [&](const DriveProtocol& proto, double t_probe) {
    ValidateOptions opts;
    opts.t_end = t_probe;
    opts.report_times = {t_probe};
    opts.evolve.tail_threshold = 1e-8;
    const ValidationReport rep =
        validate_protocol(proto, params, ValidationMode::exact, opts);
    return rep.observations.empty() ? -1
                                    : static_cast<int>(rep.observations[0].packets.size());
  };

  const int n_bd = count_packets(DriveProtocol({{0.0, 5.0}, {11.0, 15.0}}), 40.0);
  pass = pass && n_bd == 3;
  detail += fmt("B->D step at gtau=11: %d packets at gt=40 (want 3); ", n_bd);

  const int n_dd = count_packets(DriveProtocol({{0.0, 15.0}, {15.0, 25.0}}), 40.0);
  pass = pass && n_dd == 2;
  detail += fmt("D->D step at gtau=15: %d packets (want 2); ", n_dd);

  SynthesisTarget target;
  target.strategy = Strategy::class_d_return;
  target.n_packets = 4;
  target.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  target.f_levels = {5.0, 15.0, 5.0, 15.0};
  const DriveProtocol proto = synthesize(target, params);
  const double want[3] = {10.5, 49.4, 58.2};
  bool synth_ok = proto.size() == 4;
  detail += "synthesized gtau = ";
  for (int i = 0; i < 3 && synth_ok; ++i) {
    const double tau = proto.steps()[static_cast<std::size_t>(i) + 1].tau;
    synth_ok = synth_ok && std::abs(tau - want[i]) <= 0.5;
    detail += fmt("%.2f ", tau);
  }
  pass = pass && synth_ok;
  detail += "(want 10.5/49.4/58.2 +-0.5); ";

  const LeafState leaf{Branch::two, 0.0, 0.0};
  const StepTimeResult r = solve_step_time(leaf, 5.0, 15.0, 1.0 / 3.0, 0.0, params);
  pass = pass && std::abs(r.tau - 10.5) <= 0.3;
  detail += fmt("one-third split at gtau=%.2f (want 10.5 +-0.3)", r.tau);

  report(6, pass, detail);
}

// ---------------------------------------------------------------- 7 -------

void criterion_7() {
  const SystemParams params(1.0, 0.1);
  const double om1 = oscillation_frequency(Branch::one, 15.0, params).omega;
  const double om2 = oscillation_frequency(Branch::two, 15.0, params).omega;

  const LongRun& cref = const_long_run();
  const Spectrum s_const =
      spectrum(cref.trajectory.mean_n_series(), cref.trajectory.times());
  const PeakReport r_const = peak_report(s_const, {om1, om2});

  // The stepped run feeds a small component out to n ~ 600, so the basis is
  // enlarged accordingly.
  const FockState init = make_initial_state(InitialState::ground, 650);
  EvolveOptions opts;
  opts.sample_interval = 0.1;
  opts.snapshot_interval = 0.0;
  opts.tail_threshold = 1e-7;
  const Trajectory traj =
      evolve(init, params, DriveProtocol({{0.0, 5.0}, {11.0, 15.0}}), 1000.0, opts);
  const Spectrum s_step = spectrum(traj.mean_n_series(), traj.times());
  const PeakReport r_step = peak_report(s_step, {om1, om2});

  const bool matched = r_const.matches.size() == 2 && r_const.matches[0].matched &&
                       r_const.matches[1].matched && r_step.matches.size() == 2 &&
                       r_step.matches[0].matched && r_step.matches[1].matched;
  const bool trend =
      matched && r_step.magnitude_ratio > r_const.magnitude_ratio;
  report(7, trend,
         fmt("Omega1:Omega2 magnitude ratio %.3f (stepped) > %.3f (constant)",
             r_step.magnitude_ratio, r_const.magnitude_ratio));
}

// ---------------------------------------------------------------- 8 -------

void criterion_8() {
  const auto results = props::run_all();
  bool pass = true;
  std::string detail = "property suite: ";
  for (const auto& r : results) {
    pass = pass && r.pass;
    detail += fmt("%s=%s ", r.name.c_str(), r.pass ? "ok" : "FAIL");
    if (!r.pass) detail += "(" + r.detail + ") ";
  }
  report(8, pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      wanted.push_back(std::atoi(argv[++i]));
    }
  }
  auto run = [&](int k, void (*fn)()) {
    if (wanted.empty() || std::find(wanted.begin(), wanted.end(), k) != wanted.end()) {
      fn();
    }
  };
  run(1, criterion_1);
  run(2, criterion_2);
  run(3, criterion_3);
  run(4, criterion_4);
  run(5, criterion_5);
  run(6, criterion_6);
  run(7, criterion_7);
  run(8, criterion_8);
  return g_failures;
}
