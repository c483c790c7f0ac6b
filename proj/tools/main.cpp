#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "jcpackets/analysis.hpp"
#include "jcpackets/classify.hpp"
#include "jcpackets/config.hpp"
#include "jcpackets/errors.hpp"
#include "jcpackets/io.hpp"
#include "jcpackets/model.hpp"
#include "jcpackets/protocol.hpp"
#include "jcpackets/solver.hpp"
#include "jcpackets/variational.hpp"

namespace fs = std::filesystem;
using namespace jcp;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInfeasible = 4;

void print_error(const char* type, const std::string& message) {
  std::cerr << "{\"error\":\"" << type << "\",\"message\":\"" << message
            << "\"}\n";
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty() && dir != ".") fs::create_directories(dir);
}

int run_simulate(const RunConfig& cfg) {
  const SystemParams params = cfg.make_params();
  const DriveProtocol protocol = cfg.make_protocol();
  ensure_dir(cfg.out_dir);

  const int n_max = cfg.n_max > 0
      ? cfg.n_max
      : suggested_n_max(params, protocol, std::max(cfg.t_end, 1.0));

  EvolveOptions opts;
  opts.dt = cfg.dt;
  opts.sample_interval = cfg.sample_interval;
  opts.snapshot_interval = cfg.snapshot_interval;
  opts.tail_threshold = cfg.tail_threshold;
  opts.norm_tolerance = cfg.norm_tolerance;
  opts.snapshot_times = cfg.wigner_times;
  for (double t : cfg.packet_times) opts.snapshot_times.push_back(t);

  if (cfg.t_end == 0.0) {
    // Zero-duration run: emit headers only.
    Trajectory empty;
    write_observables_csv(join_path(cfg.out_dir, "observables.csv"), empty, true);
    write_pn_csv(join_path(cfg.out_dir, "pn.csv"), {}, true);
    write_ln_csv(join_path(cfg.out_dir, "ln.csv"), {}, 1e-12, true);
    return 0;
  }

  const FockState initial = make_initial_state(cfg.initial, n_max);
  const Trajectory traj = evolve(initial, params, protocol, cfg.t_end, opts);
  for (const auto& w : traj.warnings) std::cerr << "warning: " << w << '\n';

  write_observables_csv(join_path(cfg.out_dir, "observables.csv"), traj);
  write_pn_csv(join_path(cfg.out_dir, "pn.csv"), traj.snapshots);
  write_ln_csv(join_path(cfg.out_dir, "ln.csv"), traj.snapshots);

  if (!cfg.wigner_times.empty()) {
    double half = cfg.wigner_half_width;
    if (half <= 0.0) {
      const double z1 = std::abs(turning_point(Branch::one, protocol.max_level(), params));
      const double z2 = std::abs(turning_point(Branch::two, protocol.max_level(), params));
      half = std::max(z1, z2) + 3.0;
    }
    for (double t : cfg.wigner_times) {
      const FockState* best = nullptr;
      for (const auto& s : traj.snapshots) {
        if (!best || std::abs(s.time - t) < std::abs(best->time - t)) best = &s;
      }
      if (!best) continue;
      const WignerGrid grid = wigner(*best, GridSpec::square(half, cfg.wigner_points));
      if (grid.truncation_warning) {
        std::cerr << "warning: Wigner integral " << grid.integral
                  << " deviates from 1 at t = " << best->time << '\n';
      }
      char name[64];
      std::snprintf(name, sizeof(name), "wigner_t%g.csv", best->time);
      write_wigner_csv(join_path(cfg.out_dir, name), grid);
    }
  }

  if (!cfg.packet_times.empty()) {
    std::vector<PacketObservation> observations;
    for (double t : cfg.packet_times) {
      const FockState* best = nullptr;
      for (const auto& s : traj.snapshots) {
        if (!best || std::abs(s.time - t) < std::abs(best->time - t)) best = &s;
      }
      if (!best) continue;
      PacketObservation obs;
      obs.t = best->time;
      obs.packets = detect_packets(photon_distribution(*best));
      observations.push_back(std::move(obs));
    }
    write_packets_jsonl(join_path(cfg.out_dir, "packets.jsonl"), observations);
  }

  if (cfg.spectrum) {
    const auto times = traj.times();
    const auto series = traj.mean_n_series();
    const Spectrum spec = spectrum(series, times);
    write_spectrum_csv(join_path(cfg.out_dir, "spectrum.csv"), spec);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"photon number wave packet simulator for a driven TLS-cavity system"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "integrate the exact model per config");
  std::string sim_config;
  std::string sim_out;
  double sim_dt = -1.0;
  int sim_nmax = -1;
  std::string sim_seed;
  sim->add_option("--config", sim_config, "run configuration file")->required();
  sim->add_option("--out", sim_out, "output directory override");
  sim->add_option("--dt", sim_dt, "integrator step override");
  sim->add_option("--nmax", sim_nmax, "photon truncation override");
  sim->add_option("--seed-state", sim_seed, "initial state override (ground|lds_plus|lds_minus)");

  // reduced
  auto* red = app.add_subcommand("reduced", "integrate the variational packet model");
  double red_f = 0.0, red_delta = 0.0, red_g = 1.0, red_tend = 0.0, red_dt = 0.0;
  double red_z0_re = 0.0, red_z0_im = 0.0;
  int red_branch = 1;
  std::string red_out = ".";
  red->add_option("--f", red_f, "driving strength (units of g)")->required();
  red->add_option("--delta", red_delta, "detuning (units of g)");
  red->add_option("--g", red_g, "coupling strength");
  red->add_option("--branch", red_branch, "eigenbranch, 1 or 2")
      ->check(CLI::IsMember({1, 2}));
  red->add_option("--t-end", red_tend, "integration time (units of 1/g)")->required();
  red->add_option("--dt", red_dt, "integrator step (0 = auto)");
  red->add_option("--z0-re", red_z0_re, "initial Re z");
  red->add_option("--z0-im", red_z0_im, "initial Im z");
  red->add_option("--out", red_out, "output directory");

  // classify
  auto* cls = app.add_subcommand("classify", "dynamical class of constant driving");
  double cls_f = 0.0, cls_delta = 0.0, cls_g = 1.0;
  bool cls_grid = false;
  double cls_fmin = 1.0, cls_fmax = 20.0, cls_dmin = 0.0, cls_dmax = 0.5;
  int cls_fsteps = 40, cls_dsteps = 40;
  std::string cls_out = "classes.csv";
  cls->add_option("--f", cls_f, "driving strength");
  cls->add_option("--delta", cls_delta, "detuning");
  cls->add_option("--g", cls_g, "coupling strength");
  cls->add_flag("--grid", cls_grid, "emit a phase-diagram CSV over an (f, delta) rectangle");
  cls->add_option("--f-min", cls_fmin);
  cls->add_option("--f-max", cls_fmax);
  cls->add_option("--f-steps", cls_fsteps);
  cls->add_option("--delta-min", cls_dmin);
  cls->add_option("--delta-max", cls_dmax);
  cls->add_option("--delta-steps", cls_dsteps);
  cls->add_option("--out", cls_out, "grid output file");

  // protocol
  auto* proto = app.add_subcommand("protocol", "drive-protocol synthesis and validation");
  proto->require_subcommand(1);
  auto* synth = proto->add_subcommand("synth", "plan step times for a packet target");
  std::string synth_config, synth_out;
  synth->add_option("--config", synth_config, "synthesis configuration file")->required();
  synth->add_option("--out", synth_out, "output directory override");

  auto* val = proto->add_subcommand("validate", "replay a protocol file");
  std::string val_protocol, val_mode = "reduced", val_initial = "ground";
  double val_g = 1.0, val_delta = 0.0, val_tend = 0.0;
  int val_nmax = 0;
  std::vector<double> val_times;
  std::string val_out;
  val->add_option("--protocol", val_protocol, "protocol file")->required();
  val->add_option("--g", val_g, "coupling strength");
  val->add_option("--delta", val_delta, "detuning")->required();
  val->add_option("--mode", val_mode, "reduced|exact")
      ->check(CLI::IsMember({"reduced", "exact"}));
  val->add_option("--initial", val_initial, "initial state");
  val->add_option("--t-end", val_tend, "replay end time");
  val->add_option("--nmax", val_nmax, "truncation override (exact mode)");
  double val_tail = 0.0;
  val->add_option("--tail-threshold", val_tail,
                  "under-truncation guard override (exact mode)");
  val->add_option("--times", val_times, "packet detection times (exact mode)");
  val->add_option("--out", val_out,
                  "output directory (leaf CSVs in reduced mode, packets.jsonl in exact)");

  // spectrum
  auto* spe = app.add_subcommand("spectrum", "Fourier readout of a mean photon number series");
  std::string spe_in, spe_out = "spectrum.csv";
  bool spe_hann = false;
  std::vector<double> spe_expect;
  spe->add_option("--input", spe_in, "observables CSV from simulate")->required();
  spe->add_option("--out", spe_out, "spectrum CSV path");
  spe->add_flag("--hann", spe_hann, "apply a Hann window");
  spe->add_option("--expect", spe_expect, "expected peak frequencies to report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sim) {
      RunConfig cfg = parse_run_config(sim_config);
      if (!sim_out.empty()) cfg.out_dir = sim_out;
      if (sim_dt >= 0.0) cfg.dt = sim_dt;
      if (sim_nmax >= 0) cfg.n_max = sim_nmax;
      if (!sim_seed.empty()) cfg.initial = initial_state_from_name(sim_seed);
      return run_simulate(cfg);
    }

    if (*red) {
      const SystemParams params(red_g, red_delta);
      VariationalOptions vopt;
      vopt.dt = red_dt;
      const auto traj = evolve_branch(cplx(red_z0_re, red_z0_im),
                                      branch_from_index(red_branch), red_f, params,
                                      red_tend, vopt);
      ensure_dir(red_out);
      char name[32];
      std::snprintf(name, sizeof(name), "branch_%d.csv", red_branch);
      write_branch_csv(join_path(red_out, name), traj, params);
      if (traj.near_degeneracy_time) {
        std::cerr << "warning: trajectory entered the near-degeneracy disk at t = "
                  << *traj.near_degeneracy_time << '\n';
      }
      return 0;
    }

    if (*cls) {
      const SystemParams params(cls_g, 0.0);
      if (cls_grid) {
        std::ofstream out(cls_out);
        if (!out) throw ConfigError("cannot open '" + cls_out + "'");
        out << "f,delta,label,dist_ab,dist_bc,dist_cd\n";
        for (int i = 0; i < cls_fsteps; ++i) {
          const double f = cls_fmin + (cls_fmax - cls_fmin) * i /
                                          std::max(1, cls_fsteps - 1);
          for (int j = 0; j < cls_dsteps; ++j) {
            const double d = cls_dmin + (cls_dmax - cls_dmin) * j /
                                            std::max(1, cls_dsteps - 1);
            const RegimeClass rc = classify(f, d, params);
            out << format_g17(f) << ',' << format_g17(d) << ',' << to_string(rc.label)
                << ',' << format_g17(rc.dist_ab) << ',' << format_g17(rc.dist_bc)
                << ',' << format_g17(rc.dist_cd) << '\n';
          }
        }
        return 0;
      }
      const RegimeClass rc = classify(cls_f, cls_delta, params);
      std::cout << to_string(rc.label) << " dist_ab=" << format_g17(rc.dist_ab)
                << " dist_bc=" << format_g17(rc.dist_bc)
                << " dist_cd=" << format_g17(rc.dist_cd) << '\n';
      return 0;
    }

    if (*synth) {
      SynthConfig cfg = parse_synth_config(synth_config);
      if (!synth_out.empty()) cfg.out_dir = synth_out;
      const DriveProtocol protocol =
          synthesize(cfg.target, cfg.make_params(), cfg.options);
      ensure_dir(cfg.out_dir);
      write_protocol_file(join_path(cfg.out_dir, "protocol.txt"), protocol);
      for (const auto& s : protocol.steps()) {
        std::cout << format_g17(s.tau) << ' ' << format_g17(s.f) << '\n';
      }
      return 0;
    }

    if (*val) {
      const SystemParams params(val_g, val_delta);
      const DriveProtocol protocol = read_protocol_file(val_protocol);
      ValidateOptions opts;
      opts.initial = initial_state_from_name(val_initial);
      opts.t_end = val_tend;
      opts.report_times = val_times;
      opts.n_max = val_nmax;
      if (val_tail > 0.0) opts.evolve.tail_threshold = val_tail;
      const auto mode = val_mode == "exact" ? ValidationMode::exact
                                            : ValidationMode::reduced;
      const ValidationReport report = validate_protocol(protocol, params, mode, opts);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      if (mode == ValidationMode::reduced) {
        std::cout << "leaves " << report.leaves.size() << '\n';
        for (std::size_t i = 0; i < report.leaves.size(); ++i) {
          const auto& leaf = report.leaves[i];
          std::cout << leaf.label << " branch=" << leaf.branch
                    << " weight=" << format_g17(leaf.weight)
                    << " z_end=" << format_g17(leaf.z_end.real()) << '+'
                    << format_g17(leaf.z_end.imag()) << "i\n";
          if (!val_out.empty()) {
            ensure_dir(val_out);
            std::string label = leaf.label;
            for (char& c : label) {
              if (c == ',') c = '_';
            }
            write_branch_csv(join_path(val_out, "leaf_" + label + ".csv"),
                             report.leaf_trajectories[i], params);
          }
        }
      } else {
        for (const auto& obs : report.observations) {
          std::cout << "t=" << format_g17(obs.t) << " packets=" << obs.packets.size();
          for (const auto& p : obs.packets) {
            std::cout << " (n=" << format_g17(p.center)
                      << ", mass=" << format_g17(p.mass) << ')';
          }
          std::cout << '\n';
        }
        if (!val_out.empty()) {
          ensure_dir(val_out);
          write_packets_jsonl(join_path(val_out, "packets.jsonl"),
                              report.observations);
        }
      }
      return 0;
    }

    if (*spe) {
      const ObservablesData data = read_observables_csv(spe_in);
      const Spectrum spec = spectrum(
          data.mean_n, data.t,
          spe_hann ? SpectrumWindow::hann : SpectrumWindow::rectangular);
      write_spectrum_csv(spe_out, spec);
      if (!spe_expect.empty()) {
        const PeakReport report = peak_report(spec, spe_expect);
        for (const auto& m : report.matches) {
          std::cout << "expected=" << format_g17(m.expected_omega)
                    << " matched=" << (m.matched ? "yes" : "no")
                    << " peak=" << format_g17(m.peak_omega)
                    << " offset_bins=" << m.offset_bins
                    << " magnitude=" << format_g17(m.magnitude) << '\n';
        }
        if (report.matches.size() >= 2) {
          std::cout << "magnitude_ratio=" << format_g17(report.magnitude_ratio)
                    << '\n';
        }
      }
      return 0;
    }
  } catch (const ConfigError& err) {
    print_error("config", err.what());
    return kExitConfig;
  } catch (const UnderTruncationError& err) {
    print_error("under_truncation", err.what());
    return kExitNumerical;
  } catch (const NormDriftError& err) {
    print_error("norm_drift", err.what());
    return kExitNumerical;
  } catch (const DegeneratePointError& err) {
    print_error("degenerate_point", err.what());
    return kExitNumerical;
  } catch (const NotAttainedError& err) {
    print_error("not_attained", err.what());
    return kExitInfeasible;
  } catch (const GuardBandError& err) {
    print_error("guard_band", err.what());
    return kExitInfeasible;
  } catch (const InfeasibleGeometryError& err) {
    print_error("infeasible_geometry", err.what());
    return kExitInfeasible;
  } catch (const std::invalid_argument& err) {
    print_error("config", err.what());
    return kExitConfig;
  } catch (const std::exception& err) {
    print_error("internal", err.what());
    return 1;
  }
  return 0;
}
