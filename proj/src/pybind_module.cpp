#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jcpackets/analysis.hpp"
#include "jcpackets/classify.hpp"
#include "jcpackets/errors.hpp"
#include "jcpackets/io.hpp"
#include "jcpackets/model.hpp"
#include "jcpackets/protocol.hpp"
#include "jcpackets/solver.hpp"
#include "jcpackets/variational.hpp"

namespace py = pybind11;
using namespace jcp;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<cplx> to_array(const std::vector<cplx>& v) {
  return py::array_t<cplx>(static_cast<py::ssize_t>(v.size()), v.data());
}

Branch branch_arg(int j) { return branch_from_index(j); }

}  // namespace

PYBIND11_MODULE(jcpackets, m) {
  m.doc() = "Photon number wave packet dynamics in a driven TLS-cavity system";

  py::register_exception<DegeneratePointError>(m, "DegeneratePointError");
  py::register_exception<UnderTruncationError>(m, "UnderTruncationError");
  py::register_exception<NormDriftError>(m, "NormDriftError");
  py::register_exception<NotAttainedError>(m, "NotAttainedError");
  py::register_exception<GuardBandError>(m, "GuardBandError");
  py::register_exception<InfeasibleGeometryError>(m, "InfeasibleGeometryError");

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init<double, double>(), py::arg("g"), py::arg("delta"))
      .def_readonly("g", &SystemParams::g)
      .def_readonly("delta", &SystemParams::delta)
      .def("__repr__", [](const SystemParams& p) {
        return "SystemParams(g=" + format_g17(p.g) + ", delta=" + format_g17(p.delta) + ")";
      });

  py::class_<DriveProtocol>(m, "DriveProtocol")
      .def(py::init([](const std::vector<std::pair<double, double>>& steps) {
             std::vector<DriveStep> s;
             for (const auto& [tau, f] : steps) s.push_back({tau, f});
             return DriveProtocol(std::move(s));
           }),
           py::arg("steps"))
      .def_static("constant", &DriveProtocol::constant, py::arg("f"))
      .def("at", &DriveProtocol::at, py::arg("t"))
      .def("max_level", &DriveProtocol::max_level)
      .def_property_readonly("steps", [](const DriveProtocol& p) {
        std::vector<std::pair<double, double>> out;
        for (const auto& s : p.steps()) out.emplace_back(s.tau, s.f);
        return out;
      });

  py::class_<FockState>(m, "FockState")
      .def(py::init<int>(), py::arg("n_max"))
      .def_property_readonly("n_max", &FockState::n_max)
      .def_readwrite("time", &FockState::time)
      .def("norm2", &FockState::norm2)
      .def("tail_occupation", &FockState::tail_occupation, py::arg("last") = 5)
      .def("normalize", &FockState::normalize)
      .def_property_readonly("amp_g", [](const FockState& s) {
        std::vector<cplx> v(static_cast<std::size_t>(s.n_max()) + 1);
        for (int n = 0; n <= s.n_max(); ++n) v[n] = s.amp_g(n);
        return to_array(v);
      })
      .def_property_readonly("amp_x", [](const FockState& s) {
        std::vector<cplx> v(static_cast<std::size_t>(s.n_max()) + 1);
        for (int n = 0; n <= s.n_max(); ++n) v[n] = s.amp_x(n);
        return to_array(v);
      });

  m.def("make_initial_state",
        [](const std::string& kind, int n_max) {
          return make_initial_state(initial_state_from_name(kind), n_max);
        },
        py::arg("kind"), py::arg("n_max"));
  m.def("make_product_state", &make_product_state, py::arg("alpha"),
        py::arg("beta"), py::arg("z"), py::arg("n_max"));
  m.def("apply_hamiltonian", &apply_hamiltonian, py::arg("state"),
        py::arg("params"), py::arg("f"));
  m.def("to_lds", [](const FockState& s) {
    const LdsAmplitudes lds = to_lds(s);
    return py::make_tuple(to_array(lds.plus), to_array(lds.minus));
  });

  m.def("photon_distribution",
        [](const FockState& s) { return to_array(photon_distribution(s)); });
  m.def("mean_photon_number", &mean_photon_number);
  m.def("lds_inversion", &lds_inversion);
  m.def("lds_measure",
        [](const FockState& s, double floor) { return to_array(lds_measure(s, floor)); },
        py::arg("state"), py::arg("floor") = 1e-12);
  m.def("expectation_H", &expectation_H, py::arg("state"), py::arg("params"),
        py::arg("f"));
  m.def("suggested_n_max",
        [](const SystemParams& p, double f) { return suggested_n_max(p, f); },
        py::arg("params"), py::arg("f"));

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("times", [](const Trajectory& t) { return to_array(t.times()); })
      .def_property_readonly("mean_n", [](const Trajectory& t) { return to_array(t.mean_n_series()); })
      .def_property_readonly("norm", [](const Trajectory& t) {
        std::vector<double> v(t.samples.size());
        for (std::size_t i = 0; i < t.samples.size(); ++i) v[i] = t.samples[i].norm2;
        return to_array(v);
      })
      .def_property_readonly("energy", [](const Trajectory& t) {
        std::vector<double> v(t.samples.size());
        for (std::size_t i = 0; i < t.samples.size(); ++i) v[i] = t.samples[i].energy;
        return to_array(v);
      })
      .def_property_readonly("lds_inversion", [](const Trajectory& t) {
        std::vector<double> v(t.samples.size());
        for (std::size_t i = 0; i < t.samples.size(); ++i) v[i] = t.samples[i].lds_inversion;
        return to_array(v);
      })
      .def_readonly("snapshots", &Trajectory::snapshots)
      .def_readonly("step_times", &Trajectory::step_times)
      .def_readonly("dt", &Trajectory::dt)
      .def_readonly("warnings", &Trajectory::warnings);

  m.def("evolve",
        [](const FockState& initial, const SystemParams& params,
           const DriveProtocol& protocol, double t_end, double dt,
           double sample_interval, double snapshot_interval,
           const std::vector<double>& snapshot_times, double tail_threshold,
           double norm_tolerance) {
          EvolveOptions o;
          o.dt = dt;
          o.sample_interval = sample_interval;
          o.snapshot_interval = snapshot_interval;
          o.snapshot_times = snapshot_times;
          o.tail_threshold = tail_threshold;
          o.norm_tolerance = norm_tolerance;
          return evolve(initial, params, protocol, t_end, o);
        },
        py::arg("initial"), py::arg("params"), py::arg("protocol"),
        py::arg("t_end"), py::arg("dt") = 0.0, py::arg("sample_interval") = 0.02,
        py::arg("snapshot_interval") = 0.1,
        py::arg("snapshot_times") = std::vector<double>{},
        py::arg("tail_threshold") = 1e-10, py::arg("norm_tolerance") = 1e-6);

  py::class_<BranchTrajectory>(m, "BranchTrajectory")
      .def_property_readonly("times", [](const BranchTrajectory& t) { return to_array(t.times); })
      .def_property_readonly("z", [](const BranchTrajectory& t) { return to_array(t.z); })
      .def_property_readonly("phase", [](const BranchTrajectory& t) { return to_array(t.phase); })
      .def_property_readonly("branch", [](const BranchTrajectory& t) { return branch_index(t.branch); })
      .def_readonly("f", &BranchTrajectory::f)
      .def_property_readonly("near_degeneracy_time", [](const BranchTrajectory& t) {
        return t.near_degeneracy_time ? py::cast(*t.near_degeneracy_time)
                                      : py::none().cast<py::object>();
      })
      .def_readonly("max_energy_residual", &BranchTrajectory::max_energy_residual);

  m.def("tls_eigenpair",
        [](cplx z, double f, const SystemParams& p, int branch) {
          const TlsEigenpair e = tls_eigenpair(z, f, p, branch_arg(branch));
          return py::make_tuple(e.omega, e.phi_g, e.phi_x);
        },
        py::arg("z"), py::arg("f"), py::arg("params"), py::arg("branch"));
  m.def("lambda_of_z",
        [](cplx z, double f, const SystemParams& p, int branch) {
          return lambda_of_z(z, f, p, branch_arg(branch));
        },
        py::arg("z"), py::arg("f"), py::arg("params"), py::arg("branch"));
  m.def("evolve_branch",
        [](cplx z0, int branch, double f, const SystemParams& p, double t_end,
           double dt) {
          VariationalOptions o;
          o.dt = dt;
          return evolve_branch(z0, branch_arg(branch), f, p, t_end, o);
        },
        py::arg("z0"), py::arg("branch"), py::arg("f"), py::arg("params"),
        py::arg("t_end"), py::arg("dt") = 0.0);
  m.def("turning_point",
        [](int branch, double f, const SystemParams& p) {
          return turning_point(branch_arg(branch), f, p);
        },
        py::arg("branch"), py::arg("f"), py::arg("params"));
  m.def("oscillation_frequency",
        [](int branch, double f, const SystemParams& p) {
          const auto o = oscillation_frequency(branch_arg(branch), f, p);
          return py::make_tuple(o.omega, o.valid);
        },
        py::arg("branch"), py::arg("f"), py::arg("params"));
  m.def("closed_form_resonant",
        [](double t, double f, const SystemParams& p, int branch) {
          return closed_form_resonant(t, f, p, branch_arg(branch));
        },
        py::arg("t"), py::arg("f"), py::arg("params"), py::arg("branch"));
  m.def("closed_form_large_detuning",
        [](double t, double f, const SystemParams& p, int branch) {
          return closed_form_large_detuning(t, f, p, branch_arg(branch));
        },
        py::arg("t"), py::arg("f"), py::arg("params"), py::arg("branch"));
  m.def("overlap_S",
        [](double f0, double f1, cplx z, const SystemParams& p) {
          return overlap_S(f0, f1, z, p);
        },
        py::arg("f0"), py::arg("f1"), py::arg("z"), py::arg("params"));

  py::class_<RegimeClass>(m, "RegimeClass")
      .def_property_readonly("label", [](const RegimeClass& r) { return to_string(r.label); })
      .def_readonly("dist_ab", &RegimeClass::dist_ab)
      .def_readonly("dist_bc", &RegimeClass::dist_bc)
      .def_readonly("dist_cd", &RegimeClass::dist_cd)
      .def("__repr__", [](const RegimeClass& r) { return "RegimeClass(" + to_string(r.label) + ")"; });

  m.def("classify", &classify, py::arg("f"), py::arg("delta"), py::arg("params"));
  m.def("min_lambda1",
        [](double f, double delta, const SystemParams& p) {
          const auto v = min_lambda1(f, delta, p);
          return py::make_tuple(v.value, v.in_domain);
        },
        py::arg("f"), py::arg("delta"), py::arg("params"));
  m.def("max_lambda2",
        [](double f, double delta, const SystemParams& p) {
          const auto v = max_lambda2(f, delta, p);
          return py::make_tuple(v.value, v.in_domain);
        },
        py::arg("f"), py::arg("delta"), py::arg("params"));
  m.def("ab_boundary_threshold", &ab_boundary_threshold, py::arg("eta"));

  py::class_<LeafState>(m, "LeafState")
      .def(py::init([](int branch, cplx z, double t) {
             return LeafState{branch_arg(branch), z, t};
           }),
           py::arg("branch") = 2, py::arg("z") = cplx(0.0, 0.0), py::arg("t") = 0.0)
      .def_property_readonly("branch", [](const LeafState& l) { return branch_index(l.branch); })
      .def_readwrite("z", &LeafState::z)
      .def_readwrite("t", &LeafState::t);

  m.def("solve_step_time",
        [](const LeafState& leaf, double f0, double f1, double target_S,
           double window, const SystemParams& p) {
          const auto r = solve_step_time(leaf, f0, f1, target_S, window, p);
          return py::make_tuple(r.tau, r.z_at_tau, r.S_at_tau);
        },
        py::arg("leaf"), py::arg("f0"), py::arg("f1"), py::arg("target_S"),
        py::arg("window"), py::arg("params"));

  m.def("synthesize",
        [](const std::string& strategy, int n_packets,
           const std::vector<double>& weights, const std::vector<double>& f_levels,
           const SystemParams& params, double window) {
          SynthesisTarget t;
          t.strategy = strategy_from_name(strategy);
          t.n_packets = n_packets;
          t.weights = weights;
          t.f_levels = f_levels;
          t.window = window;
          return synthesize(t, params);
        },
        py::arg("strategy"), py::arg("n_packets"), py::arg("weights"),
        py::arg("f_levels"), py::arg("params"), py::arg("window") = 0.0);

  m.def("validate_protocol",
        [](const DriveProtocol& protocol, const SystemParams& params,
           const std::string& mode, const std::string& initial, double t_end,
           const std::vector<double>& report_times, int n_max,
           double tail_threshold) {
          ValidateOptions opts;
          opts.initial = initial_state_from_name(initial);
          opts.t_end = t_end;
          opts.report_times = report_times;
          opts.n_max = n_max;
          if (tail_threshold > 0.0) opts.evolve.tail_threshold = tail_threshold;
          const ValidationMode vmode =
              mode == "exact" ? ValidationMode::exact : ValidationMode::reduced;
          const ValidationReport rep = validate_protocol(protocol, params, vmode, opts);
          py::dict out;
          py::list leaves;
          for (const auto& leaf : rep.leaves) {
            py::dict d;
            d["label"] = leaf.label;
            d["branch"] = leaf.branch;
            d["weight"] = leaf.weight;
            d["z_end"] = leaf.z_end;
            leaves.append(d);
          }
          out["leaves"] = leaves;
          py::list observations;
          for (const auto& obs : rep.observations) {
            py::dict d;
            d["t"] = obs.t;
            d["packets"] = obs.packets;
            observations.append(d);
          }
          out["observations"] = observations;
          out["warnings"] = rep.warnings;
          return out;
        },
        py::arg("protocol"), py::arg("params"), py::arg("mode") = "reduced",
        py::arg("initial") = "ground", py::arg("t_end") = 0.0,
        py::arg("report_times") = std::vector<double>{}, py::arg("n_max") = 0,
        py::arg("tail_threshold") = 0.0);

  py::class_<Packet>(m, "Packet")
      .def_readonly("center", &Packet::center)
      .def_readonly("mass", &Packet::mass)
      .def_readonly("lo", &Packet::lo)
      .def_readonly("hi", &Packet::hi)
      .def_readonly("height", &Packet::height)
      .def("__repr__", [](const Packet& p) {
        return "Packet(center=" + format_g17(p.center) + ", mass=" + format_g17(p.mass) + ")";
      });

  m.def("detect_packets",
        [](const std::vector<double>& pn, int smooth_width, double prominence,
           int min_separation) {
          DetectOptions o;
          o.smooth_width = smooth_width;
          o.prominence = prominence;
          o.min_separation = min_separation;
          return detect_packets(pn, o);
        },
        py::arg("pn"), py::arg("smooth_width") = 3, py::arg("prominence") = 0.005,
        py::arg("min_separation") = 4);

  m.def("wigner_point",
        [](const FockState& s, cplx alpha) { return WignerEvaluator(s)(alpha); },
        py::arg("state"), py::arg("alpha"));
  m.def("wigner",
        [](const FockState& s, double half_width, int n) {
          const WignerGrid grid = wigner(s, GridSpec::square(half_width, n));
          py::array_t<double> values({n, n});
          auto v = values.mutable_unchecked<2>();
          for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) v(j, i) = grid.at(i, j);
          }
          return py::make_tuple(to_array(grid.re_axis), to_array(grid.im_axis),
                                values, grid.integral);
        },
        py::arg("state"), py::arg("half_width"), py::arg("n") = 101);

  py::class_<Spectrum>(m, "Spectrum")
      .def_property_readonly("freqs", [](const Spectrum& s) { return to_array(s.freqs); })
      .def_property_readonly("magnitudes", [](const Spectrum& s) { return to_array(s.magnitudes); })
      .def_readonly("window_length", &Spectrum::window_length)
      .def("bin", &Spectrum::bin);

  m.def("spectrum",
        [](const std::vector<double>& series, const std::vector<double>& times,
           const std::string& window) {
          return spectrum(series, times,
                          window == "hann" ? SpectrumWindow::hann
                                           : SpectrumWindow::rectangular);
        },
        py::arg("series"), py::arg("times"), py::arg("window") = "rectangular");

  m.def("peak_report",
        [](const Spectrum& spec, const std::vector<double>& expected) {
          const PeakReport r = peak_report(spec, expected);
          py::list matches;
          for (const auto& match : r.matches) {
            py::dict d;
            d["expected_omega"] = match.expected_omega;
            d["matched"] = match.matched;
            d["peak_omega"] = match.peak_omega;
            d["magnitude"] = match.magnitude;
            d["offset_bins"] = match.offset_bins;
            matches.append(d);
          }
          py::dict out;
          out["matches"] = matches;
          out["magnitude_ratio"] = r.magnitude_ratio;
          return out;
        },
        py::arg("spectrum"), py::arg("expected"));

  m.attr("__version__") = "0.1.0";
}
