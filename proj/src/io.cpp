#include "jcpackets/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "jcpackets/errors.hpp"

namespace jcp {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  return out;
}

}  // namespace

void write_observables_csv(const std::string& path, const Trajectory& traj,
                           bool header_only) {
  auto out = open_out(path);
  out << "t,norm,energy,mean_n,lds_inversion\n";
  if (header_only) return;
  for (const auto& s : traj.samples) {
    out << format_g17(s.t) << ',' << format_g17(s.norm2) << ','
        << format_g17(s.energy) << ',' << format_g17(s.mean_n) << ','
        << format_g17(s.lds_inversion) << '\n';
  }
}

void write_pn_csv(const std::string& path, const std::vector<FockState>& snapshots,
                  bool header_only) {
  auto out = open_out(path);
  const int nm = snapshots.empty() ? 0 : snapshots.front().n_max();
  out << "t";
  for (int n = 0; n <= nm; ++n) out << ",p" << n;
  out << '\n';
  if (header_only) return;
  for (const auto& s : snapshots) {
    out << format_g17(s.time);
    const auto pn = photon_distribution(s);
    for (double p : pn) out << ',' << format_g17(p);
    out << '\n';
  }
}

void write_ln_csv(const std::string& path, const std::vector<FockState>& snapshots,
                  double floor, bool header_only) {
  auto out = open_out(path);
  const int nm = snapshots.empty() ? 0 : snapshots.front().n_max();
  out << "t";
  for (int n = 0; n <= nm; ++n) out << ",l" << n;
  out << '\n';
  if (header_only) return;
  for (const auto& s : snapshots) {
    out << format_g17(s.time);
    const auto ln = lds_measure(s, floor);
    for (double l : ln) out << ',' << (std::isnan(l) ? "nan" : format_g17(l));
    out << '\n';
  }
}

void write_branch_csv(const std::string& path, const BranchTrajectory& traj,
                      const SystemParams& params) {
  auto out = open_out(path);
  out << "t,re_z,im_z,abs2_z,lambda,energy_residual\n";
  if (traj.z.empty()) return;
  const double s = branch_sign(traj.branch);
  const double e0 = params.delta * std::norm(traj.z.front()) +
                    s * std::abs(params.g * traj.z.front() - traj.f);
  for (std::size_t i = 0; i < traj.z.size(); ++i) {
    const cplx z = traj.z[i];
    double lambda = std::numeric_limits<double>::quiet_NaN();
    try {
      lambda = lambda_of_z(z, traj.f, params, traj.branch);
    } catch (const DegeneratePointError&) {
    }
    const double e = params.delta * std::norm(z) + s * std::abs(params.g * z - traj.f);
    out << format_g17(traj.times[i]) << ',' << format_g17(z.real()) << ','
        << format_g17(z.imag()) << ',' << format_g17(std::norm(z)) << ','
        << (std::isnan(lambda) ? "nan" : format_g17(lambda)) << ','
        << format_g17(e - e0) << '\n';
  }
}

void write_wigner_csv(const std::string& path, const WignerGrid& grid) {
  auto out = open_out(path);
  out << "re,im,w\n";
  for (std::size_t j = 0; j < grid.im_axis.size(); ++j) {
    for (std::size_t i = 0; i < grid.re_axis.size(); ++i) {
      out << format_g17(grid.re_axis[i]) << ',' << format_g17(grid.im_axis[j])
          << ',' << format_g17(grid.values[j * grid.re_axis.size() + i]) << '\n';
    }
  }
}

void write_spectrum_csv(const std::string& path, const Spectrum& spec) {
  auto out = open_out(path);
  out << "freq,magnitude\n";
  for (std::size_t k = 0; k < spec.freqs.size(); ++k) {
    out << format_g17(spec.freqs[k]) << ',' << format_g17(spec.magnitudes[k])
        << '\n';
  }
}

void write_packets_jsonl(const std::string& path,
                         const std::vector<PacketObservation>& observations) {
  auto out = open_out(path);
  for (const auto& obs : observations) {
    out << "{\"t\":" << format_g17(obs.t) << ",\"count\":" << obs.packets.size()
        << ",\"packets\":[";
    for (std::size_t i = 0; i < obs.packets.size(); ++i) {
      const Packet& p = obs.packets[i];
      if (i) out << ',';
      out << "{\"center\":" << format_g17(p.center)
          << ",\"mass\":" << format_g17(p.mass) << ",\"lo\":" << p.lo
          << ",\"hi\":" << p.hi << ",\"height\":" << format_g17(p.height) << '}';
    }
    out << "]}\n";
  }
}

void write_protocol_file(const std::string& path, const DriveProtocol& protocol) {
  auto out = open_out(path);
  out << "# tau f\n";
  for (const auto& s : protocol.steps()) {
    out << format_g17(s.tau) << ' ' << format_g17(s.f) << '\n';
  }
}

DriveProtocol read_protocol_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open protocol file '" + path + "'");
  std::vector<DriveStep> steps;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double tau, f;
    if (row >> tau >> f) {
      std::string rest;
      if (row >> rest) {
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": expected 'tau f' per line");
      }
      steps.push_back({tau, f});
    } else {
      std::string rest;
      std::istringstream check(line);
      if (check >> rest) {
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": expected 'tau f' per line");
      }
    }
  }
  if (steps.empty()) throw ConfigError("protocol file '" + path + "' is empty");
  try {
    return DriveProtocol(std::move(steps));
  } catch (const std::invalid_argument& err) {
    throw ConfigError("protocol file '" + path + "': " + err.what());
  }
}

ObservablesData read_observables_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open observables file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty observables file");
  if (line.rfind("t,norm,energy,mean_n,lds_inversion", 0) != 0) {
    throw ConfigError("unexpected observables header: " + line);
  }
  ObservablesData data;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream row(line);
    double t, nrm, e, mn, li;
    if (!(row >> t >> nrm >> e >> mn >> li)) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": malformed row");
    }
    data.t.push_back(t);
    data.norm.push_back(nrm);
    data.energy.push_back(e);
    data.mean_n.push_back(mn);
    data.lds_inversion.push_back(li);
  }
  return data;
}

}  // namespace jcp
