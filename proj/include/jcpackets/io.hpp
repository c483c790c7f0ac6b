#pragma once

#include <string>
#include <vector>

#include "jcpackets/analysis.hpp"
#include "jcpackets/model.hpp"
#include "jcpackets/protocol.hpp"
#include "jcpackets/solver.hpp"
#include "jcpackets/variational.hpp"

namespace jcp {

// All floats go out with 17 significant digits so files round-trip exactly.
std::string format_g17(double v);

void write_observables_csv(const std::string& path, const Trajectory& traj,
                           bool header_only = false);
void write_pn_csv(const std::string& path, const std::vector<FockState>& snapshots,
                  bool header_only = false);
void write_ln_csv(const std::string& path, const std::vector<FockState>& snapshots,
                  double floor = 1e-12, bool header_only = false);
void write_branch_csv(const std::string& path, const BranchTrajectory& traj,
                      const SystemParams& params);
void write_wigner_csv(const std::string& path, const WignerGrid& grid);
void write_spectrum_csv(const std::string& path, const Spectrum& spec);
void write_packets_jsonl(const std::string& path,
                         const std::vector<PacketObservation>& observations);

// Protocol files carry one "tau f" pair per line; '#' starts a comment.
void write_protocol_file(const std::string& path, const DriveProtocol& protocol);
DriveProtocol read_protocol_file(const std::string& path);

struct ObservablesData {
  std::vector<double> t, norm, energy, mean_n, lds_inversion;
};

ObservablesData read_observables_csv(const std::string& path);

}  // namespace jcp
