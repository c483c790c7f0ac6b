#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jcpackets/model.hpp"
#include "jcpackets/protocol.hpp"

namespace jcp {

// Flat key-value run description with [section] headers. Unknown sections or
// keys are rejected.
struct RunConfig {
  double g = 1.0;
  double delta = 0.0;

  std::vector<DriveStep> steps;  // inline drive table, "step = tau f" lines
  std::optional<std::string> protocol_file;

  InitialState initial = InitialState::ground;
  double t_end = -1.0;
  double dt = 0.0;    // 0 -> auto
  int n_max = 0;      // 0 -> auto
  double sample_interval = 0.02;
  double snapshot_interval = 0.1;
  double tail_threshold = 1e-10;
  double norm_tolerance = 1e-6;

  std::string out_dir = ".";

  std::vector<double> wigner_times;
  double wigner_half_width = 0.0;  // 0 -> auto from turning points
  int wigner_points = 101;
  bool spectrum = false;
  std::vector<double> packet_times;

  DriveProtocol make_protocol() const;
  SystemParams make_params() const { return SystemParams(g, delta); }
};

RunConfig parse_run_config(const std::string& path);

struct SynthConfig {
  double g = 1.0;
  double delta = 0.0;
  SynthesisTarget target;
  ProtocolOptions options;
  std::string out_dir = ".";

  SystemParams make_params() const { return SystemParams(g, delta); }
};

SynthConfig parse_synth_config(const std::string& path);

}  // namespace jcp
