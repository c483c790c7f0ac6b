#pragma once

#include <string>
#include <vector>

#include "jcpackets/analysis.hpp"
#include "jcpackets/model.hpp"
#include "jcpackets/solver.hpp"
#include "jcpackets/variational.hpp"

namespace jcp {

struct ProtocolOptions {
  double prune_threshold = 1e-3;  // absolute branch weight below which a child folds into its sibling
  double guard_radius = 0.5;      // reject split points with |z - f_new/g| below this
  double bisect_tolerance = 1e-4; // |S - target| at the refined step time
  double structure_tol = 1e-6;    // S below this counts as structure-preserving
  VariationalOptions variational;
};

struct BranchNode {
  int id = -1;
  int parent = -1;  // -1 for roots
  Branch branch = Branch::one;
  double weight = 0.0;
  double t_start = 0.0;
  cplx z_start = 0.0;
  std::string label;  // "2", "2,1", ... packet genealogy
  BranchTrajectory segment;
  bool is_leaf = true;
};

// Bookkeeping of the variational packets under a protocol in construction:
// every drive step splits each leaf into a branch-1 and a branch-2 child
// weighted by the eigenvector overlaps at the leaf's current z.
class BranchTree {
 public:
  BranchTree(const SystemParams& params, double f0, InitialState initial,
             const ProtocolOptions& options = {});

  const SystemParams& params() const { return params_; }
  DriveProtocol protocol() const { return DriveProtocol(steps_); }
  const std::vector<BranchNode>& nodes() const { return nodes_; }
  std::vector<int> leaf_ids() const;
  double current_time() const { return current_time_; }
  double current_f() const { return steps_.back().f; }

  // Advance every leaf to t_step and split it under the new drive level.
  void apply_step(double t_step, double f_new);
  // Advance leaf segments to t_end without splitting.
  void extend_to(double t_end);

  double max_abs_z() const;
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  int advance_leaf(int id, double t_to);

  SystemParams params_;
  ProtocolOptions options_;
  std::vector<DriveStep> steps_;
  std::vector<BranchNode> nodes_;
  std::vector<std::string> warnings_;
  double current_time_ = 0.0;
};

// A packet in flight: eigenbranch, coherent amplitude and the time it is at.
struct LeafState {
  Branch branch = Branch::two;
  cplx z = 0.0;
  double t = 0.0;
};

struct StepTimeResult {
  double tau = 0.0;
  cplx z_at_tau = 0.0;
  double S_at_tau = 0.0;
};

// First time after leaf.t at which the splitting overlap S(f0 -> f1) along
// the leaf trajectory reaches target_S, bisection-refined, skipping
// solutions inside the turning-point guard band. window = 0 searches 1.5
// estimated oscillation periods. Throws NotAttainedError / GuardBandError.
StepTimeResult solve_step_time(const LeafState& leaf, double f0, double f1,
                               double target_S, double window,
                               const SystemParams& params,
                               const ProtocolOptions& options = {});

// First real-axis crossing of the leaf trajectory at which switching
// f_old -> f_new preserves the packet structure (S below structure_tol and
// outside the guard band).
StepTimeResult find_structure_preserving_return(const LeafState& leaf,
                                                double f_old, double f_new,
                                                double window,
                                                const SystemParams& params,
                                                const ProtocolOptions& options = {});

enum class Strategy { direct_split, class_d_return };

Strategy strategy_from_name(const std::string& name);
std::string to_string(Strategy s);

struct SynthesisTarget {
  Strategy strategy = Strategy::direct_split;
  int n_packets = 2;              // total packet count, branch-1 packet included
  std::vector<double> weights;    // n_packets - 1 relative masses in the split sector
  std::vector<double> f_levels;
  double window = 0.0;            // per-step search window, 0 auto
};

// Plans the step times that split the branch-2 packet into the requested
// number of pieces. direct_split: one new level per split, timed on the
// running leaf. class_d_return: B->D split steps with structure-preserving
// D->B returns in between.
DriveProtocol synthesize(const SynthesisTarget& target, const SystemParams& params,
                         const ProtocolOptions& options = {});

enum class ValidationMode { reduced, exact };

struct LeafReport {
  std::string label;
  int branch = 0;
  double weight = 0.0;
  cplx z_end = 0.0;
};

struct PacketObservation {
  double t = 0.0;
  std::vector<Packet> packets;
};

struct ValidationReport {
  std::vector<LeafReport> leaves;                 // reduced mode
  std::vector<BranchTrajectory> leaf_trajectories;  // parallel to leaves
  std::vector<PacketObservation> observations;    // exact mode
  std::vector<std::string> warnings;
};

struct ValidateOptions {
  InitialState initial = InitialState::ground;
  double t_end = 0.0;                // 0 -> one period past the last step
  std::vector<double> report_times;  // exact-mode detection times
  int n_max = 0;                     // 0 auto
  EvolveOptions evolve;
  DetectOptions detect;
  ProtocolOptions protocol;
};

ValidationReport validate_protocol(const DriveProtocol& protocol,
                                   const SystemParams& params,
                                   ValidationMode mode,
                                   const ValidateOptions& options = {});

// Truncation suggestion for stepped protocols, from a reduced-model replay.
int suggested_n_max(const SystemParams& params, const DriveProtocol& protocol,
                    double t_end);

}  // namespace jcp
