#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "jcpackets/errors.hpp"
#include "jcpackets/protocol.hpp"

using namespace jcp;

namespace {
const SystemParams kP01(1.0, 0.1);

double leaf_weight_sum(const BranchTree& tree) {
  double s = 0.0;
  for (int id : tree.leaf_ids()) s += tree.nodes()[id].weight;
  return s;
}

}  // namespace

TEST_CASE("a D-to-D step leaves the packet structure alone") {
  BranchTree tree(kP01, 15.0, InitialState::ground);
  tree.apply_step(15.0, 25.0);
  // Both baseline packets keep essentially all of their mass; the split-off
  // remainders stay below the percent level and never show up in P_n.
  int visible = 0;
  double micro = 0.0;
  for (int id : tree.leaf_ids()) {
    const double w = tree.nodes()[id].weight;
    if (w >= 0.01) {
      ++visible;
      CHECK(w == doctest::Approx(0.5).epsilon(0.02));
    } else {
      micro += w;
    }
  }
  CHECK(visible == 2);
  CHECK(micro < 0.01);
  CHECK(leaf_weight_sum(tree) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a B-to-D step splits the branch-two packet visibly") {
  BranchTree tree(kP01, 5.0, InitialState::lds_minus);
  tree.apply_step(11.0, 15.0);
  const auto leaves = tree.leaf_ids();
  REQUIRE(leaves.size() == 2);
  // the generated branch-one packet carries the overlap S evaluated at the
  // split point, the remainder 1 - S
  const double S = overlap_S(5.0, 15.0,
                             tree.nodes()[leaves[0]].z_start, kP01);
  double w1 = 0.0, w2 = 0.0;
  for (int id : leaves) {
    if (tree.nodes()[id].branch == Branch::one) w1 = tree.nodes()[id].weight;
    if (tree.nodes()[id].branch == Branch::two) w2 = tree.nodes()[id].weight;
  }
  CHECK(w1 == doctest::Approx(S).epsilon(1e-9));
  CHECK(w2 == doctest::Approx(1.0 - S).epsilon(1e-9));
  CHECK(w1 > 0.3);  // visibly split at g tau = 11
  CHECK(w1 < 0.7);
}

TEST_CASE("from the ground state a single step leaves three visible packets") {
  BranchTree tree(kP01, 5.0, InitialState::ground);
  tree.apply_step(11.0, 15.0);
  // Three packets carry real mass; the branch-one leaf sheds only a small
  // remainder (a few percent) that stays invisible in P_n.
  int visible = 0;
  double phi1_sector = 0.0;
  for (int id : tree.leaf_ids()) {
    const auto& node = tree.nodes()[id];
    if (node.weight >= 0.03) ++visible;
    if (node.label.rfind("1", 0) == 0) phi1_sector += node.weight;
  }
  CHECK(visible == 3);
  CHECK(phi1_sector == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(leaf_weight_sum(tree) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("an identity step changes nothing after pruning") {
  BranchTree tree(kP01, 5.0, InitialState::ground);
  tree.apply_step(7.0, 5.0);
  const auto leaves = tree.leaf_ids();
  REQUIRE(leaves.size() == 2);
  std::vector<std::pair<int, double>> got;
  for (int id : leaves) {
    got.emplace_back(branch_index(tree.nodes()[id].branch), tree.nodes()[id].weight);
  }
  std::sort(got.begin(), got.end());
  CHECK(got[0].first == 1);
  CHECK(got[0].second == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(got[1].first == 2);
  CHECK(got[1].second == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("weights keep summing to one through repeated steps") {
  BranchTree tree(kP01, 5.0, InitialState::ground);
  double t = 0.0;
  for (double f_new : {15.0, 5.0, 12.0, 8.0}) {
    t += 7.3;
    tree.apply_step(t, f_new);
    CHECK(leaf_weight_sum(tree) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("structure is preserved when both levels sit on the same side") {
  // on the real axis with both f/g values to the right, S vanishes
  const double S = overlap_S(5.0, 15.0, cplx(2.0, 0.0), kP01);
  CHECK(S <= 1e-6);
  CHECK(S == doctest::Approx(0.0));
}

TEST_CASE("solve_step_time reproduces the one-third split time") {
  const LeafState leaf{Branch::two, 0.0, 0.0};
  const StepTimeResult r = solve_step_time(leaf, 5.0, 15.0, 1.0 / 3.0, 0.0, kP01);
  CHECK(std::abs(r.tau - 10.5) < 0.3);
  CHECK(std::abs(r.S_at_tau - 1.0 / 3.0) <= 1e-4);
}

TEST_CASE("the half-overlap contour passes through the published points") {
  const LeafState leaf{Branch::two, 0.0, 0.0};
  const StepTimeResult first = solve_step_time(leaf, 5.0, 15.0, 1.0 / 3.0, 0.0, kP01);

  auto crossings = [&](double f2) {
    BranchTrajectory traj;
    traj.branch = Branch::two;
    traj.times.push_back(first.tau);
    traj.z.push_back(first.z_at_tau);
    traj.phase.push_back(0.0);
    extend_branch(traj, 15.0, kP01, 60.0);
    std::vector<double> out;
    double prev = overlap_S(15.0, f2, traj.z.front(), kP01);
    for (std::size_t i = 1; i < traj.z.size(); ++i) {
      const double cur = overlap_S(15.0, f2, traj.z[i], kP01);
      if ((prev - 0.5) * (cur - 0.5) <= 0.0 && prev != cur) {
        out.push_back(traj.times[i] - first.tau);
      }
      prev = cur;
    }
    return out;
  };

  auto has_near = [](const std::vector<double>& v, double want) {
    return std::any_of(v.begin(), v.end(),
                       [&](double x) { return std::abs(x - want) < 0.5; });
  };
  CHECK(has_near(crossings(5.4), 23.0));
  CHECK(has_near(crossings(4.5), 52.0));
}

TEST_CASE("unreachable targets raise NotAttained") {
  // under constant class-D drive the trajectory never encloses a higher
  // level, so the overlap stays small
  const LeafState leaf{Branch::two, 0.0, 0.0};
  CHECK_THROWS_AS(solve_step_time(leaf, 15.0, 25.0, 1.0 / 3.0, 0.0, kP01),
                  NotAttainedError);
}

TEST_CASE("guard band rejections raise GuardBand") {
  const LeafState leaf{Branch::two, 0.0, 0.0};
  ProtocolOptions opts;
  opts.guard_radius = 30.0;  // swallow the whole phase-space region
  CHECK_THROWS_AS(solve_step_time(leaf, 5.0, 15.0, 1.0 / 3.0, 0.0, kP01, opts),
                  GuardBandError);
}

TEST_CASE("class-D-return synthesis lands on the published step times") {
  SynthesisTarget target;
  target.strategy = Strategy::class_d_return;
  target.n_packets = 4;
  target.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  target.f_levels = {5.0, 15.0, 5.0, 15.0};
  const DriveProtocol proto = synthesize(target, kP01);
  REQUIRE(proto.size() == 4);
  CHECK(std::abs(proto.steps()[1].tau - 10.5) < 0.5);
  CHECK(std::abs(proto.steps()[2].tau - 49.4) < 0.5);
  CHECK(std::abs(proto.steps()[3].tau - 58.2) < 0.5);
  CHECK(proto.steps()[1].f == 15.0);
  CHECK(proto.steps()[2].f == 5.0);
  CHECK(proto.steps()[3].f == 15.0);

  SUBCASE("deterministic replay") {
    const DriveProtocol again = synthesize(target, kP01);
    CHECK(again == proto);
  }
}

TEST_CASE("the higher-f variant matches too") {
  SynthesisTarget target;
  target.strategy = Strategy::class_d_return;
  target.n_packets = 4;
  target.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  target.f_levels = {8.0, 15.0, 8.0, 15.0};
  const DriveProtocol proto = synthesize(target, kP01);
  REQUIRE(proto.size() == 4);
  CHECK(std::abs(proto.steps()[1].tau - 16.1) < 0.5);
  CHECK(std::abs(proto.steps()[2].tau - 46.5) < 0.5);
  CHECK(std::abs(proto.steps()[3].tau - 63.7) < 0.5);
}

TEST_CASE("two packets need no steps at all") {
  SynthesisTarget target;
  target.strategy = Strategy::direct_split;
  target.n_packets = 2;
  target.weights = {1.0};
  target.f_levels = {5.0};
  const DriveProtocol proto = synthesize(target, kP01);
  CHECK(proto.size() == 1);
  CHECK(proto.steps()[0].f == 5.0);
}

TEST_CASE("direct-split plans one step per extra packet") {
  SynthesisTarget target;
  target.strategy = Strategy::direct_split;
  target.n_packets = 3;
  target.weights = {1.0 / 3.0, 2.0 / 3.0};
  target.f_levels = {5.0, 15.0};
  const DriveProtocol proto = synthesize(target, kP01);
  REQUIRE(proto.size() == 2);
  CHECK(std::abs(proto.steps()[1].tau - 10.5) < 0.3);
}

TEST_CASE("synthesis validates its inputs") {
  SynthesisTarget target;
  target.strategy = Strategy::class_d_return;
  target.n_packets = 4;
  target.weights = {0.5, 0.5};  // wrong count
  target.f_levels = {5.0, 15.0, 5.0, 15.0};
  CHECK_THROWS_AS(synthesize(target, kP01), std::invalid_argument);

  target.weights = {0.4, 0.3, 0.3};
  target.f_levels = {15.0, 5.0, 15.0, 5.0};  // class order violated
  CHECK_THROWS_AS(synthesize(target, kP01), std::invalid_argument);

  target.f_levels = {5.0, 15.0};  // too few levels for the strategy
  CHECK_THROWS_AS(synthesize(target, kP01), std::invalid_argument);

  target.strategy = Strategy::direct_split;
  target.n_packets = 3;
  target.weights = {0.5, 0.5};
  target.f_levels = {1.0, 15.0};  // first level is class A at delta = 0.1
  CHECK_THROWS_AS(synthesize(target, kP01), std::invalid_argument);
}

TEST_CASE("infeasible geometry is diagnosed") {
  SynthesisTarget target;
  target.strategy = Strategy::direct_split;
  target.n_packets = 3;
  target.weights = {1.0 / 3.0, 2.0 / 3.0};
  target.f_levels = {15.0, 25.0};  // trajectory never encloses f0/g = 15
  CHECK_THROWS_AS(synthesize(target, kP01), InfeasibleGeometryError);
}

TEST_CASE("reduced validation reports the sector weights") {
  SynthesisTarget target;
  target.strategy = Strategy::class_d_return;
  target.n_packets = 4;
  target.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  target.f_levels = {5.0, 15.0, 5.0, 15.0};
  const DriveProtocol proto = synthesize(target, kP01);

  ValidateOptions opts;
  opts.t_end = 70.0;
  const ValidationReport report =
      validate_protocol(proto, kP01, ValidationMode::reduced, opts);

  double phi1_total = 0.0;
  std::vector<double> sector;
  for (const auto& leaf : report.leaves) {
    if (leaf.label.rfind("1", 0) == 0) {
      phi1_total += leaf.weight;
    } else if (leaf.weight > 0.01) {
      sector.push_back(leaf.weight);
    }
  }
  CHECK(phi1_total == doctest::Approx(0.5).epsilon(1e-6));
  REQUIRE(sector.size() == 3);
  for (double w : sector) {
    CHECK(w == doctest::Approx(0.5 / 3.0).epsilon(0.08));
  }
}

TEST_CASE("exact validation sees two packets under constant class-D drive") {
  // Once the two branch frequencies dephase, the distribution carries two
  // half-weight packets and no step-free run ever adds more.
  ValidateOptions opts;
  opts.t_end = 42.0;
  opts.report_times = {36.0, 42.0};
  opts.n_max = 300;
  opts.evolve.tail_threshold = 1e-7;
  const ValidationReport rep = validate_protocol(
      DriveProtocol::constant(15.0), kP01, ValidationMode::exact, opts);
  REQUIRE(rep.observations.size() == 2);
  for (const auto& obs : rep.observations) {
    REQUIRE(obs.packets.size() == 2);
    CHECK(obs.packets[0].mass == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(obs.packets[1].mass == doctest::Approx(0.5).epsilon(1e-3));
  }
}

TEST_CASE("protocol-based truncation suggestion covers stepped runs") {
  const DriveProtocol proto({{0.0, 5.0}, {11.0, 15.0}});
  const int n = suggested_n_max(kP01, proto, 40.0);
  // the generated packet swings out to |z| ~ 15, so well past the
  // constant-drive suggestion
  CHECK(n >= 280);
  CHECK(n <= 450);
}
