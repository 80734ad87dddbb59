#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "segman/rrt.hpp"
#include "segman/scene.hpp"

namespace segman {

enum class ResidualKind { Smoothness, Touch, Stable, PositionDiff, StableOn, Collision };
enum class ResidualMode { Cost, Eq, Ineq };
enum class BodyRef { Agent, Carried };  // carried = attached object at agent + offset

// One residual block of the k-order problem. Evaluates to a small vector;
// Jacobians are analytic (checked against finite differences in tests).
struct Residual {
  ResidualKind kind = ResidualKind::Stable;
  ResidualMode mode = ResidualMode::Eq;
  BodyRef body = BodyRef::Agent;
  int t = 0;    // primary timestep
  int t2 = -1;  // PositionDiff between two timesteps when >= 0
  Vec2 target;
  double bound = 0.0;   // PositionDiff
  double margin = 0.0;  // Collision
  double weight = 1.0;  // soft / cost weight
  Shape obstacle;       // Collision
  Rect region;          // StableOn placement rectangle
};

// Decision variables are the agent position per timestep (0..T). A carried
// object, when present, moves rigidly at agent + offset.
struct TrajectoryProblem {
  int T = 0;
  int order = 2;
  double agent_radius = 0.0;
  std::optional<Vec2> carried_offset;  // object center - agent center
  double carried_side = 0.0;
  std::vector<Residual> costs;
  std::vector<Residual> eq;
  std::vector<Residual> ineq;

  Vec2 body_pos(BodyRef b, Vec2 agent) const {
    return b == BodyRef::Agent ? agent : agent + *carried_offset;
  }
};

struct ResidualEval {
  std::vector<double> values;               // stacked residual vector
  double max_eq_residual = 0.0;             // max |h|
  double max_ineq_violation = 0.0;          // max(0, g)
  double cost = 0.0;                        // sum of squared cost residuals
};

struct SolveResult {
  std::vector<Vec2> trajectory;  // agent positions, T+1 entries
  bool converged = false;
  double max_eq_residual = 0.0;
  double max_ineq_violation = 0.0;
  int iterations = 0;
};

// Evaluate one residual at a trajectory; jac maps timestep -> d(value)/d(x_t),
// one gradient row per output component. Storage is inline: a residual block
// has at most 4 components and 6 jacobian rows.
struct JacRow {
  int comp = 0;
  int t = 0;
  Vec2 g;
};
struct ResidualValue {
  double v[4] = {0, 0, 0, 0};
  int nv = 0;
  JacRow jac[6];
  int nj = 0;

  void set(std::initializer_list<double> vals) {
    nv = 0;
    for (double x : vals) v[nv++] = x;
  }
  void add_jac(int comp, int t, Vec2 g) { jac[nj++] = {comp, t, g}; }
};
ResidualValue eval_residual(const Residual& r, const TrajectoryProblem& p,
                            const std::vector<Vec2>& traj);

ResidualEval residuals(const std::vector<Vec2>& traj, const TrajectoryProblem& p);

// Augmented-Lagrangian Gauss-Newton. Deterministic in (problem, init).
SolveResult solve(const TrajectoryProblem& p, const std::vector<Vec2>& init);

// ---- Planner-facing helpers built on the optimizer ----

struct TrajoptParams {
  double clearance = 0.02;   // collision margin inside the optimizer
  double vmax = 1.0;
  double dt = 0.1;
  int grasp_samples = 10;
};

// Contact configuration: agent touching the object's boundary, collision-free
// otherwise. Different seeds explore different contact points.
std::optional<Configuration> solve_grasp(const Configuration& config, const Scene& scene,
                                         int object, uint64_t seed,
                                         const TrajoptParams& params = {});

// One optimized transport hop of an attached (agent, object) pair; the start
// configuration must carry the attachment. Returns the agent trajectory as
// full configurations, or nullopt if the hop does not converge.
std::optional<std::vector<Configuration>> solve_transport_hop(
    const Configuration& start, const Scene& scene, Vec2 object_target, bool soft,
    const TrajoptParams& params = {});

struct PickPlaceResult {
  PlanSegment pick;
  PlanSegment place;
  Configuration end;  // attachment released
};

// Full pick-and-place of one object to `target`: grasp, Bi-RRT approach,
// optimized transport. soft=true lets the final object position settle at the
// nearest feasible point around the target.
std::optional<PickPlaceResult> solve_pick_place(const Configuration& config, const Scene& scene,
                                                int object, Vec2 target, bool soft, uint64_t seed,
                                                const TrajoptParams& params = {});

}  // namespace segman
