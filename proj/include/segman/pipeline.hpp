#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "segman/search.hpp"
#include "segman/subgoal.hpp"

namespace segman {

struct SolverParams {
  uint64_t seed = 0;
  double time_budget = 1000.0;  // seconds; runs abort past this
  int grasp_trials = 10;
  // Subgoal selection.
  int theta = 2;
  int max_refinements = 3;
  int max_retries = 3;
  // Forward search.
  double alpha = 1.0;
  double gamma = 0.95;
  int y = 3;
  int depth_threshold = 5;
  int k_subgoals = 8;
  int node_budget = 500;
  int max_subset_size = 4;
  double tau = -1;
  // Geometry / kinematics overrides (<= 0 means take from scene).
  double clearance = 0.02;
  double vmax = -1;
  double dt = -1;
  int rrt_budget = 20000;
  int outer_cycles = 5;
};

struct SolveStats {
  double wall_time_s = 0;
  int pnp_count = 0;
  int nodes_expanded = 0;
  int refinements_used = 0;
  uint64_t seed = 0;
  bool success = false;
  std::vector<std::string> relocated;       // ids of objects moved by the search
  std::vector<std::string> solved_subset;   // o_set of the last solving node
  std::string failure_reason;
};

struct Solution {
  Plan plan;
  SolveStats stats;
};

// One blocked leg of the pipeline, carrying the query the search must open.
struct Blocked {
  PathQuery query;
  bool hard = false;  // blocked by walls alone; relocation cannot help
};

struct PickOutcome {
  PlanSegment segment;       // agent approach ending in contact
  Configuration attached;    // configuration with the attachment set
};

// Grasp + Bi-RRT approach for one object; Blocked carries the infeasible
// reach query when movable objects could be in the way.
std::variant<PickOutcome, Blocked> plan_pick(const Configuration& config, const Scene& scene,
                                             int object, const SolverParams& params,
                                             uint64_t seed);

// Auxiliary path: the goal object planned as the agent, agent removed.
std::variant<Path, Blocked> plan_aux(const Configuration& config, const Scene& scene,
                                     const SolverParams& params, uint64_t seed);

Solution solve_task(const Scene& scene, const SolverParams& params);

std::string solution_to_json(const Scene& scene, const Solution& sol);

}  // namespace segman
