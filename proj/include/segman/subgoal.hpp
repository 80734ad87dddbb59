#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "segman/rrt.hpp"

namespace segman {

// Pure state machine over waypoint indices: binary back-off in narrow
// passages, stride doubling after theta consecutive successes.
struct SelectorState {
  int p_i = 0;
  int step_i = 1;
  int step_max = 1;
  int p_prev = 0;
  int beta = 0;
  int theta = 2;
};

enum class Verdict { Continue, Done, Exhausted };

SelectorState selector_init(int n_waypoints, int theta);

// Feed the feasibility of the hop to waypoint state.p_i; returns the updated
// state and whether the selection is finished.
std::pair<SelectorState, Verdict> selector_step(const SelectorState& state, bool feasible);

// Attempts the hop to a waypoint index; returns true on success. The solver
// owns the episode state and must only advance it on success.
using HopSolver = std::function<bool(int waypoint_index)>;

using SelectorTrace = std::function<void(const SelectorState&, bool feasible, Verdict)>;

// Runs the selector over a waypoint sequence; on success returns the strictly
// increasing accepted indices (last one = n_waypoints - 1).
std::optional<std::vector<int>> adaptive_place(int n_waypoints, const HopSolver& solver, int theta,
                                               const SelectorTrace& trace = nullptr);

struct RefinementOutcome {
  bool success = false;
  int refinements_used = 0;
  int retries_used = 0;
  std::vector<int> accepted;  // indices into the final path
  Path final_path;
};

// Factory rebinding the hop solver to a (possibly resampled) path; it must
// reset the episode to its start state each time it is called.
using HopSolverFactory = std::function<HopSolver(const Path&)>;
// Produces a fresh auxiliary path (new planner seed); nullopt when none found.
using PathRegenerator = std::function<std::optional<Path>(int retry)>;

// adaptive_place with granularity refinement: halve the resolution up to
// max_refinements times, then request fresh paths up to max_retries times.
RefinementOutcome place_with_refinement(const Path& aux_path, const HopSolverFactory& make_solver,
                                        int theta, int max_refinements, int max_retries,
                                        const PathRegenerator& regen = nullptr);

}  // namespace segman
